use nalgebra::DMatrix;
use num_complex::Complex64;

use super::layout::{digits_of, NetworkLayout};
use super::operator::OperatorMatrix;
use crate::error::{Error, Result};
use crate::scalar::{cone, czero, Cplx, Real};

pub const NORM_TOL: f64 = 1e-8;
pub const HERMITIAN_TOL: f64 = 1e-10;
pub const POSITIVITY_TOL: f64 = 1e-6;

/// Dense square complex matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseMatrix<T: Real> {
    n: usize,
    data: Vec<Cplx<T>>,
}

impl<T: Real> DenseMatrix<T> {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![czero(); n * n] }
    }

    pub fn from_row_major(n: usize, data: Vec<Cplx<T>>) -> Result<Self> {
        if data.len() != n * n {
            return Err(Error::DimensionMismatch { left: n * n, right: data.len() });
        }
        Ok(Self { n, data })
    }

    /// `|psi><psi|`.
    pub fn outer(psi: &[Cplx<T>]) -> Self {
        let n = psi.len();
        let mut data = Vec::with_capacity(n * n);
        for a in psi {
            for b in psi {
                data.push(*a * b.conj());
            }
        }
        Self { n, data }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn data(&self) -> &[Cplx<T>] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [Cplx<T>] {
        &mut self.data
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> Cplx<T> {
        self.data[r * self.n + c]
    }

    pub fn trace(&self) -> Cplx<T> {
        (0..self.n).map(|i| self.get(i, i)).fold(czero(), |a, b| a + b)
    }

    /// Largest `|rho[i,j] - conj(rho[j,i])|`.
    pub fn hermiticity_error(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.n {
            for j in i..self.n {
                let d = (self.get(i, j) - self.get(j, i).conj()).norm().to_f64_lossy();
                worst = worst.max(d);
            }
        }
        worst
    }

    /// `Tr(rho^2)` (real part).
    pub fn purity(&self) -> f64 {
        let mut acc = 0.0;
        for i in 0..self.n {
            for j in 0..self.n {
                acc += (self.get(i, j) * self.get(j, i)).re.to_f64_lossy();
            }
        }
        acc
    }

    /// Smallest eigenvalue of the Hermitian part.
    pub fn min_eigenvalue(&self) -> f64 {
        let n = self.n;
        let m = DMatrix::<Complex64>::from_fn(n, n, |i, j| {
            let a = self.get(i, j);
            let b = self.get(j, i).conj();
            Complex64::new((a.re + b.re).to_f64_lossy() * 0.5, (a.im + b.im).to_f64_lossy() * 0.5)
        });
        m.symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn cast<U: Real>(&self) -> DenseMatrix<U> {
        DenseMatrix {
            n: self.n,
            data: self.data.iter().map(|v| Cplx::new(U::of(v.re.to_f64_lossy()), U::of(v.im.to_f64_lossy()))).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum QuantumState<T: Real> {
    Vector(Vec<Cplx<T>>),
    Density(DenseMatrix<T>),
}

impl<T: Real> QuantumState<T> {
    /// Normalized state vector; rejects inputs whose norm is off by more than 1e-8.
    pub fn vector(amplitudes: Vec<Cplx<T>>) -> Result<Self> {
        let n = vector_norm(&amplitudes);
        if (n - 1.0).abs() > NORM_TOL {
            return Err(Error::Normalization(format!("state vector norm is {n}")));
        }
        Ok(Self::Vector(amplitudes))
    }

    pub fn basis(dim: usize, index: usize) -> Result<Self> {
        if index >= dim {
            return Err(Error::InvalidDimension { dim, reason: "basis index out of range" });
        }
        let mut v = vec![czero(); dim];
        v[index] = cone();
        Ok(Self::Vector(v))
    }

    pub fn density(rho: DenseMatrix<T>) -> Result<Self> {
        let tr = rho.trace();
        if (tr.re.to_f64_lossy() - 1.0).abs() > NORM_TOL || tr.im.to_f64_lossy().abs() > NORM_TOL {
            return Err(Error::Normalization(format!("density trace is {tr}")));
        }
        if rho.hermiticity_error() > HERMITIAN_TOL {
            return Err(Error::Normalization("density matrix is not Hermitian".into()));
        }
        Ok(Self::Density(rho))
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        let mut rho = DenseMatrix::zeros(dim);
        let w = Cplx::new(T::one() / T::of(dim as f64), T::zero());
        for i in 0..dim {
            rho.data[i * dim + i] = w;
        }
        Self::Density(rho)
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::Vector(v) => v.len(),
            Self::Density(m) => m.dim(),
        }
    }

    pub fn is_density(&self) -> bool {
        matches!(self, Self::Density(_))
    }

    pub fn to_density(&self) -> DenseMatrix<T> {
        match self {
            Self::Vector(v) => DenseMatrix::outer(v),
            Self::Density(m) => m.clone(),
        }
    }

    pub fn as_vector(&self) -> Option<&[Cplx<T>]> {
        match self {
            Self::Vector(v) => Some(v),
            Self::Density(_) => None,
        }
    }

    /// `||psi||^2` or `Tr(rho)`.
    pub fn trace(&self) -> f64 {
        match self {
            Self::Vector(v) => vector_norm(v).powi(2),
            Self::Density(m) => m.trace().re.to_f64_lossy(),
        }
    }

    /// Smallest eigenvalue of the state viewed as a density operator (0 for a
    /// pure state of dimension > 1).
    pub fn min_eigenvalue(&self) -> f64 {
        match self {
            Self::Vector(v) if v.len() > 1 => 0.0,
            Self::Vector(v) => vector_norm(v).powi(2),
            Self::Density(m) => m.min_eigenvalue(),
        }
    }

    pub fn hermiticity_error(&self) -> f64 {
        match self {
            Self::Vector(_) => 0.0,
            Self::Density(m) => m.hermiticity_error(),
        }
    }

    pub fn cast<U: Real>(&self) -> QuantumState<U> {
        match self {
            Self::Vector(v) => {
                QuantumState::Vector(v.iter().map(|a| Cplx::new(U::of(a.re.to_f64_lossy()), U::of(a.im.to_f64_lossy()))).collect())
            }
            Self::Density(m) => QuantumState::Density(m.cast()),
        }
    }
}

pub fn vector_norm<T: Real>(v: &[Cplx<T>]) -> f64 {
    v.iter().map(|a| a.norm_sqr().to_f64_lossy()).sum::<f64>().sqrt()
}

/// `<phi|psi>`.
pub fn overlap<T: Real>(phi: &[Cplx<T>], psi: &[Cplx<T>]) -> Result<Cplx<T>> {
    if phi.len() != psi.len() {
        return Err(Error::DimensionMismatch { left: phi.len(), right: psi.len() });
    }
    Ok(phi.iter().zip(psi).fold(czero(), |acc, (a, b)| acc + a.conj() * b))
}

/// `<psi|A|psi>` or `Tr(rho A)`.
pub fn expectation<T: Real>(state: &QuantumState<T>, op: &OperatorMatrix<T>) -> Result<Cplx<T>> {
    if state.dim() != op.dim() {
        return Err(Error::DimensionMismatch { left: state.dim(), right: op.dim() });
    }
    match state {
        QuantumState::Vector(psi) => overlap(psi, &op.apply(psi)?),
        QuantumState::Density(rho) => {
            // Tr(rho A) = sum_{r,c} rho[c,r] A[r,c]
            Ok(op.entries().iter().fold(czero(), |acc, &(r, c, v)| acc + rho.get(c, r) * v))
        }
    }
}

/// Reduced density matrix over the subsystems in `keep` (in layout order).
pub fn partial_trace<T: Real>(state: &QuantumState<T>, keep: &[usize], layout: &NetworkLayout) -> Result<DenseMatrix<T>> {
    match state {
        QuantumState::Density(rho) => partial_trace_dims(rho, keep, layout.dims()),
        QuantumState::Vector(_) => Err(Error::RequiresDensity),
    }
}

struct Split {
    kept_dim: usize,
    traced_dim: usize,
    kept_of: Vec<usize>,
    traced_of: Vec<usize>,
}

fn split_indices(keep: &[usize], dims: &[usize]) -> Result<Split> {
    let mut keep: Vec<usize> = keep.to_vec();
    keep.sort_unstable();
    keep.dedup();
    if keep.iter().any(|&k| k >= dims.len()) {
        return Err(Error::InvalidDimension { dim: dims.len(), reason: "kept subsystem index out of range" });
    }
    let total: usize = dims.iter().product();
    let kept_dims: Vec<usize> = keep.iter().map(|&k| dims[k]).collect();
    let traced: Vec<usize> = (0..dims.len()).filter(|i| !keep.contains(i)).collect();
    let traced_dims: Vec<usize> = traced.iter().map(|&k| dims[k]).collect();
    let mut kept_of = Vec::with_capacity(total);
    let mut traced_of = Vec::with_capacity(total);
    for idx in 0..total {
        let d = digits_of(idx, dims);
        kept_of.push(keep.iter().zip(&kept_dims).fold(0, |acc, (&k, &dk)| acc * dk + d[k]));
        traced_of.push(traced.iter().zip(&traced_dims).fold(0, |acc, (&k, &dk)| acc * dk + d[k]));
    }
    Ok(Split { kept_dim: kept_dims.iter().product(), traced_dim: traced_dims.iter().product(), kept_of, traced_of })
}

pub fn partial_trace_dims<T: Real>(rho: &DenseMatrix<T>, keep: &[usize], dims: &[usize]) -> Result<DenseMatrix<T>> {
    let total: usize = dims.iter().product();
    if total != rho.dim() {
        return Err(Error::DimensionMismatch { left: total, right: rho.dim() });
    }
    let split = split_indices(keep, dims)?;
    let mut groups: Vec<Vec<usize>> = vec![Vec::new(); split.traced_dim];
    for idx in 0..total {
        groups[split.traced_of[idx]].push(idx);
    }
    let kd = split.kept_dim;
    let mut out = DenseMatrix::zeros(kd);
    for group in &groups {
        for &i in group {
            let ki = split.kept_of[i];
            for &j in group {
                out.data[ki * kd + split.kept_of[j]] += rho.get(i, j);
            }
        }
    }
    Ok(out)
}

/// Reduced density matrix of a pure state without forming `|psi><psi|`.
pub fn reduce_pure<T: Real>(psi: &[Cplx<T>], keep: &[usize], dims: &[usize]) -> Result<DenseMatrix<T>> {
    let total: usize = dims.iter().product();
    if total != psi.len() {
        return Err(Error::DimensionMismatch { left: total, right: psi.len() });
    }
    let split = split_indices(keep, dims)?;
    let kd = split.kept_dim;
    // psi reshaped as (kept, traced); reduced = M M^dagger
    let mut m = vec![czero::<T>(); kd * split.traced_dim];
    for idx in 0..total {
        m[split.kept_of[idx] * split.traced_dim + split.traced_of[idx]] = psi[idx];
    }
    let mut out = DenseMatrix::zeros(kd);
    for a in 0..kd {
        for b in 0..kd {
            let ra = &m[a * split.traced_dim..(a + 1) * split.traced_dim];
            let rb = &m[b * split.traced_dim..(b + 1) * split.traced_dim];
            out.data[a * kd + b] = ra.iter().zip(rb).fold(czero(), |acc, (x, y)| acc + *x * y.conj());
        }
    }
    Ok(out)
}
