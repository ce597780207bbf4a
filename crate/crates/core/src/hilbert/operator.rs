use std::collections::BTreeMap;

use num_traits::Zero;

use super::layout::NetworkLayout;
use crate::error::{Error, Result};
use crate::scalar::{cone, czero, Cplx, Real};

/// Sparse complex matrix in coordinate form, entries sorted by `(row, col)`.
#[derive(Clone, Debug, PartialEq)]
pub struct OperatorMatrix<T: Real> {
    dim: usize,
    entries: Vec<(usize, usize, Cplx<T>)>,
    hermitian_hint: bool,
}

impl<T: Real> OperatorMatrix<T> {
    pub fn zeros(dim: usize) -> Self {
        Self { dim, entries: Vec::new(), hermitian_hint: true }
    }

    pub fn identity(dim: usize) -> Self {
        let entries = (0..dim).map(|i| (i, i, cone())).collect();
        Self { dim, entries, hermitian_hint: true }
    }

    /// Duplicate coordinates are summed; exact zeros are dropped.
    pub fn from_triplets(dim: usize, triplets: impl IntoIterator<Item = (usize, usize, Cplx<T>)>) -> Result<Self> {
        let mut map: BTreeMap<(usize, usize), Cplx<T>> = BTreeMap::new();
        for (r, c, v) in triplets {
            if r >= dim || c >= dim {
                return Err(Error::InvalidDimension { dim, reason: "operator entry index out of range" });
            }
            *map.entry((r, c)).or_insert_with(czero) += v;
        }
        let entries = map.into_iter().filter(|(_, v)| !v.is_zero()).map(|((r, c), v)| (r, c, v)).collect();
        Ok(Self { dim, entries, hermitian_hint: false })
    }

    fn from_sorted(dim: usize, entries: Vec<(usize, usize, Cplx<T>)>) -> Self {
        debug_assert!(entries.windows(2).all(|w| (w[0].0, w[0].1) < (w[1].0, w[1].1)));
        Self { dim, entries, hermitian_hint: false }
    }

    /// Marks the operator as Hermitian if it is, within `tol`.
    pub fn with_hermitian_hint(mut self, tol: f64) -> Result<Self> {
        if !self.is_hermitian(tol) {
            return Err(Error::Params("operator flagged Hermitian is not Hermitian".into()));
        }
        self.hermitian_hint = true;
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[(usize, usize, Cplx<T>)] {
        &self.entries
    }

    pub fn hermitian_hint(&self) -> bool {
        self.hermitian_hint
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, row: usize, col: usize) -> Cplx<T> {
        self.entries
            .binary_search_by(|e| (e.0, e.1).cmp(&(row, col)))
            .map(|i| self.entries[i].2)
            .unwrap_or_else(|_| czero())
    }

    /// True if every nonzero entry lies on the diagonal.
    pub fn is_diagonal(&self) -> bool {
        self.entries.iter().all(|&(r, c, _)| r == c)
    }

    pub fn adjoint(&self) -> Self {
        let mut entries: Vec<_> = self.entries.iter().map(|&(r, c, v)| (c, r, v.conj())).collect();
        entries.sort_unstable_by_key(|e| (e.0, e.1));
        Self { dim: self.dim, entries, hermitian_hint: self.hermitian_hint }
    }

    pub fn scale(&self, factor: Cplx<T>) -> Self {
        if factor.is_zero() {
            return Self::zeros(self.dim);
        }
        let entries = self.entries.iter().map(|&(r, c, v)| (r, c, v * factor)).collect();
        let hint = self.hermitian_hint && factor.im.is_zero();
        Self { dim: self.dim, entries, hermitian_hint: hint }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        let out = Self::from_triplets(self.dim, self.entries.iter().chain(&other.entries).copied())?;
        Ok(out)
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        let starts = row_starts(&other.entries, other.dim);
        let mut out = Vec::new();
        let mut acc: BTreeMap<usize, Cplx<T>> = BTreeMap::new();
        let mut i = 0;
        while i < self.entries.len() {
            let row = self.entries[i].0;
            acc.clear();
            while i < self.entries.len() && self.entries[i].0 == row {
                let (_, k, a) = self.entries[i];
                for &(_, c, b) in &other.entries[starts[k]..starts[k + 1]] {
                    *acc.entry(c).or_insert_with(czero) += a * b;
                }
                i += 1;
            }
            out.extend(acc.iter().filter(|(_, v)| !v.is_zero()).map(|(&c, &v)| (row, c, v)));
        }
        Ok(Self::from_sorted(self.dim, out))
    }

    /// `self ⊗ other`, with `self` the slower-varying factor.
    pub fn kron(&self, other: &Self) -> Self {
        let d2 = other.dim;
        let mut entries = Vec::with_capacity(self.nnz() * other.nnz());
        for &(r1, c1, v1) in &self.entries {
            for &(r2, c2, v2) in &other.entries {
                entries.push((r1 * d2 + r2, c1 * d2 + c2, v1 * v2));
            }
        }
        entries.sort_unstable_by_key(|e| (e.0, e.1));
        Self { dim: self.dim * d2, entries, hermitian_hint: self.hermitian_hint && other.hermitian_hint }
    }

    pub fn commutator(&self, other: &Self) -> Result<Self> {
        let ab = self.mul(other)?;
        let ba = other.mul(self)?;
        ab.add(&ba.scale(-cone::<T>()))
    }

    /// Largest `|A[r,c] - conj(A[c,r])|`.
    pub fn hermiticity_error(&self) -> f64 {
        let mut worst = 0.0f64;
        for &(r, c, v) in &self.entries {
            let d = (v - self.get(c, r).conj()).norm().to_f64_lossy();
            worst = worst.max(d);
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_error() <= tol
    }

    /// Induced 1-norm (maximum absolute column sum).
    pub fn max_column_sum(&self) -> f64 {
        let mut sums: BTreeMap<usize, f64> = BTreeMap::new();
        for &(_, c, v) in &self.entries {
            *sums.entry(c).or_default() += v.norm().to_f64_lossy();
        }
        sums.values().copied().fold(0.0, f64::max)
    }

    /// Induced infinity-norm (maximum absolute row sum).
    pub fn max_row_sum(&self) -> f64 {
        self.adjoint().max_column_sum()
    }

    /// `A x`.
    pub fn apply(&self, x: &[Cplx<T>]) -> Result<Vec<Cplx<T>>> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch { left: self.dim, right: x.len() });
        }
        let mut y = vec![czero(); self.dim];
        self.apply_add(cone(), x, &mut y);
        Ok(y)
    }

    /// `y += alpha A x`; lengths are the caller's responsibility.
    #[inline]
    pub fn apply_add(&self, alpha: Cplx<T>, x: &[Cplx<T>], y: &mut [Cplx<T>]) {
        for &(r, c, v) in &self.entries {
            y[r] += alpha * v * x[c];
        }
    }

    pub fn to_dense(&self) -> Vec<Cplx<T>> {
        let mut out = vec![czero(); self.dim * self.dim];
        for &(r, c, v) in &self.entries {
            out[r * self.dim + c] = v;
        }
        out
    }

    pub fn cast<U: Real>(&self) -> OperatorMatrix<U> {
        OperatorMatrix {
            dim: self.dim,
            entries: self
                .entries
                .iter()
                .map(|&(r, c, v)| (r, c, Cplx::new(U::of(v.re.to_f64_lossy()), U::of(v.im.to_f64_lossy()))))
                .collect(),
            hermitian_hint: self.hermitian_hint,
        }
    }

    fn check_dim(&self, other: &Self) -> Result<()> {
        if self.dim == other.dim {
            Ok(())
        } else {
            Err(Error::DimensionMismatch { left: self.dim, right: other.dim })
        }
    }
}

/// CSR row offsets for sorted entries.
pub(crate) fn row_starts<T: Real>(entries: &[(usize, usize, Cplx<T>)], dim: usize) -> Vec<usize> {
    let mut starts = vec![0usize; dim + 1];
    for &(r, _, _) in entries {
        starts[r + 1] += 1;
    }
    for i in 0..dim {
        starts[i + 1] += starts[i];
    }
    starts
}

/// Truncated-Fock annihilation operator, `a[n-1, n] = sqrt(n)`.
pub fn local_annihilation<T: Real>(d: usize) -> Result<OperatorMatrix<T>> {
    if d < 2 {
        return Err(Error::InvalidDimension { dim: d, reason: "annihilation operator needs at least two levels" });
    }
    let entries = (1..d).map(|n| (n - 1, n, Cplx::new(T::of((n as f64).sqrt()), T::zero()))).collect();
    Ok(OperatorMatrix::from_sorted(d, entries))
}

/// `|upper><lower|` on a `d`-level system.
pub fn local_transition<T: Real>(d: usize, upper: usize, lower: usize) -> Result<OperatorMatrix<T>> {
    if upper >= d || lower >= d || upper == lower {
        return Err(Error::InvalidLevel { dim: d, upper, lower });
    }
    Ok(OperatorMatrix::from_sorted(d, vec![(upper, lower, cone())]))
}

/// `|level><level|`.
pub fn local_projector<T: Real>(d: usize, level: usize) -> Result<OperatorMatrix<T>> {
    if level >= d {
        return Err(Error::InvalidLevel { dim: d, upper: level, lower: level });
    }
    let mut op = OperatorMatrix::from_sorted(d, vec![(level, level, cone())]);
    op.hermitian_hint = true;
    Ok(op)
}

/// `I ⊗ ... ⊗ local ⊗ ... ⊗ I` in the layout's canonical ordering.
pub fn embed<T: Real>(local: &OperatorMatrix<T>, subsystem: usize, layout: &NetworkLayout) -> Result<OperatorMatrix<T>> {
    embed_dims(local, subsystem, layout.dims())
}

pub fn embed_dims<T: Real>(local: &OperatorMatrix<T>, subsystem: usize, dims: &[usize]) -> Result<OperatorMatrix<T>> {
    let expected = *dims.get(subsystem).ok_or(Error::Embedding { subsystem, local: local.dim, expected: 0 })?;
    if local.dim != expected {
        return Err(Error::Embedding { subsystem, local: local.dim, expected });
    }
    let left: usize = dims[..subsystem].iter().product();
    let right: usize = dims[subsystem + 1..].iter().product();
    let block = expected * right;
    let mut entries = Vec::with_capacity(left * local.nnz() * right);
    for a in 0..left {
        for &(r, c, v) in &local.entries {
            for b in 0..right {
                entries.push((a * block + r * right + b, a * block + c * right + b, v));
            }
        }
    }
    entries.sort_unstable_by_key(|e| (e.0, e.1));
    Ok(OperatorMatrix { dim: left * block, entries, hermitian_hint: local.hermitian_hint })
}

/// Product of embedded local operators acting on distinct subsystems.
pub fn embed_product<T: Real>(factors: &[(usize, &OperatorMatrix<T>)], layout: &NetworkLayout) -> Result<OperatorMatrix<T>> {
    let mut out = OperatorMatrix::identity(layout.total_dim());
    for &(sub, op) in factors {
        out = out.mul(&embed(op, sub, layout)?)?;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::layout::NetworkLayout;

    type Op = OperatorMatrix<f64>;

    #[test]
    fn annihilation_small_cases() {
        let a2: Op = local_annihilation(2).unwrap();
        assert_eq!(a2.to_dense(), vec![czero(), cone(), czero(), czero()]);

        let a3: Op = local_annihilation(3).unwrap();
        assert_eq!(a3.nnz(), 2);
        assert_eq!(a3.get(0, 1).re, 1.0);
        assert!((a3.get(1, 2).re - 2f64.sqrt()).abs() < 1e-15);

        let a4: Op = local_annihilation(4).unwrap();
        let num = a4.adjoint().mul(&a4).unwrap();
        for n in 0..4 {
            assert!((num.get(n, n).re - n as f64).abs() < 1e-12);
        }
        assert!(matches!(local_annihilation::<f64>(1), Err(Error::InvalidDimension { .. })));
    }

    #[test]
    fn transitions() {
        let eg: Op = local_transition(3, 1, 0).unwrap();
        assert_eq!(eg.entries(), &[(1, 0, cone())]);
        let fe: Op = local_transition(3, 2, 1).unwrap();
        assert_eq!(fe.adjoint(), local_transition(3, 1, 2).unwrap());
        assert!(matches!(local_transition::<f64>(3, 3, 0), Err(Error::InvalidLevel { .. })));
        assert!(matches!(local_transition::<f64>(3, 1, 1), Err(Error::InvalidLevel { .. })));
    }

    #[test]
    fn embed_matches_kronecker_index_formula() {
        // cavity (d=2) slow, qutrit (d=3) fast: a ⊗ I3 has entries (0*3+k, 1*3+k)
        let layout = NetworkLayout::new(&[1], 2, 0, vec![]).unwrap();
        let a: Op = local_annihilation(2).unwrap();
        let big = embed(&a, 0, &layout).unwrap();
        assert_eq!(big.dim(), 6);
        let expected: Vec<(usize, usize)> = (0..3).map(|k| (k, 3 + k)).collect();
        let got: Vec<(usize, usize)> = big.entries().iter().map(|e| (e.0, e.1)).collect();
        assert_eq!(got, expected);
        assert_eq!(big, a.kron(&Op::identity(3)));

        let id3 = Op::identity(3);
        assert_eq!(embed(&id3, 1, &layout).unwrap(), Op::identity(6));
        assert!(matches!(embed(&id3, 0, &layout), Err(Error::Embedding { .. })));
    }

    #[test]
    fn disjoint_embeddings_commute() {
        let layout = NetworkLayout::chain(2, 1, 2).unwrap();
        let a: Op = local_annihilation(2).unwrap();
        let s: Op = local_transition(3, 1, 0).unwrap();
        let x = embed(&a, 0, &layout).unwrap();
        let y = embed(&s, 3, &layout).unwrap();
        assert_eq!(x.mul(&y).unwrap(), y.mul(&x).unwrap());
        assert!(x.commutator(&y).unwrap().is_zero());
    }

    #[test]
    fn embed_preserves_column_sum_and_hermiticity() {
        let layout = NetworkLayout::chain(2, 2, 3).unwrap();
        let a: Op = local_annihilation(3).unwrap();
        let h = a.add(&a.adjoint()).unwrap();
        for sub in [0, 3] {
            let big = embed(&h, sub, &layout).unwrap();
            assert!((big.max_column_sum() - h.max_column_sum()).abs() < 1e-12);
            assert!(big.is_hermitian(1e-12));
        }
    }

    #[test]
    fn works_in_single_precision() {
        let a: OperatorMatrix<f32> = local_annihilation(3).unwrap();
        let n = a.adjoint().mul(&a).unwrap();
        assert!((n.get(2, 2).re - 2.0).abs() < 1e-6);
    }
}
