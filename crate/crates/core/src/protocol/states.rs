use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use crate::error::{Error, Result};
use crate::hilbert::{NetworkLayout, QuantumState, E, G, QUTRIT_DIM};

/// Normalization tolerance for (α, β).
pub const AMPLITUDE_TOL: f64 = 1e-12;

/// Cavity superposition `α|p⟩ + β|p̄⟩`, where `p` is the photon pattern of the
/// α branch and `p̄` its complement.
#[derive(Clone, Debug, PartialEq)]
pub struct InitialCondition {
    alpha: Complex64,
    beta: Complex64,
    pattern: Vec<bool>,
}

impl InitialCondition {
    pub fn new(alpha: Complex64, beta: Complex64, pattern: Vec<bool>) -> Result<Self> {
        let norm = alpha.norm_sqr() + beta.norm_sqr();
        if (norm - 1.0).abs() > AMPLITUDE_TOL {
            return Err(Error::Normalization(format!("|alpha|^2 + |beta|^2 = {norm}, expected 1")));
        }
        if alpha == Complex64::new(0.0, 0.0) || beta == Complex64::new(0.0, 0.0) {
            return Err(Error::Normalization("alpha and beta must both be nonzero".into()));
        }
        if pattern.is_empty() {
            return Err(Error::Layout("cavity pattern is empty".into()));
        }
        Ok(Self { alpha, beta, pattern })
    }

    /// `α|0…0⟩ + β|1…1⟩` over `n` cavities.
    pub fn uniform(alpha: Complex64, beta: Complex64, n: usize) -> Result<Self> {
        Self::new(alpha, beta, vec![false; n])
    }

    /// Parses a pattern such as `"0011"`.
    pub fn with_pattern_str(alpha: Complex64, beta: Complex64, pattern: &str) -> Result<Self> {
        let bits = pattern
            .chars()
            .map(|ch| match ch {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::Config(format!("cavity pattern contains '{other}'"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(alpha, beta, bits)
    }

    pub fn alpha(&self) -> Complex64 {
        self.alpha
    }

    pub fn beta(&self) -> Complex64 {
        self.beta
    }

    pub fn pattern(&self) -> &[bool] {
        &self.pattern
    }

    pub fn pattern_string(&self) -> String {
        self.pattern.iter().map(|&b| if b { '1' } else { '0' }).collect()
    }

    pub fn is_uniform(&self) -> bool {
        self.pattern.iter().all(|&b| b == self.pattern[0])
    }

    fn branches(&self) -> [(Complex64, Vec<bool>); 2] {
        [(self.alpha, self.pattern.clone()), (self.beta, self.pattern.iter().map(|b| !b).collect())]
    }

    fn check_layout(&self, layout: &NetworkLayout) -> Result<()> {
        if self.pattern.len() != layout.n_cavities() {
            return Err(Error::Layout(format!(
                "cavity pattern has {} entries for {} cavities",
                self.pattern.len(),
                layout.n_cavities()
            )));
        }
        if (0..layout.n_cavities()).any(|l| layout.group_size(l) == 0) {
            return Err(Error::Layout("every cavity must host at least one qutrit".into()));
        }
        Ok(())
    }
}

/// Tensor product of per-subsystem vectors in layout order.
pub fn product_state(locals: &[Vec<Complex64>]) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(1.0, 0.0)];
    for local in locals {
        let mut next = Vec::with_capacity(out.len() * local.len());
        for a in &out {
            next.extend(local.iter().map(|b| a * b));
        }
        out = next;
    }
    out
}

pub(crate) fn basis_vector(dim: usize, level: usize) -> Vec<Complex64> {
    let mut v = vec![Complex64::new(0.0, 0.0); dim];
    v[level] = Complex64::new(1.0, 0.0);
    v
}

fn plus() -> Vec<Complex64> {
    let mut v = vec![Complex64::new(FRAC_1_SQRT_2, 0.0); 2];
    v.push(Complex64::new(0.0, 0.0));
    v
}

fn add_scaled(acc: &mut [Complex64], v: &[Complex64], s: Complex64) {
    acc.iter_mut().zip(v).for_each(|(a, b)| *a += s * b);
}

/// Cavities in the superposition of `ic`, active qutrits in |+⟩, qutrit m_l
/// and any couplers in |g⟩.
pub fn initial_state(layout: &NetworkLayout, ic: &InitialCondition) -> Result<QuantumState<f64>> {
    ic.check_layout(layout)?;
    let mut psi = vec![Complex64::new(0.0, 0.0); layout.total_dim()];
    for (amp, photons) in ic.branches() {
        let mut locals = vec![basis_vector(QUTRIT_DIM, G); layout.dims().len()];
        for l in 0..layout.n_cavities() {
            locals[layout.cavity_subsystem(l)] = basis_vector(layout.fock_dim(), usize::from(photons[l]));
            for &q in layout.active_qutrits(l) {
                locals[q] = plus();
            }
        }
        add_scaled(&mut psi, &product_state(&locals), amp);
    }
    QuantumState::vector(psi)
}

/// Phase picked up by a branch in which cavity `l` holds the photon:
/// `−i` from the resonant swap and `(−1)^{m_l−1}` from the pulse.
pub fn branch_factor(group_size: usize) -> Complex64 {
    let sign = if group_size % 2 == 1 { 1.0 } else { -1.0 };
    Complex64::new(0.0, -sign)
}

/// Ideal output: every qutrit of a cavity that held the photon in a branch is
/// in |e⟩, the others in |g⟩, all cavities empty. For the uniform pattern the
/// relative phase is `e^{iφ}` with `φ = (m − 3/2)Nπ`.
pub fn target_state(layout: &NetworkLayout, ic: &InitialCondition) -> Result<QuantumState<f64>> {
    ic.check_layout(layout)?;
    let mut psi = vec![Complex64::new(0.0, 0.0); layout.total_dim()];
    for (amp, photons) in ic.branches() {
        let mut locals = vec![basis_vector(QUTRIT_DIM, G); layout.dims().len()];
        let mut factor = Complex64::new(1.0, 0.0);
        for l in 0..layout.n_cavities() {
            locals[layout.cavity_subsystem(l)] = basis_vector(layout.fock_dim(), 0);
            if photons[l] {
                factor *= branch_factor(layout.group_size(l));
                for j in 0..layout.group_size(l) {
                    locals[layout.qutrit_subsystem(l, j)] = basis_vector(QUTRIT_DIM, E);
                }
            }
        }
        add_scaled(&mut psi, &product_state(&locals), amp * factor);
    }
    QuantumState::vector(psi)
}

/// Relative phase of the second target branch against the first,
/// divided out of the amplitudes (α, β).
pub fn target_relative_phase(layout: &NetworkLayout, ic: &InitialCondition) -> Result<Complex64> {
    ic.check_layout(layout)?;
    let factor = |photons: &[bool]| {
        (0..layout.n_cavities())
            .filter(|&l| photons[l])
            .fold(Complex64::new(1.0, 0.0), |acc, l| acc * branch_factor(layout.group_size(l)))
    };
    let [(_, a), (_, b)] = ic.branches();
    Ok(factor(&b) / factor(&a))
}

/// Basis indices of the two target branches.
pub fn target_branch_indices(layout: &NetworkLayout, ic: &InitialCondition) -> Result<(usize, usize)> {
    ic.check_layout(layout)?;
    let index = |photons: &[bool]| {
        let mut levels = vec![G; layout.dims().len()];
        for l in 0..layout.n_cavities() {
            levels[layout.cavity_subsystem(l)] = 0;
            if photons[l] {
                for j in 0..layout.group_size(l) {
                    levels[layout.qutrit_subsystem(l, j)] = E;
                }
            }
        }
        layout.basis_index(&levels)
    };
    let [(_, a), (_, b)] = ic.branches();
    Ok((index(&a)?, index(&b)?))
}

/// `e^{iφ}` with `φ = (m − 3/2)Nπ`.
pub fn ghz_phase(m: usize, n: usize) -> Complex64 {
    let phi = (m as f64 - 1.5) * n as f64 * std::f64::consts::PI;
    Complex64::from_polar(1.0, phi)
}
