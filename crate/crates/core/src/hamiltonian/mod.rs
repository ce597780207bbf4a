//! Interaction-picture Hamiltonians of the protocol: ideal couplings, the
//! unwanted transitions, and inter-cavity crosstalk.

mod params;

pub use params::{ghz, mhz, rate_from_lifetime, CavityParams, CrosstalkParams, DeviceParams, MatchingReport, QutritRates, MATCHING_TOL};

use crate::error::{Error, Result};
use crate::hilbert::{embed, embed_product, local_annihilation, local_projector, local_transition, NetworkLayout, OperatorMatrix, E, F, G, QUTRIT_DIM};
use crate::scalar::{cis, Cplx, Real};

/// One term `e^{i nu t} op`, optionally paired with its adjoint.
#[derive(Clone, Debug, PartialEq)]
pub struct Term<T: Real> {
    pub op: OperatorMatrix<T>,
    pub nu: T,
    /// When set, the term contributes `e^{i nu t} op + h.c.`; otherwise `op`
    /// must itself be Hermitian and `nu` zero.
    pub with_adjoint: bool,
}

/// `H(t) = Σ_k e^{i ν_k t} A_k + h.c.`
#[derive(Clone, Debug, PartialEq)]
pub struct ModulatedHamiltonian<T: Real> {
    dim: usize,
    terms: Vec<Term<T>>,
}

impl<T: Real> ModulatedHamiltonian<T> {
    pub fn new(dim: usize) -> Self {
        Self { dim, terms: Vec::new() }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> &[Term<T>] {
        &self.terms
    }

    /// Mutable access for callers that deliberately perturb a built Hamiltonian.
    pub fn terms_mut(&mut self) -> &mut Vec<Term<T>> {
        &mut self.terms
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Adds `e^{i nu t} op + h.c.`; zero operators are skipped.
    pub fn push(&mut self, op: OperatorMatrix<T>, nu: f64) {
        debug_assert_eq!(op.dim(), self.dim);
        if !op.is_zero() {
            self.terms.push(Term { op, nu: T::of(nu), with_adjoint: true });
        }
    }

    /// Adds a static Hermitian operator as is.
    pub fn push_hermitian(&mut self, op: OperatorMatrix<T>) {
        debug_assert_eq!(op.dim(), self.dim);
        if !op.is_zero() {
            self.terms.push(Term { op, nu: T::zero(), with_adjoint: false });
        }
    }

    pub fn extend(&mut self, other: ModulatedHamiltonian<T>) {
        debug_assert_eq!(other.dim, self.dim);
        self.terms.extend(other.terms);
    }

    pub fn plus(mut self, other: ModulatedHamiltonian<T>) -> Self {
        self.extend(other);
        self
    }

    /// Full operator at time `t`.
    pub fn evaluate(&self, t: T) -> Result<OperatorMatrix<T>> {
        let mut out = OperatorMatrix::zeros(self.dim);
        for term in &self.terms {
            let phase = cis(term.nu * t);
            out = out.add(&term.op.scale(phase))?;
            if term.with_adjoint {
                out = out.add(&term.op.adjoint().scale(phase.conj()))?;
            }
        }
        Ok(out)
    }

    pub fn is_hermitian_at(&self, t: T, tol: f64) -> Result<bool> {
        Ok(self.evaluate(t)?.is_hermitian(tol))
    }

    /// Largest |ν| among the modulated terms.
    pub fn max_frequency(&self) -> f64 {
        self.terms.iter().map(|t| t.nu.abs().to_f64_lossy()).fold(0.0, f64::max)
    }

    /// Upper bound on `‖H(t)‖` valid for every `t`.
    pub fn norm_bound(&self) -> f64 {
        self.terms
            .iter()
            .map(|t| {
                let n = t.op.max_column_sum().max(t.op.max_row_sum());
                if t.with_adjoint { 2.0 * n } else { n }
            })
            .sum()
    }
}

/// Per-cavity on/off switches for a Hamiltonian segment.
pub type CavityMask<'a> = Option<&'a [bool]>;

fn is_on(mask: CavityMask<'_>, l: usize) -> bool {
    mask.is_none_or(|m| m.get(l).copied().unwrap_or(false))
}

fn cavity_op<T: Real>(layout: &NetworkLayout, l: usize) -> Result<(usize, OperatorMatrix<T>)> {
    layout.check_cavity(l)?;
    Ok((layout.cavity_subsystem(l), local_annihilation(layout.fock_dim())?))
}

/// `Σ_{j ∈ qutrits} a_l |upper><lower|_j` for the given qutrit positions.
fn cavity_times_transitions<T: Real>(
    layout: &NetworkLayout,
    l: usize,
    qutrits: &[usize],
    upper: usize,
    lower: usize,
) -> Result<OperatorMatrix<T>> {
    let (cav, a) = cavity_op::<T>(layout, l)?;
    let sigma = local_transition::<T>(QUTRIT_DIM, upper, lower)?;
    let mut out = OperatorMatrix::zeros(layout.total_dim());
    for &q in qutrits {
        out = out.add(&embed_product(&[(cav, &a), (q, &sigma)], layout)?)?;
    }
    Ok(out)
}

fn collective_transition<T: Real>(layout: &NetworkLayout, qutrits: &[usize], upper: usize, lower: usize) -> Result<OperatorMatrix<T>> {
    let sigma = local_transition::<T>(QUTRIT_DIM, upper, lower)?;
    let mut out = OperatorMatrix::zeros(layout.total_dim());
    for &q in qutrits {
        out = out.add(&embed(&sigma, q, layout)?)?;
    }
    Ok(out)
}

fn collective_projector<T: Real>(layout: &NetworkLayout, qutrits: &[usize], level: usize) -> Result<OperatorMatrix<T>> {
    let p = local_projector::<T>(QUTRIT_DIM, level)?;
    let mut out = OperatorMatrix::zeros(layout.total_dim());
    for &q in qutrits {
        out = out.add(&embed(&p, q, layout)?)?;
    }
    Ok(out)
}

fn real<T: Real>(x: f64) -> Cplx<T> {
    Cplx::new(T::of(x), T::zero())
}

fn check_params(layout: &NetworkLayout, params: &DeviceParams) -> Result<()> {
    if params.n_cavities() != layout.n_cavities() {
        return Err(Error::Params(format!(
            "parameters describe {} cavities but the layout has {}",
            params.n_cavities(),
            layout.n_cavities()
        )));
    }
    Ok(())
}

/// Dispersive qutrit–cavity coupling: `Σ_l g_l e^{iΔ_l t} a_l S⁺_{fe,l} + h.c.`
/// over the active qutrits `1_l..(m−1)_l`.
pub fn build_h1<T: Real>(layout: &NetworkLayout, params: &DeviceParams) -> Result<ModulatedHamiltonian<T>> {
    build_h1_masked(layout, params, None)
}

pub fn build_h1_masked<T: Real>(layout: &NetworkLayout, params: &DeviceParams, mask: CavityMask<'_>) -> Result<ModulatedHamiltonian<T>> {
    check_params(layout, params)?;
    let mut h = ModulatedHamiltonian::new(layout.total_dim());
    for l in (0..layout.n_cavities()).filter(|&l| is_on(mask, l)) {
        let c = params.cavity(l)?;
        if c.g == 0.0 || layout.active_qutrits(l).is_empty() {
            continue;
        }
        let op = cavity_times_transitions::<T>(layout, l, layout.active_qutrits(l), F, E)?;
        h.push(op.scale(real(c.g)), c.delta);
    }
    Ok(h)
}

/// Static effective Hamiltonian of the dispersive step.
///
/// With `include_f_terms`: `Σ_l λ_l (S_f (a†a + 1) − S_e a†a + Σ_{j≠k} |f><e|_j ⊗ |e><f|_k)`,
/// where `a a†` is written as `a†a + 1` so the Stark shift of |f> is exact in
/// the truncated space. Without: `−Σ_l λ_l S_e a†a`.
pub fn build_heff<T: Real>(layout: &NetworkLayout, params: &DeviceParams, include_f_terms: bool) -> Result<ModulatedHamiltonian<T>> {
    build_heff_masked(layout, params, include_f_terms, None)
}

pub fn build_heff_masked<T: Real>(
    layout: &NetworkLayout,
    params: &DeviceParams,
    include_f_terms: bool,
    mask: CavityMask<'_>,
) -> Result<ModulatedHamiltonian<T>> {
    check_params(layout, params)?;
    let dim = layout.total_dim();
    let mut h = ModulatedHamiltonian::new(dim);
    for l in (0..layout.n_cavities()).filter(|&l| is_on(mask, l)) {
        let active = layout.active_qutrits(l);
        let lambda = params.lambda(l)?;
        if active.is_empty() || lambda == 0.0 {
            continue;
        }
        let (cav, a) = cavity_op::<T>(layout, l)?;
        let number = embed(&a.adjoint().mul(&a)?, cav, layout)?;
        let s_e = collective_projector::<T>(layout, active, E)?;
        let mut op = s_e.mul(&number)?.scale(real(-lambda));
        if include_f_terms {
            let s_f = collective_projector::<T>(layout, active, F)?;
            let shifted = number.add(&OperatorMatrix::identity(dim))?;
            op = op.add(&s_f.mul(&shifted)?.scale(real(lambda)))?;
            let fe = local_transition::<T>(QUTRIT_DIM, F, E)?;
            let ef = local_transition::<T>(QUTRIT_DIM, E, F)?;
            for &j in active {
                for &k in active.iter().filter(|&&k| k != j) {
                    op = op.add(&embed_product(&[(j, &fe), (k, &ef)], layout)?.scale(real(lambda)))?;
                }
            }
        }
        h.push_hermitian(op);
    }
    Ok(h)
}

/// Resonant coupling of qutrit m_l to cavity l: `g_{r,l} a_l |e><g|_{m_l} + h.c.`
pub fn build_h2<T: Real>(layout: &NetworkLayout, params: &DeviceParams, cavity: usize) -> Result<ModulatedHamiltonian<T>> {
    check_params(layout, params)?;
    layout.check_cavity(cavity)?;
    let q = layout
        .resonant_qutrit(cavity)
        .ok_or_else(|| Error::Layout(format!("cavity {} hosts no qutrit", cavity + 1)))?;
    let c = params.cavity(cavity)?;
    let mut h = ModulatedHamiltonian::new(layout.total_dim());
    if c.g_r != 0.0 {
        h.push(cavity_times_transitions::<T>(layout, cavity, &[q], E, G)?.scale(real(c.g_r)), 0.0);
    }
    Ok(h)
}

/// Classical drive on |g>↔|e> of the active qutrits: `Ω_l e^{−iφ} S⁺_{eg,l} + h.c.`
pub fn build_h3<T: Real>(layout: &NetworkLayout, params: &DeviceParams, phase: f64) -> Result<ModulatedHamiltonian<T>> {
    build_h3_masked(layout, params, phase, None)
}

pub fn build_h3_masked<T: Real>(layout: &NetworkLayout, params: &DeviceParams, phase: f64, mask: CavityMask<'_>) -> Result<ModulatedHamiltonian<T>> {
    check_params(layout, params)?;
    let mut h = ModulatedHamiltonian::new(layout.total_dim());
    for l in (0..layout.n_cavities()).filter(|&l| is_on(mask, l)) {
        let c = params.cavity(l)?;
        if c.omega == 0.0 || layout.active_qutrits(l).is_empty() {
            continue;
        }
        let op = collective_transition::<T>(layout, layout.active_qutrits(l), E, G)?;
        h.push(op.scale(cis(T::of(-phase)) * real::<T>(c.omega)), 0.0);
    }
    Ok(h)
}

/// Unwanted |g>↔|e> coupling during the dispersive step: `g̃_l e^{iΔ̃_l t} a_l S⁺_{eg,l} + h.c.`
pub fn build_delta_h1<T: Real>(layout: &NetworkLayout, params: &DeviceParams) -> Result<ModulatedHamiltonian<T>> {
    build_delta_h1_masked(layout, params, None)
}

pub fn build_delta_h1_masked<T: Real>(layout: &NetworkLayout, params: &DeviceParams, mask: CavityMask<'_>) -> Result<ModulatedHamiltonian<T>> {
    check_params(layout, params)?;
    let mut h = ModulatedHamiltonian::new(layout.total_dim());
    for l in (0..layout.n_cavities()).filter(|&l| is_on(mask, l)) {
        let c = params.cavity(l)?;
        if c.g_tilde == 0.0 || layout.active_qutrits(l).is_empty() {
            continue;
        }
        let op = cavity_times_transitions::<T>(layout, l, layout.active_qutrits(l), E, G)?;
        h.push(op.scale(real(c.g_tilde)), c.delta_tilde);
    }
    Ok(h)
}

/// Inter-cavity crosstalk: `g_{jk} e^{iΔ_{jk} t} a_j† a_k + h.c.` for every adjacent pair.
pub fn build_crosstalk<T: Real>(layout: &NetworkLayout, params: &DeviceParams) -> Result<ModulatedHamiltonian<T>> {
    check_params(layout, params)?;
    let mut h = ModulatedHamiltonian::new(layout.total_dim());
    for &(j, k) in layout.adjacency() {
        let x = params
            .crosstalk_for((j, k))
            .ok_or_else(|| Error::MissingParameter(format!("crosstalk for cavities ({}, {})", j + 1, k + 1)))?;
        if x.g == 0.0 {
            continue;
        }
        let (cj, a) = cavity_op::<T>(layout, j)?;
        let ck = layout.cavity_subsystem(k);
        let op = embed_product(&[(cj, &a.adjoint()), (ck, &a)], layout)?;
        // a parameter stored as (k, j) describes a_k† a_j
        if x.pair == (j, k) {
            h.push(op.scale(real(x.g)), x.delta);
        } else {
            h.push(op.adjoint().scale(real(x.g)), x.delta);
        }
    }
    Ok(h)
}

/// Unwanted |e>↔|f> coupling of qutrit m_l during the resonant step:
/// `g̃_{r,l} e^{iΔ_{r,l} t} a_l |f><e|_{m_l} + h.c.`
pub fn build_delta_h2<T: Real>(layout: &NetworkLayout, params: &DeviceParams, cavity: usize) -> Result<ModulatedHamiltonian<T>> {
    check_params(layout, params)?;
    layout.check_cavity(cavity)?;
    let q = layout
        .resonant_qutrit(cavity)
        .ok_or_else(|| Error::Layout(format!("cavity {} hosts no qutrit", cavity + 1)))?;
    let c = params.cavity(cavity)?;
    let mut h = ModulatedHamiltonian::new(layout.total_dim());
    if c.g_r_tilde != 0.0 {
        h.push(cavity_times_transitions::<T>(layout, cavity, &[q], F, E)?.scale(real(c.g_r_tilde)), c.delta_r);
    }
    Ok(h)
}

/// Unwanted drive of |e>↔|f>: `Ω̃_l e^{−iφ} e^{−iΔ_p t} S⁺_{fe,l} + h.c.`
pub fn build_delta_h3<T: Real>(layout: &NetworkLayout, params: &DeviceParams, phase: f64) -> Result<ModulatedHamiltonian<T>> {
    build_delta_h3_masked(layout, params, phase, None)
}

pub fn build_delta_h3_masked<T: Real>(
    layout: &NetworkLayout,
    params: &DeviceParams,
    phase: f64,
    mask: CavityMask<'_>,
) -> Result<ModulatedHamiltonian<T>> {
    check_params(layout, params)?;
    let mut h = ModulatedHamiltonian::new(layout.total_dim());
    for l in (0..layout.n_cavities()).filter(|&l| is_on(mask, l)) {
        let c = params.cavity(l)?;
        if c.omega_tilde == 0.0 || layout.active_qutrits(l).is_empty() {
            continue;
        }
        let op = collective_transition::<T>(layout, layout.active_qutrits(l), F, E)?;
        h.push(op.scale(cis(T::of(-phase)) * real::<T>(c.omega_tilde)), -params.delta_p);
    }
    Ok(h)
}

/// Resonant coupling of a coupler qutrit to a cavity on the `upper`/`lower`
/// transition: `mu a_l |upper><lower| + h.c.`
pub fn build_coupler_resonant<T: Real>(
    layout: &NetworkLayout,
    coupler: usize,
    cavity: usize,
    upper: usize,
    lower: usize,
    mu: f64,
) -> Result<ModulatedHamiltonian<T>> {
    if coupler >= layout.n_couplers() {
        return Err(Error::Layout(format!("coupler {} does not exist", coupler + 1)));
    }
    let q = layout.coupler_subsystem(coupler);
    let mut h = ModulatedHamiltonian::new(layout.total_dim());
    h.push(cavity_times_transitions::<T>(layout, cavity, &[q], upper, lower)?.scale(real(mu)), 0.0);
    Ok(h)
}

/// Resonant classical drive `Ω e^{−iφ} |upper><lower| + h.c.` on one qutrit.
pub fn build_drive<T: Real>(
    layout: &NetworkLayout,
    subsystem: usize,
    upper: usize,
    lower: usize,
    rabi: f64,
    phase: f64,
) -> Result<ModulatedHamiltonian<T>> {
    let sigma = local_transition::<T>(QUTRIT_DIM, upper, lower)?;
    let mut h = ModulatedHamiltonian::new(layout.total_dim());
    h.push(embed(&sigma, subsystem, layout)?.scale(cis(T::of(-phase)) * real::<T>(rabi)), 0.0);
    Ok(h)
}

/// Photons plus qutrit excitations (|e> counts 1, |f> counts 2).
pub fn excitation_number<T: Real>(layout: &NetworkLayout) -> Result<OperatorMatrix<T>> {
    let dim = layout.total_dim();
    let mut out = OperatorMatrix::zeros(dim);
    for l in 0..layout.n_cavities() {
        let (cav, a) = cavity_op::<T>(layout, l)?;
        out = out.add(&embed(&a.adjoint().mul(&a)?, cav, layout)?)?;
    }
    let qutrits: Vec<usize> = layout.all_qutrits().collect();
    out = out.add(&collective_projector::<T>(layout, &qutrits, E)?)?;
    out = out.add(&collective_projector::<T>(layout, &qutrits, F)?.scale(real(2.0)))?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use std::f64::consts::{PI, SQRT_2};

    use super::*;

    type H = ModulatedHamiltonian<f64>;

    fn supports(op: &OperatorMatrix<f64>, layout: &NetworkLayout) -> Vec<usize> {
        // subsystems on which some entry changes the level
        let mut out = Vec::new();
        for &(r, c, _) in op.entries() {
            let (lr, lc) = (layout.basis_levels(r), layout.basis_levels(c));
            for (i, (a, b)) in lr.iter().zip(&lc).enumerate() {
                if a != b && !out.contains(&i) {
                    out.push(i);
                }
            }
        }
        out.sort_unstable();
        out
    }

    #[test]
    fn h1_single_cavity_term() {
        let layout = NetworkLayout::chain(1, 2, 2).unwrap();
        let mut p = DeviceParams::transmon(1, mhz(10.0), 0.0);
        p.cavities[0].delta = mhz(100.0);
        let h: H = build_h1(&layout, &p).unwrap();
        assert_eq!(h.terms().len(), 1);
        assert!((h.terms()[0].nu - 2.0 * PI * 100.0).abs() < 1e-9);

        p.cavities[0].g = 0.0;
        assert!(build_h1::<f64>(&layout, &p).unwrap().is_empty());
    }

    #[test]
    fn h1_terms_are_local_to_their_cavity() {
        let layout = NetworkLayout::chain(2, 2, 2).unwrap();
        let p = DeviceParams::transmon(2, mhz(14.15), 0.0);
        let h: H = build_h1(&layout, &p).unwrap();
        assert_eq!(h.terms().len(), 2);
        assert_eq!(supports(&h.terms()[0].op, &layout), vec![0, 1]);
        assert_eq!(supports(&h.terms()[1].op, &layout), vec![3, 4]);

        let d: H = build_delta_h1(&layout, &p).unwrap();
        assert_eq!(supports(&d.terms()[1].op, &layout), vec![3, 4]);
    }

    #[test]
    fn heff_one_active_qutrit_shifts() {
        // m = 2: one active qutrit, no dipole term
        let layout = NetworkLayout::chain(1, 2, 3).unwrap();
        let p = DeviceParams::transmon(1, mhz(10.0), 0.0);
        let lambda = p.lambda(0).unwrap();
        let h = build_heff::<f64>(&layout, &p, true).unwrap().evaluate(0.0).unwrap();
        assert!(h.is_diagonal());
        for n in 0..3 {
            let e = layout.basis_index(&[n, E, G]).unwrap();
            let f = layout.basis_index(&[n, F, G]).unwrap();
            assert!((h.get(e, e).re + lambda * n as f64).abs() < 1e-9);
            assert!((h.get(f, f).re - lambda * (n + 1) as f64).abs() < 1e-9);
        }
        let h3 = build_heff::<f64>(&layout, &p, false).unwrap().evaluate(0.0).unwrap();
        let f1 = layout.basis_index(&[1, F, G]).unwrap();
        assert_eq!(h3.get(f1, f1).re, 0.0);
    }

    #[test]
    fn heff_dipole_exchange_for_two_active_qutrits() {
        let layout = NetworkLayout::chain(1, 3, 2).unwrap();
        let p = DeviceParams::transmon(1, mhz(10.0), 0.0);
        let lambda = p.lambda(0).unwrap();
        let h = build_heff::<f64>(&layout, &p, true).unwrap().evaluate(0.0).unwrap();
        let fe = layout.basis_index(&[0, F, E, G]).unwrap();
        let ef = layout.basis_index(&[0, E, F, G]).unwrap();
        assert!((h.get(fe, ef).re - lambda).abs() < 1e-9);
        assert!(h.is_hermitian(1e-12));
    }

    #[test]
    fn heff_rejects_zero_detuning() {
        let layout = NetworkLayout::chain(1, 2, 2).unwrap();
        let mut p = DeviceParams::transmon(1, mhz(10.0), 0.0);
        p.cavities[0].delta = 0.0;
        assert!(matches!(build_heff::<f64>(&layout, &p, false), Err(Error::DivisionByZero(_))));
    }

    #[test]
    fn crosstalk_chain_and_detunings() {
        let layout = NetworkLayout::chain(4, 1, 2).unwrap();
        let p = DeviceParams::transmon(4, mhz(14.15), 0.0);
        let h: H = build_crosstalk(&layout, &p).unwrap();
        assert_eq!(h.terms().len(), 3);
        assert!((h.terms()[0].nu / mhz(1.0) + 20.0).abs() < 1e-9);

        let lonely = NetworkLayout::new(&[1, 1, 1, 1], 2, 0, vec![]).unwrap();
        assert!(build_crosstalk::<f64>(&lonely, &p).unwrap().is_empty());

        let mut missing = p.clone();
        missing.crosstalk.pop();
        assert!(matches!(build_crosstalk::<f64>(&layout, &missing), Err(Error::MissingParameter(_))));
    }

    #[test]
    fn delta_h2_and_h3_parameters() {
        let layout = NetworkLayout::chain(2, 2, 2).unwrap();
        let p = DeviceParams::transmon(2, mhz(14.15), 0.0);
        let d2: H = build_delta_h2(&layout, &p, 1).unwrap();
        assert_eq!(d2.terms().len(), 1);
        assert!((d2.terms()[0].nu / mhz(1.0) + 700.0).abs() < 1e-9);
        assert!((p.cavities[1].g_r_tilde - SQRT_2 * p.cavities[1].g_r).abs() < 1e-12);
        assert!(matches!(build_delta_h2::<f64>(&layout, &p, 5), Err(Error::InvalidCavity { .. })));
        assert!(matches!(build_h2::<f64>(&layout, &p, 2), Err(Error::InvalidCavity { .. })));

        let d3: H = build_delta_h3(&layout, &p, PI / 2.0).unwrap();
        assert!((d3.terms()[0].nu / mhz(1.0) - 700.0).abs() < 1e-9);

        let quiet = p.without_unwanted_couplings();
        assert!(build_delta_h1::<f64>(&layout, &quiet).unwrap().is_empty());
        assert!(build_delta_h2::<f64>(&layout, &quiet, 0).unwrap().is_empty());
        assert!(build_delta_h3::<f64>(&layout, &quiet, 0.0).unwrap().is_empty());
        assert!(build_crosstalk::<f64>(&layout, &quiet).unwrap().is_empty());
    }

    #[test]
    fn all_hamiltonians_hermitian_and_conserve_excitations() {
        let layout = NetworkLayout::chain(2, 3, 2).unwrap();
        let p = DeviceParams::transmon(2, mhz(14.15), 0.1);
        let n = excitation_number::<f64>(&layout).unwrap();
        let conserving: H = build_h1(&layout, &p)
            .unwrap()
            .plus(build_delta_h1(&layout, &p).unwrap())
            .plus(build_crosstalk(&layout, &p).unwrap())
            .plus(build_h2(&layout, &p, 0).unwrap())
            .plus(build_delta_h2(&layout, &p, 1).unwrap())
            .plus(build_heff(&layout, &p, true).unwrap());
        let drives: H = build_h3(&layout, &p, 0.3).unwrap().plus(build_delta_h3(&layout, &p, 0.3).unwrap());
        for t in [0.0, 0.0137, 0.25, 1.7] {
            let h = conserving.evaluate(t).unwrap();
            assert!(h.is_hermitian(1e-12));
            let comm = h.commutator(&n).unwrap();
            assert!(comm.entries().iter().all(|e| e.2.norm() < 1e-10));
            assert!(drives.is_hermitian_at(t, 1e-12).unwrap());
        }
    }

    #[test]
    fn dropping_an_adjoint_breaks_hermiticity() {
        let layout = NetworkLayout::chain(1, 2, 2).unwrap();
        let p = DeviceParams::transmon(1, mhz(14.15), 0.0);
        let mut h: H = build_h1(&layout, &p).unwrap();
        assert!(h.is_hermitian_at(0.1, 1e-12).unwrap());
        h.terms_mut()[0].with_adjoint = false;
        assert!(!h.is_hermitian_at(0.1, 1e-12).unwrap());
    }
}
