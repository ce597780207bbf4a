use std::f64::consts::{FRAC_1_SQRT_2, PI, SQRT_2};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::schedule::{Generator, Schedule};
use super::states::{basis_vector, product_state};
use crate::dynamics::{propagate_vector, IntegratorConfig};
use crate::error::{Error, Result};
use crate::hamiltonian::{mhz, ModulatedHamiltonian};
use crate::hilbert::{embed_dims, local_annihilation, local_transition, NetworkLayout, QuantumState, E, F, G, QUTRIT_DIM};

/// Coupling constants μ₁..μ₆ of the six coupler–cavity interactions and the
/// Rabi frequency of the repump pulses (rad/µs).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AppendixParams {
    pub mu: [f64; 6],
    pub pump_rabi: f64,
}

impl Default for AppendixParams {
    fn default() -> Self {
        Self { mu: [mhz(10.0); 6], pump_rabi: mhz(50.0) }
    }
}

impl AppendixParams {
    pub fn validate(&self) -> Result<()> {
        if self.mu.iter().chain([&self.pump_rabi]).any(|&x| !(x > 0.0) || !x.is_finite()) {
            return Err(Error::Params("appendix couplings and pump Rabi frequency must be positive".into()));
        }
        Ok(())
    }
}

/// Four cavities with three couplers between them and no qutrit groups.
pub fn appendix_layout(fock_dim: usize) -> Result<NetworkLayout> {
    NetworkLayout::new(&[0, 0, 0, 0], fock_dim, 3, Vec::new())
}

fn check_layout(layout: &NetworkLayout) -> Result<()> {
    if layout.n_cavities() != 4 || layout.n_couplers() != 3 {
        return Err(Error::Layout("the cavity-entangling schedule needs 4 cavities and 3 couplers".into()));
    }
    if layout.fock_dim() < 3 {
        return Err(Error::Truncation {
            fock_dim: layout.fock_dim(),
            reason: "two-photon states |2> are populated; Fock dimension must be at least 3",
        });
    }
    Ok(())
}

/// Cavities empty, coupler 2 in (|e⟩ + |f⟩)/√2, couplers 1 and 3 in |g⟩.
pub fn appendix_initial_state(layout: &NetworkLayout) -> Result<QuantumState<f64>> {
    check_layout(layout)?;
    let mut locals: Vec<Vec<Complex64>> = layout.dims().iter().map(|&d| basis_vector(d, 0)).collect();
    let s = Complex64::new(FRAC_1_SQRT_2, 0.0);
    locals[layout.coupler_subsystem(1)] = vec![Complex64::new(0.0, 0.0), s, s];
    QuantumState::vector(product_state(&locals))
}

/// `(|0011⟩ + |1100⟩)/√2` over the four cavities.
pub fn appendix_cavity_target(fock_dim: usize) -> Vec<Complex64> {
    let mut v = vec![Complex64::new(0.0, 0.0); fock_dim.pow(4)];
    let idx = |n: [usize; 4]| n.iter().fold(0, |acc, &k| acc * fock_dim + k);
    v[idx([0, 0, 1, 1])] = Complex64::new(FRAC_1_SQRT_2, 0.0);
    v[idx([1, 1, 0, 0])] = Complex64::new(FRAC_1_SQRT_2, 0.0);
    v
}

/// Positions of the four cavities, for partial traces.
pub fn appendix_cavity_subsystems(layout: &NetworkLayout) -> Vec<usize> {
    (0..layout.n_cavities()).map(|l| layout.cavity_subsystem(l)).collect()
}

pub fn appendix_coupler_subsystems(layout: &NetworkLayout) -> Vec<usize> {
    (0..layout.n_couplers()).map(|k| layout.coupler_subsystem(k)).collect()
}

/// Six-step preparation of `(|0011⟩ + |1100⟩)/√2` in four cavities through
/// three coupler qutrits. Each step ends with a segment labelled `step-k`.
pub fn appendix_schedule(layout: &NetworkLayout, ap: &AppendixParams) -> Result<Schedule> {
    check_layout(layout)?;
    ap.validate()?;
    let [mu1, mu2, mu3, mu4, mu5, mu6] = ap.mu;
    let pump = ap.pump_rabi;
    let half = |mu: f64| PI / (2.0 * mu);
    let two_photon = |mu: f64| PI / (2.0 * SQRT_2 * mu);
    let res = |coupler, cavity, upper, lower, mu| Generator::CouplerResonant { coupler, cavity, upper, lower, mu };
    let pump_ge = Generator::CouplerPump { coupler: 1, upper: E, lower: G, rabi: pump, phase: -PI / 2.0 };
    let pump_ef = Generator::CouplerPump { coupler: 1, upper: F, lower: E, rabi: pump, phase: -PI / 2.0 };
    let t_pump = half(pump);

    let mut s = Schedule::default();
    let mut push = |label: &str, duration: f64, generator: Generator| {
        s.segments.push(super::schedule::Segment { label: label.to_string(), duration, clock_origin: 0.0, generator });
    };
    push("step-1.swap", half(mu1), res(1, 1, E, G, mu1));
    push("step-1", t_pump, pump_ge.clone());
    push("step-2", two_photon(mu1), res(1, 1, E, G, mu1));
    push("step-3.swap", half(mu2), res(1, 2, F, E, mu2));
    push("step-3", t_pump, pump_ef);
    push("step-4.pump", t_pump, pump_ge);
    push("step-4", two_photon(mu2), res(1, 2, F, E, mu2));
    push("step-5.absorb", two_photon(mu3), res(0, 1, E, G, mu3));
    push("step-5", half(mu4), res(0, 0, E, G, mu4));
    push("step-6.absorb", two_photon(mu5), res(2, 2, E, G, mu5));
    push("step-6", half(mu6), res(2, 3, E, G, mu6));
    Ok(s)
}

/// Images of |e,1⟩, |f,0⟩ and |g,0⟩ after resonant |g⟩↔|e⟩ coupling with
/// constant `mu` for `π/(2√2 μ)`, on one qutrit and one cavity (Fock 3).
#[derive(Clone, Debug, PartialEq)]
pub struct TwoPhotonMap {
    /// Amplitude of |g,2⟩ in the image of |e,1⟩.
    pub e1_to_g2: Complex64,
    /// Amplitude of |f,0⟩ in the image of |f,0⟩.
    pub f0_to_f0: Complex64,
    /// Amplitude of |g,0⟩ in the image of |g,0⟩.
    pub g0_to_g0: Complex64,
}

pub fn two_photon_rabi_check(mu: f64, cfg: &IntegratorConfig) -> Result<TwoPhotonMap> {
    // cavity (Fock 3) ⊗ qutrit
    let dims = [3, QUTRIT_DIM];
    let op = embed_dims(&local_annihilation::<f64>(3)?, 0, &dims)?.mul(&embed_dims(&local_transition(QUTRIT_DIM, E, G)?, 1, &dims)?)?;
    let mut h = ModulatedHamiltonian::new(9);
    h.push(op.scale(Complex64::new(mu, 0.0)), 0.0);
    let t = PI / (2.0 * SQRT_2 * mu);
    let idx = |n: usize, q: usize| n * QUTRIT_DIM + q;
    let evolve = |from: usize, to: usize| -> Result<Complex64> {
        let (psi, _) = propagate_vector(&basis_vector(9, from), &h, (0.0, t), cfg, "two-photon")?;
        Ok(psi[to])
    };
    Ok(TwoPhotonMap {
        e1_to_g2: evolve(idx(1, E), idx(2, G))?,
        f0_to_f0: evolve(idx(0, F), idx(0, F))?,
        g0_to_g0: evolve(idx(0, G), idx(0, G))?,
    })
}
