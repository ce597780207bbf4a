use std::f64::consts::{PI, SQRT_2};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `x` MHz (quoted as a frequency over 2π) in rad/µs.
pub fn mhz(x: f64) -> f64 {
    2.0 * PI * x
}

/// `x` GHz (quoted as a frequency over 2π) in rad/µs.
pub fn ghz(x: f64) -> f64 {
    2.0 * PI * 1e3 * x
}

/// Rate in 1/µs from a lifetime in µs; `None` means no decay.
pub fn rate_from_lifetime(lifetime_us: Option<f64>) -> f64 {
    match lifetime_us {
        Some(t) if t.is_finite() => 1.0 / t,
        _ => 0.0,
    }
}

/// Couplings and detunings of one cavity and its qutrit group (rad/µs).
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CavityParams {
    /// Dispersive |e>↔|f> coupling of the active qutrits.
    pub g: f64,
    /// Unwanted |g>↔|e> coupling of the active qutrits.
    pub g_tilde: f64,
    /// Resonant |g>↔|e> coupling of qutrit m_l.
    pub g_r: f64,
    /// Unwanted |e>↔|f> coupling of qutrit m_l.
    pub g_r_tilde: f64,
    /// Pulse Rabi frequency on |g>↔|e>.
    pub omega: f64,
    /// Unwanted pulse Rabi frequency on |e>↔|f>.
    pub omega_tilde: f64,
    /// ω_fe − ω_c during the dispersive step.
    pub delta: f64,
    /// ω_eg − ω_c during the dispersive step.
    pub delta_tilde: f64,
    /// ω_fe − ω_c during the resonant step.
    pub delta_r: f64,
    pub kappa: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CrosstalkParams {
    pub pair: (usize, usize),
    pub g: f64,
    /// ω_{c_j} − ω_{c_{j+1}}.
    pub delta: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct QutritRates {
    pub gamma_eg: f64,
    pub gamma_fe: f64,
    pub gamma_fg: f64,
    pub gamma_phi_e: f64,
    pub gamma_phi_f: f64,
}

impl QutritRates {
    fn all(&self) -> [f64; 5] {
        [self.gamma_eg, self.gamma_fe, self.gamma_fg, self.gamma_phi_e, self.gamma_phi_f]
    }
}

/// Physical parameters of the device. Angular frequencies in rad/µs, times in µs.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct DeviceParams {
    pub cavities: Vec<CavityParams>,
    /// ω_fe − ω_p.
    pub delta_p: f64,
    pub pulse_phase: f64,
    pub crosstalk: Vec<CrosstalkParams>,
    pub rates: QutritRates,
    /// Level-spacing adjustment time.
    pub tau_d: f64,
    /// Bare cavity frequencies, for reporting only.
    pub omega_c: Option<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MatchingReport {
    pub lambdas: Vec<f64>,
    /// `(max λ − min λ) / max |λ|`.
    pub spread: f64,
    pub matched: bool,
}

pub const MATCHING_TOL: f64 = 1e-9;

impl DeviceParams {
    /// Parameter set of the four-resonator transmon example, truncated or
    /// extended to `n` cavities: Δ_l/2π alternates 100, 80 MHz, g_l follows the
    /// matching condition from `g1`, g̃ = g/√2, g_r = g̃, g̃_r = √2 g_r,
    /// Ω/2π = 45 MHz, Ω̃ = √2 Ω, detunings of the unwanted transitions −0.7 GHz,
    /// nearest-neighbour crosstalk 0.01 max g.
    pub fn transmon(n: usize, g1: f64, kappa: f64) -> Self {
        let anharmonicity = ghz(0.7);
        let omega = mhz(45.0);
        let cavities: Vec<CavityParams> = (0..n)
            .map(|l| {
                let delta = if l % 2 == 0 { mhz(100.0) } else { mhz(80.0) };
                let g = g1 * (delta / mhz(100.0)).sqrt();
                let g_tilde = g / SQRT_2;
                let g_r = g_tilde;
                CavityParams {
                    g,
                    g_tilde,
                    g_r,
                    g_r_tilde: SQRT_2 * g_r,
                    omega,
                    omega_tilde: SQRT_2 * omega,
                    delta,
                    delta_tilde: delta + anharmonicity,
                    delta_r: -anharmonicity,
                    kappa,
                }
            })
            .collect();
        let g_max = cavities.iter().map(|c| c.g).fold(0.0, f64::max);
        let crosstalk = (1..n)
            .map(|j| CrosstalkParams {
                pair: (j - 1, j),
                g: 0.01 * g_max,
                delta: cavities[j].delta - cavities[j - 1].delta,
            })
            .collect();
        let omega_c = (0..n).map(|l| if l % 2 == 0 { ghz(6.6) } else { ghz(6.62) }).collect();
        Self {
            cavities,
            delta_p: -anharmonicity,
            pulse_phase: PI / 2.0,
            crosstalk,
            rates: QutritRates {
                gamma_eg: 1.0 / 60.0,
                gamma_fe: 1.0 / 30.0,
                gamma_fg: 1.0 / 150.0,
                gamma_phi_e: 1.0 / 20.0,
                gamma_phi_f: 1.0 / 20.0,
            },
            tau_d: 0.0,
            omega_c: Some(omega_c),
        }
    }

    pub fn n_cavities(&self) -> usize {
        self.cavities.len()
    }

    pub fn cavity(&self, l: usize) -> Result<&CavityParams> {
        self.cavities.get(l).ok_or(Error::InvalidCavity { index: l, count: self.cavities.len() })
    }

    /// λ_l = g_l² / Δ_l.
    pub fn lambda(&self, l: usize) -> Result<f64> {
        let c = self.cavity(l)?;
        if c.delta == 0.0 {
            return Err(Error::DivisionByZero(format!("detuning of cavity {} is zero", l + 1)));
        }
        Ok(c.g * c.g / c.delta)
    }

    pub fn crosstalk_for(&self, pair: (usize, usize)) -> Option<&CrosstalkParams> {
        self.crosstalk.iter().find(|x| x.pair == pair || (x.pair.1, x.pair.0) == pair)
    }

    /// Largest collapse rate present.
    pub fn max_rate(&self) -> f64 {
        self.cavities.iter().map(|c| c.kappa).chain(self.rates.all()).fold(0.0, f64::max)
    }

    /// Copy with every decoherence rate set to zero.
    pub fn without_decoherence(&self) -> Self {
        let mut out = self.clone();
        out.cavities.iter_mut().for_each(|c| c.kappa = 0.0);
        out.rates = QutritRates::default();
        out
    }

    /// Copy with the unwanted couplings and the crosstalk switched off.
    pub fn without_unwanted_couplings(&self) -> Self {
        let mut out = self.clone();
        for c in &mut out.cavities {
            c.g_tilde = 0.0;
            c.g_r_tilde = 0.0;
            c.omega_tilde = 0.0;
        }
        out.crosstalk.iter_mut().for_each(|x| x.g = 0.0);
        out
    }

    pub fn validate(&self) -> Result<()> {
        for (l, c) in self.cavities.iter().enumerate() {
            let all = [c.g, c.g_tilde, c.g_r, c.g_r_tilde, c.omega, c.omega_tilde, c.delta, c.delta_tilde, c.delta_r, c.kappa];
            if all.iter().any(|v| !v.is_finite()) {
                return Err(Error::Params(format!("cavity {} has a non-finite parameter", l + 1)));
            }
            if c.kappa < 0.0 {
                return Err(Error::Params(format!("cavity {} decay rate is negative", l + 1)));
            }
            if c.g != 0.0 && c.delta <= 0.0 {
                return Err(Error::Params(format!("cavity {}: dispersive detuning must be positive", l + 1)));
            }
        }
        if self.rates.all().iter().any(|&r| !(r >= 0.0) || !r.is_finite()) {
            return Err(Error::Params("qutrit rates must be finite and non-negative".into()));
        }
        if !(self.tau_d >= 0.0) {
            return Err(Error::Params("tau_d must be non-negative".into()));
        }
        if let Some(wc) = &self.omega_c {
            if wc.len() != self.cavities.len() {
                return Err(Error::Params("omega_c must list one frequency per cavity".into()));
            }
            self.check_crosstalk_detunings(1e-6)?;
        }
        Ok(())
    }

    /// With bare cavity frequencies supplied, Δ_{j(j+1)} = ω_{c_j} − ω_{c_{j+1}}
    /// and Δ_{j+1} − Δ_j must agree.
    pub fn check_crosstalk_detunings(&self, rel_tol: f64) -> Result<()> {
        let Some(wc) = &self.omega_c else { return Ok(()) };
        for x in &self.crosstalk {
            let (a, b) = x.pair;
            let (Some(wa), Some(wb), Some(ca), Some(cb)) = (wc.get(a), wc.get(b), self.cavities.get(a), self.cavities.get(b)) else {
                return Err(Error::Params(format!("crosstalk pair ({a}, {b}) out of range")));
            };
            let from_bare = wa - wb;
            let from_detunings = cb.delta - ca.delta;
            let scale = from_bare.abs().max(from_detunings.abs()).max(x.delta.abs()).max(1e-12);
            if (from_bare - from_detunings).abs() > rel_tol * scale || (from_bare - x.delta).abs() > rel_tol * scale {
                return Err(Error::Params(format!(
                    "crosstalk detuning of pair ({a}, {b}) is inconsistent: {} (bare), {} (detunings), {} (given)",
                    from_bare, from_detunings, x.delta
                )));
            }
        }
        Ok(())
    }

    pub fn validate_matching(&self) -> Result<MatchingReport> {
        let lambdas = (0..self.n_cavities()).map(|l| self.lambda(l)).collect::<Result<Vec<_>>>()?;
        Ok(matching_report(lambdas))
    }
}

fn matching_report(lambdas: Vec<f64>) -> MatchingReport {
    let max = lambdas.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = lambdas.iter().copied().fold(f64::INFINITY, f64::min);
    let scale = lambdas.iter().map(|l| l.abs()).fold(0.0, f64::max);
    let spread = if lambdas.len() < 2 || scale == 0.0 { 0.0 } else { (max - min) / scale };
    MatchingReport { lambdas, spread, matched: spread < MATCHING_TOL }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn transmon_relations_are_exact() {
        let p = DeviceParams::transmon(4, mhz(14.15), 0.1);
        for c in &p.cavities {
            assert_eq!(c.g_tilde, c.g / SQRT_2);
            assert_eq!(c.g_r_tilde, SQRT_2 * c.g_r);
            assert_eq!(c.omega_tilde, SQRT_2 * c.omega);
            assert!((c.delta_r - ghz(-0.7)).abs() < 1e-9);
        }
        assert!((p.cavities[1].g - (0.8f64).sqrt() * p.cavities[0].g).abs() < 1e-12);
        assert_eq!(p.cavities[2].g, p.cavities[0].g);
        // g_r,2 / 2π ≈ 8.95 MHz
        assert!((p.cavities[1].g_r / mhz(1.0) - 8.95).abs() < 0.01);
        p.validate().unwrap();
    }

    #[test]
    fn crosstalk_detunings_follow_cavity_detunings() {
        let p = DeviceParams::transmon(4, mhz(14.15), 0.1);
        let d: Vec<f64> = p.crosstalk.iter().map(|x| x.delta / mhz(1.0)).collect();
        for (got, want) in d.iter().zip([-20.0, 20.0, -20.0]) {
            assert!((got - want).abs() < 1e-9);
        }
        p.check_crosstalk_detunings(1e-9).unwrap();
    }

    #[test]
    fn matching_cases() {
        let p = DeviceParams::transmon(4, mhz(14.15), 0.1);
        assert!(p.validate_matching().unwrap().matched);

        let mut q = p.clone();
        for c in &mut q.cavities {
            c.g = mhz(14.15);
        }
        assert!(!q.validate_matching().unwrap().matched);

        let single = DeviceParams::transmon(1, mhz(3.0), 0.0);
        assert!(single.validate_matching().unwrap().matched);
    }

    #[test]
    fn zero_detuning_is_division_by_zero() {
        let mut p = DeviceParams::transmon(1, mhz(10.0), 0.0);
        p.cavities[0].delta = 0.0;
        assert!(matches!(p.lambda(0), Err(Error::DivisionByZero(_))));
    }
}
