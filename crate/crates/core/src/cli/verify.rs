//! Built-in consistency checks behind `cavity-ghz verify`.

use std::f64::consts::FRAC_1_SQRT_2;

use clap::ValueEnum;
use num_complex::Complex64;

use crate::analysis::{fidelity, fidelity_to_vector};
use crate::dynamics::{run_schedule, IntegratorConfig, Stage};
use crate::error::Result;
use crate::hamiltonian::{mhz, DeviceParams};
use crate::hilbert::{overlap, reduce_pure, DenseMatrix, NetworkLayout, QuantumState};
use crate::protocol::{
    appendix_cavity_subsystems, appendix_cavity_target, appendix_coupler_subsystems, appendix_initial_state, appendix_layout,
    appendix_schedule, main_schedule, noisy_variant, product_state, target_branch_indices, target_state, two_photon_rabi_check,
    initial_state, AppendixParams, DispersiveModel, Generator, InitialCondition, Schedule,
};

/// Amplitude and fidelity tolerance of the noiseless checks.
pub const EXACT_TOL: f64 = 1e-9;
/// Fidelity the effective dispersive model must reach against the full one at Δ/g = 50.
pub const EFFECTIVE_MODEL_FIDELITY: f64 = 0.998;
const HERMITIAN_TOL: f64 = 1e-12;
const POSITIVITY_TOL: f64 = 1e-6;

/// Deliberate defects used to show that the checks can fail.
#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Mutation {
    /// Halve the dispersive step.
    WrongTau1,
    /// Drop the Hermitian conjugate of one Hamiltonian term.
    MissingAdjoint,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

struct Checker {
    mutation: Option<Mutation>,
    cfg: IntegratorConfig,
}

const G: usize = 0;
const E: usize = 1;

fn qutrit(amps: [f64; 3]) -> Vec<Complex64> {
    amps.iter().map(|&a| Complex64::new(a, 0.0)).collect()
}

fn fock(n: usize, d: usize) -> Vec<Complex64> {
    let mut v = vec![Complex64::new(0.0, 0.0); d];
    v[n] = Complex64::new(1.0, 0.0);
    v
}

fn ideal_params(n: usize) -> DeviceParams {
    DeviceParams::transmon(n, mhz(14.15), 0.0).without_decoherence().without_unwanted_couplings()
}

impl Checker {
    fn schedule(&self, layout: &NetworkLayout, params: &DeviceParams, model: DispersiveModel) -> Result<Schedule> {
        let mut s = main_schedule(layout, params, model)?;
        if self.mutation == Some(Mutation::WrongTau1) {
            for seg in &mut s.segments {
                if matches!(seg.generator, Generator::Dispersive { .. }) {
                    seg.duration *= 0.5;
                }
            }
        }
        Ok(s)
    }

    fn stages(&self, schedule: &Schedule, layout: &NetworkLayout, params: &DeviceParams) -> Result<Vec<Stage<f64>>> {
        let mut stages = schedule.stages::<f64>(layout, params)?;
        if self.mutation == Some(Mutation::MissingAdjoint) {
            if let Some(term) = stages.iter_mut().flat_map(|s| s.hamiltonian.terms_mut().iter_mut()).find(|t| t.with_adjoint) {
                term.with_adjoint = false;
            }
        }
        Ok(stages)
    }

    fn evolve_kind(&self, layout: &NetworkLayout, params: &DeviceParams, kind: &str, psi: Vec<Complex64>) -> Result<Vec<Complex64>> {
        let schedule = self.schedule(layout, params, DispersiveModel::Effective)?;
        let stages: Vec<_> = self
            .stages(&schedule, layout, params)?
            .into_iter()
            .zip(&schedule.segments)
            .filter(|(_, seg)| seg.generator.kind() == kind)
            .map(|(st, _)| st)
            .collect();
        let traj = run_schedule(&QuantumState::vector(psi)?, &stages, &self.cfg)?;
        Ok(traj.state.as_vector().expect("pure evolution").to_vec())
    }

    fn dispersive_phase(&self) -> Result<(bool, String)> {
        let layout = NetworkLayout::chain(1, 2, 2)?;
        let params = ideal_params(1);
        let plus = qutrit([FRAC_1_SQRT_2, FRAC_1_SQRT_2, 0.0]);
        let cav = vec![Complex64::new(FRAC_1_SQRT_2, 0.0); 2];
        let psi = self.evolve_kind(&layout, &params, "dispersive", product_state(&[cav, plus, qutrit([1.0, 0.0, 0.0])]))?;
        let at = |n, q| psi[layout.basis_index(&[n, q, G]).unwrap()];
        let flip_e = at(1, E) / at(0, E);
        let flip_g = at(1, G) / at(0, G);
        let err = (flip_e + 1.0).norm().max((flip_g - 1.0).norm());
        Ok((err < EXACT_TOL, format!("photon phase with |e>: {flip_e:.9}, with |g>: {flip_g:.9}")))
    }

    fn resonant_swap(&self) -> Result<(bool, String)> {
        let layout = NetworkLayout::chain(1, 2, 2)?;
        let params = ideal_params(1);
        let g0 = qutrit([1.0, 0.0, 0.0]);
        let psi = self.evolve_kind(&layout, &params, "resonant", product_state(&[fock(1, 2), g0.clone(), g0]))?;
        let amp = psi[layout.basis_index(&[0, G, E])?];
        let err = (amp - Complex64::new(0.0, -1.0)).norm();
        Ok((err < EXACT_TOL, format!("|1,g> -> {amp:.9} |0,e>")))
    }

    fn pulse_map(&self) -> Result<(bool, String)> {
        let layout = NetworkLayout::chain(1, 2, 2)?;
        let params = ideal_params(1);
        let h = FRAC_1_SQRT_2;
        let ground = qutrit([1.0, 0.0, 0.0]);
        let plus = self.evolve_kind(&layout, &params, "pulse", product_state(&[fock(0, 2), qutrit([h, h, 0.0]), ground.clone()]))?;
        let minus = self.evolve_kind(&layout, &params, "pulse", product_state(&[fock(0, 2), qutrit([h, -h, 0.0]), ground]))?;
        let a = plus[layout.basis_index(&[0, G, G])?];
        let b = minus[layout.basis_index(&[0, E, G])?];
        let err = (a - 1.0).norm().max((b + 1.0).norm());
        Ok((err < EXACT_TOL, format!("|+> -> {a:.9} |g>, |-> -> {b:.9} |e>")))
    }

    fn two_photon(&self) -> Result<(bool, String)> {
        let map = two_photon_rabi_check(mhz(10.0), &self.cfg)?;
        let err = (map.e1_to_g2.norm() - 1.0).abs().max((map.f0_to_f0 - 1.0).norm()).max((map.g0_to_g0 - 1.0).norm());
        Ok((err < EXACT_TOL, format!("|e,1> -> {:.9} |g,2>", map.e1_to_g2)))
    }

    fn ideal_protocol(&self) -> Result<(bool, String)> {
        let layout = NetworkLayout::chain(2, 2, 2)?;
        let params = ideal_params(2);
        let ic = InitialCondition::uniform(Complex64::new(FRAC_1_SQRT_2, 0.0), Complex64::new(FRAC_1_SQRT_2, 0.0), 2)?;
        let schedule = self.schedule(&layout, &params, DispersiveModel::Effective)?;
        let stages = self.stages(&schedule, &layout, &params)?;
        let traj = run_schedule(&initial_state(&layout, &ic)?, &stages, &self.cfg)?;
        let target = target_state(&layout, &ic)?;
        let f = fidelity(&traj.state, &target)?;
        let (a, b) = target_branch_indices(&layout, &ic)?;
        let (psi, t) = (traj.state.as_vector().expect("pure"), target.as_vector().expect("pure"));
        let ratio = (psi[b] / psi[a]) / (t[b] / t[a]);
        let ok = f > 1.0 - EXACT_TOL && (ratio - 1.0).norm() < EXACT_TOL;
        Ok((ok, format!("N=2 m=2 fidelity {f:.12}, phase ratio {ratio:.9}")))
    }

    fn appendix(&self) -> Result<(bool, String)> {
        let layout = appendix_layout(3)?;
        let schedule = appendix_schedule(&layout, &AppendixParams::default())?;
        let stages = self.stages(&schedule, &layout, &DeviceParams::default())?;
        let traj = run_schedule(&appendix_initial_state(&layout)?, &stages, &self.cfg)?;
        let psi = traj.state.as_vector().expect("pure");
        let rho_c = reduce_pure(psi, &appendix_cavity_subsystems(&layout), layout.dims())?;
        let rho_q = reduce_pure(psi, &appendix_coupler_subsystems(&layout), layout.dims())?;
        let f = fidelity_to_vector(&QuantumState::Density(rho_c), &appendix_cavity_target(3))?;
        let p = rho_q.purity();
        Ok((f > 1.0 - EXACT_TOL && p > 1.0 - EXACT_TOL, format!("cavity fidelity {f:.12}, coupler purity {p:.12}")))
    }

    fn lindblad(&self) -> Result<(bool, String)> {
        let layout = NetworkLayout::chain(1, 2, 2)?;
        let params = DeviceParams::transmon(1, mhz(14.15), 0.1);
        let ic = InitialCondition::uniform(Complex64::new(FRAC_1_SQRT_2, 0.0), Complex64::new(FRAC_1_SQRT_2, 0.0), 1)?;
        let psi0 = initial_state(&layout, &ic)?;
        let noisy = noisy_variant(&self.schedule(&layout, &params, DispersiveModel::Full)?);
        let traj = run_schedule(&psi0, &self.stages(&noisy, &layout, &params)?, &self.cfg)?;
        let herm = traj.state.hermiticity_error();
        let min_eig = traj.min_eigenvalue().unwrap_or(f64::NAN);
        let trace_err = traj.max_trace_error();

        // Without collapse operators the density path must follow the vector path.
        let clean = ideal_params(1);
        let schedule = self.schedule(&layout, &clean, DispersiveModel::Effective)?;
        let stages = self.stages(&schedule, &layout, &clean)?;
        let vec = run_schedule(&psi0, &stages, &self.cfg)?.state;
        let rho0 = QuantumState::Density(DenseMatrix::outer(psi0.as_vector().expect("pure")));
        let rho = run_schedule(&rho0, &stages, &self.cfg)?.state;
        let agree = fidelity_to_vector(&rho, vec.as_vector().expect("pure"))?;

        let ok = herm < HERMITIAN_TOL && min_eig > -POSITIVITY_TOL && trace_err < 1e-6 && agree > 1.0 - EXACT_TOL;
        Ok((
            ok,
            format!("trace {trace_err:.1e}, hermiticity {herm:.1e}, min eig {min_eig:.1e}, density/vector {agree:.12}"),
        ))
    }

    fn effective_model(&self) -> Result<(bool, String)> {
        let layout = NetworkLayout::chain(1, 2, 2)?;
        let mut params = ideal_params(1);
        params.cavities[0].g = params.cavities[0].delta / 50.0;
        let h = FRAC_1_SQRT_2;
        let psi0 = product_state(&[qutrit([h, h, 0.0])[..2].to_vec(), qutrit([h, h, 0.0]), qutrit([1.0, 0.0, 0.0])]);
        let run = |model| -> Result<Vec<Complex64>> {
            let schedule = self.schedule(&layout, &params, model)?;
            let stages: Vec<_> = self
                .stages(&schedule, &layout, &params)?
                .into_iter()
                .zip(&schedule.segments)
                .filter(|(_, seg)| seg.generator.kind() == "dispersive")
                .map(|(st, _)| st)
                .collect();
            Ok(run_schedule(&QuantumState::vector(psi0.clone())?, &stages, &self.cfg)?.state.as_vector().expect("pure").to_vec())
        };
        let full = run(DispersiveModel::Full)?;
        let eff = run(DispersiveModel::Effective)?;
        let f = overlap(&eff, &full)?.norm();
        Ok((f >= EFFECTIVE_MODEL_FIDELITY, format!("Δ/g = 50: overlap {f:.6}")))
    }

    fn hermiticity(&self) -> Result<(bool, String)> {
        let layout = NetworkLayout::chain(2, 2, 2)?;
        let params = DeviceParams::transmon(2, mhz(14.15), 0.1);
        let noisy = noisy_variant(&self.schedule(&layout, &params, DispersiveModel::Full)?);
        let mut stages = self.stages(&noisy, &layout, &params)?;
        let app_layout = appendix_layout(3)?;
        let app = appendix_schedule(&app_layout, &AppendixParams::default())?;
        let app_stages = self.stages(&app, &app_layout, &DeviceParams::default())?;
        let mut worst = None;
        let mut count = 0;
        for st in stages.drain(..).chain(app_stages) {
            for t in [0.0, 0.0137, 0.1] {
                count += 1;
                if !st.hamiltonian.is_hermitian_at(t, HERMITIAN_TOL)? && worst.is_none() {
                    worst = Some(st.label.clone());
                }
            }
        }
        Ok(match worst {
            None => (true, format!("{count} evaluations Hermitian")),
            Some(label) => (false, format!("stage {label} is not Hermitian")),
        })
    }
}

/// Runs every check; a check that errors counts as failed.
pub fn run_checks(mutation: Option<Mutation>) -> Vec<CheckResult> {
    let checker = Checker { mutation, cfg: IntegratorConfig::default() };
    type Check = fn(&Checker) -> Result<(bool, String)>;
    let checks: [(&'static str, Check); 9] = [
        ("dispersive phase flip", Checker::dispersive_phase),
        ("resonant photon transfer", Checker::resonant_swap),
        ("pulse basis rotation", Checker::pulse_map),
        ("two-photon transfer", Checker::two_photon),
        ("ideal protocol", Checker::ideal_protocol),
        ("coupler protocol", Checker::appendix),
        ("master equation invariants", Checker::lindblad),
        ("effective dispersive model", Checker::effective_model),
        ("Hamiltonian hermiticity", Checker::hermiticity),
    ];
    checks
        .iter()
        .map(|(name, f)| match f(&checker) {
            Ok((passed, detail)) => CheckResult { name, passed, detail },
            Err(e) => CheckResult { name, passed: false, detail: format!("error: {e}") },
        })
        .collect()
}

pub fn format_table(results: &[CheckResult]) -> String {
    let width = results.iter().map(|r| r.name.len()).max().unwrap_or(0);
    let mut out = String::new();
    for r in results {
        out.push_str(&format!("{:<4}  {:<width$}  {}\n", if r.passed { "PASS" } else { "FAIL" }, r.name, r.detail));
    }
    let failed = results.iter().filter(|r| !r.passed).count();
    out.push_str(&format!("{} checks, {} failed", results.len(), failed));
    out
}
