use num_complex::Complex64;

use crate::analysis::{fidelity, fidelity_to_vector, run_sweep, SweepOptions, SweepOutcome, SweepRecord, SCHEMA_VERSION};
use crate::config::{Mode, RunConfig, Timing};
use crate::error::{Error, Result};
use crate::hilbert::{partial_trace, reduce_pure, NetworkLayout, QuantumState};
use crate::protocol::{
    appendix_cavity_subsystems, appendix_cavity_target, appendix_coupler_subsystems, appendix_initial_state, appendix_schedule,
    execute, initial_state, main_schedule, noisy_variant, staggered_schedule, t_op, target_branch_indices, target_state, Schedule,
};

/// Result of one protocol run.
#[derive(Clone, Debug, PartialEq)]
pub struct RunSummary {
    pub mode: Mode,
    pub noise: bool,
    pub dim: usize,
    pub density: bool,
    pub staggered: bool,
    pub fidelity: f64,
    pub t_op_us: f64,
    /// Largest |Tr ρ − 1| (or |‖ψ‖ − 1|) seen.
    pub trace_err: f64,
    pub hermiticity_err: f64,
    /// Smallest eigenvalue at segment ends; 0 for pure-state runs.
    pub min_eig: f64,
    /// Simulated over expected relative phase between the two branches
    /// (pure-state main and symmetric runs).
    pub phase_ratio: Option<Complex64>,
    /// Purity of the coupler state (appendix runs).
    pub coupler_purity: Option<f64>,
    pub steps: usize,
    pub config_hash: String,
}

fn check_caps(cfg: &RunConfig, density: bool) -> Result<usize> {
    let (cap, kind) = if density {
        (cfg.solver.density_cap, "density-matrix")
    } else {
        (cfg.solver.vector_cap, "state-vector")
    };
    let dim = cfg.total_dim().unwrap_or(usize::MAX);
    if dim > cap {
        return Err(Error::DimensionCap { dim, cap, kind });
    }
    Ok(dim)
}

fn schedule_for(cfg: &RunConfig, layout: &NetworkLayout, params: &crate::hamiltonian::DeviceParams) -> Result<(Schedule, bool)> {
    let model = cfg.protocol.dispersive_model;
    match cfg.protocol.mode {
        Mode::Appendix => Ok((appendix_schedule(layout, &cfg.appendix_params())?, false)),
        Mode::Main | Mode::Symmetric => match cfg.protocol.timing {
            Timing::Common => Ok((main_schedule(layout, params, model)?, false)),
            Timing::Staggered => Ok((staggered_schedule(layout, params, model)?, true)),
            Timing::Auto => match main_schedule(layout, params, model) {
                Err(Error::RequiresStaggered { .. }) => Ok((staggered_schedule(layout, params, model)?, true)),
                other => Ok((other?, false)),
            },
        },
    }
}

/// Builds and runs the configured protocol.
pub fn execute_run(cfg: &RunConfig, noise: bool) -> Result<RunSummary> {
    cfg.validate()?;
    let params = cfg.device_params()?;
    let density = noise && params.max_rate() > 0.0;
    let dim = check_caps(cfg, density)?;
    let layout = cfg.network_layout()?;
    let (mut schedule, staggered) = schedule_for(cfg, &layout, &params)?;
    if noise {
        schedule = noisy_variant(&schedule);
    }
    let integrator = cfg.solver.integrator();
    let state0 = match cfg.protocol.mode {
        Mode::Appendix => appendix_initial_state(&layout)?,
        _ => initial_state(&layout, &cfg.initial_condition()?)?,
    };
    let traj = execute(&layout, &params, &schedule, &state0, &integrator)?;
    let state = &traj.state;

    let (fid, phase_ratio, coupler_purity) = match cfg.protocol.mode {
        Mode::Appendix => {
            let cavities = appendix_cavity_subsystems(&layout);
            let couplers = appendix_coupler_subsystems(&layout);
            let (rho_c, rho_q) = match state {
                QuantumState::Vector(psi) => (reduce_pure(psi, &cavities, layout.dims())?, reduce_pure(psi, &couplers, layout.dims())?),
                QuantumState::Density(_) => (partial_trace(state, &cavities, &layout)?, partial_trace(state, &couplers, &layout)?),
            };
            let f = fidelity_to_vector(&QuantumState::Density(rho_c), &appendix_cavity_target(layout.fock_dim()))?;
            (f, None, Some(rho_q.purity()))
        }
        _ => {
            let ic = cfg.initial_condition()?;
            let target = target_state(&layout, &ic)?;
            let f = fidelity(state, &target)?;
            let ratio = match (state, target.as_vector()) {
                (QuantumState::Vector(psi), Some(t)) => {
                    let (a, b) = target_branch_indices(&layout, &ic)?;
                    Some((psi[b] / psi[a]) / (t[b] / t[a]))
                }
                _ => None,
            };
            (f, ratio, None)
        }
    };
    Ok(RunSummary {
        mode: cfg.protocol.mode,
        noise,
        dim,
        density: state.is_density(),
        staggered,
        fidelity: fid,
        t_op_us: t_op(&schedule),
        trace_err: traj.max_trace_error(),
        hermiticity_err: state.hermiticity_error(),
        min_eig: traj.min_eigenvalue().unwrap_or(0.0),
        phase_ratio,
        coupler_purity,
        steps: traj.total_steps(),
        config_hash: cfg.hash(),
    })
}

impl RunSummary {
    pub fn record(&self, param_name: &str, param_value: f64) -> SweepRecord {
        SweepRecord {
            schema_version: SCHEMA_VERSION,
            param_name: param_name.to_string(),
            param_value,
            fidelity: self.fidelity,
            t_op_us: self.t_op_us,
            trace_err: self.trace_err,
            min_eig: self.min_eig,
            wall_ms: 0.0,
            config_hash: self.config_hash.clone(),
        }
    }
}

/// Runs the sweep section of `cfg`.
pub fn execute_sweep(cfg: &RunConfig, noise: bool, opts: SweepOptions) -> Result<SweepOutcome> {
    let sweep = cfg.sweep.as_ref().ok_or_else(|| Error::Config("configuration has no sweep section".into()))?;
    let values = sweep.values.iter().map(|v| v.as_f64()).collect::<Result<Vec<_>>>()?;
    let name = sweep.parameter.as_str();
    run_sweep(name, &values, opts, |v| {
        let point = cfg.with_parameter(name, v).map_err(|e| (String::new(), e))?;
        let hash = point.hash();
        execute_run(&point, noise).map(|s| s.record(name, v)).map_err(|e| (hash, e))
    })
}
