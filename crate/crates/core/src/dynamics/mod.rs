//! Time evolution: Schrödinger and Lindblad integration over a sequence of
//! piecewise-defined stages.

mod collapse;
mod integrator;

pub use collapse::{build_collapse_set, CollapseEntry, CollapseKind, CollapseSet};
pub use integrator::{integrate_master, propagate_vector, BoundaryChecks, IntegratorConfig, Method, StepStats, DRIFT_LIMIT};

use crate::error::{Error, Result};
use crate::hamiltonian::ModulatedHamiltonian;
use crate::hilbert::{QuantumState, POSITIVITY_TOL};
use crate::scalar::Real;

/// One piece of a piecewise-constant schedule.
#[derive(Clone, Debug)]
pub struct Stage<T: Real> {
    pub label: String,
    pub duration: f64,
    /// Value of the Hamiltonian's clock when the stage starts.
    pub clock_origin: f64,
    pub hamiltonian: ModulatedHamiltonian<T>,
    pub collapse: CollapseSet<T>,
}

impl<T: Real> Stage<T> {
    pub fn new(label: impl Into<String>, duration: f64, hamiltonian: ModulatedHamiltonian<T>) -> Self {
        Self { label: label.into(), duration, clock_origin: 0.0, hamiltonian, collapse: CollapseSet::empty() }
    }

    pub fn with_clock_origin(mut self, t0: f64) -> Self {
        self.clock_origin = t0;
        self
    }

    pub fn with_collapse(mut self, collapse: CollapseSet<T>) -> Self {
        self.collapse = collapse;
        self
    }
}

#[derive(Clone, Debug)]
pub struct StageReport<T: Real> {
    pub label: String,
    pub duration: f64,
    pub stats: StepStats,
    pub trace_error: f64,
    pub hermiticity_error: f64,
    /// Smallest eigenvalue, for density matrices with positivity checks on.
    pub min_eigenvalue: Option<f64>,
    pub state: Option<QuantumState<T>>,
}

#[derive(Clone, Debug)]
pub struct Trajectory<T: Real> {
    pub state: QuantumState<T>,
    pub stages: Vec<StageReport<T>>,
}

impl<T: Real> Trajectory<T> {
    pub fn max_trace_error(&self) -> f64 {
        self.stages.iter().map(|s| s.stats.max_trace_error.max(s.trace_error)).fold(0.0, f64::max)
    }

    pub fn min_eigenvalue(&self) -> Option<f64> {
        self.stages.iter().filter_map(|s| s.min_eigenvalue).reduce(f64::min)
    }

    pub fn total_steps(&self) -> usize {
        self.stages.iter().map(|s| s.stats.steps).sum()
    }
}

/// Runs the stages in order. A pure input is promoted to a density matrix as
/// soon as any stage carries collapse operators.
pub fn run_schedule<T: Real>(state0: &QuantumState<T>, stages: &[Stage<T>], cfg: &IntegratorConfig) -> Result<Trajectory<T>> {
    cfg.validate()?;
    let mut state = state0.clone();
    if !state.is_density() && stages.iter().any(|s| !s.collapse.is_empty()) {
        state = QuantumState::Density(state.to_density());
    }
    let mut reports = Vec::with_capacity(stages.len());
    for stage in stages {
        if stage.duration < 0.0 || !stage.duration.is_finite() {
            return Err(Error::Params(format!("stage {} has duration {}", stage.label, stage.duration)));
        }
        let span = (stage.clock_origin, stage.clock_origin + stage.duration);
        let (next, stats) = match &state {
            QuantumState::Vector(psi) => {
                let (psi, stats) = propagate_vector(psi, &stage.hamiltonian, span, cfg, &stage.label)?;
                (QuantumState::Vector(psi), stats)
            }
            QuantumState::Density(rho) => {
                let (rho, stats) = integrate_master(rho, &stage.hamiltonian, &stage.collapse, span, cfg, &stage.label)?;
                (QuantumState::Density(rho), stats)
            }
        };
        state = next;
        let min_eigenvalue = if state.is_density() && cfg.checks.positivity {
            let v = state.min_eigenvalue();
            if v < -POSITIVITY_TOL {
                return Err(Error::InternalConsistency {
                    segment: stage.label.clone(),
                    detail: format!("density matrix has eigenvalue {v:.3e}"),
                });
            }
            Some(v)
        } else {
            None
        };
        reports.push(StageReport {
            label: stage.label.clone(),
            duration: stage.duration,
            stats,
            trace_error: (state.trace() - 1.0).abs(),
            hermiticity_error: state.hermiticity_error(),
            min_eigenvalue,
            state: cfg.keep_snapshots.then(|| state.clone()),
        });
    }
    Ok(Trajectory { state, stages: reports })
}
