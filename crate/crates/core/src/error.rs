use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid dimension {dim}: {reason}")]
    InvalidDimension { dim: usize, reason: &'static str },

    #[error("invalid level pair ({upper}, {lower}) for local dimension {dim}")]
    InvalidLevel { dim: usize, upper: usize, lower: usize },

    #[error("cannot embed a {local}-dimensional operator on subsystem {subsystem} of dimension {expected}")]
    Embedding { subsystem: usize, local: usize, expected: usize },

    #[error("operation requires a density-matrix state")]
    RequiresDensity,

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("invalid layout: {0}")]
    Layout(String),

    #[error("invalid cavity index {index} (layout has {count} cavities)")]
    InvalidCavity { index: usize, count: usize },

    #[error("invalid parameters: {0}")]
    Params(String),

    #[error("missing parameter: {0}")]
    MissingParameter(String),

    #[error("division by zero: {0}")]
    DivisionByZero(String),

    #[error("unnormalized state: {0}")]
    Normalization(String),

    #[error("coupling constants are not matched (relative spread {spread:.3e}); use the staggered schedule")]
    RequiresStaggered { spread: f64 },

    #[error("Fock truncation {fock_dim} too small: {reason}")]
    Truncation { fock_dim: usize, reason: &'static str },

    #[error("total dimension {dim} exceeds the {kind} cap of {cap}")]
    DimensionCap { dim: usize, cap: usize, kind: &'static str },

    #[error("step size too large in segment '{segment}': {quantity} drifted by {drift:.3e} (dt = {dt:.3e})")]
    StepSize { segment: String, quantity: &'static str, drift: f64, dt: f64 },

    #[error("internal consistency check failed in segment '{segment}': {detail}")]
    InternalConsistency { segment: String, detail: String },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, #[source] source: std::io::Error },

    #[error("{}: {source}", path.display())]
    Csv { path: PathBuf, #[source] source: csv::Error },
}

impl Error {
    /// True for failures of the integrator invariants (norm, trace, hermiticity).
    pub fn is_integrator_failure(&self) -> bool {
        matches!(self, Error::StepSize { .. } | Error::InternalConsistency { .. })
    }
}
