use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid operator: {0}")]
    InvalidOperator(String),

    #[error("invalid density matrix: {0}")]
    InvalidState(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("target subspace is not invariant for generator {index} (max residual {residual:.3e})")]
    NotInvariant { index: usize, residual: f64 },

    #[error("target subspace is not GAS for the combined generator (spectral abscissa {alpha:.3e})")]
    NotGas { alpha: f64 },

    #[error("no positive-definite perturbation found after {steps} steps")]
    PerturbationFailed { steps: usize },

    #[error("matrix is not positive definite (min eigenvalue {min_eig:.3e})")]
    NotPositiveDefinite { min_eig: f64 },

    #[error("eigensolver failure: {0}")]
    Eigen(String),

    #[error("assumption {assumption} violated: {detail}")]
    AssumptionViolated { assumption: &'static str, detail: String },

    #[error("integration step failed: {0}")]
    Step(String),

    #[error("trajectory {trajectory} failed at t = {time}")]
    Trajectory {
        trajectory: usize,
        time: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("fit window too short: {0} points (need at least 10)")]
    WindowTooShort(usize),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
