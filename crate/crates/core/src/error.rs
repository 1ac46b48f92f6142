use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("index {index} out of range for dimension {dim}")]
    OutOfRange { index: usize, dim: usize },

    #[error("truncation to dimension {dim} loses {loss:.3e} of the norm (limit {limit:.0e})")]
    Truncation { dim: usize, loss: f64, limit: f64 },

    #[error("degenerate state: {0}")]
    DegenerateState(String),

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("contract violation: {0}")]
    ContractViolation(String),

    #[error("phase-space grid too small: trace estimate {trace:.8} deviates from 1 by more than {limit:.1e}")]
    GridTooSmall { trace: f64, limit: f64 },

    #[error("resource limit: {0}")]
    ResourceLimit(String),

    #[error("time step {dt} exceeds the limit {limit}")]
    StepSize { dt: f64, limit: f64 },

    #[error("seed has no negativity budget ({budget:.3e}); normalization undefined")]
    NoBudget { budget: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
