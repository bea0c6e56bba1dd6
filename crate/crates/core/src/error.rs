use thiserror::Error;

/// Errors raised across the crate. Numerical payloads are reported as `f64`
/// regardless of the scalar type used for the computation.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParams(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("shape error: {0}")]
    Shape(String),

    #[error("dense capacity exceeded: N = {n} exceeds the dense cap N <= {cap}")]
    Capacity { n: usize, cap: usize },

    #[error("eigensolver failure: {0}")]
    Eigensolver(String),

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("no convergence after {steps} steps (last residual {residual:e})")]
    NonConvergence { steps: usize, residual: f64 },

    #[error("numerical instability: {0}")]
    Unstable(String),

    #[error("degenerate problem: {0}")]
    Degenerate(String),

    #[error("bracket error: {0}")]
    Bracket(String),

    #[error("accuracy error: {0}")]
    Accuracy(String),

    #[error("statistics error: {0}")]
    Statistics(String),

    #[error("format error: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
