use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("non-finite value encountered in {0}")]
    NonFinite(String),

    #[error("point is infeasible: {0}")]
    Infeasible(String),

    /// The target direction is zero, so the current point is stationary.
    #[error("zero gradient: the point is a critical point")]
    CriticalPoint,

    #[error(
        "iteration did not converge after {iterations} steps (last relative residual {residual:e})"
    )]
    NotConverged { iterations: usize, residual: f64 },

    #[error("origin {origin} cannot reach destination {dest}")]
    Disconnected { origin: usize, dest: usize },

    #[error("network contains a cycle")]
    CycleDetected,

    #[error("operation not supported: {0}")]
    Unsupported(String),

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invariant violated: {0}")]
    Invariant(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}
