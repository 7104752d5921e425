use thiserror::Error;

/// Errors raised by the solver library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum BurgersError {
    /// An input violated a documented precondition.
    #[error("domain error: {0}")]
    Domain(String),

    /// Elimination hit a pivot below the singularity threshold.
    #[error("singular system: pivot {pivot:e} at row {row} (row scale {scale:e})")]
    Singular { row: usize, pivot: f64, scale: f64 },

    /// An operation needed an exact solution the problem does not carry.
    #[error("problem `{0}` has no exact solution")]
    NoExactSolution(String),
}

pub type Result<T> = std::result::Result<T, BurgersError>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(BurgersError::Domain(msg.into()))
}
