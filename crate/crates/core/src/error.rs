use thiserror::Error;

use crate::linalg::CompletionFailure;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("iterate is not strictly interior: {0}")]
    NotInterior(String),

    #[error(transparent)]
    Completion(#[from] CompletionFailure),

    #[error("singular pivot block at original index {index}")]
    SingularPivot { index: usize },

    #[error("matrix is singular: zero pivot column {column}")]
    SingularMatrix { column: usize },

    #[error("SVD did not converge within {sweeps} sweeps")]
    ConvergenceFailure { sweeps: usize },

    #[error("non-finite value produced in {0}")]
    NonFinite(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("problem {0} does not satisfy strict complementarity")]
    NotStrictlyComplementary(String),

    #[error("multiplier set is empty")]
    EmptyMultiplierSet,
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
