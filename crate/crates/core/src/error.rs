use thiserror::Error;

/// Errors raised by the library. Solver non-convergence is never an error;
/// it is reported through [`crate::splitter::SplitSolution::converged`].
#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("line {line}: duplicate pair ({i}, {j})")]
    DuplicatePair { line: usize, i: usize, j: usize },

    #[error("line {line}: self-pair ({i}, {i}) is not allowed")]
    SelfPair { line: usize, i: usize },

    #[error("line {line}: index {index} out of range for n = {n}")]
    IndexOutOfRange { line: usize, index: usize, n: usize },

    #[error("size mismatch: expected {expected}, got {got}")]
    SizeMismatch { expected: usize, got: usize },

    #[error("matrix is not symmetric (max asymmetry {0:e})")]
    NonSymmetric(f64),

    #[error("matrix has non-finite entries")]
    NonFinite,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("graph has no observed pairs")]
    EmptyObservations,

    #[error("instance too large for exhaustive search: n = {n} (limit {limit})")]
    TooLarge { n: usize, limit: usize },

    #[error("infeasible generator parameters: {0}")]
    Infeasible(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
