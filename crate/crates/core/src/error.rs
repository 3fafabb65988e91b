//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by solver construction, data ingestion, and the
/// operations that validate their inputs.
#[derive(Debug, Error)]
pub enum Error {
    /// An operator or vector was used with incompatible dimensions.
    #[error("dimension mismatch: expected {expected}, got {got} ({context})")]
    DimensionMismatch {
        expected: usize,
        got: usize,
        context: &'static str,
    },

    /// A scalar parameter was outside its admissible range.
    #[error("invalid parameter {name}: {message}")]
    InvalidParameter { name: &'static str, message: String },

    /// A linear system that the caller required to be solvable was singular.
    #[error("singular linear system: {0}")]
    SingularSystem(&'static str),

    /// The difference matrix handed to the quasi-Newton form was rank
    /// deficient, so the oracle declines rather than invert a singular Gram.
    #[error("rank-deficient difference matrix; quasi-Newton form undefined")]
    RankDeficient,

    /// Text input (LIBSVM lines, cache files) that does not follow the format.
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    /// A sparse-matrix triplet list violated its structural invariants.
    #[error("invalid sparse matrix: {0}")]
    InvalidSparseMatrix(String),

    /// An iterate became non-finite; the run is aborted with context.
    #[error("non-finite value encountered at iteration {iteration}: {context}")]
    NonFinite { iteration: usize, context: &'static str },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
