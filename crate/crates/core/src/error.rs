//! Error type shared across the crate.

use thiserror::Error;

/// Errors produced by matrix construction, file I/O and the pipeline operations.
#[derive(Debug, Error)]
pub enum PairError {
    #[error("element count must be even, got n={n}")]
    OddN { n: usize },

    #[error("element count must be at least {min}, got n={n}")]
    TooSmall { n: usize, min: usize },

    #[error("n={n} exceeds the exhaustive-search cap of {max}")]
    TooLarge { n: usize, max: usize },

    #[error("matrix is not symmetric at ({i},{j})")]
    NotSymmetric { i: usize, j: usize },

    #[error("matrix diagonal must be zero, found nonzero at ({i},{i})")]
    NonZeroDiagonal { i: usize },

    #[error("matrix entry ({i},{j}) is not finite")]
    NonFinite { i: usize, j: usize },

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("element index {index} out of range 1..={n}")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("invalid pairing: {reason}")]
    InvalidPairing { reason: String },

    #[error("unknown distribution '{name}' (expected uniform01, poisson1, gaussian, binary or constant)")]
    UnknownDistribution { name: String },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, PairError>;
