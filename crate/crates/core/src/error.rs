use thiserror::Error;

/// Errors raised by dataset, kernel and solver construction.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("dataset must contain at least one point with at least one feature")]
    EmptyDataset,

    #[error("label {value} at index {index} must be -1 or +1")]
    InvalidLabel { index: usize, value: f64 },

    #[error("non-finite value at index {index}")]
    NonFinite { index: usize },

    #[error("point {index} is degenerate: K(x, x) = {value} is not positive")]
    DegeneratePoint { index: usize, value: f64 },

    #[error("kernel matrix is not symmetric at ({row}, {col}): {upper} vs {lower}")]
    AsymmetricKernel {
        row: usize,
        col: usize,
        upper: f64,
        lower: f64,
    },

    #[error("kernel matrix diagonal entry {index} is not positive: {value}")]
    NonPositiveDiagonal { index: usize, value: f64 },

    #[error("not a normalized Gram matrix: {0}")]
    InvalidGram(String),

    #[error("not a probability vector: {0}")]
    NotInSimplex(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("unsupported operation: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;
