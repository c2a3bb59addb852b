use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A scalar argument fell outside the range an operation accepts.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("index {index} out of range for width {width}")]
    IndexOutOfRange { index: usize, width: usize },

    #[error("degenerate sign: entry {position} of the orthant argument is zero")]
    DegenerateSign { position: usize },

    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("invalid shape: {0}")]
    InvalidShape(String),

    /// Exact enumeration was requested past the configured hidden-unit cap.
    #[error("{m} hidden units exceed the enumeration cap of {cap}; use the blockwise evaluator")]
    Capacity { m: usize, cap: usize },

    #[error("network carries no block metadata; blockwise evaluation is unavailable")]
    MissingBlockMeta,

    #[error("bisection did not converge within {iterations} iterations (residual {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },

    #[error("normalization check failed: row {row} sums to {sum}")]
    Normalization { row: usize, sum: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
