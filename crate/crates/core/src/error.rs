use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors raised by the library. Everything except [`Error::NonConvergence`]
/// is a violated precondition or malformed input.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("point index {index} out of range for a space of {len} points")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("empty set: {0}")]
    EmptySet(&'static str),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("invalid metric: {0}")]
    InvalidMetric(String),

    #[error("points have mismatched dimensions: expected {expected}, got {got} at point {index}")]
    DimensionMismatch { expected: usize, got: usize, index: usize },

    #[error("operation requires a Euclidean backend")]
    NotEuclidean,

    #[error("exact search limited to {limit} points, got {size}")]
    ExactLimitExceeded { size: usize, limit: usize },

    #[error("not Lipschitz: {0}")]
    NotLipschitz(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("invalid function: {0}")]
    InvalidFunction(String),

    #[error("incompatible domains: {0}")]
    IncompatibleDomains(String),

    #[error("no convergence: {0}")]
    NonConvergence(String),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    /// True for numerical failures, as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::NonConvergence(_))
    }
}
