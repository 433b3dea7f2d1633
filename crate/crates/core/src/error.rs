use alloc::string::String;

/// Failures reported by the numerical core.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("non-finite kernel entry at nodes ({i}, {j}): K({x}, {y}) = {value}")]
    NonFinite {
        i: usize,
        j: usize,
        x: f64,
        y: f64,
        value: f64,
    },
    #[error("factorization failed: {0}")]
    Factorization(String),
    #[error("singular system (condition estimate {condition:e})")]
    Singular { condition: f64 },
    #[error("times must be strictly increasing")]
    UnorderedTimes,
    #[error("invalid barrier: {0}")]
    InvalidBarrier(String),
    #[error("degenerate conditioning: density {density:e} below threshold")]
    DegenerateConditioning { density: f64 },
    #[error("cost guard: {0}")]
    CostGuard(String),
}

pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
