use thiserror::Error;

/// Errors raised by the matching pipeline.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    /// Malformed or out-of-contract input data (loops, bad degrees, parse failures).
    #[error("invalid input: {0}")]
    InvalidInput(String),
    /// An operation was called on a state that does not satisfy its precondition.
    #[error("usage error: {0}")]
    Usage(String),
    /// A trace, matching or ledger did not agree with the graph it was applied to.
    #[error("integrity error: {0}")]
    Integrity(String),
    #[error("loop-free pairing not found after {attempts} attempts")]
    RetriesExhausted { attempts: usize },
    #[error("graph has {n} vertices, exhaustive routine is capped at {cap}")]
    SizeCap { n: usize, cap: usize },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn usage(msg: impl Into<String>) -> Error {
    Error::Usage(msg.into())
}

pub(crate) fn integrity(msg: impl Into<String>) -> Error {
    Error::Integrity(msg.into())
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}
