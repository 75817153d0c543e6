use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// A caller violated an operation's preconditions (order mismatch,
    /// index out of range, sequence too short).
    #[error("usage error: {0}")]
    Usage(String),

    #[error("series is not invertible: constant term is zero")]
    NonInvertible,

    /// Input lies outside the region where an identity or series is defined,
    /// or a truncated series was observed to diverge.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn usage<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Usage(msg.into()))
}

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
