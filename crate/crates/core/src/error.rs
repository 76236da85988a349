use thiserror::Error;

/// Failure modes shared by every stage of the pipeline.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Input violates a documented precondition.
    #[error("invalid input: {0}")]
    Validation(String),

    /// The request would exceed what the dense or enumerating routines can hold.
    #[error("capacity exceeded: {0}")]
    Capacity(String),

    /// A computed quantity left its admissible range by more than round-off.
    #[error("numerical integrity violated: {0}")]
    NumericalIntegrity(String),

    /// Two independent routes disagree, which points to a convention mismatch.
    #[error("consistency check failed: {0}")]
    Consistency(String),

    /// A configuration key is missing, unknown or malformed.
    #[error("config key `{key}`: {message}")]
    Config { key: String, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::Validation(msg.into())
}
