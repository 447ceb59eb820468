use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    /// Matrix shapes do not fit the operation.
    #[error("dimension error: {0}")]
    Dimension(String),

    /// A matrix that had to have full row rank did not.
    #[error("rank error: {0}")]
    Rank(String),

    /// An argument lies outside the operation's domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// A configured cap was exceeded; the operation refuses to approximate.
    #[error("capacity error: {what} exceeded the cap of {cap}")]
    Capacity { what: String, cap: u64 },

    /// An operation is not supported for this input (e.g. a modulus).
    #[error("unsupported: {0}")]
    Unsupported(String),

    /// Malformed input data (files, registry names, number strings).
    #[error("parse error: {0}")]
    Parse(String),

    /// An exact cross-check between two computation routes failed.
    #[error("consistency error: {0}")]
    Consistency(String),
}

impl Error {
    pub fn capacity(what: impl Into<String>, cap: u64) -> Self {
        Error::Capacity {
            what: what.into(),
            cap,
        }
    }

    pub fn is_capacity(&self) -> bool {
        matches!(self, Error::Capacity { .. })
    }
}
