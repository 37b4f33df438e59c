use thiserror::Error;

/// Crate-wide error type.
///
/// `Usage` and `Domain` map to CLI exit code 2 (bad invocation or bad input
/// data); the remaining variants describe computations that could not run.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument is outside the mathematical domain of the operation
    /// (negative `t` for a Young function, nonpositive radius, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// Malformed request: empty candidate set, bad JSON field, missing flag.
    #[error("usage error: {0}")]
    Usage(String),

    /// A certified hypothesis the operation relies on does not hold.
    #[error("precondition not satisfied: {0}")]
    Precondition(String),

    /// Matrix is numerically singular where an invertible one is required.
    #[error("rank-deficient matrix: {0}")]
    RankDeficient(String),

    /// The map cannot be handled by the exact composition path.
    #[error("unsupported map for exact path: {0}")]
    UnsupportedMap(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
    pub fn usage(msg: impl Into<String>) -> Self {
        Error::Usage(msg.into())
    }
    pub fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }
}
