use thiserror::Error;

/// Crate-wide error type.
///
/// `Domain` marks inputs outside an operation's contract; `Resource` marks
/// requests that exceed an exhaustive-verification or memory budget. The two
/// are kept distinct because callers (notably the CLI) report them
/// differently: a domain error is a usage failure, a resource error means
/// "unverified at this scale".
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("resource budget exceeded: {0}")]
    Resource(String),
    #[error("format error: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub fn resource(msg: impl Into<String>) -> Self {
        Error::Resource(msg.into())
    }

    pub fn format(msg: impl Into<String>) -> Self {
        Error::Format(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
