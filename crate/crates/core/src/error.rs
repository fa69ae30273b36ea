use thiserror::Error;

/// Errors produced by the library. The variants line up with the CLI exit
/// codes: parse/validation failures, verification failures and cap overruns.
#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed document: {0}")]
    Parse(String),

    #[error("invalid instance: {0}")]
    Validation(String),

    #[error("{what} exceeds cap: {size} > {cap}")]
    CapExceeded {
        what: &'static str,
        size: usize,
        cap: usize,
    },

    #[error("verification failed: {0}")]
    Verification(String),

    #[error("decoder ambiguity: {0}")]
    Ambiguity(String),
}

impl Error {
    pub(crate) fn cap(what: &'static str, size: usize, cap: usize) -> Self {
        Error::CapExceeded { what, size, cap }
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
