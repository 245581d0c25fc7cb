use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    /// An argument is outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid gamble table: {0}")]
    InvalidTable(String),

    #[error("parse error: {0}")]
    Parse(String),

    /// A floating-point method could not reach its accuracy target.
    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    #[error("not found: {0}")]
    NotFound(String),

    #[error("insufficient terms: need at least {required}, have {available}")]
    InsufficientTerms { required: usize, available: usize },

    #[error("recurrence leading coefficient vanishes at n = {n}")]
    Singularity { n: i64 },

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
