use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("division error: {0}")]
    Division(String),
    #[error("parse error at {location}: {message}")]
    Parse { location: String, message: String },
    #[error("internal error: {0}")]
    Internal(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("capability error: {0}")]
    Capability(String),
    #[error("leading recurrence coefficient vanishes at n = {n}")]
    SingularStep { n: i64 },
    #[error("degenerate recurrence: {0}")]
    DegenerateRecurrence(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("geometry error: {0}")]
    Geometry(String),
    #[error("reference did not converge: oversample doubling changed values by {diff:e}")]
    ReferenceNotConverged { diff: f64 },
    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub fn parse(location: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Parse { location: location.into(), message: message.into() }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
