use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Error type shared by all physics modules.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// A physical precondition was violated (negative power, empty spectrum, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// A value fell outside the range a model is valid for.
    #[error("{name} = {value} outside valid range [{min}, {max}]")]
    OutOfRange {
        name: &'static str,
        value: f64,
        min: f64,
        max: f64,
    },

    /// A root-finding bracket did not contain a sign change.
    #[error("no root bracketed: {0}")]
    NoBracket(String),

    /// An iterative routine failed to converge.
    #[error("did not converge: {0}")]
    NotConverged(String),

    /// A data file could not be parsed.
    #[error("parse error ({context}, line {line}): {message}")]
    Parse {
        context: String,
        line: usize,
        message: String,
    },
}

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub fn parse(context: impl Into<String>, line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            context: context.into(),
            line,
            message: message.into(),
        }
    }
}
