use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A numerical evaluation produced a value that cannot be used
    /// (underflow of a derivative, overflow, NaN).
    #[error("evaluation error: {0}")]
    Evaluation(String),

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("parse error at line {line}: {message}")]
    Parse { line: u64, message: String },

    #[error("non-coercive objective: maximizer {at} is at the search bound")]
    NonCoercive { at: f64 },

    #[error("bracket expansion failed: {0}")]
    Bracket(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}

impl Error {
    /// Stable machine-readable tag used in JSON error reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Domain(_) => "domain",
            Error::InvalidParameter(_) => "invalid_parameter",
            Error::Evaluation(_) => "evaluation",
            Error::Empty(_) => "empty",
            Error::Parse { .. } => "parse",
            Error::NonCoercive { .. } => "non_coercive",
            Error::Bracket(_) => "bracket",
            Error::Unsupported(_) => "unsupported",
            Error::Io(_) => "io",
        }
    }
}
