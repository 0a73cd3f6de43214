use thiserror::Error;

/// Errors raised by the root-isolation library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("zero polynomial")]
    ZeroPolynomial,

    #[error("degree {degree} is below the required minimum {min}")]
    DegreeTooSmall { degree: usize, min: usize },

    #[error("empty interval: lower endpoint {lo} is not below upper endpoint {hi}")]
    EmptyInterval { lo: String, hi: String },

    #[error("unbounded condition: no finite upper bracket for the global condition number")]
    UnboundedCondition,

    #[error("no convergence: residual {residual:e} exceeds tolerance {tol:e} after {iterations} iterations")]
    NoConvergence {
        residual: f64,
        tol: f64,
        iterations: usize,
    },

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
