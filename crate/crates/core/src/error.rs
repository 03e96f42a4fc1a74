use thiserror::Error;

/// Errors raised by boltzkit operations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("unsupported dimension {0} (expected 1, 2 or 3)")]
    UnsupportedDimension(usize),
    #[error("range error: {0}")]
    Range(String),
    #[error("geometry error: {0}")]
    Geometry(String),
    #[error("unsupported regime: {0}")]
    UnsupportedRegime(String),
    #[error("numerical range error at node {node}: {msg}")]
    NumericalRange { node: usize, msg: String },
    #[error("instability at step {step}: {msg}")]
    Instability { step: usize, msg: String },
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
