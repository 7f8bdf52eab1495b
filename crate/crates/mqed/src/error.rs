use thiserror::Error;

/// Errors shared by all modules of the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument violated a documented precondition.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Adaptive quadrature did not reach the requested tolerance.
    #[error("quadrature failed to converge: {0}")]
    QuadratureFailure(String),

    /// Two frequencies that must be distinct coincided.
    #[error("coincident frequencies: {0}")]
    CoincidentFrequencies(String),

    /// A linear solve or factorization hit a (near-)singular matrix.
    #[error("singular system: {0}")]
    Singular(String),

    /// An I/O or serialization problem.
    #[error("i/o error: {0}")]
    Io(String),

    /// A key-value document could not be parsed.
    #[error("parse error: {0}")]
    Parse(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
