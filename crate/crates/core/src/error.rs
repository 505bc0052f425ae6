use thiserror::Error;

/// Errors raised by the numerical toolkit and the command-line front end.
#[derive(Debug, Error)]
pub enum Error {
    #[error("parameter out of domain: {0}")]
    ParameterDomain(String),

    #[error("argument out of domain: {0}")]
    Domain(String),

    #[error("empty input: {0}")]
    EmptyInput(String),

    #[error("integral diverges: {0}")]
    Integrability(String),

    #[error("profile kind mismatch: {0}")]
    Kind(String),

    #[error("numeric estimate did not stabilize: {0}")]
    Convergence(String),

    #[error("function is unbounded: {0}")]
    Oscillation(String),

    #[error("usage: {0}")]
    Usage(String),

    #[error("{file}:{line}: {message}")]
    Parse {
        file: String,
        line: usize,
        message: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
