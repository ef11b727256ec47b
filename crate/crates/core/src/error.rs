use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("non-finite value {value} at node {index}")]
    NonFinite { index: usize, value: f64 },

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("imaginary residue {residue:e} exceeds tolerance (field max {scale:e})")]
    ImaginaryResidue { residue: f64, scale: f64 },

    #[error("singular constraint system: {0}")]
    SingularConstraints(String),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("config error for `{key}`: {message}")]
    Config { key: String, message: String },

    #[error("numerical abort at t = {t}: {message}")]
    NumericalAbort { t: f64, message: String },

    #[error("comparison error: {0}")]
    Compare(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn config(key: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            key: key.into(),
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
