use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("photon number mismatch: expected {expected}, found {found}")]
    PhotonMismatch { expected: u8, found: u8 },

    #[error("spatial mode `{0}` is not declared")]
    UndeclaredMode(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("output leaves encoded subspace for input {label}: residual norm² {residual:e}")]
    LeavesEncodedSubspace { label: String, residual: f64 },

    #[error("unsupported gate: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn parse(line: usize, column: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            column,
            message: message.into(),
        }
    }
}
