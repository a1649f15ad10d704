use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Error)]
pub enum CssError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("empty input: {0}")]
    Empty(String),

    #[error("parse error at {location}: {message}")]
    Parse { location: String, message: String },

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, CssError>;

pub(crate) fn mismatch(msg: impl Into<String>) -> CssError {
    CssError::DimensionMismatch(msg.into())
}

pub(crate) fn invalid(msg: impl Into<String>) -> CssError {
    CssError::InvalidParameter(msg.into())
}
