use thiserror::Error;

pub type Result<T, E = BdkError> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BdkError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("malformed rational {input:?}: {reason}")]
    MalformedRational { input: String, reason: String },

    #[error("parse error at position {position}: {message}")]
    Parse { position: usize, message: String },

    #[error("malformed document: {0}")]
    Document(String),
}

impl BdkError {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        BdkError::InvalidArgument(msg.into())
    }

    pub(crate) fn check_dim(expected: usize, actual: usize) -> Result<()> {
        if expected == actual {
            Ok(())
        } else {
            Err(BdkError::DimensionMismatch { expected, actual })
        }
    }
}
