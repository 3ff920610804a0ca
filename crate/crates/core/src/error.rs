use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),

    /// A validation rule was violated. `rule` is a stable short tag.
    #[error("validation error [{rule}]: {detail}")]
    Validation { rule: &'static str, detail: String },

    #[error("unknown node '{0}'")]
    UnknownNode(String),

    #[error("unknown cable '{0}'")]
    UnknownCable(String),

    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("dimension {dim} exceeds the cap of {cap}")]
    DimensionOverCap { dim: usize, cap: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("blocks come from different instances ('{0}' and '{1}')")]
    MixedInstances(String, String),

    #[error("empty record set")]
    EmptyRecords,

    #[error("records mix different (cable, kappa) cells")]
    MixedRecords,

    #[error("schema error: {0}")]
    Schema(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn validation(rule: &'static str, detail: impl Into<String>) -> Self {
        Error::Validation {
            rule,
            detail: detail.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
