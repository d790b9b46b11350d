use thiserror::Error;

/// Errors shared by every module of the toolkit.
///
/// The variants are grouped by how a caller (in particular the CLI) should
/// react: rejected input, exhausted resource budgets, results that are not
/// decidable at the requested finite scale, and internal contradictions.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("budget exceeded: {0}")]
    Budget(String),

    #[error("inconclusive at this scale: {0}")]
    Inconclusive(String),

    #[error("verification failed: {0}")]
    Verification(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("internal contradiction: {0}")]
    Internal(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    /// True for failures caused by a resource budget rather than the input.
    pub fn is_budget(&self) -> bool {
        matches!(self, Error::Budget(_))
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
