//! Error type for templating, probing, and caching.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum PromptError {
    #[error("no statement template for relation {0:?}")]
    MissingTemplate(String),

    #[error("template for relation {relation:?} is invalid: {reason}")]
    InvalidTemplate { relation: String, reason: String },

    #[error("triplet {0:?} has no timestamp, required for temporal statements")]
    MissingTimestamp(String),

    #[error("no True/False verdict found in response {0:?}")]
    UnparseableVerdict(String),

    #[error("api key environment variable {0:?} is not set")]
    MissingApiKey(String),

    #[error("invalid client configuration: {0}")]
    InvalidConfig(String),

    #[error("transport failure: {0}")]
    Transport(String),

    #[error("endpoint returned status {status}: {body}")]
    Status { status: u16, body: String },

    #[error("malformed response payload: {0}")]
    MalformedResponse(String),

    #[error("cache line {line}: {message}")]
    Cache { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl PromptError {
    /// Whether another attempt at the same request could plausibly succeed.
    /// Covers flaky transport, throttling, server-side errors, and responses
    /// that arrived intact but carried no usable verdict.
    pub fn is_retryable(&self) -> bool {
        match self {
            PromptError::Transport(_)
            | PromptError::MalformedResponse(_)
            | PromptError::UnparseableVerdict(_) => true,
            PromptError::Status { status, .. } => {
                *status == 408 || *status == 429 || *status >= 500
            }
            _ => false,
        }
    }
}
