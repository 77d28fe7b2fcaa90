//! Error type for model construction, training, and checkpointing.

use thiserror::Error;

/// Errors surfaced by model construction, training, and checkpoint I/O.
#[derive(Debug, Error)]
pub enum GnnError {
    /// A configuration field is out of range or inconsistent.
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    /// An input matrix or label vector does not match the graph.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// Too few labelled entities to carve out a training split.
    #[error("insufficient labels: needed at least {needed}, got {got}")]
    InsufficientLabels { needed: usize, got: usize },

    /// The training loss left the representable range.
    #[error("training diverged at epoch {epoch}: loss = {loss}")]
    Diverged { epoch: usize, loss: f64 },

    /// A checkpoint file is structurally valid JSON but semantically unusable.
    #[error("checkpoint error: {0}")]
    Checkpoint(String),

    /// Checkpoint (de)serialisation failure.
    #[error("checkpoint serialisation: {0}")]
    Serde(#[from] serde_json::Error),

    /// Underlying file I/O failure.
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
