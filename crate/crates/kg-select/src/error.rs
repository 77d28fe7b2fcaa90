//! Error type for selection planning and record emission.

use thiserror::Error;

/// Errors surfaced while building selection plans or fine-tuning files.
#[derive(Debug, Error)]
pub enum SelectError {
    /// The budget is below the minimum supported size.
    #[error("budget {budget} is too small (minimum {min})")]
    BudgetTooSmall { budget: usize, min: usize },

    /// The request cannot be satisfied by the selectable pool.
    #[error("requested {requested} triplets but only {available} are selectable")]
    InsufficientPool { requested: usize, available: usize },

    /// A non-excluded entity has no predicted score.
    #[error("no predicted score for entity {0:?}")]
    MissingPrediction(String),

    /// The prediction vector does not line up with the graph.
    #[error("predictions cover {got} entities but the graph has {expected}")]
    PredictionLength { expected: usize, got: usize },

    /// The graph strategy was requested without a prediction table.
    #[error("the graph strategy requires predicted scores for ranking")]
    PredictionsRequired,

    /// A predicted score is NaN or otherwise unusable.
    #[error("invalid prediction for entity {entity:?}: {value}")]
    InvalidPrediction { entity: String, value: f64 },

    /// Corruption could not produce a statement absent from the graph.
    #[error("no valid negative found for ({head}, {relation}, {tail}) after {attempts} draws")]
    NoNegative { head: String, relation: String, tail: String, attempts: usize },

    /// A plan manifest is malformed or from an unsupported version.
    #[error("plan manifest error: {0}")]
    Manifest(String),

    /// Statement rendering failed (missing or invalid template).
    #[error(transparent)]
    Prompt(#[from] kg_prompt::PromptError),

    /// Manifest or record (de)serialisation failure.
    #[error("serialisation: {0}")]
    Serde(#[from] serde_json::Error),

    /// Underlying file I/O failure.
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
