//! Error type for score aggregation and homophily.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ScoreError {
    #[error("probe record references a triplet outside the graph: ({head}, {relation}, {tail})")]
    UnknownTriplet {
        head: String,
        relation: String,
        tail: String,
    },

    #[error("score {0} is outside [0, 1]")]
    InvalidScore(f64),

    #[error("no entity has a defined value")]
    NoScores,

    #[error("score tables are not comparable: {0}")]
    TableMismatch(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}
