//! Per-entity knowledgeability scores and knowledge homophily.
//!
//! [`entity_knowledgeability`] reduces probe verdicts to one score per
//! entity (the mean verdict over its incident facts), [`node_homophily`]
//! measures how closely neighbors' scores agree, [`score_histogram`] shows
//! the score distribution, and [`compare_variants`] quantifies the shift
//! between plain and dated phrasings.

pub mod compare;
pub mod error;
pub mod histogram;
pub mod homophily;
pub mod table;

pub use compare::{compare_variants, ExtremeMass, VariantComparison};
pub use error::ScoreError;
pub use histogram::{score_histogram, Histogram, DEFAULT_BINS};
pub use homophily::{graph_homophily, node_homophily, HomophilyTable};
pub use table::{entity_knowledgeability, EntityScore, ScoreTable, Variant};
