//! Turning triplets into natural-language statements and probing a language
//! model for True/False verdicts.
//!
//! The flow: a [`TemplateMap`] renders each triplet as a statement (plain or
//! dated), [`probe_batch`] asks a [`VerdictClient`] for a verdict on every
//! distinct statement not already in the [`ProbeCache`], and the resulting
//! [`ProbeRecord`]s feed score aggregation downstream. A deterministic
//! [`MockClient`] stands in for the network for offline runs.

pub mod batch;
pub mod cache;
pub mod client;
pub mod error;
pub mod mock;
pub mod record;
pub mod template;
pub mod verdict;

pub use batch::{probe_batch, BatchOptions, BatchReport};
pub use cache::{index_latest, CompactionReport, ProbeCache};
pub use client::{
    HttpClient, LlmClientConfig, ProbeOutcome, RetryPolicy, VerdictClient,
    DEFAULT_SYSTEM_MESSAGE,
};
pub use error::PromptError;
pub use mock::{mock_verdict, MockClient};
pub use record::{CacheKey, ProbeFailure, ProbeLogEntry, ProbeRecord};
pub use template::TemplateMap;
pub use verdict::parse_verdict;
