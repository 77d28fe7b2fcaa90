//! Subcommand implementations.
//!
//! Each command is a function from resolved [`Settings`] to `Result<(),
//! CliError>`; everything it produces goes to files under the output
//! directory (deterministic) or to stdout (informational). Only the probe
//! cache's sidecar log ever contains wall-clock time.

use std::collections::HashSet;

use chrono::NaiveDate;

use kg_core::KnowledgeGraph;
use kg_gnn::{InputSpec, Matrix, ModelSpec};
use kg_prompt::{
    BatchOptions, HttpClient, MockClient, ProbeFailure, ProbeRecord, VerdictClient,
};
use kg_score::Variant;

use crate::config::Settings;
use crate::errors::{input, CliError};
use crate::io::read_embeddings;

pub mod analyze;
pub mod compact;
pub mod ingest;
pub mod predict;
pub mod probe;
pub mod select;
pub mod train;

/// The verdict source the settings ask for: the offline mock or the HTTP
/// endpoint.
pub fn make_client(settings: &Settings) -> Result<Box<dyn VerdictClient>, CliError> {
    if settings.mock {
        Ok(Box::new(MockClient::new(settings.seed, settings.mock_rate)))
    } else {
        settings.client.validate().map_err(|e| {
            input(format!(
                "{e}; configure the endpoint and model or pass --mock for offline verdicts"
            ))
        })?;
        Ok(Box::new(HttpClient::new(settings.client.clone())?))
    }
}

/// The model label records are stored under — the mock's self-describing
/// name, or the configured model.
pub fn model_label(settings: &Settings) -> Result<String, CliError> {
    if settings.mock {
        Ok(MockClient::new(settings.seed, settings.mock_rate)
            .model()
            .to_string())
    } else if settings.client.model.is_empty() {
        Err(input(
            "no model configured; set \"model\" in the config or pass --model (or --mock)",
        ))
    } else {
        Ok(settings.client.model.clone())
    }
}

pub fn batch_options(settings: &Settings) -> BatchOptions {
    BatchOptions {
        temporal: settings.temporal,
        max_parallel: settings.client.max_parallel,
        requests_per_second: if settings.mock {
            // The mock is local and deterministic; never throttle it.
            1e9
        } else {
            settings.client.requests_per_second
        },
        retry: settings.client.retry,
    }
}

type FactKey = (String, String, String, Option<NaiveDate>);

fn fact_key(head: &str, relation: &str, tail: &str, timestamp: Option<NaiveDate>) -> FactKey {
    (head.to_string(), relation.to_string(), tail.to_string(), timestamp)
}

/// The fact identities present in a graph.
pub fn graph_facts(g: &KnowledgeGraph) -> HashSet<FactKey> {
    g.triplets()
        .iter()
        .map(|t| fact_key(&t.head, &t.relation, &t.tail, t.timestamp))
        .collect()
}

/// Restricts cache records to one model, one scoring variant, and the facts
/// of this graph (a shared cache may hold records for other graphs or
/// models; those are simply not ours).
///
/// The temporal variant includes dated-phrasing records plus plain records
/// of undated facts: an undated fact is asked with the plain statement in
/// both modes, so one cached verdict serves both variants.
pub fn records_for_variant(
    all: &[ProbeRecord],
    facts: &HashSet<FactKey>,
    model: &str,
    variant: Variant,
) -> Vec<ProbeRecord> {
    all.iter()
        .filter(|r| r.model == model)
        .filter(|r| facts.contains(&fact_key(&r.head, &r.relation, &r.tail, r.timestamp)))
        .filter(|r| match variant {
            Variant::Plain => !r.temporal,
            Variant::Temporal => r.temporal || r.timestamp.is_none(),
        })
        .cloned()
        .collect()
}

/// Restricts probe failures the same way [`records_for_variant`] restricts
/// records. Failures carry no fact timestamp, so a plain-phrasing failure
/// counts for the temporal variant exactly when the graph holds an undated
/// fact with that content (the undated fallback shares the plain statement).
pub fn failures_for_variant(
    all: &[ProbeFailure],
    g: &KnowledgeGraph,
    variant: Variant,
) -> Vec<ProbeFailure> {
    let undated: HashSet<(&str, &str, &str)> = g
        .triplets()
        .iter()
        .filter(|t| t.timestamp.is_none())
        .map(|t| (t.head.as_str(), t.relation.as_str(), t.tail.as_str()))
        .collect();
    all.iter()
        .filter(|f| match variant {
            Variant::Plain => !f.temporal,
            Variant::Temporal => {
                f.temporal
                    || undated.contains(&(f.head.as_str(), f.relation.as_str(), f.tail.as_str()))
            }
        })
        .cloned()
        .collect()
}

/// The input side of the regressor: external features when a table is
/// configured, otherwise a trainable per-entity embedding.
pub fn model_inputs(
    settings: &Settings,
    g: &KnowledgeGraph,
) -> Result<(InputSpec, Option<Matrix>), CliError> {
    match settings.embeddings.as_deref() {
        Some(path) => {
            let features = read_embeddings(path, g)?;
            Ok((InputSpec::External { dim: features.cols() }, Some(features)))
        }
        None => Ok((InputSpec::OneHot { dim: settings.embedding_dim }, None)),
    }
}

/// The regressor layout the settings describe.
pub fn model_spec(settings: &Settings, inputs: InputSpec) -> ModelSpec {
    ModelSpec {
        arch: settings.arch,
        squash: settings.squash,
        input: inputs,
        hidden_dims: settings.hidden_dims.clone(),
    }
}

/// Path of the probe failure report inside the output directory.
pub fn failures_path(settings: &Settings) -> std::path::PathBuf {
    settings.output_dir.join("probe_failures.csv")
}
