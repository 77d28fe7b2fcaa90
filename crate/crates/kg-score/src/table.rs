//! Per-entity knowledgeability aggregation.

use std::collections::HashMap;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use kg_core::{EntityId, KnowledgeGraph};
use kg_prompt::{ProbeFailure, ProbeRecord};

use crate::error::ScoreError;

/// Which statement phrasing produced a table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    Plain,
    Temporal,
}

impl Variant {
    pub fn name(self) -> &'static str {
        match self {
            Variant::Plain => "plain",
            Variant::Temporal => "temporal",
        }
    }
}

impl std::str::FromStr for Variant {
    type Err = ScoreError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "plain" => Ok(Variant::Plain),
            "temporal" => Ok(Variant::Temporal),
            other => Err(ScoreError::InvalidParameter(format!(
                "unknown variant {other:?} (expected \"plain\" or \"temporal\")"
            ))),
        }
    }
}

/// Aggregated verdicts for one entity: the mean verdict over its incident
/// fact multiset, plus how many facts contributed and how many failed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntityScore {
    /// Mean verdict in [0, 1].
    pub k: f64,
    /// Verdicts aggregated into `k`.
    pub n_probed: usize,
    /// Incident facts whose probe failed (excluded from `k` entirely).
    pub n_failed: usize,
}

/// Knowledgeability per entity, indexed by [`EntityId`]. Entities with no
/// probed incident facts have no score.
#[derive(Debug, Clone)]
pub struct ScoreTable {
    pub variant: Variant,
    scores: Vec<Option<EntityScore>>,
}

impl ScoreTable {
    /// Builds a table from externally planted scores (synthetic ground truth
    /// or model predictions); probe counters are zero. Scores must lie in
    /// [0, 1].
    pub fn from_scores(
        variant: Variant,
        n_entities: usize,
        planted: impl IntoIterator<Item = (EntityId, f64)>,
    ) -> Result<Self, ScoreError> {
        let mut scores = vec![None; n_entities];
        for (v, k) in planted {
            if !(0.0..=1.0).contains(&k) {
                return Err(ScoreError::InvalidScore(k));
            }
            scores[v.0] = Some(EntityScore {
                k,
                n_probed: 0,
                n_failed: 0,
            });
        }
        Ok(ScoreTable { variant, scores })
    }

    pub fn len(&self) -> usize {
        self.scores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }

    pub fn get(&self, v: EntityId) -> Option<&EntityScore> {
        self.scores[v.0].as_ref()
    }

    pub fn k(&self, v: EntityId) -> Option<f64> {
        self.scores[v.0].map(|s| s.k)
    }

    pub fn scored_count(&self) -> usize {
        self.scores.iter().flatten().count()
    }

    /// Scored entities in ascending id order.
    pub fn iter(&self) -> impl Iterator<Item = (EntityId, &EntityScore)> {
        self.scores
            .iter()
            .enumerate()
            .filter_map(|(v, s)| s.as_ref().map(|s| (EntityId(v), s)))
    }

    /// Scores aligned to entity ids (`None` where unscored), e.g. for
    /// bin-curve inputs.
    pub fn as_options(&self) -> Vec<Option<f64>> {
        self.scores.iter().map(|s| s.map(|s| s.k)).collect()
    }
}

/// Full identity of a fact, the unit probing operates on.
type FactKey = (String, String, String, Option<NaiveDate>);

fn fact_key(head: &str, relation: &str, tail: &str, timestamp: Option<NaiveDate>) -> FactKey {
    (
        head.to_string(),
        relation.to_string(),
        tail.to_string(),
        timestamp,
    )
}

/// Aggregates probe verdicts into per-entity knowledgeability: each entity's
/// score is the mean verdict over its incident fact multiset, so a fact
/// stated twice in the graph counts twice, while a self-loop counts once.
///
/// Records must reference facts present in the graph. Failures mark their
/// facts as failed for both endpoint entities without contributing to any
/// mean; facts that were never probed are simply absent. Entities with no
/// probed facts end up unscored.
pub fn entity_knowledgeability(
    g: &KnowledgeGraph,
    records: &[ProbeRecord],
    failures: &[ProbeFailure],
    variant: Variant,
) -> Result<ScoreTable, ScoreError> {
    // Graph fact identities, for validating record provenance.
    let mut known: HashMap<FactKey, ()> = HashMap::with_capacity(g.triplet_count());
    for t in g.triplets() {
        known.insert(fact_key(&t.head, &t.relation, &t.tail, t.timestamp), ());
    }

    let mut verdicts: HashMap<FactKey, u8> = HashMap::new();
    for r in records {
        let key = fact_key(&r.head, &r.relation, &r.tail, r.timestamp);
        if !known.contains_key(&key) {
            return Err(ScoreError::UnknownTriplet {
                head: r.head.clone(),
                relation: r.relation.clone(),
                tail: r.tail.clone(),
            });
        }
        // A re-probed fact keeps the most recent verdict.
        verdicts.insert(key, r.verdict);
    }

    // Failures carry no timestamp; mark every dated/undated graph fact that
    // shares the failure's (head, relation, tail) as failed.
    let mut failed: HashMap<FactKey, ()> = HashMap::new();
    if !failures.is_empty() {
        let mut by_content: HashMap<(String, String, String), Vec<Option<NaiveDate>>> =
            HashMap::new();
        for t in g.triplets() {
            by_content
                .entry((t.head.clone(), t.relation.clone(), t.tail.clone()))
                .or_default()
                .push(t.timestamp);
        }
        for f in failures {
            let content = (f.head.clone(), f.relation.clone(), f.tail.clone());
            for timestamp in by_content.get(&content).into_iter().flatten() {
                failed.insert(fact_key(&f.head, &f.relation, &f.tail, *timestamp), ());
            }
        }
    }

    let scores = g
        .entity_ids()
        .map(|v| {
            let mut sum = 0u64;
            let mut n_probed = 0usize;
            let mut n_failed = 0usize;
            for t_id in g.incident(v) {
                let t = g.triplet(t_id);
                let key = fact_key(&t.head, &t.relation, &t.tail, t.timestamp);
                if let Some(&verdict) = verdicts.get(&key) {
                    sum += u64::from(verdict);
                    n_probed += 1;
                } else if failed.contains_key(&key) {
                    n_failed += 1;
                }
            }
            if n_probed == 0 {
                None
            } else {
                Some(EntityScore {
                    k: sum as f64 / n_probed as f64,
                    n_probed,
                    n_failed,
                })
            }
        })
        .collect();

    Ok(ScoreTable { variant, scores })
}
