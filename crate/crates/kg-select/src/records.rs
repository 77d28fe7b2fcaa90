//! Materialising a selection as labelled statement records.
//!
//! Positives render each selected triplet through its relation template and
//! carry the label `"True"`. When corruption is enabled (for evaluation
//! files), each triplet additionally yields a negative: the head or the tail
//! is replaced by an entity drawn from the same role elsewhere in the graph,
//! re-drawn until the corrupted fact matches no existing triplet, and the
//! result is labelled `"False"`.

use chrono::NaiveDate;
use kg_core::{KnowledgeGraph, Triplet, TripletId};
use kg_prompt::TemplateMap;
use rand::Rng;
use rand_chacha::{rand_core::SeedableRng, ChaCha8Rng};
use serde::{Deserialize, Serialize};
use std::collections::HashSet;
use std::io::Write;

use crate::error::SelectError;
use crate::select::{phase, sub_seed};

/// One labelled statement, serialised as a JSON line.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FinetuneRecord {
    pub head: String,
    pub relation: String,
    pub tail: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub timestamp: Option<NaiveDate>,
    pub statement: String,
    /// `"True"` for facts from the graph, `"False"` for corrupted ones.
    pub label: String,
}

/// Negative-generation settings.
#[derive(Debug, Clone, Copy)]
pub struct CorruptionConfig {
    pub seed: u64,
    /// Draws attempted per triplet before giving up.
    pub max_attempts: usize,
}

impl Default for CorruptionConfig {
    fn default() -> Self {
        Self { seed: 0, max_attempts: 100 }
    }
}

fn render(
    templates: &TemplateMap,
    triplet: &Triplet,
    temporal: bool,
) -> Result<String, SelectError> {
    // Undated triplets in temporal mode fall back to the plain phrasing,
    // mirroring how probing renders them.
    if temporal && triplet.timestamp.is_some() {
        Ok(templates.instantiate_temporal(triplet)?)
    } else {
        Ok(templates.instantiate(triplet)?)
    }
}

/// Entities appearing in the head (respectively tail) role anywhere in the
/// graph, sorted by name for reproducible draws.
fn role_pool(graph: &KnowledgeGraph, head_role: bool) -> Vec<String> {
    let mut names: Vec<String> = graph
        .triplets()
        .iter()
        .map(|t| if head_role { t.head.clone() } else { t.tail.clone() })
        .collect::<HashSet<_>>()
        .into_iter()
        .collect();
    names.sort_unstable();
    names
}

/// Turn selected triplets into labelled records, in selection order.
///
/// Without corruption the output has exactly one `"True"` record per
/// selected triplet. With corruption each positive is immediately followed
/// by its negative, so the output length doubles. A triplet whose negatives
/// all collide with existing facts after `max_attempts` draws aborts with
/// [`SelectError::NoNegative`].
pub fn emit_finetune_records(
    graph: &KnowledgeGraph,
    selected: &[TripletId],
    templates: &TemplateMap,
    temporal: bool,
    corruption: Option<CorruptionConfig>,
) -> Result<Vec<FinetuneRecord>, SelectError> {
    let existing: HashSet<(&str, &str, &str)> =
        graph.triplets().iter().map(Triplet::key).collect();
    let mut corrupter = corruption.map(|cfg| {
        (
            ChaCha8Rng::seed_from_u64(sub_seed(cfg.seed, phase::CORRUPTION)),
            role_pool(graph, true),
            role_pool(graph, false),
            cfg.max_attempts,
        )
    });

    let mut records = Vec::with_capacity(selected.len() * if corrupter.is_some() { 2 } else { 1 });
    for &id in selected {
        let triplet = graph.triplet(id);
        records.push(FinetuneRecord {
            head: triplet.head.clone(),
            relation: triplet.relation.clone(),
            tail: triplet.tail.clone(),
            timestamp: triplet.timestamp,
            statement: render(templates, triplet, temporal)?,
            label: "True".to_string(),
        });

        if let Some((rng, heads, tails, max_attempts)) = corrupter.as_mut() {
            let negative = corrupt(triplet, &existing, rng, heads, tails, *max_attempts)?;
            records.push(FinetuneRecord {
                statement: render(templates, &negative, temporal)?,
                head: negative.head,
                relation: negative.relation,
                tail: negative.tail,
                timestamp: negative.timestamp,
                label: "False".to_string(),
            });
        }
    }
    Ok(records)
}

/// Draw a corrupted version of `triplet` that matches no existing fact:
/// flip a coin for the role, replace that entity with a uniform draw from
/// the same role's pool, and retry on collision.
fn corrupt(
    triplet: &Triplet,
    existing: &HashSet<(&str, &str, &str)>,
    rng: &mut ChaCha8Rng,
    heads: &[String],
    tails: &[String],
    max_attempts: usize,
) -> Result<Triplet, SelectError> {
    for _ in 0..max_attempts {
        let corrupt_head: bool = rng.random();
        let pool = if corrupt_head { heads } else { tails };
        let replacement = &pool[rng.random_range(0..pool.len())];
        let (head, tail) = if corrupt_head {
            (replacement.as_str(), triplet.tail.as_str())
        } else {
            (triplet.head.as_str(), replacement.as_str())
        };
        if !existing.contains(&(head, triplet.relation.as_str(), tail)) {
            let mut negative = Triplet::new(head, triplet.relation.as_str(), tail);
            if let Some(date) = triplet.timestamp {
                negative = negative.with_timestamp(date);
            }
            return Ok(negative);
        }
    }
    Err(SelectError::NoNegative {
        head: triplet.head.clone(),
        relation: triplet.relation.clone(),
        tail: triplet.tail.clone(),
        attempts: max_attempts,
    })
}

/// Write records as JSON Lines.
pub fn write_finetune_jsonl(
    records: &[FinetuneRecord],
    mut writer: impl Write,
) -> Result<(), SelectError> {
    for record in records {
        serde_json::to_writer(&mut writer, record)?;
        writer.write_all(b"\n")?;
    }
    writer.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use kg_core::build_graph;

    fn templates() -> TemplateMap {
        TemplateMap::new([
            ("r".to_string(), "{sub} links to {obj}.".to_string()),
            ("visited".to_string(), "{sub} visited {obj}.".to_string()),
        ])
        .unwrap()
    }

    fn triangle() -> KnowledgeGraph {
        build_graph(vec![
            Triplet::new("a", "r", "b"),
            Triplet::new("b", "r", "c"),
            Triplet::new("c", "r", "a"),
        ])
    }

    #[test]
    fn positives_only_when_corruption_is_off() {
        let g = triangle();
        let ids: Vec<TripletId> = g.triplet_ids().collect();
        let records = emit_finetune_records(&g, &ids, &templates(), false, None).unwrap();
        assert_eq!(records.len(), 3);
        assert!(records.iter().all(|r| r.label == "True"));
        assert_eq!(records[0].statement, "a links to b.");
    }

    #[test]
    fn corruption_doubles_the_records_and_never_reproduces_a_fact() {
        let g = triangle();
        let ids: Vec<TripletId> = g.triplet_ids().collect();
        let existing: HashSet<(String, String, String)> = g
            .triplets()
            .iter()
            .map(|t| (t.head.clone(), t.relation.clone(), t.tail.clone()))
            .collect();
        // Exhaustively over many seeds: negatives are never existing facts.
        for seed in 0..50 {
            let cfg = CorruptionConfig { seed, ..CorruptionConfig::default() };
            let records =
                emit_finetune_records(&g, &ids, &templates(), false, Some(cfg)).unwrap();
            assert_eq!(records.len(), 6);
            for pair in records.chunks(2) {
                assert_eq!(pair[0].label, "True");
                assert_eq!(pair[1].label, "False");
                let neg = &pair[1];
                assert!(
                    !existing.contains(&(neg.head.clone(), neg.relation.clone(), neg.tail.clone())),
                    "seed {seed} emitted an existing fact as a negative"
                );
            }
        }
    }

    #[test]
    fn saturated_graphs_exhaust_corruption_attempts() {
        // Two entities, one relation, all four ordered pairs present: no
        // same-role replacement can produce a novel fact.
        let g = build_graph(vec![
            Triplet::new("a", "r", "a"),
            Triplet::new("a", "r", "b"),
            Triplet::new("b", "r", "a"),
            Triplet::new("b", "r", "b"),
        ]);
        let ids: Vec<TripletId> = g.triplet_ids().collect();
        let cfg = CorruptionConfig::default();
        match emit_finetune_records(&g, &ids, &templates(), false, Some(cfg)) {
            Err(SelectError::NoNegative { attempts: 100, .. }) => {}
            other => panic!("expected corruption exhaustion, got {other:?}"),
        }
    }

    #[test]
    fn temporal_mode_dates_statements_and_falls_back_when_undated() {
        let g = build_graph(vec![
            Triplet::new("x", "visited", "y")
                .with_timestamp(NaiveDate::from_ymd_opt(2019, 6, 2).unwrap()),
            Triplet::new("y", "visited", "z"),
        ]);
        let ids: Vec<TripletId> = g.triplet_ids().collect();
        let records = emit_finetune_records(&g, &ids, &templates(), true, None).unwrap();
        assert_eq!(records[0].statement, "x visited y on 2019-06-02.");
        assert_eq!(records[1].statement, "y visited z.");
        assert_eq!(records[0].timestamp, NaiveDate::from_ymd_opt(2019, 6, 2));
    }

    #[test]
    fn corrupted_records_keep_the_original_timestamp() {
        let g = build_graph(vec![
            Triplet::new("x", "visited", "y")
                .with_timestamp(NaiveDate::from_ymd_opt(2017, 11, 8).unwrap()),
            Triplet::new("p", "visited", "q"),
            Triplet::new("q", "visited", "x"),
        ]);
        let ids: Vec<TripletId> = vec![TripletId(0)];
        let cfg = CorruptionConfig { seed: 4, ..CorruptionConfig::default() };
        let records = emit_finetune_records(&g, &ids, &templates(), true, Some(cfg)).unwrap();
        let neg = &records[1];
        assert_eq!(neg.label, "False");
        assert_eq!(neg.timestamp, NaiveDate::from_ymd_opt(2017, 11, 8));
        assert!(neg.statement.ends_with("on 2017-11-08."));
    }

    #[test]
    fn jsonl_round_trips() {
        let g = triangle();
        let ids: Vec<TripletId> = g.triplet_ids().collect();
        let records = emit_finetune_records(&g, &ids, &templates(), false, None).unwrap();
        let mut buf = Vec::new();
        write_finetune_jsonl(&records, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 3);
        let parsed: Vec<FinetuneRecord> =
            text.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
        assert_eq!(parsed, records);
        // Undated records do not serialise a timestamp field at all.
        assert!(!text.contains("timestamp"));
    }
}
