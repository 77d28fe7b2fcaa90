//! Comparing plain-phrasing and dated-phrasing score tables.

use kg_core::EntityId;

use crate::error::ScoreError;
use crate::table::{ScoreTable, Variant};

/// How much probability mass sits exactly at the extremes of a table.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExtremeMass {
    pub at_zero: usize,
    pub at_one: usize,
    pub scored: usize,
}

/// Per-entity and aggregate differences between two score tables.
#[derive(Debug, Clone)]
pub struct VariantComparison {
    /// `temporal K - plain K` per entity; `None` where unscored.
    pub deltas: Vec<Option<f64>>,
    pub mean_delta: f64,
    pub mean_abs_delta: f64,
    pub plain_mass: ExtremeMass,
    pub temporal_mass: ExtremeMass,
}

impl VariantComparison {
    pub fn delta(&self, v: EntityId) -> Option<f64> {
        self.deltas[v.0]
    }
}

fn extreme_mass(table: &ScoreTable) -> ExtremeMass {
    let mut mass = ExtremeMass {
        at_zero: 0,
        at_one: 0,
        scored: 0,
    };
    for (_, s) in table.iter() {
        mass.scored += 1;
        if s.k == 0.0 {
            mass.at_zero += 1;
        } else if s.k == 1.0 {
            mass.at_one += 1;
        }
    }
    mass
}

/// Compares the plain table against the temporal one entity by entity.
///
/// The tables must come from the expected variants, describe the same number
/// of entities, and score exactly the same entity set — a mismatch reports
/// the offending entity ids. Aggregates average over the common scored set.
pub fn compare_variants(
    plain: &ScoreTable,
    temporal: &ScoreTable,
) -> Result<VariantComparison, ScoreError> {
    if plain.variant != Variant::Plain || temporal.variant != Variant::Temporal {
        return Err(ScoreError::TableMismatch(format!(
            "expected plain and temporal tables, got {} and {}",
            plain.variant.name(),
            temporal.variant.name()
        )));
    }
    if plain.len() != temporal.len() {
        return Err(ScoreError::TableMismatch(format!(
            "entity counts differ: {} vs {}",
            plain.len(),
            temporal.len()
        )));
    }
    let only_plain: Vec<usize> = (0..plain.len())
        .filter(|&v| plain.k(EntityId(v)).is_some() && temporal.k(EntityId(v)).is_none())
        .collect();
    let only_temporal: Vec<usize> = (0..plain.len())
        .filter(|&v| temporal.k(EntityId(v)).is_some() && plain.k(EntityId(v)).is_none())
        .collect();
    if !only_plain.is_empty() || !only_temporal.is_empty() {
        return Err(ScoreError::TableMismatch(format!(
            "scored entity sets differ; only plain: {:?}, only temporal: {:?}",
            preview(&only_plain),
            preview(&only_temporal)
        )));
    }

    let mut deltas = Vec::with_capacity(plain.len());
    let mut sum = 0.0f64;
    let mut abs_sum = 0.0f64;
    let mut count = 0usize;
    for v in 0..plain.len() {
        let delta = match (plain.k(EntityId(v)), temporal.k(EntityId(v))) {
            (Some(p), Some(t)) => {
                let d = t - p;
                sum += d;
                abs_sum += d.abs();
                count += 1;
                Some(d)
            }
            _ => None,
        };
        deltas.push(delta);
    }
    if count == 0 {
        return Err(ScoreError::NoScores);
    }
    Ok(VariantComparison {
        deltas,
        mean_delta: sum / count as f64,
        mean_abs_delta: abs_sum / count as f64,
        plain_mass: extreme_mass(plain),
        temporal_mass: extreme_mass(temporal),
    })
}

/// First few offenders, so mismatch errors stay readable on big graphs.
fn preview(ids: &[usize]) -> Vec<usize> {
    ids.iter().copied().take(8).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table(variant: Variant, scores: &[Option<f64>]) -> ScoreTable {
        ScoreTable::from_scores(
            variant,
            scores.len(),
            scores
                .iter()
                .enumerate()
                .filter_map(|(v, s)| s.map(|k| (EntityId(v), k))),
        )
        .unwrap()
    }

    #[test]
    fn deltas_and_masses() {
        let plain = table(Variant::Plain, &[Some(1.0), Some(0.5), None]);
        let temporal = table(Variant::Temporal, &[Some(0.0), Some(0.75), None]);
        let cmp = compare_variants(&plain, &temporal).unwrap();
        assert_eq!(cmp.delta(EntityId(0)), Some(-1.0));
        assert_eq!(cmp.delta(EntityId(1)), Some(0.25));
        assert_eq!(cmp.delta(EntityId(2)), None);
        assert!((cmp.mean_delta - (-0.375)).abs() < 1e-12);
        assert!((cmp.mean_abs_delta - 0.625).abs() < 1e-12);
        assert_eq!(cmp.plain_mass.at_one, 1);
        assert_eq!(cmp.plain_mass.at_zero, 0);
        assert_eq!(cmp.temporal_mass.at_zero, 1);
        assert_eq!(cmp.plain_mass.scored, 2);
    }

    #[test]
    fn wrong_variant_order_is_rejected() {
        let plain = table(Variant::Plain, &[Some(1.0)]);
        let temporal = table(Variant::Temporal, &[Some(1.0)]);
        assert!(compare_variants(&temporal, &plain).is_err());
    }

    #[test]
    fn scored_set_mismatch_lists_entities() {
        let plain = table(Variant::Plain, &[Some(1.0), Some(0.5)]);
        let temporal = table(Variant::Temporal, &[Some(1.0), None]);
        let err = compare_variants(&plain, &temporal).unwrap_err();
        let message = err.to_string();
        assert!(message.contains("only plain: [1]"), "got: {message}");
    }

    #[test]
    fn length_mismatch_is_rejected() {
        let plain = table(Variant::Plain, &[Some(1.0)]);
        let temporal = table(Variant::Temporal, &[Some(1.0), Some(0.0)]);
        assert!(compare_variants(&plain, &temporal).is_err());
    }
}
