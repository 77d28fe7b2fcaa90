//! Knowledge homophily: how closely an entity's score tracks its neighbors'.

use kg_core::{EntityId, KnowledgeGraph};

use crate::error::ScoreError;
use crate::table::ScoreTable;

/// Node-level homophily, indexed by [`EntityId`]. `None` where undefined:
/// the entity is unscored or has no scored neighbor.
#[derive(Debug, Clone)]
pub struct HomophilyTable {
    values: Vec<Option<f64>>,
}

impl HomophilyTable {
    pub fn get(&self, v: EntityId) -> Option<f64> {
        self.values[v.0]
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn defined_count(&self) -> usize {
        self.values.iter().flatten().count()
    }

    pub fn iter(&self) -> impl Iterator<Item = (EntityId, Option<f64>)> + '_ {
        self.values
            .iter()
            .enumerate()
            .map(|(v, h)| (EntityId(v), *h))
    }

    pub fn as_options(&self) -> &[Option<f64>] {
        &self.values
    }
}

/// Computes per-entity homophily: one minus the mean absolute score gap to
/// scored neighbors, so 1 means neighbors score exactly alike and 0 means
/// maximal disagreement. Unscored neighbors are skipped; entities that are
/// unscored or have no scored neighbor are undefined.
///
/// Neighbor gaps accumulate in ascending neighbor id order, making values
/// reproducible bit for bit.
pub fn node_homophily(g: &KnowledgeGraph, table: &ScoreTable) -> HomophilyTable {
    let values = g
        .entity_ids()
        .map(|v| {
            let k_v = table.k(v)?;
            let mut total = 0.0f64;
            let mut count = 0usize;
            for &u in g.neighbors(v) {
                if let Some(k_u) = table.k(u) {
                    total += (k_v - k_u).abs();
                    count += 1;
                }
            }
            if count == 0 {
                None
            } else {
                Some(1.0 - total / count as f64)
            }
        })
        .collect();
    HomophilyTable { values }
}

/// Graph-level homophily: the mean of all defined node values, in ascending
/// entity id order. Errors when nothing is defined.
pub fn graph_homophily(table: &HomophilyTable) -> Result<f64, ScoreError> {
    let mut total = 0.0f64;
    let mut count = 0usize;
    for h in table.values.iter().flatten() {
        total += h;
        count += 1;
    }
    if count == 0 {
        return Err(ScoreError::NoScores);
    }
    Ok(total / count as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::table::Variant;
    use kg_core::{build_graph, Triplet};

    fn table(g: &KnowledgeGraph, planted: &[(&str, f64)]) -> ScoreTable {
        ScoreTable::from_scores(
            Variant::Plain,
            g.entity_count(),
            planted
                .iter()
                .map(|(name, k)| (g.entity_id(name).unwrap(), *k)),
        )
        .unwrap()
    }

    #[test]
    fn path_scores() {
        let g = build_graph(vec![
            Triplet::new("A", "r", "B"),
            Triplet::new("B", "r", "C"),
        ]);
        let t = table(&g, &[("A", 1.0), ("B", 0.5), ("C", 0.0)]);
        let h = node_homophily(&g, &t);
        let get = |name: &str| h.get(g.entity_id(name).unwrap()).unwrap();
        assert_eq!(get("A"), 0.5);
        assert_eq!(get("B"), 0.5);
        assert_eq!(get("C"), 0.5);
        assert_eq!(graph_homophily(&h).unwrap(), 0.5);
    }

    #[test]
    fn identical_neighborhood_scores_one() {
        let g = build_graph(vec![
            Triplet::new("A", "r", "B"),
            Triplet::new("B", "r", "C"),
            Triplet::new("C", "r", "A"),
        ]);
        let t = table(&g, &[("A", 0.7), ("B", 0.7), ("C", 0.7)]);
        let h = node_homophily(&g, &t);
        for v in g.entity_ids() {
            assert_eq!(h.get(v), Some(1.0));
        }
    }

    #[test]
    fn unscored_neighbors_are_skipped() {
        let g = build_graph(vec![
            Triplet::new("A", "r", "B"),
            Triplet::new("A", "r", "C"),
        ]);
        // C unscored: A's homophily uses B only.
        let t = table(&g, &[("A", 1.0), ("B", 0.0)]);
        let h = node_homophily(&g, &t);
        assert_eq!(h.get(g.entity_id("A").unwrap()), Some(0.0));
        // C itself is undefined (no score), B is defined via A.
        assert_eq!(h.get(g.entity_id("C").unwrap()), None);
        assert_eq!(h.get(g.entity_id("B").unwrap()), Some(0.0));
        assert_eq!(h.defined_count(), 2);
    }

    #[test]
    fn entity_with_no_scored_neighbor_is_undefined() {
        let g = build_graph(vec![
            Triplet::new("A", "r", "B"),
            Triplet::new("C", "r", "D"),
        ]);
        let t = table(&g, &[("A", 1.0), ("B", 0.5), ("C", 0.25)]);
        let h = node_homophily(&g, &t);
        // C is scored but its only neighbor D is not.
        assert_eq!(h.get(g.entity_id("C").unwrap()), None);
    }

    #[test]
    fn no_defined_values_is_an_error() {
        let g = build_graph(vec![Triplet::new("A", "r", "B")]);
        let t = table(&g, &[]);
        let h = node_homophily(&g, &t);
        assert!(matches!(graph_homophily(&h), Err(ScoreError::NoScores)));
    }

    #[test]
    fn parallel_edges_do_not_double_count_neighbors() {
        let g = build_graph(vec![
            Triplet::new("A", "r", "B"),
            Triplet::new("A", "s", "B"),
            Triplet::new("A", "r", "C"),
        ]);
        let t = table(&g, &[("A", 1.0), ("B", 1.0), ("C", 0.0)]);
        let h = node_homophily(&g, &t);
        // Neighbors of A are {B, C} once each: H = 1 - (0 + 1)/2.
        assert_eq!(h.get(g.entity_id("A").unwrap()), Some(0.5));
    }
}
