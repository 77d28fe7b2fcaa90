//! Property tests over randomly generated graphs.

use proptest::prelude::*;

use kg_core::{
    bin_by_property, build_graph, connected_components, largest_connected_component, pagerank,
    BinScale, ComponentMode, EntityId, KnowledgeGraph, PageRankParams,
    Strategy as ExecStrategy, Triplet,
};

/// Random small multigraphs: entity indices into a universe of `n`, arbitrary
/// relations, self-loops and duplicates allowed.
fn arb_graph() -> impl Strategy<Value = KnowledgeGraph> {
    (2usize..16).prop_flat_map(|n| {
        proptest::collection::vec((0..n, 0..n, 0u8..4), 0..60)
            .prop_map(|edges| {
                let triplets = edges
                    .into_iter()
                    .map(|(h, t, r)| Triplet::new(format!("e{h}"), format!("r{r}"), format!("e{t}")))
                    .collect();
                build_graph(triplets)
            })
    })
}

proptest! {
    #![proptest_config(ProptestConfig {
        failure_persistence: None,
        ..ProptestConfig::default()
    })]

    #[test]
    fn degree_orderings_hold(g in arb_graph()) {
        for v in g.entity_ids() {
            let nd = g.neighbor_degree(v);
            let td = g.triplet_degree(v);
            prop_assert!(nd <= td, "neighbors exceed incident triplets");
            prop_assert!(td <= g.adjacency(v).len());
            // Neighbor lists are sorted, distinct, and never include self.
            let nbrs = g.neighbors(v);
            prop_assert!(nbrs.windows(2).all(|w| w[0] < w[1]));
            prop_assert!(!nbrs.contains(&v));
            // Symmetry of the simple view.
            for &u in nbrs {
                prop_assert!(g.neighbors(u).contains(&v));
            }
        }
    }

    #[test]
    fn triplet_degrees_sum_to_endpoint_count(g in arb_graph()) {
        // Every triplet contributes one per distinct endpoint role.
        let loops = g.triplet_ids().filter(|&t| {
            let (h, _, tl) = g.endpoints(t);
            h == tl
        }).count();
        let total: usize = g.entity_ids().map(|v| g.triplet_degree(v)).sum();
        prop_assert_eq!(total, 2 * g.triplet_count() - loops);
    }

    #[test]
    fn pagerank_is_a_distribution(g in arb_graph()) {
        prop_assume!(!g.is_empty());
        let pr = pagerank(&g, PageRankParams::default()).unwrap();
        let sum: f64 = pr.iter().sum();
        prop_assert!((sum - 1.0).abs() < 1e-8);
        prop_assert!(pr.iter().all(|&x| x > 0.0));
    }

    #[test]
    fn pagerank_is_label_invariant(g in arb_graph(), seed in 0u64..1000) {
        // Rebuilding from a rotated triplet list permutes entity ids but must
        // not change any entity's score.
        let pr = pagerank(&g, PageRankParams::default()).unwrap();
        let mut triplets: Vec<Triplet> = g.triplets().to_vec();
        if !triplets.is_empty() {
            let by = seed as usize % triplets.len();
            triplets.rotate_left(by);
        }
        let names: Vec<String> = g.entity_names().to_vec();
        let g2 = KnowledgeGraph::from_parts(
            {
                let mut shuffled = names.clone();
                shuffled.rotate_right(seed as usize % names.len().max(1));
                shuffled
            },
            triplets,
        ).unwrap();
        let pr2 = pagerank(&g2, PageRankParams::default()).unwrap();
        for name in &names {
            let a = pr[g.entity_id(name).unwrap().0];
            let b = pr2[g2.entity_id(name).unwrap().0];
            prop_assert!((a - b).abs() < 1e-8, "{} scored {a} then {b}", name);
        }
    }

    #[test]
    fn centrality_ranges(g in arb_graph()) {
        let n = g.entity_count();
        for v in kg_core::degree_centrality(&g) {
            prop_assert!((0.0..=1.0).contains(&v));
        }
        for v in kg_core::closeness(&g, ExecStrategy::default()) {
            prop_assert!((0.0..=1.0).contains(&v));
        }
        for v in kg_core::betweenness(&g, ExecStrategy::default()) {
            prop_assert!(v >= 0.0 && v <= 1.0 + 1e-12);
        }
        for v in g.entity_ids() {
            let c = kg_core::clustering_coefficient(&g, v);
            prop_assert!((0.0..=1.0).contains(&c));
        }
        prop_assert_eq!(kg_core::degree_centrality(&g).len(), n);
    }

    #[test]
    fn components_partition_entities(g in arb_graph()) {
        for mode in [ComponentMode::Weak, ComponentMode::Strong] {
            let c = connected_components(&g, mode);
            prop_assert_eq!(c.labels.len(), g.entity_count());
            prop_assert!(c.labels.iter().all(|&l| l < c.component_count));
            let members = c.members();
            let total: usize = members.iter().map(|m| m.len()).sum();
            prop_assert_eq!(total, g.entity_count());
            prop_assert!(members.iter().all(|m| !m.is_empty()));
        }
        // Strong components refine weak ones.
        let weak = connected_components(&g, ComponentMode::Weak);
        let strong = connected_components(&g, ComponentMode::Strong);
        for (u, v) in (0..g.entity_count()).zip(1..g.entity_count()) {
            if strong.labels[u] == strong.labels[v] {
                prop_assert_eq!(weak.labels[u], weak.labels[v]);
            }
        }
    }

    #[test]
    fn lcc_is_connected_and_induced(g in arb_graph()) {
        prop_assume!(!g.is_empty());
        let lcc = largest_connected_component(&g, ComponentMode::Weak).unwrap();
        prop_assert!(lcc.entity_count() >= 1);
        // Connected: BFS from entity 0 reaches everything.
        let mut seen = vec![false; lcc.entity_count()];
        let mut stack = vec![EntityId(0)];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for &u in lcc.neighbors(v) {
                if !seen[u.0] {
                    seen[u.0] = true;
                    stack.push(u);
                }
            }
        }
        prop_assert!(seen.into_iter().all(|s| s));
        // No other weak component is larger.
        let sizes = connected_components(&g, ComponentMode::Weak).members();
        let max = sizes.iter().map(|m| m.len()).max().unwrap();
        prop_assert_eq!(lcc.entity_count(), max);
        // Induced: triplet count matches a direct recount on the parent.
        let keep: std::collections::HashSet<&str> =
            lcc.entity_names().iter().map(|s| s.as_str()).collect();
        let expect = g
            .triplets()
            .iter()
            .filter(|t| keep.contains(t.head.as_str()) && keep.contains(t.tail.as_str()))
            .count();
        prop_assert_eq!(lcc.triplet_count(), expect);
    }

    #[test]
    fn binning_conserves_mass(
        points in proptest::collection::vec((0.0f64..100.0, proptest::option::of(0.0f64..1.0)), 1..50),
        nbins in 1usize..10,
    ) {
        let values: Vec<f64> = points.iter().map(|p| p.0).collect();
        let scores: Vec<Option<f64>> = points.iter().map(|p| p.1).collect();
        for scale in [BinScale::Linear, BinScale::Log] {
            let curve = bin_by_property(&values, &scores, nbins, scale).unwrap();
            let binned: usize = curve.rows.iter().map(|r| r.count).sum();
            prop_assert_eq!(
                binned + curve.excluded_nonpositive + curve.excluded_unscored,
                values.len()
            );
            for row in &curve.rows {
                prop_assert_eq!(row.mean.is_some(), row.count > 0);
                if let Some(m) = row.mean {
                    prop_assert!((0.0..=1.0).contains(&m));
                }
            }
        }
    }

    #[test]
    fn tsv_roundtrip(g in arb_graph()) {
        let tsv = kg_synth::to_tsv(g.triplets());
        let parsed = kg_core::parse_triplets(
            std::io::BufReader::new(tsv.as_bytes()),
            kg_core::ColumnOrder::HeadRelationTail,
        ).unwrap();
        prop_assert_eq!(parsed, g.triplets().to_vec());
    }
}
