//! Cross-checks the centrality and component implementations against slow,
//! structurally independent reference computations on small graphs.
//!
//! The references share no code with the library paths they check: distances
//! come from Floyd-Warshall instead of per-source BFS, betweenness from
//! pair-by-pair path counting instead of dependency accumulation, PageRank
//! and Katz from dense linear solves instead of power iteration, and strong
//! components from reachability closure instead of Tarjan's stack.

use kg_core::{
    betweenness, closeness, connected_components, katz, pagerank, ComponentMode, EntityId,
    KatzParams, KnowledgeGraph, PageRankParams, Strategy,
};

const TOL: f64 = 1e-8;

fn test_graphs() -> Vec<(String, KnowledgeGraph)> {
    let mut graphs = vec![
        ("cycle12".to_string(), kg_core::build_graph(kg_synth::cycle(12))),
        (
            "stars".to_string(),
            kg_core::build_graph(kg_synth::union_of_stars(&[3, 5, 2])),
        ),
    ];
    for seed in [1, 2, 3, 4, 5] {
        graphs.push((
            format!("random{seed}"),
            kg_core::build_graph(kg_synth::random_graph(18, 40, 3, seed)),
        ));
    }
    for seed in [6, 7] {
        graphs.push((
            format!("attach{seed}"),
            kg_core::build_graph(kg_synth::attachment_graph(25, 2, 2, seed)),
        ));
    }
    graphs
}

/// Dense symmetric 0/1 adjacency of the simple undirected view.
fn adjacency_matrix(g: &KnowledgeGraph) -> Vec<Vec<f64>> {
    let n = g.entity_count();
    let mut a = vec![vec![0.0; n]; n];
    for v in 0..n {
        for &u in g.neighbors(EntityId(v)) {
            a[v][u.0] = 1.0;
        }
    }
    a
}

/// All-pairs hop distances by Floyd-Warshall (usize::MAX = unreachable).
fn floyd_warshall(g: &KnowledgeGraph) -> Vec<Vec<usize>> {
    let n = g.entity_count();
    const INF: usize = usize::MAX / 4;
    let mut d = vec![vec![INF; n]; n];
    for v in 0..n {
        d[v][v] = 0;
        for &u in g.neighbors(EntityId(v)) {
            d[v][u.0] = 1;
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = d[i][k] + d[k][j];
                if via < d[i][j] {
                    d[i][j] = via;
                }
            }
        }
    }
    d
}

/// Shortest-path counts between all pairs, by dynamic programming over
/// distance levels: sigma[s][v] = sum of sigma[s][u] over neighbors u of v
/// one hop closer to s.
fn path_counts(g: &KnowledgeGraph, dist: &[Vec<usize>]) -> Vec<Vec<f64>> {
    let n = g.entity_count();
    let mut sigma = vec![vec![0.0; n]; n];
    for s in 0..n {
        sigma[s][s] = 1.0;
        // Fill in increasing distance from s.
        let mut order: Vec<usize> = (0..n).filter(|&v| dist[s][v] < usize::MAX / 4).collect();
        order.sort_by_key(|&v| dist[s][v]);
        for &v in &order {
            if v == s {
                continue;
            }
            sigma[s][v] = g
                .neighbors(EntityId(v))
                .iter()
                .filter(|&&u| dist[s][u.0] + 1 == dist[s][v])
                .map(|&u| sigma[s][u.0])
                .sum();
        }
    }
    sigma
}

/// Gaussian elimination with partial pivoting; returns x solving a*x = b.
fn solve_dense(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[i][col].abs().partial_cmp(&a[j][col].abs()).unwrap())
            .unwrap();
        a.swap(col, pivot);
        b.swap(col, pivot);
        assert!(a[col][col].abs() > 1e-12, "singular system");
        for row in (col + 1)..n {
            let f = a[row][col] / a[col][col];
            if f == 0.0 {
                continue;
            }
            for k in col..n {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let s: f64 = ((row + 1)..n).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - s) / a[row][row];
    }
    x
}

#[test]
fn closeness_matches_floyd_warshall() {
    for (name, g) in test_graphs() {
        let got = closeness(&g, Strategy::default());
        let dist = floyd_warshall(&g);
        for v in 0..g.entity_count() {
            let (mut reached, mut total) = (0usize, 0usize);
            for u in 0..g.entity_count() {
                if u != v && dist[v][u] < usize::MAX / 4 {
                    reached += 1;
                    total += dist[v][u];
                }
            }
            let want = if total == 0 {
                0.0
            } else {
                reached as f64 / total as f64
            };
            assert!(
                (got[v] - want).abs() < TOL,
                "{name}: closeness[{v}] = {} want {want}",
                got[v]
            );
        }
    }
}

#[test]
fn betweenness_matches_pair_counting() {
    for (name, g) in test_graphs() {
        let n = g.entity_count();
        let got = betweenness(&g, Strategy::default());
        let dist = floyd_warshall(&g);
        let sigma = path_counts(&g, &dist);
        let mut want = vec![0.0; n];
        for s in 0..n {
            for t in (s + 1)..n {
                if sigma[s][t] == 0.0 {
                    continue;
                }
                for v in 0..n {
                    if v == s || v == t {
                        continue;
                    }
                    if dist[s][v] + dist[v][t] == dist[s][t] {
                        want[v] += sigma[s][v] * sigma[v][t] / sigma[s][t];
                    }
                }
            }
        }
        let scale = if n < 3 {
            0.0
        } else {
            2.0 / ((n - 1) as f64 * (n - 2) as f64)
        };
        for v in 0..n {
            let w = want[v] * scale;
            assert!(
                (got[v] - w).abs() < TOL,
                "{name}: betweenness[{v}] = {} want {w}",
                got[v]
            );
        }
    }
}

#[test]
fn pagerank_matches_dense_solve() {
    let params = PageRankParams::default();
    for (name, g) in test_graphs() {
        let n = g.entity_count();
        let got = pagerank(&g, params).unwrap();
        // (I - d*M) x = (1-d)/n * 1, with M the column-stochastic walk matrix
        // and dangling columns replaced by uniform 1/n.
        let d = params.damping;
        let mut a = vec![vec![0.0; n]; n];
        for (i, row) in a.iter_mut().enumerate() {
            row[i] = 1.0;
        }
        for u in 0..n {
            let deg = g.neighbor_degree(EntityId(u));
            if deg == 0 {
                for v in 0..n {
                    a[v][u] -= d / n as f64;
                }
            } else {
                for &v in g.neighbors(EntityId(u)) {
                    a[v.0][u] -= d / deg as f64;
                }
            }
        }
        let b = vec![(1.0 - d) / n as f64; n];
        let want = solve_dense(a, b);
        for v in 0..n {
            assert!(
                (got[v] - want[v]).abs() < TOL,
                "{name}: pagerank[{v}] = {} want {}",
                got[v],
                want[v]
            );
        }
    }
}

#[test]
fn katz_matches_dense_solve() {
    let params = KatzParams::default();
    for (name, g) in test_graphs() {
        let n = g.entity_count();
        let got = katz(&g, params).unwrap();
        // (I - alpha*A) x = 1.
        let adj = adjacency_matrix(&g);
        let mut a = vec![vec![0.0; n]; n];
        for i in 0..n {
            for j in 0..n {
                a[i][j] = if i == j { 1.0 } else { 0.0 } - params.alpha * adj[i][j];
            }
        }
        let want = solve_dense(a, vec![1.0; n]);
        for v in 0..n {
            assert!(
                (got[v] - want[v]).abs() < TOL,
                "{name}: katz[{v}] = {} want {}",
                got[v],
                want[v]
            );
        }
    }
}

#[test]
fn strong_components_match_reachability_closure() {
    // Directed reachability by BFS over triplet direction.
    let reachable = |g: &KnowledgeGraph, from: usize| -> Vec<bool> {
        let n = g.entity_count();
        let mut out: Vec<Vec<usize>> = vec![Vec::new(); n];
        for t in g.triplet_ids() {
            let (h, _, tl) = g.endpoints(t);
            out[h.0].push(tl.0);
        }
        let mut seen = vec![false; n];
        seen[from] = true;
        let mut stack = vec![from];
        while let Some(v) = stack.pop() {
            for &u in &out[v] {
                if !seen[u] {
                    seen[u] = true;
                    stack.push(u);
                }
            }
        }
        seen
    };
    for (name, g) in test_graphs() {
        let n = g.entity_count();
        let labels = connected_components(&g, ComponentMode::Strong).labels;
        let reach: Vec<Vec<bool>> = (0..n).map(|v| reachable(&g, v)).collect();
        for u in 0..n {
            for v in 0..n {
                let same = reach[u][v] && reach[v][u];
                assert_eq!(
                    labels[u] == labels[v],
                    same,
                    "{name}: entities {u},{v} labels {}/{} mutual={same}",
                    labels[u],
                    labels[v]
                );
            }
        }
    }
}

#[test]
fn clustering_matches_matrix_triangles() {
    for (name, g) in test_graphs() {
        let n = g.entity_count();
        let a = adjacency_matrix(&g);
        for v in 0..n {
            let nbrs: Vec<usize> = (0..n).filter(|&u| a[v][u] > 0.0).collect();
            let k = nbrs.len();
            let want = if k < 2 {
                0.0
            } else {
                let mut closed = 0;
                for (i, &x) in nbrs.iter().enumerate() {
                    for &y in &nbrs[i + 1..] {
                        if a[x][y] > 0.0 {
                            closed += 1;
                        }
                    }
                }
                2.0 * closed as f64 / (k * (k - 1)) as f64
            };
            let got = kg_core::clustering_coefficient(&g, EntityId(v));
            assert!(
                (got - want).abs() < TOL,
                "{name}: clustering[{v}] = {got} want {want}"
            );
        }
    }
}

#[test]
fn sweep_strategies_agree_bitwise_on_every_graph() {
    for (name, g) in test_graphs() {
        for (seq, par) in [
            (
                betweenness(&g, Strategy::Sequential),
                betweenness(&g, Strategy::Parallel),
            ),
            (
                closeness(&g, Strategy::Sequential),
                closeness(&g, Strategy::Parallel),
            ),
        ] {
            let a: Vec<u64> = seq.iter().map(|x| x.to_bits()).collect();
            let b: Vec<u64> = par.iter().map(|x| x.to_bits()).collect();
            assert_eq!(a, b, "{name}: strategies disagree");
        }
    }
}
