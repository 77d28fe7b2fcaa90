//! Node centrality measures over the undirected simple view.
//!
//! All measures treat the graph as simple and undirected: parallel triplets
//! collapse to one edge and self-loops are ignored. Heavy per-source sweeps
//! (closeness, betweenness) accept an execution [`Strategy`] and produce
//! bitwise-identical results under either one.

use std::collections::VecDeque;

use crate::error::CoreError;
use crate::exec::{map_indexed, sum_chunked, Strategy};
use crate::graph::{EntityId, KnowledgeGraph};

/// Which centrality to compute.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CentralityKind {
    Degree,
    PageRank,
    Katz,
    Closeness,
    Betweenness,
}

impl CentralityKind {
    pub const ALL: [CentralityKind; 5] = [
        CentralityKind::Degree,
        CentralityKind::PageRank,
        CentralityKind::Katz,
        CentralityKind::Closeness,
        CentralityKind::Betweenness,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CentralityKind::Degree => "degree",
            CentralityKind::PageRank => "pagerank",
            CentralityKind::Katz => "katz",
            CentralityKind::Closeness => "closeness",
            CentralityKind::Betweenness => "betweenness",
        }
    }
}

impl std::str::FromStr for CentralityKind {
    type Err = CoreError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "degree" => Ok(CentralityKind::Degree),
            "pagerank" => Ok(CentralityKind::PageRank),
            "katz" => Ok(CentralityKind::Katz),
            "closeness" => Ok(CentralityKind::Closeness),
            "betweenness" => Ok(CentralityKind::Betweenness),
            other => Err(CoreError::InvalidParameter(format!(
                "unknown centrality {other:?}"
            ))),
        }
    }
}

/// A centrality score per entity, indexed by [`EntityId`].
#[derive(Debug, Clone)]
pub struct CentralityMap {
    pub kind: CentralityKind,
    pub values: Vec<f64>,
}

impl CentralityMap {
    pub fn get(&self, v: EntityId) -> f64 {
        self.values[v.0]
    }
}

/// PageRank iteration settings.
#[derive(Debug, Clone, Copy)]
pub struct PageRankParams {
    pub damping: f64,
    /// L1 residual below which iteration stops.
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for PageRankParams {
    fn default() -> Self {
        PageRankParams {
            damping: 0.85,
            tolerance: 1e-10,
            max_iterations: 10_000,
        }
    }
}

/// Katz iteration settings. `x = alpha * A * x + 1`, requiring
/// `alpha < 1 / lambda_max(A)`.
#[derive(Debug, Clone, Copy)]
pub struct KatzParams {
    pub alpha: f64,
    /// Max-norm change below which iteration stops.
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for KatzParams {
    fn default() -> Self {
        KatzParams {
            alpha: 0.005,
            tolerance: 1e-13,
            max_iterations: 10_000,
        }
    }
}

/// Computes one centrality with default parameters.
pub fn centrality(
    g: &KnowledgeGraph,
    kind: CentralityKind,
    strategy: Strategy,
) -> Result<CentralityMap, CoreError> {
    let values = match kind {
        CentralityKind::Degree => degree_centrality(g),
        CentralityKind::PageRank => pagerank(g, PageRankParams::default())?,
        CentralityKind::Katz => katz(g, KatzParams::default())?,
        CentralityKind::Closeness => closeness(g, strategy),
        CentralityKind::Betweenness => betweenness(g, strategy),
    };
    Ok(CentralityMap { kind, values })
}

/// Neighbor count normalized by `n - 1` (0 for a single-entity graph).
pub fn degree_centrality(g: &KnowledgeGraph) -> Vec<f64> {
    let n = g.entity_count();
    if n <= 1 {
        return vec![0.0; n];
    }
    let denom = (n - 1) as f64;
    (0..n)
        .map(|v| g.neighbor_degree(EntityId(v)) as f64 / denom)
        .collect()
}

/// Power iteration PageRank with uniform teleport and uniform redistribution
/// of dangling (isolated-entity) mass. Scores sum to 1.
pub fn pagerank(g: &KnowledgeGraph, params: PageRankParams) -> Result<Vec<f64>, CoreError> {
    let n = g.entity_count();
    if n == 0 {
        return Ok(Vec::new());
    }
    if !(0.0..1.0).contains(&params.damping) {
        return Err(CoreError::InvalidParameter(format!(
            "pagerank damping must be in [0, 1), got {}",
            params.damping
        )));
    }
    let d = params.damping;
    let nf = n as f64;
    let mut x = vec![1.0 / nf; n];
    let mut next = vec![0.0; n];
    for _ in 0..params.max_iterations {
        let dangling: f64 = (0..n)
            .filter(|&v| g.neighbor_degree(EntityId(v)) == 0)
            .map(|v| x[v])
            .sum();
        let base = (1.0 - d) / nf + d * dangling / nf;
        next.iter_mut().for_each(|y| *y = base);
        for v in 0..n {
            let deg = g.neighbor_degree(EntityId(v));
            if deg == 0 {
                continue;
            }
            let share = d * x[v] / deg as f64;
            for &u in g.neighbors(EntityId(v)) {
                next[u.0] += share;
            }
        }
        let residual: f64 = x.iter().zip(&next).map(|(a, b)| (a - b).abs()).sum();
        std::mem::swap(&mut x, &mut next);
        if residual < params.tolerance {
            return Ok(x);
        }
    }
    Err(CoreError::Convergence {
        what: "pagerank",
        max_iterations: params.max_iterations,
    })
}

/// Estimates the spectral radius of the simple-view adjacency matrix by power
/// iteration with Rayleigh-quotient readout. The estimate approaches the true
/// value from below, so it rejects clearly bad `alpha` early; an `alpha` that
/// slips past the guard still fails via non-convergence.
fn spectral_radius_estimate(g: &KnowledgeGraph) -> f64 {
    let n = g.entity_count();
    if n == 0 {
        return 0.0;
    }
    let mut x = vec![1.0 / (n as f64).sqrt(); n];
    let mut ax = vec![0.0; n];
    let mut lambda = 0.0f64;
    for _ in 0..100 {
        for v in 0..n {
            ax[v] = g.neighbors(EntityId(v)).iter().map(|&u| x[u.0]).sum();
        }
        let num: f64 = x.iter().zip(&ax).map(|(a, b)| a * b).sum();
        let norm: f64 = ax.iter().map(|a| a * a).sum::<f64>().sqrt();
        if norm == 0.0 {
            return 0.0;
        }
        let new_lambda = num;
        ax.iter_mut().for_each(|a| *a /= norm);
        std::mem::swap(&mut x, &mut ax);
        if (new_lambda - lambda).abs() < 1e-9 * new_lambda.abs().max(1.0) {
            return new_lambda.max(0.0);
        }
        lambda = new_lambda;
    }
    lambda.max(0.0)
}

/// Katz centrality: fixed point of `x = alpha * A * x + 1`.
pub fn katz(g: &KnowledgeGraph, params: KatzParams) -> Result<Vec<f64>, CoreError> {
    let n = g.entity_count();
    if n == 0 {
        return Ok(Vec::new());
    }
    if params.alpha <= 0.0 || !params.alpha.is_finite() {
        return Err(CoreError::InvalidParameter(format!(
            "katz alpha must be positive and finite, got {}",
            params.alpha
        )));
    }
    let lambda = spectral_radius_estimate(g);
    if lambda > 0.0 {
        let bound = 1.0 / lambda;
        if params.alpha >= bound {
            return Err(CoreError::KatzAlpha {
                alpha: params.alpha,
                bound,
            });
        }
    }
    let mut x = vec![1.0; n];
    let mut next = vec![0.0; n];
    for _ in 0..params.max_iterations {
        for v in 0..n {
            let s: f64 = g.neighbors(EntityId(v)).iter().map(|&u| x[u.0]).sum();
            next[v] = params.alpha * s + 1.0;
        }
        let delta = x
            .iter()
            .zip(&next)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max);
        std::mem::swap(&mut x, &mut next);
        if !x.iter().all(|v| v.is_finite()) {
            // alpha at or above 1/lambda slipped past the estimate's guard.
            return Err(CoreError::KatzAlpha {
                alpha: params.alpha,
                bound: 1.0 / lambda.max(f64::MIN_POSITIVE),
            });
        }
        if delta < params.tolerance {
            return Ok(x);
        }
    }
    Err(CoreError::Convergence {
        what: "katz",
        max_iterations: params.max_iterations,
    })
}

/// Component-local closeness: for entity `v` reaching `r - 1` others within
/// its component, the score is `(r - 1) / sum_of_distances`. Isolated
/// entities score 0.
pub fn closeness(g: &KnowledgeGraph, strategy: Strategy) -> Vec<f64> {
    let n = g.entity_count();
    map_indexed(n, strategy, |s| {
        let dist = bfs_distances(g, EntityId(s));
        let mut reached = 0usize;
        let mut total = 0usize;
        for d in dist.into_iter().flatten() {
            if d > 0 {
                reached += 1;
                total += d;
            }
        }
        if total == 0 {
            0.0
        } else {
            reached as f64 / total as f64
        }
    })
}

fn bfs_distances(g: &KnowledgeGraph, source: EntityId) -> Vec<Option<usize>> {
    let n = g.entity_count();
    let mut dist = vec![None; n];
    dist[source.0] = Some(0);
    let mut queue = VecDeque::new();
    queue.push_back(source);
    while let Some(v) = queue.pop_front() {
        let dv = dist[v.0].expect("queued entities have distances");
        for &u in g.neighbors(v) {
            if dist[u.0].is_none() {
                dist[u.0] = Some(dv + 1);
                queue.push_back(u);
            }
        }
    }
    dist
}

/// Shortest-path betweenness via per-source dependency accumulation,
/// halved for the undirected view and normalized by `(n-1)(n-2)/2`.
/// Graphs with fewer than three entities score all zeros.
pub fn betweenness(g: &KnowledgeGraph, strategy: Strategy) -> Vec<f64> {
    let n = g.entity_count();
    if n < 3 {
        return vec![0.0; n];
    }
    let raw = sum_chunked(n, n, strategy, |s, acc| {
        accumulate_dependencies(g, EntityId(s), acc);
    });
    let scale = 1.0 / ((n - 1) as f64 * (n - 2) as f64);
    raw.into_iter().map(|x| x * scale).collect()
}

/// One source sweep of Brandes' algorithm: BFS recording path counts, then a
/// reverse pass over the BFS order pushing dependencies toward the source.
/// Each unordered pair is seen from both endpoints, so dependencies are
/// halved here (combined with normalization in the caller as
/// `/ ((n-1)(n-2))`).
fn accumulate_dependencies(g: &KnowledgeGraph, source: EntityId, acc: &mut [f64]) {
    let n = g.entity_count();
    let mut dist: Vec<i64> = vec![-1; n];
    let mut sigma: Vec<f64> = vec![0.0; n];
    let mut order: Vec<usize> = Vec::new();
    let mut queue = VecDeque::new();

    dist[source.0] = 0;
    sigma[source.0] = 1.0;
    queue.push_back(source.0);
    while let Some(v) = queue.pop_front() {
        order.push(v);
        for &u in g.neighbors(EntityId(v)) {
            if dist[u.0] < 0 {
                dist[u.0] = dist[v] + 1;
                queue.push_back(u.0);
            }
            if dist[u.0] == dist[v] + 1 {
                sigma[u.0] += sigma[v];
            }
        }
    }

    let mut delta = vec![0.0; n];
    for &w in order.iter().rev() {
        // Predecessors of w are exactly its neighbors one BFS level closer.
        for &u in g.neighbors(EntityId(w)) {
            if dist[u.0] == dist[w] - 1 {
                delta[u.0] += sigma[u.0] / sigma[w] * (1.0 + delta[w]);
            }
        }
        if w != source.0 {
            acc[w] += delta[w];
        }
    }
}

/// Fraction of an entity's neighbor pairs that are themselves adjacent.
/// Entities with fewer than two neighbors score 0.
pub fn clustering_coefficient(g: &KnowledgeGraph, v: EntityId) -> f64 {
    let nbrs = g.neighbors(v);
    let k = nbrs.len();
    if k < 2 {
        return 0.0;
    }
    let mut closed = 0usize;
    for (i, &a) in nbrs.iter().enumerate() {
        for &b in &nbrs[i + 1..] {
            if g.has_edge(a, b) {
                closed += 1;
            }
        }
    }
    2.0 * closed as f64 / (k * (k - 1)) as f64
}

/// Clustering coefficient for every entity.
pub fn clustering_all(g: &KnowledgeGraph, strategy: Strategy) -> Vec<f64> {
    map_indexed(g.entity_count(), strategy, |v| {
        clustering_coefficient(g, EntityId(v))
    })
}
