//! Deterministic synthetic knowledge-graph generators.
//!
//! Everything here is driven by a caller-supplied seed through ChaCha8, so
//! test inputs and bench corpora are reproducible byte-for-byte. Generators
//! return triplet lists (and, where relevant, planted per-entity scores keyed
//! by entity name) rather than built graphs, mirroring the ingestion path.

use kg_core::Triplet;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

/// A generated graph together with planted per-entity ground-truth scores.
#[derive(Debug, Clone)]
pub struct PlantedGraph {
    pub triplets: Vec<Triplet>,
    /// `(entity name, score in [0, 1])`, one row per entity.
    pub scores: Vec<(String, f64)>,
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn ent(i: usize) -> String {
    format!("e{i}")
}

/// Cycle graph `C_n`: entity `e(i)` linked to `e((i+1) % n)`. Every entity
/// touches exactly two triplets.
pub fn cycle(n: usize) -> Vec<Triplet> {
    assert!(n >= 3, "a cycle needs at least three entities");
    (0..n)
        .map(|i| Triplet::new(ent(i), "linked_to", ent((i + 1) % n)))
        .collect()
}

/// Star with `leaves` outer entities around `center`.
pub fn star(center: &str, leaves: usize, relation: &str) -> Vec<Triplet> {
    (0..leaves)
        .map(|i| Triplet::new(center, relation, format!("{center}_leaf{i}")))
        .collect()
}

/// Disjoint stars with the given leaf counts, hubs named `hub0`, `hub1`, ...
pub fn union_of_stars(leaf_counts: &[usize]) -> Vec<Triplet> {
    leaf_counts
        .iter()
        .enumerate()
        .flat_map(|(h, &leaves)| star(&format!("hub{h}"), leaves, "linked_to"))
        .collect()
}

/// Uniform random multigraph: `m` triplets over `n` entities and `n_rel`
/// relations, self-loops excluded, parallel edges possible.
pub fn random_graph(n: usize, m: usize, n_rel: usize, seed: u64) -> Vec<Triplet> {
    assert!(n >= 2 && n_rel >= 1);
    let mut r = rng(seed);
    (0..m)
        .map(|_| {
            let h = r.random_range(0..n);
            let mut t = r.random_range(0..n);
            while t == h {
                t = r.random_range(0..n);
            }
            Triplet::new(ent(h), format!("r{}", r.random_range(0..n_rel)), ent(t))
        })
        .collect()
}

/// Growth graph where each new entity attaches to `attach` earlier entities,
/// preferring recent and well-connected ones. Produces the heavy-tailed
/// degree profile typical of curated knowledge bases.
pub fn attachment_graph(n: usize, attach: usize, n_rel: usize, seed: u64) -> Vec<Triplet> {
    assert!(n > attach && attach >= 1 && n_rel >= 1);
    let mut r = rng(seed);
    let mut targets: Vec<usize> = (0..=attach).collect();
    let mut triplets = Vec::new();
    for v in (attach + 1)..n {
        for _ in 0..attach {
            // Sampling from the running endpoint list is degree-proportional.
            let u = targets[r.random_range(0..targets.len())];
            triplets.push(Triplet::new(
                ent(v),
                format!("r{}", r.random_range(0..n_rel)),
                ent(u),
            ));
            targets.push(u);
            targets.push(v);
        }
    }
    triplets
}

/// Settings for [`community_graph`].
#[derive(Debug, Clone, Copy)]
pub struct CommunityConfig {
    pub communities: usize,
    pub community_size: usize,
    /// Intra-community edges per member (ring plus random chords).
    pub intra_degree: usize,
    /// Total random cross-community edges.
    pub inter_edges: usize,
    /// Half-width of the uniform noise around each community's base score.
    pub score_noise: f64,
}

impl Default for CommunityConfig {
    fn default() -> Self {
        CommunityConfig {
            communities: 20,
            community_size: 100,
            intra_degree: 4,
            inter_edges: 60,
            score_noise: 0.1,
        }
    }
}

/// Homophilous community graph: dense communities whose members share a base
/// score (drawn per community from low/mid/high anchors) plus bounded noise.
/// Neighboring entities therefore carry similar scores, except across the few
/// inter-community edges.
pub fn community_graph(cfg: CommunityConfig, seed: u64) -> PlantedGraph {
    let mut r = rng(seed);
    let n = cfg.communities * cfg.community_size;
    let name = |c: usize, i: usize| format!("c{c}_m{i}");
    let mut triplets = Vec::new();
    let mut scores = Vec::with_capacity(n);
    let anchors = [0.05, 0.5, 0.95];
    for c in 0..cfg.communities {
        let base = anchors[c % anchors.len()];
        for i in 0..cfg.community_size {
            let noise = (r.random::<f64>() * 2.0 - 1.0) * cfg.score_noise;
            scores.push((name(c, i), (base + noise).clamp(0.0, 1.0)));
            // Ring keeps the community connected.
            triplets.push(Triplet::new(
                name(c, i),
                "knows",
                name(c, (i + 1) % cfg.community_size),
            ));
            for _ in 0..cfg.intra_degree.saturating_sub(1) {
                let j = r.random_range(0..cfg.community_size);
                if j != i {
                    triplets.push(Triplet::new(name(c, i), "knows", name(c, j)));
                }
            }
        }
    }
    for _ in 0..cfg.inter_edges {
        let a = r.random_range(0..cfg.communities);
        let mut b = r.random_range(0..cfg.communities);
        while b == a {
            b = r.random_range(0..cfg.communities);
        }
        triplets.push(Triplet::new(
            name(a, r.random_range(0..cfg.community_size)),
            "knows",
            name(b, r.random_range(0..cfg.community_size)),
        ));
    }
    PlantedGraph { triplets, scores }
}

/// Anti-homophilous bipartite graph: every edge joins a score-0 entity to a
/// score-1 entity, so each entity's neighbors all sit at the opposite score.
pub fn bipartite_graph(per_side: usize, degree: usize, seed: u64) -> PlantedGraph {
    assert!(per_side >= 1 && degree >= 1);
    let mut r = rng(seed);
    let mut triplets = Vec::new();
    let mut scores = Vec::with_capacity(2 * per_side);
    for i in 0..per_side {
        scores.push((format!("lo{i}"), 0.0));
        scores.push((format!("hi{i}"), 1.0));
    }
    for i in 0..per_side {
        // One aligned edge guarantees no isolated entities.
        triplets.push(Triplet::new(format!("lo{i}"), "opposes", format!("hi{i}")));
        for _ in 1..degree {
            triplets.push(Triplet::new(
                format!("lo{i}"),
                "opposes",
                format!("hi{}", r.random_range(0..per_side)),
            ));
        }
    }
    PlantedGraph { triplets, scores }
}

/// Disjoint stars with geometric hub sizes, each entity scored by
/// `ln(1 + deg) / ln(1 + max_deg)`: score grows with degree by construction.
pub fn degree_scored_stars(max_exponent: u32) -> PlantedGraph {
    let leaf_counts: Vec<usize> = (1..=max_exponent).map(|e| 1usize << e).collect();
    let triplets = union_of_stars(&leaf_counts);
    let max_deg = *leaf_counts.last().expect("at least one star") as f64;
    let score = |deg: f64| (1.0 + deg).ln() / (1.0 + max_deg).ln();
    let mut scores = Vec::new();
    for (h, &leaves) in leaf_counts.iter().enumerate() {
        scores.push((format!("hub{h}"), score(leaves as f64)));
        for i in 0..leaves {
            scores.push((format!("hub{h}_leaf{i}"), score(1.0)));
        }
    }
    PlantedGraph { triplets, scores }
}

/// Nouns used by [`fixture_corpus`] to produce readable names.
const FIXTURE_RELATIONS: [&str; 8] = [
    "located_in",
    "part_of",
    "works_for",
    "founded_by",
    "adjacent_to",
    "member_of",
    "supplies",
    "visited",
];

/// Readable English statement template per fixture relation.
pub fn fixture_templates() -> Vec<(String, String)> {
    [
        ("located_in", "{sub} is located in {obj}."),
        ("part_of", "{sub} is part of {obj}."),
        ("works_for", "{sub} works for {obj}."),
        ("founded_by", "{sub} was founded by {obj}."),
        ("adjacent_to", "{sub} is adjacent to {obj}."),
        ("member_of", "{sub} is a member of {obj}."),
        ("supplies", "{sub} supplies {obj}."),
        ("visited", "{sub} made a visit to {obj}."),
    ]
    .into_iter()
    .map(|(r, t)| (r.to_string(), t.to_string()))
    .collect()
}

/// Small end-to-end corpus: a connected growth core plus a handful of
/// satellite components and duplicated facts, with timestamps on `visited`
/// triplets. Deterministic for a given seed.
pub fn fixture_corpus(seed: u64) -> Vec<Triplet> {
    let mut r = rng(seed);
    let name = |i: usize| format!("item_{i:03}");
    let mut triplets = Vec::new();
    // Connected core over 164 entities.
    let core = 164usize;
    let mut targets: Vec<usize> = vec![0, 1, 2];
    triplets.push(Triplet::new(name(0), "adjacent_to", name(1)));
    triplets.push(Triplet::new(name(1), "adjacent_to", name(2)));
    for v in 3..core {
        for _ in 0..3 {
            let u = targets[r.random_range(0..targets.len())];
            let rel = FIXTURE_RELATIONS[r.random_range(0..FIXTURE_RELATIONS.len())];
            let mut t = Triplet::new(name(v), rel, name(u));
            if rel == "visited" {
                let day = 1 + r.random_range(0..28) as u32;
                let month = 1 + r.random_range(0..12) as u32;
                let year = 2015 + r.random_range(0..6) as i32;
                let date = format!("{year:04}-{month:02}-{day:02}").parse().unwrap();
                t = t.with_timestamp(date);
            }
            triplets.push(t);
            targets.push(u);
            targets.push(v);
        }
    }
    // Two satellite components that LCC extraction should drop.
    for s in 0..2 {
        for i in 0..6 {
            triplets.push(Triplet::new(
                format!("sat{s}_{i}"),
                "part_of",
                format!("sat{s}_{}", (i + 1) % 6),
            ));
        }
    }
    // A few exact duplicates (multigraph edges).
    for i in 0..5 {
        let t = triplets[i * 7].clone();
        triplets.push(t);
    }
    truncate_to(&mut triplets, 500);
    triplets
}

fn truncate_to(triplets: &mut Vec<Triplet>, n: usize) {
    assert!(
        triplets.len() >= n,
        "generator produced only {} triplets",
        triplets.len()
    );
    triplets.truncate(n);
}

/// Serializes triplets in the ingestion TSV format (optional fourth
/// timestamp column).
pub fn to_tsv(triplets: &[Triplet]) -> String {
    let mut out = String::new();
    for t in triplets {
        out.push_str(&t.head);
        out.push('\t');
        out.push_str(&t.relation);
        out.push('\t');
        out.push_str(&t.tail);
        if let Some(d) = t.timestamp {
            out.push('\t');
            out.push_str(&d.format("%Y-%m-%d").to_string());
        }
        out.push('\n');
    }
    out
}
