//! The selection primitives: quota arithmetic, the seeded entity walk for
//! the initial query set, ignorance ranking, and both expansion strategies.
//!
//! Every primitive derives its randomness from a phase-tagged sub-seed of
//! the plan seed, so the phases stay independent: changing how one phase
//! consumes randomness can never shift another phase's draws.

use kg_core::{EntityId, KnowledgeGraph, TripletId};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::{rand_core::SeedableRng, ChaCha8Rng};
use std::collections::HashSet;

use crate::error::SelectError;

/// The initial query set takes one triplet in [`INITIAL_SHARE`] of the
/// budget, rounded up.
pub const INITIAL_SHARE: usize = 5;

/// Smallest budget the planner accepts.
pub const MIN_BUDGET: usize = 5;

/// Phase tags feeding [`sub_seed`]; one per independent source of
/// randomness.
pub mod phase {
    pub const EVAL: u64 = 1;
    pub const INITIAL_SHUFFLE: u64 = 2;
    pub const INITIAL_SUBSAMPLE: u64 = 3;
    pub const RANK_DRAWS: u64 = 4;
    pub const EXPANSION_SUBSAMPLE: u64 = 5;
    pub const RANDOM_EXPANSION: u64 = 6;
    pub const CORRUPTION: u64 = 7;
}

/// Derive an independent stream seed for one phase of the plan.
///
/// SplitMix64 finalisation over the XOR of seed and tag: statistically
/// independent outputs for distinct tags, stable across runs.
pub fn sub_seed(seed: u64, tag: u64) -> u64 {
    let mut z = seed ^ tag.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Size of the initial query set for a budget: `ceil(budget / 5)`.
pub fn initial_quota(budget: usize) -> usize {
    budget.div_ceil(INITIAL_SHARE)
}

/// Uniformly sample an evaluation set of `size` triplets, returned in
/// ascending id order. The evaluation set is carved before any selection so
/// the default policy can keep it disjoint from the fine-tuning pool.
pub fn carve_eval_set(
    graph: &KnowledgeGraph,
    size: usize,
    seed: u64,
) -> Result<Vec<TripletId>, SelectError> {
    if size > graph.triplet_count() {
        return Err(SelectError::InsufficientPool {
            requested: size,
            available: graph.triplet_count(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(sub_seed(seed, phase::EVAL));
    let mut ids: Vec<TripletId> = graph.triplet_ids().collect();
    ids.shuffle(&mut rng);
    let mut eval: Vec<TripletId> = ids.into_iter().take(size).collect();
    eval.sort_unstable();
    Ok(eval)
}

/// Uniformly subsample `take` elements of `pool` (ascending ids in, ascending
/// ids out) with the given generator.
fn subsample(pool: &[TripletId], take: usize, rng: &mut ChaCha8Rng) -> Vec<TripletId> {
    debug_assert!(take <= pool.len());
    let mut shuffled = pool.to_vec();
    shuffled.shuffle(rng);
    let mut picked: Vec<TripletId> = shuffled.into_iter().take(take).collect();
    picked.sort_unstable();
    picked
}

/// Build the initial query set: a seeded shuffle of all entities is walked,
/// and each entity contributes every selectable triplet it touches (in id
/// order) until the 20% quota is met; the entity that would overshoot has
/// just enough of its triplets uniformly subsampled to land exactly on the
/// quota.
///
/// `excluded` triplets (typically the evaluation set) are never selectable.
pub fn build_initial_query_set(
    graph: &KnowledgeGraph,
    budget: usize,
    seed: u64,
    excluded: &HashSet<TripletId>,
) -> Result<Vec<TripletId>, SelectError> {
    if budget < MIN_BUDGET {
        return Err(SelectError::BudgetTooSmall { budget, min: MIN_BUDGET });
    }
    let available = graph.triplet_count() - excluded.len();
    if budget > available {
        return Err(SelectError::InsufficientPool { requested: budget, available });
    }
    let quota = initial_quota(budget);

    let mut order: Vec<EntityId> = graph.entity_ids().collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(sub_seed(seed, phase::INITIAL_SHUFFLE)));
    let mut overshoot_rng = ChaCha8Rng::seed_from_u64(sub_seed(seed, phase::INITIAL_SUBSAMPLE));

    let mut selected: Vec<TripletId> = Vec::with_capacity(quota);
    let mut taken: HashSet<TripletId> = HashSet::with_capacity(quota);
    for v in order {
        if selected.len() == quota {
            break;
        }
        let fresh: Vec<TripletId> = graph
            .incident(v)
            .filter(|t| !taken.contains(t) && !excluded.contains(t))
            .collect();
        let gap = quota - selected.len();
        let add = if fresh.len() <= gap { fresh } else { subsample(&fresh, gap, &mut overshoot_rng) };
        for t in add {
            taken.insert(t);
            selected.push(t);
        }
    }
    debug_assert_eq!(selected.len(), quota, "quota is reachable because budget <= pool");
    Ok(selected)
}

/// One entry of an ignorance ranking.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RankedEntity {
    pub entity: EntityId,
    /// One minus the predicted knowledgeability.
    pub ignorance: f64,
    /// Incident-fact count used as the first tiebreak (ascending).
    pub triplet_degree: usize,
    /// Seeded draw used as the final tiebreak (ascending).
    pub draw: u64,
}

/// Rank entities for expansion: most ignorant first, ties broken by lowest
/// triplet degree, then by a seeded draw.
///
/// `predicted` must align with entity ids; a `None` for a non-excluded
/// entity is an error. Draws are assigned in entity-id order before sorting
/// and do not depend on the exclusion set, so the same seed yields the same
/// tiebreaks regardless of which entities are excluded. With `invert` the
/// ignorance ordering flips (most knowledgeable first); tiebreaks keep their
/// direction.
pub fn rank_by_ignorance(
    graph: &KnowledgeGraph,
    predicted: &[Option<f64>],
    seed: u64,
    exclude: &HashSet<EntityId>,
    invert: bool,
) -> Result<Vec<RankedEntity>, SelectError> {
    if predicted.len() != graph.entity_count() {
        return Err(SelectError::PredictionLength {
            expected: graph.entity_count(),
            got: predicted.len(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(sub_seed(seed, phase::RANK_DRAWS));
    let mut ranking: Vec<RankedEntity> = Vec::with_capacity(graph.entity_count());
    for v in graph.entity_ids() {
        let draw: u64 = rng.random();
        if exclude.contains(&v) {
            continue;
        }
        let k = predicted[v.0]
            .ok_or_else(|| SelectError::MissingPrediction(graph.entity_name(v).to_string()))?;
        if k.is_nan() {
            return Err(SelectError::InvalidPrediction {
                entity: graph.entity_name(v).to_string(),
                value: k,
            });
        }
        ranking.push(RankedEntity {
            entity: v,
            ignorance: 1.0 - k,
            triplet_degree: graph.triplet_degree(v),
            draw,
        });
    }
    ranking.sort_by(|a, b| {
        let primary = if invert {
            a.ignorance.total_cmp(&b.ignorance)
        } else {
            b.ignorance.total_cmp(&a.ignorance)
        };
        primary
            .then(a.triplet_degree.cmp(&b.triplet_degree))
            .then(a.draw.cmp(&b.draw))
            .then(a.entity.cmp(&b.entity))
    });
    Ok(ranking)
}

/// Walk a ranking and collect `remaining` fresh triplets: each entity
/// contributes all of its not-yet-taken triplets in id order, entities with
/// nothing fresh are skipped, and the entity that would overshoot is
/// uniformly subsampled to land exactly on the target.
pub fn build_expansion_set(
    graph: &KnowledgeGraph,
    ranking: &[RankedEntity],
    remaining: usize,
    already: &HashSet<TripletId>,
    seed: u64,
) -> Result<Vec<TripletId>, SelectError> {
    let mut overshoot_rng = ChaCha8Rng::seed_from_u64(sub_seed(seed, phase::EXPANSION_SUBSAMPLE));
    let mut selected: Vec<TripletId> = Vec::with_capacity(remaining);
    let mut taken: HashSet<TripletId> = HashSet::with_capacity(remaining);
    for r in ranking {
        if selected.len() == remaining {
            break;
        }
        let fresh: Vec<TripletId> = graph
            .incident(r.entity)
            .filter(|t| !already.contains(t) && !taken.contains(t))
            .collect();
        if fresh.is_empty() {
            continue;
        }
        let gap = remaining - selected.len();
        let add = if fresh.len() <= gap { fresh } else { subsample(&fresh, gap, &mut overshoot_rng) };
        for t in add {
            taken.insert(t);
            selected.push(t);
        }
    }
    if selected.len() < remaining {
        return Err(SelectError::InsufficientPool {
            requested: remaining,
            available: selected.len(),
        });
    }
    Ok(selected)
}

/// Uniformly sample `remaining` triplets from everything not in `already`,
/// returned in ascending id order.
pub fn build_random_expansion(
    graph: &KnowledgeGraph,
    remaining: usize,
    already: &HashSet<TripletId>,
    seed: u64,
) -> Result<Vec<TripletId>, SelectError> {
    let fresh: Vec<TripletId> =
        graph.triplet_ids().filter(|t| !already.contains(t)).collect();
    if remaining > fresh.len() {
        return Err(SelectError::InsufficientPool {
            requested: remaining,
            available: fresh.len(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(sub_seed(seed, phase::RANDOM_EXPANSION));
    Ok(subsample(&fresh, remaining, &mut rng))
}
