//! Budgeted selection of fine-tuning triplets over a knowledge graph.
//!
//! A plan reserves one fifth of the budget for an initial query set chosen
//! by a seeded entity walk, then fills the remainder either by walking
//! entities in order of predicted ignorance (most ignorant first, lowest
//! degree on ties) or by uniform sampling. An evaluation set is carved out
//! first and kept disjoint by default. Plans serialise to JSON manifests and
//! materialise as labelled JSON-Lines statement files, optionally paired
//! with corrupted negatives.

mod error;
mod plan;
mod records;
mod select;

pub use error::SelectError;
pub use plan::{
    build_plan, load_plan, save_plan, PlanOptions, SelectionPlan, SelectionStrategy, PLAN_VERSION,
};
pub use records::{
    emit_finetune_records, write_finetune_jsonl, CorruptionConfig, FinetuneRecord,
};
pub use select::{
    build_expansion_set, build_initial_query_set, build_random_expansion, carve_eval_set,
    initial_quota, phase, rank_by_ignorance, sub_seed, RankedEntity, INITIAL_SHARE, MIN_BUDGET,
};
