//! Plan orchestration: carve the evaluation set, fill the 20% initial
//! quota, expand by ignorance ranking or uniformly at random, and persist
//! the whole plan as a JSON manifest.

use kg_core::{EntityId, KnowledgeGraph, TripletId};
use serde::{Deserialize, Serialize};
use std::collections::HashSet;
use std::fmt;
use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use crate::error::SelectError;
use crate::select::{
    build_expansion_set, build_initial_query_set, build_random_expansion, carve_eval_set,
    rank_by_ignorance,
};

/// Current manifest format version.
pub const PLAN_VERSION: u32 = 1;

/// How the post-initial remainder of the budget is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SelectionStrategy {
    /// Walk entities by descending predicted ignorance.
    Graph,
    /// Uniform sample over the unselected pool.
    Random,
}

impl SelectionStrategy {
    pub fn name(self) -> &'static str {
        match self {
            SelectionStrategy::Graph => "graph",
            SelectionStrategy::Random => "random",
        }
    }
}

impl fmt::Display for SelectionStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SelectionStrategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "graph" => Ok(SelectionStrategy::Graph),
            "random" => Ok(SelectionStrategy::Random),
            other => Err(format!("unknown strategy {other:?} (expected graph or random)")),
        }
    }
}

/// Optional knobs for [`build_plan`].
#[derive(Debug, Clone, Default)]
pub struct PlanOptions {
    /// Triplets carved out for evaluation before selection begins.
    pub eval_size: usize,
    /// Allow the fine-tuning sets to overlap the evaluation set (off by
    /// default: the evaluation set is excluded from the selectable pool).
    pub allow_eval_overlap: bool,
    /// Flip the ranking so the most knowledgeable entities come first
    /// (diagnostic; the normal order prefers the most ignorant).
    pub invert_ranking: bool,
}

/// A complete, reproducible selection: who is probed first, what fills the
/// rest of the budget, and what is held out for evaluation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SelectionPlan {
    pub budget: usize,
    pub seed: u64,
    pub strategy: SelectionStrategy,
    /// The 20% initial query set, in selection (walk) order.
    pub initial: Vec<TripletId>,
    /// The remaining 80%, in selection order (ascending ids for random).
    pub expansion: Vec<TripletId>,
    /// Held-out evaluation triplets, ascending.
    pub eval: Vec<TripletId>,
}

impl SelectionPlan {
    /// All fine-tuning triplets: initial set first, expansion after.
    pub fn selected(&self) -> impl Iterator<Item = TripletId> + '_ {
        self.initial.iter().chain(self.expansion.iter()).copied()
    }

    /// Re-check the plan's structural invariants against a graph: ids in
    /// range, exact budget split, no duplicates, and (unless overlap was
    /// allowed) no evaluation leakage.
    pub fn validate_against(
        &self,
        graph: &KnowledgeGraph,
        allow_eval_overlap: bool,
    ) -> Result<(), SelectError> {
        let count = graph.triplet_count();
        let all = || self.initial.iter().chain(&self.expansion).chain(&self.eval);
        if let Some(bad) = all().find(|t| t.0 >= count) {
            return Err(SelectError::Manifest(format!(
                "triplet id {} is out of range for a graph with {count} triplets",
                bad.0
            )));
        }
        if self.initial.len() + self.expansion.len() != self.budget {
            return Err(SelectError::Manifest(format!(
                "initial ({}) plus expansion ({}) does not equal the budget ({})",
                self.initial.len(),
                self.expansion.len(),
                self.budget
            )));
        }
        let mut seen: HashSet<TripletId> = HashSet::new();
        for t in self.initial.iter().chain(&self.expansion) {
            if !seen.insert(*t) {
                return Err(SelectError::Manifest(format!(
                    "triplet id {} selected twice",
                    t.0
                )));
            }
        }
        if !allow_eval_overlap {
            if let Some(leak) = self.eval.iter().find(|t| seen.contains(t)) {
                return Err(SelectError::Manifest(format!(
                    "evaluation triplet {} leaked into the fine-tuning sets",
                    leak.0
                )));
            }
        }
        Ok(())
    }
}

/// Build a full selection plan.
///
/// The evaluation set is carved first (uniformly, from its own seed phase)
/// and excluded from the selectable pool unless overlap is allowed. The
/// initial query set is strategy-independent, so graph and random plans with
/// the same seed share it exactly; only the expansion differs. The graph
/// strategy requires a prediction per entity (`None` entries error out).
pub fn build_plan(
    graph: &KnowledgeGraph,
    budget: usize,
    seed: u64,
    strategy: SelectionStrategy,
    predicted: Option<&[Option<f64>]>,
    options: &PlanOptions,
) -> Result<SelectionPlan, SelectError> {
    let eval = carve_eval_set(graph, options.eval_size, seed)?;
    let excluded: HashSet<TripletId> =
        if options.allow_eval_overlap { HashSet::new() } else { eval.iter().copied().collect() };

    let initial = build_initial_query_set(graph, budget, seed, &excluded)?;
    let remaining = budget - initial.len();

    let mut already = excluded;
    already.extend(initial.iter().copied());

    let expansion = match strategy {
        SelectionStrategy::Graph => {
            let predicted = predicted.ok_or(SelectError::PredictionsRequired)?;
            let ranking = rank_by_ignorance(
                graph,
                predicted,
                seed,
                &HashSet::<EntityId>::new(),
                options.invert_ranking,
            )?;
            build_expansion_set(graph, &ranking, remaining, &already, seed)?
        }
        SelectionStrategy::Random => build_random_expansion(graph, remaining, &already, seed)?,
    };

    Ok(SelectionPlan { budget, seed, strategy, initial, expansion, eval })
}

/// On-disk manifest shape.
#[derive(Debug, Serialize, Deserialize)]
struct ManifestFile {
    version: u32,
    budget: usize,
    seed: u64,
    strategy: String,
    initial_ids: Vec<usize>,
    expansion_ids: Vec<usize>,
    eval_ids: Vec<usize>,
}

/// Write a plan manifest as pretty-printed JSON.
pub fn save_plan(plan: &SelectionPlan, path: &Path) -> Result<(), SelectError> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }
    let manifest = ManifestFile {
        version: PLAN_VERSION,
        budget: plan.budget,
        seed: plan.seed,
        strategy: plan.strategy.name().to_string(),
        initial_ids: plan.initial.iter().map(|t| t.0).collect(),
        expansion_ids: plan.expansion.iter().map(|t| t.0).collect(),
        eval_ids: plan.eval.iter().map(|t| t.0).collect(),
    };
    let mut writer = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut writer, &manifest)?;
    writer.write_all(b"\n")?;
    writer.flush()?;
    Ok(())
}

/// Read a manifest written by [`save_plan`].
pub fn load_plan(path: &Path) -> Result<SelectionPlan, SelectError> {
    let manifest: ManifestFile = serde_json::from_reader(BufReader::new(File::open(path)?))?;
    if manifest.version != PLAN_VERSION {
        return Err(SelectError::Manifest(format!(
            "unsupported plan version {} (this build reads version {PLAN_VERSION})",
            manifest.version
        )));
    }
    let strategy = manifest
        .strategy
        .parse::<SelectionStrategy>()
        .map_err(SelectError::Manifest)?;
    Ok(SelectionPlan {
        budget: manifest.budget,
        seed: manifest.seed,
        strategy,
        initial: manifest.initial_ids.into_iter().map(TripletId).collect(),
        expansion: manifest.expansion_ids.into_iter().map(TripletId).collect(),
        eval: manifest.eval_ids.into_iter().map(TripletId).collect(),
    })
}
