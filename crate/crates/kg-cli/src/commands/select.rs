//! `kgprobe select` — plan a probing budget end to end.
//!
//! The pipeline carves out an evaluation set, draws the initial query set
//! (one fifth of the budget), probes exactly those statements, scores the
//! touched entities, trains the regressor on them, and ranks every entity by
//! how uncertain the model is about it. The rest of the budget is then
//! filled two ways from the same initial set:
//!
//! - **graph**: walk the ranking, taking unseen facts from the most
//!   uncertain entities first;
//! - **random**: uniform draw from the unseen remainder — the control any
//!   graph-guided strategy has to beat.
//!
//! Outputs: `plan_graph.json` / `plan_random.json` (triplet-id manifests),
//! `finetune_graph.jsonl` / `finetune_random.jsonl` (statement records in
//! selection order), `eval.jsonl` (held-out statements, with corrupted
//! negatives unless disabled), `select_model.json` (the checkpoint used for
//! ranking), and `select_summary.csv`.

use std::collections::HashSet;

use kg_core::TripletId;
use kg_gnn::{save_checkpoint, train};
use kg_prompt::{probe_batch, ProbeCache};
use kg_score::{entity_knowledgeability, Variant};
use kg_select::{
    build_initial_query_set, build_plan, carve_eval_set, emit_finetune_records, save_plan,
    write_finetune_jsonl, CorruptionConfig, FinetuneRecord, PlanOptions, SelectionPlan,
    SelectionStrategy,
};

use crate::commands::{batch_options, failures_path, make_client, model_inputs, model_spec};
use crate::config::{Settings, MIN_SCORED_ENTITIES};
use crate::errors::{input, CliError};
use crate::io::{csv_writer, read_graph, read_templates, write_failures};

pub fn run(settings: &Settings) -> Result<(), CliError> {
    let budget = settings.budget.ok_or_else(|| {
        input("select needs a budget; pass --budget or set \"budget\" in the config")
    })?;
    let g = read_graph(settings)?;
    let templates = read_templates(settings)?;
    let client = make_client(settings)?;
    std::fs::create_dir_all(&settings.output_dir)?;
    let cache = ProbeCache::new(&settings.cache);
    let seed = settings.seed;

    let options = PlanOptions {
        eval_size: settings.eval_size,
        allow_eval_overlap: settings.allow_eval_overlap,
        invert_ranking: settings.invert_ranking,
    };

    // Stage 1: the strategy-independent pieces, exactly as build_plan will
    // reproduce them below (both are pure functions of graph and seed).
    let eval = carve_eval_set(&g, options.eval_size, seed)?;
    let excluded: HashSet<TripletId> = if options.allow_eval_overlap {
        HashSet::new()
    } else {
        eval.iter().copied().collect()
    };
    let initial = build_initial_query_set(&g, budget, seed, &excluded)?;

    // Stage 2: probe the initial query set only.
    let initial_triplets: Vec<_> = initial.iter().map(|&id| g.triplet(id).clone()).collect();
    let report = probe_batch(
        &initial_triplets,
        &templates,
        client.as_ref(),
        &cache,
        &batch_options(settings),
    )?;
    if !report.failures.is_empty() {
        let failure_report = failures_path(settings);
        write_failures(&report.failures, client.model(), &failure_report)?;
        return Err(CliError::Network(format!(
            "{} of the initial statements produced no verdict (see {}); \
             successful verdicts were cached, rerun to retry the failures",
            report.failures.len(),
            failure_report.display()
        )));
    }
    let records: Vec<_> = report.resolved().cloned().collect();

    // Stage 3: score the entities the initial set touched and train on them.
    let variant = if settings.temporal { Variant::Temporal } else { Variant::Plain };
    let scores = entity_knowledgeability(&g, &records, &[], variant)?;
    let labels: Vec<_> = scores.iter().map(|(v, s)| (v, s.k)).collect();
    if labels.len() < MIN_SCORED_ENTITIES {
        return Err(input(format!(
            "the initial query set only scored {} entities but ranking needs a model \
             trained on at least {MIN_SCORED_ENTITIES}; raise --budget",
            labels.len()
        )));
    }
    let (inputs, external) = model_inputs(settings, &g)?;
    let trained = train(model_spec(settings, inputs), &g, external.as_ref(), &labels, &settings.train)?;
    let checkpoint_path = settings.output_dir.join("select_model.json");
    save_checkpoint(&trained.model, settings.train.seed, g.entity_names().to_vec(), &checkpoint_path)?;

    // Stage 4: expand to the full budget, guided and random.
    let predicted: Vec<Option<f64>> = trained
        .model
        .predict(&g, external.as_ref())?
        .into_iter()
        .map(Some)
        .collect();
    let graph_plan = build_plan(&g, budget, seed, SelectionStrategy::Graph, Some(&predicted), &options)?;
    let random_plan = build_plan(&g, budget, seed, SelectionStrategy::Random, None, &options)?;
    // Same seed, same carving: the plans must agree with the set we probed.
    debug_assert_eq!(graph_plan.initial, initial);
    debug_assert_eq!(random_plan.initial, initial);
    graph_plan.validate_against(&g, options.allow_eval_overlap)?;
    random_plan.validate_against(&g, options.allow_eval_overlap)?;

    // Stage 5: write the artifacts.
    save_plan(&graph_plan, &settings.output_dir.join("plan_graph.json"))?;
    save_plan(&random_plan, &settings.output_dir.join("plan_random.json"))?;

    let graph_selected: Vec<TripletId> = graph_plan.selected().collect();
    let random_selected: Vec<TripletId> = random_plan.selected().collect();
    let graph_records =
        emit_finetune_records(&g, &graph_selected, &templates, settings.temporal, None)?;
    let random_records =
        emit_finetune_records(&g, &random_selected, &templates, settings.temporal, None)?;
    write_jsonl(&graph_records, &settings.output_dir.join("finetune_graph.jsonl"))?;
    write_jsonl(&random_records, &settings.output_dir.join("finetune_random.jsonl"))?;

    let eval_records = if eval.is_empty() {
        Vec::new()
    } else {
        let corruption = settings
            .corrupt_eval
            .then_some(CorruptionConfig { seed, max_attempts: 100 });
        emit_finetune_records(&g, &graph_plan.eval, &templates, settings.temporal, corruption)?
    };
    if !eval.is_empty() {
        write_jsonl(&eval_records, &settings.output_dir.join("eval.jsonl"))?;
    }

    write_summary(
        settings,
        &graph_plan,
        &random_plan,
        graph_records.len(),
        random_records.len(),
        eval_records.len(),
        trained.best_val_mae,
    )?;

    println!(
        "initial query set: {} triplets ({} freshly probed, {} from cache); {} entities scored",
        initial.len(),
        report.requests,
        report.cache_hits,
        labels.len()
    );
    println!(
        "ranking model: best held-out MAE {} at epoch {}",
        trained.best_val_mae, trained.best_epoch
    );
    println!(
        "graph plan: {} initial + {} expansion; random plan: {} initial + {} expansion; eval {}",
        graph_plan.initial.len(),
        graph_plan.expansion.len(),
        random_plan.initial.len(),
        random_plan.expansion.len(),
        eval.len()
    );
    println!("wrote plans and fine-tuning files to {}", settings.output_dir.display());
    Ok(())
}

fn write_jsonl(records: &[FinetuneRecord], path: &std::path::Path) -> Result<(), CliError> {
    let file = std::fs::File::create(path)?;
    write_finetune_jsonl(records, std::io::BufWriter::new(file))?;
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn write_summary(
    settings: &Settings,
    graph_plan: &SelectionPlan,
    random_plan: &SelectionPlan,
    graph_records: usize,
    random_records: usize,
    eval_records: usize,
    best_val_mae: f64,
) -> Result<(), CliError> {
    let mut w = csv_writer(&settings.output_dir.join("select_summary.csv"))?;
    w.write_record([
        "strategy",
        "budget",
        "initial",
        "expansion",
        "eval",
        "finetune_records",
        "eval_records",
        "ranking_model_val_mae",
    ])?;
    for (plan, records) in [(graph_plan, graph_records), (random_plan, random_records)] {
        w.write_record([
            plan.strategy.name().to_string(),
            plan.budget.to_string(),
            plan.initial.len().to_string(),
            plan.expansion.len().to_string(),
            plan.eval.len().to_string(),
            records.to_string(),
            eval_records.to_string(),
            best_val_mae.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
