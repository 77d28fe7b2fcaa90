//! `kgprobe train` — fit the score regressor to cached verdicts and save a
//! checkpoint.
//!
//! Labels are the per-entity knowledgeability scores computed exactly as in
//! `analyze`; entities without a probed incident fact carry no label. The
//! labelled set is split into train and validation sides, the model is
//! trained with early stopping, and the parameters from the best validation
//! epoch are saved.
//!
//! Outputs: the checkpoint (JSON), `history.csv` (per-epoch losses), and
//! `train_summary.csv`. The held-out quality is reported as `1 - MAE`.

use kg_core::KnowledgeGraph;
use kg_gnn::{evaluate, save_checkpoint, train, EvalReport, TrainedModel};
use kg_score::{entity_knowledgeability, ScoreTable, Variant};

use crate::commands::{
    failures_for_variant, failures_path, graph_facts, model_inputs, model_label, model_spec,
    records_for_variant,
};
use crate::config::{Settings, MIN_SCORED_ENTITIES};
use crate::errors::{input, CliError};
use crate::io::{csv_writer, read_graph};

pub fn run(settings: &Settings) -> Result<(), CliError> {
    let g = read_graph(settings)?;
    let scores = label_table(settings, &g)?;
    let labels: Vec<_> = scores.iter().map(|(v, s)| (v, s.k)).collect();
    if labels.len() < MIN_SCORED_ENTITIES {
        return Err(input(format!(
            "training needs at least {MIN_SCORED_ENTITIES} scored entities, got {}; \
             probe more of the graph first",
            labels.len()
        )));
    }

    let (inputs, external) = model_inputs(settings, &g)?;
    let spec = model_spec(settings, inputs);
    let trained = train(spec, &g, external.as_ref(), &labels, &settings.train)?;

    std::fs::create_dir_all(&settings.output_dir)?;
    save_checkpoint(
        &trained.model,
        settings.train.seed,
        g.entity_names().to_vec(),
        &settings.checkpoint,
    )?;
    write_history(&trained, &settings.output_dir.join("history.csv"))?;

    let held_out = evaluate(&trained.model, &g, external.as_ref(), &trained.val_labels)?;
    write_summary(
        &trained,
        &held_out,
        labels.len(),
        &settings.output_dir.join("train_summary.csv"),
    )?;

    println!(
        "trained {} on {} labelled entities ({} train / {} validation)",
        trained.model.spec.arch.name(),
        labels.len(),
        trained.train_labels.len(),
        trained.val_labels.len()
    );
    println!(
        "best epoch {} of {} run; held-out 1-MAE = {}",
        trained.best_epoch,
        trained.history.len(),
        held_out.accuracy
    );
    println!("checkpoint: {}", settings.checkpoint.display());
    Ok(())
}

/// The label source shared by `train` and `select`: knowledgeability under
/// the active variant, from the cache.
pub fn label_table(settings: &Settings, g: &KnowledgeGraph) -> Result<ScoreTable, CliError> {
    let model = model_label(settings)?;
    let cache = kg_prompt::ProbeCache::new(&settings.cache);
    let all_records = cache.load()?;
    let facts = graph_facts(g);
    let variant = if settings.temporal { Variant::Temporal } else { Variant::Plain };

    let records = records_for_variant(&all_records, &facts, &model, variant);
    if records.is_empty() {
        return Err(input(format!(
            "the cache {} holds no {} probe records for this graph under model {:?}; \
             run `kgprobe probe` first",
            settings.cache.display(),
            variant.name(),
            model
        )));
    }
    let failures = failures_for_variant(
        &crate::io::read_failures(&failures_path(settings), &model)?,
        g,
        variant,
    );
    Ok(entity_knowledgeability(g, &records, &failures, variant)?)
}

fn write_history(trained: &TrainedModel, path: &std::path::Path) -> Result<(), CliError> {
    let mut w = csv_writer(path)?;
    w.write_record(["epoch", "train_loss", "val_mae"])?;
    for e in &trained.history {
        w.write_record([
            e.epoch.to_string(),
            e.train_loss.to_string(),
            e.val_mae.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn write_summary(
    trained: &TrainedModel,
    held_out: &EvalReport,
    labelled: usize,
    path: &std::path::Path,
) -> Result<(), CliError> {
    let mut w = csv_writer(path)?;
    w.write_record([
        "arch",
        "labelled_entities",
        "train_entities",
        "val_entities",
        "epochs_run",
        "best_epoch",
        "stopped_early",
        "val_mae",
        "val_accuracy",
    ])?;
    w.write_record([
        trained.model.spec.arch.name(),
        labelled.to_string(),
        trained.train_labels.len().to_string(),
        trained.val_labels.len().to_string(),
        trained.history.len().to_string(),
        trained.best_epoch.to_string(),
        trained.stopped_early.to_string(),
        held_out.mae.to_string(),
        held_out.accuracy.to_string(),
    ])?;
    w.flush()?;
    Ok(())
}
