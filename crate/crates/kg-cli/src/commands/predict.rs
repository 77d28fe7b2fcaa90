//! `kgprobe predict` — score every entity of a graph with a saved
//! checkpoint.
//!
//! The checkpoint must have been trained on the same graph: the entity list
//! is stored with the parameters and compared by name, because predictions
//! are positional and a reordered or different entity set would silently
//! mis-assign scores.

use kg_gnn::{load_checkpoint, InputSpec};

use crate::config::Settings;
use crate::errors::{input, CliError};
use crate::io::{csv_writer, read_embeddings, read_graph};

pub fn run(settings: &Settings) -> Result<(), CliError> {
    let g = read_graph(settings)?;
    if !settings.checkpoint.exists() {
        return Err(input(format!(
            "no checkpoint at {}; run `kgprobe train` first or pass --checkpoint",
            settings.checkpoint.display()
        )));
    }
    let (model, meta) = load_checkpoint(&settings.checkpoint)?;
    if meta.entities != g.entity_names() {
        return Err(input(format!(
            "checkpoint {} was trained on a different graph ({} entities vs {} here, \
             or differing names)",
            settings.checkpoint.display(),
            meta.entities.len(),
            g.entity_count()
        )));
    }

    let external = match model.spec.input {
        InputSpec::External { dim } => {
            let path = settings.embeddings.as_deref().ok_or_else(|| {
                input(format!(
                    "checkpoint {} expects {dim}-dimensional external features; pass --embeddings",
                    settings.checkpoint.display()
                ))
            })?;
            Some(read_embeddings(path, &g)?)
        }
        InputSpec::OneHot { .. } => None,
    };

    let predictions = model.predict(&g, external.as_ref())?;

    std::fs::create_dir_all(&settings.output_dir)?;
    let path = settings.output_dir.join("predictions.csv");
    let mut w = csv_writer(&path)?;
    w.write_record(["entity", "predicted_score"])?;
    for v in g.entity_ids() {
        w.write_record([g.entity_name(v).to_string(), predictions[v.0].to_string()])?;
    }
    w.flush()?;

    println!(
        "predicted scores for {} entities with the {} checkpoint (seed {})",
        g.entity_count(),
        model.spec.arch.name(),
        meta.seed
    );
    println!("predictions: {}", path.display());
    Ok(())
}
