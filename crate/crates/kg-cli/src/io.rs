//! File plumbing shared by the subcommands: graph loading, TSV and CSV
//! output, and the external-feature table.
//!
//! All output here is deterministic: rows follow entity or input order and
//! floats print in Rust's shortest round-trip form, so rerunning a command
//! on the same inputs reproduces every file byte for byte.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use kg_core::{build_graph, parse_triplets, KnowledgeGraph, Triplet};
use kg_gnn::Matrix;
use kg_prompt::{ProbeFailure, TemplateMap};

use crate::config::Settings;
use crate::errors::{input, CliError};

/// Loads the triplet file named by the settings and builds the graph.
/// An unset path, an unreadable file, and a file without triplets are all
/// input errors.
pub fn read_graph(settings: &Settings) -> Result<KnowledgeGraph, CliError> {
    let path = settings.triplets.as_deref().ok_or_else(|| {
        input("no triplet file given; pass --triplets or set \"triplets\" in the config")
    })?;
    let file = File::open(path)
        .map_err(|e| input(format!("cannot open triplet file {}: {e}", path.display())))?;
    let triplets = parse_triplets(BufReader::new(file), settings.column_order)
        .map_err(|e| input(format!("{}: {e}", path.display())))?;
    if triplets.is_empty() {
        return Err(input(format!("no triplets in {}", path.display())));
    }
    Ok(build_graph(triplets))
}

/// Loads the statement templates named by the settings.
pub fn read_templates(settings: &Settings) -> Result<TemplateMap, CliError> {
    let path = settings.templates.as_deref().ok_or_else(|| {
        input("no template file given; pass --templates or set \"templates\" in the config")
    })?;
    let file = File::open(path)
        .map_err(|e| input(format!("cannot open template file {}: {e}", path.display())))?;
    TemplateMap::from_json_reader(BufReader::new(file))
        .map_err(|e| input(format!("{}: {e}", path.display())))
}

/// Writes triplets in the tab-separated layout `head relation tail [date]`.
pub fn write_tsv(triplets: &[Triplet], path: &Path) -> Result<(), CliError> {
    let mut out = BufWriter::new(File::create(path)?);
    for t in triplets {
        match t.timestamp {
            Some(d) => writeln!(
                out,
                "{}\t{}\t{}\t{}",
                t.head,
                t.relation,
                t.tail,
                d.format("%Y-%m-%d")
            )?,
            None => writeln!(out, "{}\t{}\t{}", t.head, t.relation, t.tail)?,
        }
    }
    out.flush()?;
    Ok(())
}

/// Opens a CSV writer for `path`, creating parent directories as needed.
pub fn csv_writer(path: &Path) -> Result<csv::Writer<File>, CliError> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }
    Ok(csv::Writer::from_path(path)?)
}

/// Shortest round-trip text for a float; empty string for `None`.
pub fn fmt_opt(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

/// Reads an external feature table: a CSV with header
/// `entity,x0,x1,...` covering every graph entity exactly once (any row
/// order). Returns the features as a matrix in entity-id order.
pub fn read_embeddings(path: &Path, g: &KnowledgeGraph) -> Result<Matrix, CliError> {
    let mut reader = csv::Reader::from_path(path)
        .map_err(|e| input(format!("cannot open feature table {}: {e}", path.display())))?;
    let headers = reader.headers()?.clone();
    if headers.is_empty() || headers.get(0) != Some("entity") || headers.len() < 2 {
        return Err(input(format!(
            "{}: expected header starting with \"entity\" followed by feature columns",
            path.display()
        )));
    }
    let dim = headers.len() - 1;

    let mut rows: HashMap<String, Vec<f64>> = HashMap::new();
    for (i, record) in reader.records().enumerate() {
        let record = record?;
        let line = i + 2; // 1-based, after the header
        if record.len() != dim + 1 {
            return Err(input(format!(
                "{} line {line}: expected {} fields, found {}",
                path.display(),
                dim + 1,
                record.len()
            )));
        }
        let name = record[0].to_string();
        let values: Vec<f64> = record
            .iter()
            .skip(1)
            .map(|s| {
                s.parse::<f64>().map_err(|e| {
                    input(format!("{} line {line}: bad number {s:?}: {e}", path.display()))
                })
            })
            .collect::<Result<_, _>>()?;
        if rows.insert(name.clone(), values).is_some() {
            return Err(input(format!(
                "{} line {line}: entity {name:?} appears twice",
                path.display()
            )));
        }
    }

    let mut data = Vec::with_capacity(g.entity_count() * dim);
    for name in g.entity_names() {
        let row = rows.remove(name).ok_or_else(|| {
            input(format!("{}: no feature row for entity {name:?}", path.display()))
        })?;
        data.extend(row);
    }
    if let Some(extra) = rows.keys().next() {
        return Err(input(format!(
            "{}: feature row for {extra:?}, which is not in the graph",
            path.display()
        )));
    }
    Ok(Matrix::from_rows(g.entity_count(), dim, data))
}

/// Writes the probe failure report. Deleted on fully successful runs, so its
/// presence always reflects the latest probe.
pub fn write_failures(failures: &[ProbeFailure], model: &str, path: &Path) -> Result<(), CliError> {
    let mut w = csv_writer(path)?;
    w.write_record(["model", "head", "relation", "tail", "statement", "temporal", "attempts", "error"])?;
    for f in failures {
        w.write_record([
            model,
            &f.head,
            &f.relation,
            &f.tail,
            &f.statement,
            if f.temporal { "true" } else { "false" },
            &f.attempts.to_string(),
            &f.error,
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a failure report written by [`write_failures`], keeping only rows
/// for `model`. A missing file is an empty report.
pub fn read_failures(path: &Path, model: &str) -> Result<Vec<ProbeFailure>, CliError> {
    if !path.exists() {
        return Ok(Vec::new());
    }
    let mut reader = csv::Reader::from_path(path)?;
    let mut failures = Vec::new();
    for record in reader.records() {
        let r = record?;
        if r.len() != 8 {
            return Err(input(format!(
                "{}: expected 8 fields per failure row, found {}",
                path.display(),
                r.len()
            )));
        }
        if &r[0] != model {
            continue;
        }
        failures.push(ProbeFailure {
            head: r[1].to_string(),
            relation: r[2].to_string(),
            tail: r[3].to_string(),
            statement: r[4].to_string(),
            temporal: &r[5] == "true",
            attempts: r[6]
                .parse()
                .map_err(|e| input(format!("{}: bad attempt count: {e}", path.display())))?,
            error: r[7].to_string(),
        });
    }
    Ok(failures)
}
