//! `kgprobe analyze` — aggregate cached verdicts into per-entity
//! knowledgeability, neighborhood agreement, distributions, and
//! centrality-vs-score curves.
//!
//! Outputs (in the output directory; `<v>` is `plain` or `temporal`):
//! - `scores.csv` — entity, variant, score, probe counts, agreement.
//! - `histogram_scores_<v>.csv`, `histogram_agreement_<v>.csv`.
//! - `curve_<property>_<v>.csv` — binned property vs mean score, for the
//!   triplet degree and each centrality.
//! - `analyze_summary.csv` — per-variant aggregates.
//! - `delta.csv`, `delta_summary.csv` — dated minus plain scores, when
//!   `--temporal` is on.

use std::path::Path;

use kg_core::{
    bin_by_property, centrality, BinScale, BinnedCurve, CentralityKind, KnowledgeGraph, Strategy,
};
use kg_score::{
    compare_variants, entity_knowledgeability, graph_homophily, node_homophily, score_histogram,
    Histogram, HomophilyTable, ScoreTable, Variant,
};

use crate::commands::{failures_for_variant, failures_path, graph_facts, model_label, records_for_variant};
use crate::config::Settings;
use crate::errors::{input, CliError};
use crate::io::{csv_writer, fmt_opt, read_graph};

pub fn run(settings: &Settings) -> Result<(), CliError> {
    let g = read_graph(settings)?;
    let model = model_label(settings)?;
    let cache = kg_prompt::ProbeCache::new(&settings.cache);
    let all_records = cache.load()?;
    let all_failures = crate::io::read_failures(&failures_path(settings), &model)?;
    let facts = graph_facts(&g);

    std::fs::create_dir_all(&settings.output_dir)?;

    let mut variants = vec![Variant::Plain];
    if settings.temporal {
        variants.push(Variant::Temporal);
    }

    let mut tables: Vec<(ScoreTable, HomophilyTable)> = Vec::new();
    for &variant in &variants {
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
        let failures = failures_for_variant(&all_failures, &g, variant);
        let scores = entity_knowledgeability(&g, &records, &failures, variant)?;
        let agreement = node_homophily(&g, &scores);
        tables.push((scores, agreement));
    }

    write_scores(&g, &tables, &settings.output_dir)?;

    for (scores, agreement) in &tables {
        let v = scores.variant.name();
        let k_values: Vec<f64> = scores.iter().map(|(_, s)| s.k).collect();
        let hist = score_histogram(k_values, settings.histogram_bins)?;
        write_histogram(&hist, &settings.output_dir.join(format!("histogram_scores_{v}.csv")))?;

        let h_values: Vec<f64> = agreement.iter().filter_map(|(_, h)| h).collect();
        if !h_values.is_empty() {
            let hist = score_histogram(h_values, settings.histogram_bins)?;
            write_histogram(
                &hist,
                &settings.output_dir.join(format!("histogram_agreement_{v}.csv")),
            )?;
        }

        write_curves(&g, scores, settings)?;
    }

    write_summary(&tables, &settings.output_dir.join("analyze_summary.csv"))?;

    for (scores, agreement) in &tables {
        let gh = graph_homophily(agreement).ok();
        println!(
            "{}: {} of {} entities scored; mean score {}; graph agreement {}",
            scores.variant.name(),
            scores.scored_count(),
            g.entity_count(),
            fmt_mean_k(scores),
            fmt_opt(gh),
        );
    }

    if settings.temporal {
        let comparison = compare_variants(&tables[0].0, &tables[1].0)?;
        write_delta(&g, &tables[0].0, &tables[1].0, &comparison, &settings.output_dir)?;
        println!(
            "temporal minus plain: mean delta {}, mean |delta| {}",
            comparison.mean_delta, comparison.mean_abs_delta
        );
    }

    println!("wrote analysis files to {}", settings.output_dir.display());
    Ok(())
}

fn fmt_mean_k(scores: &ScoreTable) -> String {
    let n = scores.scored_count();
    if n == 0 {
        return String::new();
    }
    let sum: f64 = scores.iter().map(|(_, s)| s.k).sum();
    (sum / n as f64).to_string()
}

fn write_scores(
    g: &KnowledgeGraph,
    tables: &[(ScoreTable, HomophilyTable)],
    dir: &Path,
) -> Result<(), CliError> {
    let mut w = csv_writer(&dir.join("scores.csv"))?;
    w.write_record(["entity", "variant", "score", "n_probed", "n_failed", "agreement"])?;
    for (scores, agreement) in tables {
        for (v, s) in scores.iter() {
            w.write_record([
                g.entity_name(v).to_string(),
                scores.variant.name().to_string(),
                s.k.to_string(),
                s.n_probed.to_string(),
                s.n_failed.to_string(),
                fmt_opt(agreement.get(v)),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

fn write_histogram(hist: &Histogram, path: &Path) -> Result<(), CliError> {
    let mut w = csv_writer(path)?;
    w.write_record(["bin", "center", "count", "fraction"])?;
    for (bin, &count) in hist.counts.iter().enumerate() {
        w.write_record([
            bin.to_string(),
            hist.center(bin).to_string(),
            count.to_string(),
            hist.fraction(bin).to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Properties are binned on a log axis when they span orders of magnitude
/// (degree, random-walk centralities) and linearly when they live on a
/// bounded scale that can legitimately include zero.
fn curve_scale(kind: CentralityKind) -> BinScale {
    match kind {
        CentralityKind::Degree | CentralityKind::PageRank | CentralityKind::Katz => BinScale::Log,
        CentralityKind::Closeness | CentralityKind::Betweenness => BinScale::Linear,
    }
}

fn write_curves(
    g: &KnowledgeGraph,
    scores: &ScoreTable,
    settings: &Settings,
) -> Result<(), CliError> {
    let strategy = Strategy::default();
    let options = scores.as_options();
    let v = scores.variant.name();
    for kind in CentralityKind::ALL {
        // The degree curve uses the raw triplet degree rather than the
        // normalized degree centrality: bin centers then read as degrees.
        let values: Vec<f64> = match kind {
            CentralityKind::Degree => g
                .entity_ids()
                .map(|e| g.triplet_degree(e) as f64)
                .collect(),
            _ => centrality(g, kind, strategy)?.values,
        };
        let curve = bin_by_property(&values, &options, settings.curve_bins, curve_scale(kind))?;
        let path = settings
            .output_dir
            .join(format!("curve_{}_{v}.csv", kind.name()));
        write_curve(&curve, &path)?;
    }
    Ok(())
}

fn write_curve(curve: &BinnedCurve, path: &Path) -> Result<(), CliError> {
    let mut w = csv_writer(path)?;
    w.write_record(["bin", "center", "count", "mean_score", "std_score"])?;
    for (bin, row) in curve.rows.iter().enumerate() {
        w.write_record([
            bin.to_string(),
            row.center.to_string(),
            row.count.to_string(),
            fmt_opt(row.mean),
            fmt_opt(row.std),
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn write_summary(
    tables: &[(ScoreTable, HomophilyTable)],
    path: &Path,
) -> Result<(), CliError> {
    let mut w = csv_writer(path)?;
    w.write_record([
        "variant",
        "scored_entities",
        "mean_score",
        "graph_agreement",
        "entities_at_zero",
        "entities_at_one",
    ])?;
    for (scores, agreement) in tables {
        let at_zero = scores.iter().filter(|(_, s)| s.k == 0.0).count();
        let at_one = scores.iter().filter(|(_, s)| s.k == 1.0).count();
        w.write_record([
            scores.variant.name().to_string(),
            scores.scored_count().to_string(),
            fmt_mean_k(scores),
            fmt_opt(graph_homophily(agreement).ok()),
            at_zero.to_string(),
            at_one.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn write_delta(
    g: &KnowledgeGraph,
    plain: &ScoreTable,
    temporal: &ScoreTable,
    comparison: &kg_score::VariantComparison,
    dir: &Path,
) -> Result<(), CliError> {
    let mut w = csv_writer(&dir.join("delta.csv"))?;
    w.write_record(["entity", "score_plain", "score_temporal", "delta"])?;
    for v in g.entity_ids() {
        if let (Some(p), Some(t), Some(d)) =
            (plain.k(v), temporal.k(v), comparison.delta(v))
        {
            w.write_record([
                g.entity_name(v).to_string(),
                p.to_string(),
                t.to_string(),
                d.to_string(),
            ])?;
        }
    }
    w.flush()?;

    let mut w = csv_writer(&dir.join("delta_summary.csv"))?;
    w.write_record([
        "mean_delta",
        "mean_abs_delta",
        "plain_at_zero",
        "plain_at_one",
        "temporal_at_zero",
        "temporal_at_one",
    ])?;
    w.write_record([
        comparison.mean_delta.to_string(),
        comparison.mean_abs_delta.to_string(),
        comparison.plain_mass.at_zero.to_string(),
        comparison.plain_mass.at_one.to_string(),
        comparison.temporal_mass.at_zero.to_string(),
        comparison.temporal_mass.at_one.to_string(),
    ])?;
    w.flush()?;
    Ok(())
}
