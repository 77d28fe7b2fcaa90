//! `kgprobe ingest` — parse a triplet file, keep the largest connected
//! component, and describe it.
//!
//! Outputs (in the output directory):
//! - `component.tsv` — the component's triplets, ready for the other
//!   commands to consume.
//! - `entity_stats.csv` — per-entity degrees, clustering, and centralities.
//! - `graph_summary.csv` — one row for the full graph, one for the
//!   component.

use kg_core::{
    centrality, largest_connected_component, CentralityKind, GraphSummary, KnowledgeGraph,
    Strategy,
};

use crate::config::Settings;
use crate::errors::CliError;
use crate::io::{csv_writer, read_graph, write_tsv};

pub fn run(settings: &Settings) -> Result<(), CliError> {
    let full = read_graph(settings)?;
    let component = largest_connected_component(&full, settings.component_mode)?;

    std::fs::create_dir_all(&settings.output_dir)?;
    let component_path = settings.output_dir.join("component.tsv");
    write_tsv(component.triplets(), &component_path)?;

    let summary_path = settings.output_dir.join("graph_summary.csv");
    write_summaries(&full.summary(), &component.summary(), &summary_path)?;

    let stats_path = settings.output_dir.join("entity_stats.csv");
    write_entity_stats(&component, &stats_path)?;

    println!(
        "parsed {} triplets over {} entities ({} relations)",
        full.triplet_count(),
        full.entity_count(),
        full.relation_count()
    );
    println!(
        "largest component ({} mode): {} entities, {} triplets",
        match settings.component_mode {
            kg_core::ComponentMode::Weak => "weak",
            kg_core::ComponentMode::Strong => "strong",
        },
        component.entity_count(),
        component.triplet_count()
    );
    println!(
        "wrote {}, {}, {}",
        component_path.display(),
        stats_path.display(),
        summary_path.display()
    );
    Ok(())
}

fn write_summaries(
    full: &GraphSummary,
    component: &GraphSummary,
    path: &std::path::Path,
) -> Result<(), CliError> {
    let mut w = csv_writer(path)?;
    w.write_record([
        "scope",
        "entities",
        "relations",
        "triplets",
        "avg_triplet_degree",
        "avg_neighbor_degree",
        "avg_clustering",
    ])?;
    for (scope, s) in [("full", full), ("component", component)] {
        w.write_record([
            scope.to_string(),
            s.entities.to_string(),
            s.relations.to_string(),
            s.triplets.to_string(),
            s.avg_triplet_degree.to_string(),
            s.avg_neighbor_degree.to_string(),
            s.avg_clustering.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn write_entity_stats(g: &KnowledgeGraph, path: &std::path::Path) -> Result<(), CliError> {
    let strategy = Strategy::default();
    let clustering = kg_core::clustering_all(g, strategy);
    let pagerank = centrality(g, CentralityKind::PageRank, strategy)?;
    let katz = centrality(g, CentralityKind::Katz, strategy)?;
    let closeness = centrality(g, CentralityKind::Closeness, strategy)?;
    let betweenness = centrality(g, CentralityKind::Betweenness, strategy)?;

    let mut w = csv_writer(path)?;
    w.write_record([
        "entity",
        "deg_triplet",
        "deg_neighbor",
        "clustering",
        "pagerank",
        "katz",
        "closeness",
        "betweenness",
    ])?;
    for v in g.entity_ids() {
        w.write_record([
            g.entity_name(v).to_string(),
            g.triplet_degree(v).to_string(),
            g.neighbor_degree(v).to_string(),
            clustering[v.0].to_string(),
            pagerank.get(v).to_string(),
            katz.get(v).to_string(),
            closeness.get(v).to_string(),
            betweenness.get(v).to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
