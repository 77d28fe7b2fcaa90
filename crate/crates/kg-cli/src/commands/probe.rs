//! `kgprobe probe` — ask the model (or the offline mock) to judge every
//! statement of the graph, filling the verdict cache.
//!
//! The cache is resumable: statements already answered under the same model
//! and phrasing are never re-asked, so an interrupted run continues where it
//! left off. Failed statements are reported (`probe_failures.csv`) and left
//! out of the cache for the next run to retry; any failure makes the command
//! exit with the network code while keeping every successful verdict.

use kg_prompt::{probe_batch, ProbeCache};

use crate::commands::{batch_options, failures_path, make_client};
use crate::config::Settings;
use crate::errors::CliError;
use crate::io::{read_graph, read_templates, write_failures};

pub fn run(settings: &Settings) -> Result<(), CliError> {
    let graph = read_graph(settings)?;
    let templates = read_templates(settings)?;
    let client = make_client(settings)?;
    std::fs::create_dir_all(&settings.output_dir)?;
    let cache = ProbeCache::new(&settings.cache);

    let report = probe_batch(
        graph.triplets(),
        &templates,
        client.as_ref(),
        &cache,
        &batch_options(settings),
    )?;

    let resolved = report.resolved().count();
    println!(
        "{} statements resolved for {} triplets: {} freshly probed, {} from cache, {} failed",
        resolved,
        graph.triplet_count(),
        report.requests,
        report.cache_hits,
        report.failures.len()
    );
    println!("cache: {}", cache.path().display());

    let failure_report = failures_path(settings);
    if report.failures.is_empty() {
        // A leftover report from an earlier failed run no longer describes
        // the cache; the rerun just recovered those statements.
        match std::fs::remove_file(&failure_report) {
            Ok(()) => {}
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => {}
            Err(e) => return Err(e.into()),
        }
        Ok(())
    } else {
        write_failures(&report.failures, client.model(), &failure_report)?;
        println!("failure report: {}", failure_report.display());
        Err(CliError::Network(format!(
            "{} statements produced no verdict; successful verdicts were kept in the cache \
             and a rerun will retry only the failures",
            report.failures.len()
        )))
    }
}
