//! `kgprobe compact-cache` — rewrite the verdict cache keeping only the
//! latest record per statement.
//!
//! Append-only probing can leave superseded lines behind (a statement
//! re-probed after a cache edit, or interrupted writes recovered on load);
//! compaction rewrites the file so every statement appears exactly once,
//! preserving first-appearance order.

use kg_prompt::ProbeCache;

use crate::config::Settings;
use crate::errors::{input, CliError};

pub fn run(settings: &Settings) -> Result<(), CliError> {
    if !settings.cache.exists() {
        return Err(input(format!(
            "no cache at {}; nothing to compact",
            settings.cache.display()
        )));
    }
    let cache = ProbeCache::new(&settings.cache);
    let report = cache.compact()?;
    println!(
        "compacted {}: {} lines -> {} records ({} superseded)",
        settings.cache.display(),
        report.lines_before,
        report.lines_after,
        report.lines_before - report.lines_after
    );
    Ok(())
}
