//! Append-only JSONL verdict cache with a timing sidecar log.

use std::collections::HashMap;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, BufWriter, Write as _};
use std::path::{Path, PathBuf};

use crate::error::PromptError;
use crate::record::{CacheKey, ProbeLogEntry, ProbeRecord};

/// On-disk probe cache: one JSON record per line, append-only. Repeated
/// probes of the same [`CacheKey`] append new lines; the latest line wins at
/// load time, and [`ProbeCache::compact`] rewrites the file keeping only
/// winners.
#[derive(Debug, Clone)]
pub struct ProbeCache {
    path: PathBuf,
}

/// Outcome of a compaction pass.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CompactionReport {
    pub lines_before: usize,
    pub lines_after: usize,
}

impl ProbeCache {
    pub fn new(path: impl Into<PathBuf>) -> Self {
        ProbeCache { path: path.into() }
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    /// Path of the sidecar log holding wall-clock probe timings.
    pub fn log_path(&self) -> PathBuf {
        let mut name = self
            .path
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_default();
        name.push_str(".log");
        self.path.with_file_name(name)
    }

    /// Loads every record in file order. A missing file is an empty cache.
    ///
    /// Malformed lines are an error, except for a torn final line without a
    /// trailing newline (an interrupted append), which is skipped.
    pub fn load(&self) -> Result<Vec<ProbeRecord>, PromptError> {
        let file = match File::open(&self.path) {
            Ok(f) => f,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(Vec::new()),
            Err(e) => return Err(e.into()),
        };
        let mut records = Vec::new();
        let mut lines = Vec::new();
        let mut reader = BufReader::new(file);
        loop {
            let mut line = String::new();
            if reader.read_line(&mut line)? == 0 {
                break;
            }
            lines.push(line);
        }
        let total = lines.len();
        for (i, line) in lines.into_iter().enumerate() {
            let complete = line.ends_with('\n');
            let text = line.trim_end_matches(['\n', '\r']);
            if text.is_empty() {
                continue;
            }
            match serde_json::from_str::<ProbeRecord>(text) {
                Ok(r) => records.push(r),
                // An interrupted append leaves a torn, newline-less tail.
                Err(_) if i + 1 == total && !complete => break,
                Err(e) => {
                    return Err(PromptError::Cache {
                        line: i + 1,
                        message: e.to_string(),
                    })
                }
            }
        }
        Ok(records)
    }

    /// Latest record per cache key.
    pub fn load_index(&self) -> Result<HashMap<CacheKey, ProbeRecord>, PromptError> {
        Ok(index_latest(self.load()?))
    }

    /// Appends records (one line each) and flushes once at the end.
    pub fn append_all(&self, records: &[ProbeRecord]) -> Result<(), PromptError> {
        if records.is_empty() {
            return Ok(());
        }
        if let Some(dir) = self.path.parent().filter(|d| !d.as_os_str().is_empty()) {
            std::fs::create_dir_all(dir)?;
        }
        let file = OpenOptions::new()
            .create(true)
            .append(true)
            .open(&self.path)?;
        let mut writer = BufWriter::new(file);
        for record in records {
            serde_json::to_writer(&mut writer, record)
                .map_err(|e| PromptError::Cache {
                    line: 0,
                    message: format!("serialization failed: {e}"),
                })?;
            writer.write_all(b"\n")?;
        }
        writer.flush()?;
        Ok(())
    }

    /// Appends timing entries to the sidecar log.
    pub fn append_log(&self, entries: &[ProbeLogEntry]) -> Result<(), PromptError> {
        if entries.is_empty() {
            return Ok(());
        }
        let path = self.log_path();
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            std::fs::create_dir_all(dir)?;
        }
        let file = OpenOptions::new().create(true).append(true).open(path)?;
        let mut writer = BufWriter::new(file);
        for entry in entries {
            serde_json::to_writer(&mut writer, entry)
                .map_err(|e| PromptError::Cache {
                    line: 0,
                    message: format!("log serialization failed: {e}"),
                })?;
            writer.write_all(b"\n")?;
        }
        writer.flush()?;
        Ok(())
    }

    /// Rewrites the cache keeping only the latest record per key, in first-
    /// appearance order of the surviving keys. The rewrite goes through a
    /// sibling temp file and an atomic rename.
    pub fn compact(&self) -> Result<CompactionReport, PromptError> {
        let records = self.load()?;
        let lines_before = records.len();
        let latest = index_latest(records.clone());
        let mut seen = std::collections::HashSet::new();
        let survivors: Vec<&ProbeRecord> = records
            .iter()
            .filter(|r| seen.insert(r.cache_key()))
            .map(|r| &latest[&r.cache_key()])
            .collect();
        let tmp = self.path.with_extension("jsonl.tmp");
        {
            let mut writer = BufWriter::new(File::create(&tmp)?);
            for record in &survivors {
                serde_json::to_writer(&mut writer, record)
                    .map_err(|e| PromptError::Cache {
                        line: 0,
                        message: format!("serialization failed: {e}"),
                    })?;
                writer.write_all(b"\n")?;
            }
            writer.flush()?;
        }
        std::fs::rename(&tmp, &self.path)?;
        Ok(CompactionReport {
            lines_before,
            lines_after: survivors.len(),
        })
    }
}

/// Reduces a record list to the latest record per key.
pub fn index_latest(records: Vec<ProbeRecord>) -> HashMap<CacheKey, ProbeRecord> {
    let mut index = HashMap::new();
    for record in records {
        index.insert(record.cache_key(), record);
    }
    index
}
