//! Probe results and their cache identity.

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use kg_core::Triplet;

/// One cached verdict. Records are deterministic given the statement and the
/// model — wall-clock timing lives in the sidecar log, never here, so cache
/// files from identical runs are byte-identical.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProbeRecord {
    pub head: String,
    pub relation: String,
    pub tail: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<NaiveDate>,
    /// Whether the statement used the dated phrasing.
    pub temporal: bool,
    pub statement: String,
    /// 1 = judged true, 0 = judged false.
    pub verdict: u8,
    pub model: String,
    pub raw_response: String,
}

impl ProbeRecord {
    pub fn cache_key(&self) -> CacheKey {
        CacheKey {
            model: self.model.clone(),
            temporal: self.temporal,
            statement: self.statement.clone(),
        }
    }

    pub fn triplet(&self) -> Triplet {
        let t = Triplet::new(&self.head, &self.relation, &self.tail);
        match self.timestamp {
            Some(d) => t.with_timestamp(d),
            None => t,
        }
    }
}

/// Identity of a cached verdict: same statement probed under the same model
/// and phrasing mode reuses the entry; anything else is a different probe.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CacheKey {
    pub model: String,
    pub temporal: bool,
    pub statement: String,
}

/// A statement that produced no verdict after all retry attempts. Failures
/// are reported, never cached, and excluded from score aggregation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProbeFailure {
    pub head: String,
    pub relation: String,
    pub tail: String,
    pub statement: String,
    pub temporal: bool,
    pub attempts: usize,
    pub error: String,
}

/// One sidecar-log line: when a probe ran and how it went. This is the only
/// place wall-clock time is recorded.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProbeLogEntry {
    /// RFC 3339 UTC timestamp.
    pub probed_at: String,
    pub model: String,
    pub statement: String,
    pub attempts: usize,
    /// "ok" or "failed".
    pub outcome: String,
}
