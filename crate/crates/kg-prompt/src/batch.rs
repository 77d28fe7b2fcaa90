//! Cache-aware batched probing with worker threads, rate limiting, and
//! per-statement retries.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use chrono::{SecondsFormat, Utc};

use kg_core::Triplet;

use crate::cache::ProbeCache;
use crate::client::{RetryPolicy, VerdictClient};
use crate::error::PromptError;
use crate::record::{CacheKey, ProbeFailure, ProbeLogEntry, ProbeRecord};
use crate::template::TemplateMap;

/// Batch execution settings.
#[derive(Debug, Clone)]
pub struct BatchOptions {
    /// Use dated phrasing for timestamped triplets. Triplets without a
    /// timestamp fall back to the plain statement (and share its cache
    /// entry, since the text asked is identical).
    pub temporal: bool,
    /// Worker threads (each holds at most one request in flight).
    pub max_parallel: usize,
    /// Request-rate ceiling across workers; rates of 1e6/s or more disable
    /// throttling entirely (useful for offline mock runs).
    pub requests_per_second: f64,
    pub retry: RetryPolicy,
}

impl Default for BatchOptions {
    fn default() -> Self {
        BatchOptions {
            temporal: false,
            max_parallel: 4,
            requests_per_second: 4.0,
            retry: RetryPolicy::default(),
        }
    }
}

/// Outcome of a batch: one record per input triplet whose statement resolved
/// (cache or fresh), one failure per distinct statement that exhausted its
/// retries, and traffic counters.
#[derive(Debug, Clone)]
pub struct BatchReport {
    /// Index-aligned with the resolvable inputs: entry `i` describes input
    /// triplet `i` unless that statement failed. Triplet fields come from the
    /// input; verdict and raw text from the (possibly cached) probe.
    pub records: Vec<Option<ProbeRecord>>,
    pub failures: Vec<ProbeFailure>,
    /// Distinct statements served from the cache.
    pub cache_hits: usize,
    /// Distinct statements sent to the client.
    pub requests: usize,
}

impl BatchReport {
    /// The resolved records, input order preserved.
    pub fn resolved(&self) -> impl Iterator<Item = &ProbeRecord> {
        self.records.iter().flatten()
    }
}

struct Job {
    statement: String,
    temporal: bool,
    /// Index of the first input triplet that produced this statement.
    representative: usize,
}

type JobResult = Result<(u8, String, usize), (String, usize)>;

/// Probes every triplet's statement, reusing cached verdicts and appending
/// newly obtained ones to the cache.
///
/// Statements are deduplicated before any traffic: each distinct
/// `(model, temporal, statement)` key is requested at most once per batch and
/// never when the cache already holds it. Failed statements are reported in
/// the result and deliberately left out of the cache so a later run retries
/// them. Only cache I/O aborts the whole batch; per-statement trouble is
/// contained.
pub fn probe_batch(
    triplets: &[Triplet],
    templates: &TemplateMap,
    client: &dyn VerdictClient,
    cache: &ProbeCache,
    options: &BatchOptions,
) -> Result<BatchReport, PromptError> {
    if options.max_parallel == 0 {
        return Err(PromptError::InvalidConfig("max_parallel must be >= 1".into()));
    }
    if !(options.requests_per_second > 0.0) {
        return Err(PromptError::InvalidConfig(
            "requests_per_second must be positive".into(),
        ));
    }

    // Render all statements first; a missing or invalid template is a
    // configuration error, not a per-statement failure.
    let mut rendered: Vec<(String, bool)> = Vec::with_capacity(triplets.len());
    for t in triplets {
        let dated = options.temporal && t.timestamp.is_some();
        let statement = if dated {
            templates.instantiate_temporal(t)?
        } else {
            templates.instantiate(t)?
        };
        rendered.push((statement, dated));
    }

    let mut index = cache.load_index()?;
    let model = client.model().to_string();

    // Distinct uncached statements, in first-appearance order.
    let mut jobs: Vec<Job> = Vec::new();
    let mut scheduled = std::collections::HashSet::new();
    let mut cache_hits_keys = std::collections::HashSet::new();
    for (i, (statement, dated)) in rendered.iter().enumerate() {
        let key = CacheKey {
            model: model.clone(),
            temporal: *dated,
            statement: statement.clone(),
        };
        if index.contains_key(&key) {
            cache_hits_keys.insert(key);
            continue;
        }
        if scheduled.insert(key) {
            jobs.push(Job {
                statement: statement.clone(),
                temporal: *dated,
                representative: i,
            });
        }
    }

    let results = run_jobs(&jobs, client, options);

    // Fold job outcomes into records, failures, and log lines, in job order.
    let mut new_records = Vec::new();
    let mut failures = Vec::new();
    let mut log_entries = Vec::new();
    for (job, (result, probed_at)) in jobs.iter().zip(results) {
        let t = &triplets[job.representative];
        match result {
            Ok((verdict, raw_response, attempts)) => {
                let record = ProbeRecord {
                    head: t.head.clone(),
                    relation: t.relation.clone(),
                    tail: t.tail.clone(),
                    timestamp: t.timestamp,
                    temporal: job.temporal,
                    statement: job.statement.clone(),
                    verdict,
                    model: model.clone(),
                    raw_response,
                };
                index.insert(record.cache_key(), record.clone());
                new_records.push(record);
                log_entries.push(ProbeLogEntry {
                    probed_at,
                    model: model.clone(),
                    statement: job.statement.clone(),
                    attempts,
                    outcome: "ok".into(),
                });
            }
            Err((error, attempts)) => {
                failures.push(ProbeFailure {
                    head: t.head.clone(),
                    relation: t.relation.clone(),
                    tail: t.tail.clone(),
                    statement: job.statement.clone(),
                    temporal: job.temporal,
                    attempts,
                    error,
                });
                log_entries.push(ProbeLogEntry {
                    probed_at,
                    model: model.clone(),
                    statement: job.statement.clone(),
                    attempts,
                    outcome: "failed".into(),
                });
            }
        }
    }

    cache.append_all(&new_records)?;
    cache.append_log(&log_entries)?;

    let records = rendered
        .iter()
        .enumerate()
        .map(|(i, (statement, dated))| {
            let key = CacheKey {
                model: model.clone(),
                temporal: *dated,
                statement: statement.clone(),
            };
            index.get(&key).map(|hit| {
                let t = &triplets[i];
                ProbeRecord {
                    head: t.head.clone(),
                    relation: t.relation.clone(),
                    tail: t.tail.clone(),
                    timestamp: t.timestamp,
                    temporal: *dated,
                    statement: hit.statement.clone(),
                    verdict: hit.verdict,
                    model: hit.model.clone(),
                    raw_response: hit.raw_response.clone(),
                }
            })
        })
        .collect();

    Ok(BatchReport {
        records,
        failures,
        cache_hits: cache_hits_keys.len(),
        requests: jobs.len(),
    })
}

/// Runs jobs on a claim-by-counter worker pool; results land at their job's
/// index so output ordering never depends on scheduling.
fn run_jobs(
    jobs: &[Job],
    client: &dyn VerdictClient,
    options: &BatchOptions,
) -> Vec<(JobResult, String)> {
    let mut slots: Vec<Option<(JobResult, String)>> = Vec::new();
    slots.resize_with(jobs.len(), || None);
    if jobs.is_empty() {
        return Vec::new();
    }
    let slots = Mutex::new(slots);
    let next = AtomicUsize::new(0);
    let limiter = RateLimiter::new(options.requests_per_second);
    let workers = options.max_parallel.min(jobs.len());

    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= jobs.len() {
                    break;
                }
                let result = probe_with_retries(client, &jobs[i].statement, options, &limiter);
                let probed_at = Utc::now().to_rfc3339_opts(SecondsFormat::Millis, true);
                slots.lock().expect("no poisoned workers")[i] = Some((result, probed_at));
            });
        }
    });

    slots
        .into_inner()
        .expect("workers joined")
        .into_iter()
        .map(|slot| slot.expect("every job claimed"))
        .collect()
}

fn probe_with_retries(
    client: &dyn VerdictClient,
    statement: &str,
    options: &BatchOptions,
    limiter: &RateLimiter,
) -> JobResult {
    let mut last_error = String::new();
    for attempt in 1..=options.retry.max_attempts {
        if attempt > 1 {
            std::thread::sleep(options.retry.backoff(attempt - 1));
        }
        limiter.acquire();
        match client.probe(statement) {
            Ok(outcome) => return Ok((outcome.verdict, outcome.raw_response, attempt)),
            Err(e) => {
                let retryable = e.is_retryable();
                last_error = e.to_string();
                if !retryable {
                    return Err((last_error, attempt));
                }
            }
        }
    }
    Err((last_error, options.retry.max_attempts))
}

/// Shared token bucket. Burst capacity is one second of traffic (at least
/// one token), refilled continuously.
struct RateLimiter {
    state: Mutex<(f64, Instant)>,
    rate: f64,
    burst: f64,
}

impl RateLimiter {
    fn new(rate: f64) -> Self {
        let burst = rate.max(1.0);
        RateLimiter {
            state: Mutex::new((burst, Instant::now())),
            rate,
            burst,
        }
    }

    fn acquire(&self) {
        if self.rate >= 1e6 {
            return;
        }
        loop {
            let wait = {
                let mut state = self.state.lock().expect("limiter lock");
                let (ref mut tokens, ref mut last) = *state;
                let now = Instant::now();
                *tokens = (*tokens + now.duration_since(*last).as_secs_f64() * self.rate)
                    .min(self.burst);
                *last = now;
                if *tokens >= 1.0 {
                    *tokens -= 1.0;
                    return;
                }
                (1.0 - *tokens) / self.rate
            };
            std::thread::sleep(Duration::from_secs_f64(wait.clamp(0.0005, 0.25)));
        }
    }
}
