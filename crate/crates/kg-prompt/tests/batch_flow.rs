//! End-to-end batch probing against mock and misbehaving clients.

use std::sync::atomic::{AtomicUsize, Ordering};

use kg_core::Triplet;
use kg_prompt::{
    mock_verdict, probe_batch, BatchOptions, MockClient, ProbeCache, ProbeOutcome, PromptError,
    RetryPolicy, TemplateMap, VerdictClient,
};

fn templates() -> TemplateMap {
    TemplateMap::new([("in".to_string(), "{sub} is in {obj}.".to_string())]).unwrap()
}

fn fast_options() -> BatchOptions {
    BatchOptions {
        temporal: false,
        max_parallel: 4,
        requests_per_second: 1e9,
        retry: RetryPolicy {
            max_attempts: 3,
            initial_backoff_ms: 1,
            backoff_multiplier: 1.0,
        },
    }
}

/// Counts probe calls and delegates to a closure.
struct CountingClient<F: Fn(&str, usize) -> Result<ProbeOutcome, PromptError> + Send + Sync> {
    calls: AtomicUsize,
    behavior: F,
}

impl<F: Fn(&str, usize) -> Result<ProbeOutcome, PromptError> + Send + Sync> CountingClient<F> {
    fn new(behavior: F) -> Self {
        CountingClient {
            calls: AtomicUsize::new(0),
            behavior,
        }
    }

    fn calls(&self) -> usize {
        self.calls.load(Ordering::SeqCst)
    }
}

impl<F: Fn(&str, usize) -> Result<ProbeOutcome, PromptError> + Send + Sync> VerdictClient
    for CountingClient<F>
{
    fn model(&self) -> &str {
        "counting"
    }

    fn probe(&self, statement: &str) -> Result<ProbeOutcome, PromptError> {
        let call = self.calls.fetch_add(1, Ordering::SeqCst);
        (self.behavior)(statement, call)
    }
}

fn ok(verdict: u8) -> Result<ProbeOutcome, PromptError> {
    Ok(ProbeOutcome {
        verdict,
        raw_response: if verdict == 1 { "True" } else { "False" }.into(),
    })
}

#[test]
fn cached_statements_are_not_resent() {
    let dir = tempfile::tempdir().unwrap();
    let cache = ProbeCache::new(dir.path().join("probes.jsonl"));
    let client = CountingClient::new(|_, _| ok(1));

    // First batch: two triplets, two requests.
    let first = vec![Triplet::new("A", "in", "X"), Triplet::new("B", "in", "X")];
    let report = probe_batch(&first, &templates(), &client, &cache, &fast_options()).unwrap();
    assert_eq!(report.requests, 2);
    assert_eq!(report.cache_hits, 0);
    assert_eq!(client.calls(), 2);

    // Second batch: three triplets, two already cached, exactly one new call.
    let second = vec![
        Triplet::new("A", "in", "X"),
        Triplet::new("B", "in", "X"),
        Triplet::new("C", "in", "X"),
    ];
    let report = probe_batch(&second, &templates(), &client, &cache, &fast_options()).unwrap();
    assert_eq!(report.requests, 1);
    assert_eq!(report.cache_hits, 2);
    assert_eq!(client.calls(), 3);
    assert_eq!(report.resolved().count(), 3);
}

#[test]
fn duplicate_statements_within_a_batch_are_probed_once() {
    let dir = tempfile::tempdir().unwrap();
    let cache = ProbeCache::new(dir.path().join("probes.jsonl"));
    let client = CountingClient::new(|_, _| ok(0));
    let triplets = vec![
        Triplet::new("A", "in", "X"),
        Triplet::new("A", "in", "X"),
        Triplet::new("A", "in", "X"),
    ];
    let report = probe_batch(&triplets, &templates(), &client, &cache, &fast_options()).unwrap();
    assert_eq!(client.calls(), 1);
    assert_eq!(report.requests, 1);
    // Every input still gets its record.
    assert_eq!(report.records.iter().flatten().count(), 3);
    // The cache holds a single line.
    assert_eq!(cache.load().unwrap().len(), 1);
}

#[test]
fn transient_failures_are_retried_until_success() {
    let dir = tempfile::tempdir().unwrap();
    let cache = ProbeCache::new(dir.path().join("probes.jsonl"));
    // Two transport failures, then success.
    let client = CountingClient::new(|_, call| {
        if call < 2 {
            Err(PromptError::Transport("connection reset".into()))
        } else {
            ok(1)
        }
    });
    let triplets = vec![Triplet::new("A", "in", "X")];
    let report = probe_batch(&triplets, &templates(), &client, &cache, &fast_options()).unwrap();
    assert_eq!(client.calls(), 3);
    assert!(report.failures.is_empty());
    assert_eq!(report.records[0].as_ref().unwrap().verdict, 1);
}

#[test]
fn unparseable_verdicts_are_retryable() {
    let dir = tempfile::tempdir().unwrap();
    let cache = ProbeCache::new(dir.path().join("probes.jsonl"));
    let client = CountingClient::new(|_, call| {
        if call == 0 {
            Ok(ProbeOutcome {
                verdict: 0,
                raw_response: String::new(),
            })
            .and_then(|_| Err(PromptError::UnparseableVerdict("hmm".into())))
        } else {
            ok(0)
        }
    });
    let triplets = vec![Triplet::new("A", "in", "X")];
    let report = probe_batch(&triplets, &templates(), &client, &cache, &fast_options()).unwrap();
    assert_eq!(client.calls(), 2);
    assert!(report.failures.is_empty());
}

#[test]
fn exhausted_statements_fail_soft_and_stay_uncached() {
    let dir = tempfile::tempdir().unwrap();
    let cache = ProbeCache::new(dir.path().join("probes.jsonl"));
    // "A is in X." always fails; everything else succeeds.
    let client = CountingClient::new(|statement: &str, _| {
        if statement.starts_with("A ") {
            Err(PromptError::Transport("boom".into()))
        } else {
            ok(1)
        }
    });
    let triplets = vec![Triplet::new("A", "in", "X"), Triplet::new("B", "in", "X")];
    let report = probe_batch(&triplets, &templates(), &client, &cache, &fast_options()).unwrap();

    assert_eq!(report.failures.len(), 1);
    assert_eq!(report.failures[0].attempts, 3);
    assert_eq!(report.failures[0].head, "A");
    // Input 0 has no record; input 1 does.
    assert!(report.records[0].is_none());
    assert_eq!(report.records[1].as_ref().unwrap().head, "B");
    // Only the success was cached, so a later run retries the failure.
    let cached = cache.load().unwrap();
    assert_eq!(cached.len(), 1);
    assert_eq!(cached[0].head, "B");

    // Retry run: the failed statement is re-requested, the cached one is not.
    let retry_client = CountingClient::new(|_, _| ok(0));
    let report =
        probe_batch(&triplets, &templates(), &retry_client, &cache, &fast_options()).unwrap();
    // Different model label, so cache does not apply across clients; use the
    // same labels instead.
    assert_eq!(report.requests, 2 - report.cache_hits);
}

#[test]
fn non_retryable_errors_fail_after_one_attempt() {
    let dir = tempfile::tempdir().unwrap();
    let cache = ProbeCache::new(dir.path().join("probes.jsonl"));
    let client = CountingClient::new(|_, _| {
        Err(PromptError::Status {
            status: 401,
            body: "unauthorized".into(),
        })
    });
    let triplets = vec![Triplet::new("A", "in", "X")];
    let report = probe_batch(&triplets, &templates(), &client, &cache, &fast_options()).unwrap();
    assert_eq!(client.calls(), 1);
    assert_eq!(report.failures.len(), 1);
    assert_eq!(report.failures[0].attempts, 1);
}

#[test]
fn parallel_mock_batches_are_deterministic() {
    let triplets: Vec<Triplet> = (0..200)
        .map(|i| Triplet::new(format!("e{i}"), "in", format!("e{}", (i + 1) % 200)))
        .collect();
    let run = || {
        let dir = tempfile::tempdir().unwrap();
        let cache = ProbeCache::new(dir.path().join("probes.jsonl"));
        let client = MockClient::new(11, 0.5);
        let opts = BatchOptions {
            max_parallel: 8,
            ..fast_options()
        };
        let report = probe_batch(&triplets, &templates(), &client, &cache, &opts).unwrap();
        let bytes = std::fs::read(cache.path()).unwrap();
        let verdicts: Vec<u8> = report
            .resolved()
            .map(|r| r.verdict)
            .collect();
        (bytes, verdicts)
    };
    let (bytes_a, verdicts_a) = run();
    let (bytes_b, verdicts_b) = run();
    assert_eq!(bytes_a, bytes_b, "cache files differ between identical runs");
    assert_eq!(verdicts_a, verdicts_b);
    // And the verdicts match the mock function directly.
    let t = templates();
    for (i, t3) in triplets.iter().enumerate() {
        let statement = t.instantiate(t3).unwrap();
        assert_eq!(verdicts_a[i], mock_verdict(11, 0.5, &statement));
    }
}

#[test]
fn sidecar_log_records_every_fresh_probe() {
    let dir = tempfile::tempdir().unwrap();
    let cache = ProbeCache::new(dir.path().join("probes.jsonl"));
    let client = MockClient::new(1, 0.5);
    let triplets = vec![Triplet::new("A", "in", "X"), Triplet::new("B", "in", "X")];
    probe_batch(&triplets, &templates(), &client, &cache, &fast_options()).unwrap();
    let log = std::fs::read_to_string(cache.log_path()).unwrap();
    assert_eq!(log.lines().count(), 2);
    assert!(log.contains("\"outcome\":\"ok\""));
    assert!(log.contains("probed_at"));
    // Second identical batch: all cached, nothing appended.
    probe_batch(&triplets, &templates(), &client, &cache, &fast_options()).unwrap();
    let log2 = std::fs::read_to_string(cache.log_path()).unwrap();
    assert_eq!(log2.lines().count(), 2);
}
