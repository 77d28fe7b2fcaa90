//! HTTP client tests against a local single-use server.

use std::io::{Read, Write};
use std::net::{TcpListener, TcpStream};

use kg_core::Triplet;
use kg_prompt::{
    probe_batch, BatchOptions, HttpClient, LlmClientConfig, ProbeCache, PromptError, RetryPolicy,
    TemplateMap, VerdictClient,
};

/// Reads one HTTP request (headers plus content-length body) and returns
/// (head, body).
fn read_request(stream: &mut TcpStream) -> (String, String) {
    let mut buf = Vec::new();
    let mut chunk = [0u8; 1024];
    let header_end = loop {
        let n = stream.read(&mut chunk).expect("request read");
        assert!(n > 0, "connection closed before headers finished");
        buf.extend_from_slice(&chunk[..n]);
        if let Some(pos) = buf.windows(4).position(|w| w == b"\r\n\r\n") {
            break pos + 4;
        }
    };
    let head = String::from_utf8_lossy(&buf[..header_end]).into_owned();
    let content_length: usize = head
        .lines()
        .find_map(|l| l.to_ascii_lowercase().strip_prefix("content-length:").map(str::trim).map(str::to_string))
        .and_then(|v| v.parse().ok())
        .unwrap_or(0);
    while buf.len() < header_end + content_length {
        let n = stream.read(&mut chunk).expect("body read");
        assert!(n > 0, "connection closed mid-body");
        buf.extend_from_slice(&chunk[..n]);
    }
    let body = String::from_utf8_lossy(&buf[header_end..header_end + content_length]).into_owned();
    (head, body)
}

fn respond(stream: &mut TcpStream, status: &str, body: &str) {
    let response = format!(
        "HTTP/1.1 {status}\r\ncontent-type: application/json\r\ncontent-length: {}\r\nconnection: close\r\n\r\n{body}",
        body.len()
    );
    stream.write_all(response.as_bytes()).expect("response write");
    stream.flush().expect("response flush");
}

fn chat_body(content: &str) -> String {
    format!(r#"{{"choices":[{{"message":{{"role":"assistant","content":"{content}"}}}}]}}"#)
}

/// Serves `responses` (status, body) pairs, one connection each, then stops.
/// Returns the endpoint URL and a handle yielding the captured requests.
fn serve(
    responses: Vec<(String, String)>,
) -> (String, std::thread::JoinHandle<Vec<(String, String)>>) {
    let listener = TcpListener::bind("127.0.0.1:0").expect("bind");
    let endpoint = format!("http://{}/v1/chat/completions", listener.local_addr().unwrap());
    let handle = std::thread::spawn(move || {
        let mut captured = Vec::new();
        for (status, body) in responses {
            let (mut stream, _) = listener.accept().expect("accept");
            captured.push(read_request(&mut stream));
            respond(&mut stream, &status, &body);
        }
        captured
    });
    (endpoint, handle)
}

fn config(endpoint: &str) -> LlmClientConfig {
    LlmClientConfig {
        endpoint: endpoint.to_string(),
        model: "test-model".into(),
        api_key_env: None,
        max_parallel: 1,
        requests_per_second: 1e9,
        retry: RetryPolicy {
            max_attempts: 2,
            initial_backoff_ms: 1,
            backoff_multiplier: 1.0,
        },
        timeout_secs: 10,
        ..LlmClientConfig::default()
    }
}

#[test]
fn probe_sends_chat_payload_and_parses_verdict() {
    let (endpoint, server) = serve(vec![("200 OK".into(), chat_body("True"))]);
    let mut cfg = config(&endpoint);
    cfg.api_key_env = Some("KG_PROMPT_TEST_KEY".into());
    std::env::set_var("KG_PROMPT_TEST_KEY", "secret-token");
    let client = HttpClient::new(cfg).unwrap();

    let outcome = client.probe("Paris is in France.").unwrap();
    assert_eq!(outcome.verdict, 1);
    assert_eq!(outcome.raw_response, "True");

    let captured = server.join().unwrap();
    let (head, body) = &captured[0];
    assert!(head.starts_with("POST /v1/chat/completions"));
    assert!(head.to_ascii_lowercase().contains("authorization: bearer secret-token"));
    let payload: serde_json::Value = serde_json::from_str(body).unwrap();
    assert_eq!(payload["model"], "test-model");
    assert_eq!(payload["messages"][0]["role"], "system");
    assert_eq!(
        payload["messages"][0]["content"],
        "Evaluate the statement based on your knowledge and respond with True or False."
    );
    assert_eq!(payload["messages"][1]["role"], "user");
    assert_eq!(payload["messages"][1]["content"], "Paris is in France.");
}

#[test]
fn server_errors_surface_with_status() {
    let (endpoint, server) = serve(vec![("400 Bad Request".into(), "{\"error\":\"nope\"}".into())]);
    let client = HttpClient::new(config(&endpoint)).unwrap();
    let err = client.probe("statement").unwrap_err();
    assert!(matches!(err, PromptError::Status { status: 400, .. }));
    server.join().unwrap();
}

#[test]
fn batch_retries_a_flaky_endpoint() {
    // First request gets a 500, the retry succeeds.
    let (endpoint, server) = serve(vec![
        ("500 Internal Server Error".into(), "oops".into()),
        ("200 OK".into(), chat_body("False")),
    ]);
    let client = HttpClient::new(config(&endpoint)).unwrap();
    let templates =
        TemplateMap::new([("in".to_string(), "{sub} is in {obj}.".to_string())]).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let cache = ProbeCache::new(dir.path().join("probes.jsonl"));
    let options = BatchOptions {
        temporal: false,
        max_parallel: 1,
        requests_per_second: 1e9,
        retry: RetryPolicy {
            max_attempts: 2,
            initial_backoff_ms: 1,
            backoff_multiplier: 1.0,
        },
    };

    let triplets = vec![Triplet::new("A", "in", "B")];
    let report = probe_batch(&triplets, &templates, &client, &cache, &options).unwrap();
    assert!(report.failures.is_empty());
    let record = report.records[0].as_ref().unwrap();
    assert_eq!(record.verdict, 0);
    assert_eq!(record.model, "test-model");
    assert_eq!(server.join().unwrap().len(), 2);
}
