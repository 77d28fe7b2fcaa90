//! Verdict clients: the probing trait, HTTP chat-completion client, and
//! request retry/throttle settings.

use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::error::PromptError;
use crate::verdict::parse_verdict;

/// System message sent with every probe.
pub const DEFAULT_SYSTEM_MESSAGE: &str =
    "Evaluate the statement based on your knowledge and respond with True or False.";

/// Retry schedule for a single statement probe.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(default)]
pub struct RetryPolicy {
    /// Total attempts, including the first (minimum 1).
    pub max_attempts: usize,
    pub initial_backoff_ms: u64,
    pub backoff_multiplier: f64,
}

impl Default for RetryPolicy {
    fn default() -> Self {
        RetryPolicy {
            max_attempts: 3,
            initial_backoff_ms: 250,
            backoff_multiplier: 2.0,
        }
    }
}

impl RetryPolicy {
    /// Sleep before retry number `retry` (1-based).
    pub fn backoff(&self, retry: usize) -> Duration {
        let ms =
            self.initial_backoff_ms as f64 * self.backoff_multiplier.powi(retry as i32 - 1);
        Duration::from_millis(ms.min(60_000.0) as u64)
    }
}

/// Connection settings for the HTTP probing endpoint.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct LlmClientConfig {
    /// Chat-completion URL, e.g. `https://host/v1/chat/completions`.
    pub endpoint: String,
    pub model: String,
    /// Name of the environment variable holding the bearer token; `None`
    /// sends no Authorization header.
    pub api_key_env: Option<String>,
    /// Concurrent in-flight requests.
    pub max_parallel: usize,
    /// Request-rate ceiling across all workers.
    pub requests_per_second: f64,
    pub retry: RetryPolicy,
    pub system_message: String,
    pub timeout_secs: u64,
}

impl Default for LlmClientConfig {
    fn default() -> Self {
        LlmClientConfig {
            endpoint: String::new(),
            model: String::new(),
            api_key_env: None,
            max_parallel: 4,
            requests_per_second: 4.0,
            retry: RetryPolicy::default(),
            system_message: DEFAULT_SYSTEM_MESSAGE.to_string(),
            timeout_secs: 60,
        }
    }
}

impl LlmClientConfig {
    pub fn validate(&self) -> Result<(), PromptError> {
        if self.endpoint.is_empty() {
            return Err(PromptError::InvalidConfig("endpoint is empty".into()));
        }
        if self.model.is_empty() {
            return Err(PromptError::InvalidConfig("model is empty".into()));
        }
        if self.max_parallel == 0 {
            return Err(PromptError::InvalidConfig("max_parallel must be >= 1".into()));
        }
        if !(self.requests_per_second > 0.0) {
            return Err(PromptError::InvalidConfig(
                "requests_per_second must be positive".into(),
            ));
        }
        if self.retry.max_attempts == 0 {
            return Err(PromptError::InvalidConfig(
                "retry.max_attempts must be >= 1".into(),
            ));
        }
        Ok(())
    }
}

/// Verdict and raw text from one successful probe.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProbeOutcome {
    pub verdict: u8,
    pub raw_response: String,
}

/// A source of True/False verdicts for statements. One call is one attempt;
/// retries live in the batch driver.
pub trait VerdictClient: Send + Sync {
    /// Identifier recorded with every verdict (model name or mock tag).
    fn model(&self) -> &str;

    fn probe(&self, statement: &str) -> Result<ProbeOutcome, PromptError>;
}

/// Blocking chat-completion client.
pub struct HttpClient {
    config: LlmClientConfig,
    api_key: Option<String>,
    http: reqwest::blocking::Client,
}

impl HttpClient {
    /// Validates the config and resolves the API key environment variable.
    /// A named but unset variable is an immediate error, not a per-request
    /// one.
    pub fn new(config: LlmClientConfig) -> Result<Self, PromptError> {
        config.validate()?;
        let api_key = match &config.api_key_env {
            Some(var) => Some(
                std::env::var(var).map_err(|_| PromptError::MissingApiKey(var.clone()))?,
            ),
            None => None,
        };
        let http = reqwest::blocking::Client::builder()
            .timeout(Duration::from_secs(config.timeout_secs))
            .build()
            .map_err(|e| PromptError::Transport(e.to_string()))?;
        Ok(HttpClient {
            config,
            api_key,
            http,
        })
    }

    pub fn config(&self) -> &LlmClientConfig {
        &self.config
    }
}

#[derive(Serialize)]
struct ChatRequest<'a> {
    model: &'a str,
    messages: [ChatMessage<'a>; 2],
}

#[derive(Serialize)]
struct ChatMessage<'a> {
    role: &'a str,
    content: &'a str,
}

impl VerdictClient for HttpClient {
    fn model(&self) -> &str {
        &self.config.model
    }

    fn probe(&self, statement: &str) -> Result<ProbeOutcome, PromptError> {
        let body = ChatRequest {
            model: &self.config.model,
            messages: [
                ChatMessage {
                    role: "system",
                    content: &self.config.system_message,
                },
                ChatMessage {
                    role: "user",
                    content: statement,
                },
            ],
        };
        let mut request = self.http.post(&self.config.endpoint).json(&body);
        if let Some(key) = &self.api_key {
            request = request.bearer_auth(key);
        }
        let response = request
            .send()
            .map_err(|e| PromptError::Transport(e.to_string()))?;
        let status = response.status();
        let text = response
            .text()
            .map_err(|e| PromptError::Transport(e.to_string()))?;
        if !status.is_success() {
            return Err(PromptError::Status {
                status: status.as_u16(),
                body: text.chars().take(500).collect(),
            });
        }
        let content = extract_content(&text)?;
        let verdict = parse_verdict(&content)?;
        Ok(ProbeOutcome {
            verdict,
            raw_response: content,
        })
    }
}

/// Pulls `choices[0].message.content` out of a chat-completion payload.
fn extract_content(body: &str) -> Result<String, PromptError> {
    let value: serde_json::Value = serde_json::from_str(body)
        .map_err(|e| PromptError::MalformedResponse(format!("not JSON: {e}")))?;
    value
        .pointer("/choices/0/message/content")
        .and_then(|v| v.as_str())
        .map(str::to_string)
        .ok_or_else(|| {
            PromptError::MalformedResponse(
                "missing choices[0].message.content".to_string(),
            )
        })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn content_extraction() {
        let body = r#"{"choices":[{"message":{"role":"assistant","content":"True"}}]}"#;
        assert_eq!(extract_content(body).unwrap(), "True");
        assert!(extract_content("{}").is_err());
        assert!(extract_content("not json").is_err());
    }

    #[test]
    fn config_validation() {
        let mut cfg = LlmClientConfig {
            endpoint: "http://localhost/v1".into(),
            model: "m".into(),
            ..LlmClientConfig::default()
        };
        assert!(cfg.validate().is_ok());
        cfg.max_parallel = 0;
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn missing_api_key_env_fails_at_construction() {
        let cfg = LlmClientConfig {
            endpoint: "http://localhost/v1".into(),
            model: "m".into(),
            api_key_env: Some("KG_PROMPT_TEST_UNSET_VAR".into()),
            ..LlmClientConfig::default()
        };
        assert!(matches!(
            HttpClient::new(cfg),
            Err(PromptError::MissingApiKey(_))
        ));
    }

    #[test]
    fn backoff_grows_geometrically() {
        let retry = RetryPolicy::default();
        assert_eq!(retry.backoff(1), Duration::from_millis(250));
        assert_eq!(retry.backoff(2), Duration::from_millis(500));
        assert_eq!(retry.backoff(3), Duration::from_millis(1000));
    }

    #[test]
    fn default_system_message_is_set() {
        assert_eq!(LlmClientConfig::default().system_message, DEFAULT_SYSTEM_MESSAGE);
    }
}
