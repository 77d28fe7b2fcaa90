//! Deterministic offline verdict source.

use sha2::{Digest, Sha256};

use crate::client::{ProbeOutcome, VerdictClient};
use crate::error::PromptError;

/// Deterministic pseudo-verdict for a statement: 1 with probability
/// `target_rate` under a uniform draw derived from `sha256(seed || statement)`.
///
/// The top 53 bits of the first 8 digest bytes (little-endian) form a uniform
/// value in `[0, 1)`; the verdict is 1 exactly when that value falls below
/// `target_rate`. The same `(seed, statement)` pair always produces the same
/// verdict, across runs and platforms.
pub fn mock_verdict(seed: u64, target_rate: f64, statement: &str) -> u8 {
    let mut hasher = Sha256::new();
    hasher.update(seed.to_le_bytes());
    hasher.update(statement.as_bytes());
    let digest = hasher.finalize();
    let raw = u64::from_le_bytes(digest[..8].try_into().expect("8 bytes"));
    let unit = (raw >> 11) as f64 / (1u64 << 53) as f64;
    u8::from(unit < target_rate)
}

/// Offline [`VerdictClient`] backed by [`mock_verdict`]. Useful for
/// deterministic end-to-end runs and load-free testing.
pub struct MockClient {
    seed: u64,
    target_rate: f64,
    label: String,
}

impl MockClient {
    pub fn new(seed: u64, target_rate: f64) -> Self {
        MockClient {
            seed,
            target_rate,
            label: format!("mock-r{target_rate}-s{seed}"),
        }
    }
}

impl VerdictClient for MockClient {
    fn model(&self) -> &str {
        &self.label
    }

    fn probe(&self, statement: &str) -> Result<ProbeOutcome, PromptError> {
        let verdict = mock_verdict(self.seed, self.target_rate, statement);
        Ok(ProbeOutcome {
            verdict,
            raw_response: if verdict == 1 { "True" } else { "False" }.to_string(),
        })
    }
}
