//! CLI failure classification and process exit codes.
//!
//! Every failure is sorted into one of three classes so scripts can react
//! without parsing messages:
//!
//! | code | class   | examples                                              |
//! |------|---------|-------------------------------------------------------|
//! | 2    | input   | missing files, parse errors, bad flags, empty graphs  |
//! | 3    | network | unreachable endpoint, HTTP errors, unusable responses |
//! | 4    | numeric | divergent training, non-convergent power iterations   |
//!
//! (Exit code 1 is left to panics and 2 doubles as clap's own usage-error
//! code, which is the same class of mistake.)

use std::fmt;

use kg_core::CoreError;
use kg_gnn::GnnError;
use kg_prompt::PromptError;
use kg_score::ScoreError;
use kg_select::SelectError;

pub const EXIT_INPUT: i32 = 2;
pub const EXIT_NETWORK: i32 = 3;
pub const EXIT_NUMERIC: i32 = 4;

/// A classified CLI failure. The class decides the process exit code; the
/// message is printed to stderr as-is.
#[derive(Debug)]
pub enum CliError {
    /// Bad or missing input: files, flags, configuration, data shape.
    Input(String),
    /// The probing endpoint could not produce verdicts.
    Network(String),
    /// A computation failed numerically.
    Numeric(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => EXIT_INPUT,
            CliError::Network(_) => EXIT_NETWORK,
            CliError::Numeric(_) => EXIT_NUMERIC,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(m) => write!(f, "{m}"),
            CliError::Network(m) => write!(f, "network: {m}"),
            CliError::Numeric(m) => write!(f, "numeric: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

/// Shorthand for input-class errors built from formatted strings.
pub fn input(message: impl Into<String>) -> CliError {
    CliError::Input(message.into())
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::Convergence { .. } | CoreError::KatzAlpha { .. } => {
                CliError::Numeric(e.to_string())
            }
            other => CliError::Input(other.to_string()),
        }
    }
}

impl From<PromptError> for CliError {
    fn from(e: PromptError) -> Self {
        match e {
            PromptError::Transport(_)
            | PromptError::Status { .. }
            | PromptError::MalformedResponse(_)
            | PromptError::UnparseableVerdict(_) => CliError::Network(e.to_string()),
            other => CliError::Input(other.to_string()),
        }
    }
}

impl From<ScoreError> for CliError {
    fn from(e: ScoreError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<GnnError> for CliError {
    fn from(e: GnnError) -> Self {
        match e {
            GnnError::Diverged { .. } => CliError::Numeric(e.to_string()),
            other => CliError::Input(other.to_string()),
        }
    }
}

impl From<SelectError> for CliError {
    fn from(e: SelectError) -> Self {
        match e {
            SelectError::Prompt(p) => p.into(),
            other => CliError::Input(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Input(e.to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classes_map_to_distinct_exit_codes() {
        let codes = [
            input("x").exit_code(),
            CliError::Network("x".into()).exit_code(),
            CliError::Numeric("x".into()).exit_code(),
        ];
        assert_eq!(codes, [2, 3, 4]);
        assert!(codes.iter().all(|&c| c != 0 && c != 1));
    }

    #[test]
    fn network_prompt_errors_are_network_class() {
        let e: CliError = PromptError::Transport("connection refused".into()).into();
        assert_eq!(e.exit_code(), EXIT_NETWORK);
        let e: CliError = PromptError::UnparseableVerdict("maybe?".into()).into();
        assert_eq!(e.exit_code(), EXIT_NETWORK);
    }

    #[test]
    fn missing_template_is_input_class_not_network() {
        let e: CliError = PromptError::MissingTemplate("visited".into()).into();
        assert_eq!(e.exit_code(), EXIT_INPUT);
    }

    #[test]
    fn numeric_failures_are_numeric_class() {
        let e: CliError = CoreError::Convergence {
            what: "pagerank",
            max_iterations: 10,
        }
        .into();
        assert_eq!(e.exit_code(), EXIT_NUMERIC);
        let e: CliError = GnnError::Diverged { epoch: 3, loss: f64::NAN }.into();
        assert_eq!(e.exit_code(), EXIT_NUMERIC);
    }

    #[test]
    fn select_errors_unwrap_their_prompt_cause() {
        let e: CliError =
            SelectError::Prompt(PromptError::Status { status: 500, body: "oops".into() }).into();
        assert_eq!(e.exit_code(), EXIT_NETWORK);
        let e: CliError = SelectError::BudgetTooSmall { budget: 2, min: 5 }.into();
        assert_eq!(e.exit_code(), EXIT_INPUT);
    }
}
