//! Run configuration: a JSON file merged with command-line flags.
//!
//! Every knob can live in the config file; every knob has a flag; the flag
//! wins. [`Settings`] is the fully resolved result with defaults filled in,
//! so command code never sees an `Option` for something that has a default.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use kg_core::{ColumnOrder, ComponentMode};
use kg_gnn::{Aggregator, Arch, Optimizer, Squash, TrainConfig};
use kg_prompt::{LlmClientConfig, RetryPolicy};

use crate::errors::{input, CliError};

/// Config file format version this build reads.
pub const CONFIG_VERSION: u32 = 1;

/// Fewest scored entities `train` and `select` accept: below this a split
/// into train and validation sides stops being meaningful.
pub const MIN_SCORED_ENTITIES: usize = 10;

/// The config file: every field optional, unknown fields rejected so typos
/// fail loudly instead of silently using a default.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FileConfig {
    pub version: Option<u32>,

    // Paths.
    pub triplets: Option<PathBuf>,
    pub templates: Option<PathBuf>,
    pub cache: Option<PathBuf>,
    pub embeddings: Option<PathBuf>,
    pub checkpoint: Option<PathBuf>,
    pub output_dir: Option<PathBuf>,

    // Parsing and graph handling.
    pub column_order: Option<String>,
    pub component_mode: Option<String>,
    pub temporal: Option<bool>,

    // Probing endpoint.
    pub endpoint: Option<String>,
    pub model: Option<String>,
    pub api_key_env: Option<String>,
    pub max_parallel: Option<usize>,
    pub requests_per_second: Option<f64>,
    pub max_attempts: Option<usize>,
    pub initial_backoff_ms: Option<u64>,
    pub backoff_multiplier: Option<f64>,
    pub system_message: Option<String>,
    pub timeout_secs: Option<u64>,

    // Offline mock verdicts.
    pub mock: Option<bool>,
    pub mock_rate: Option<f64>,

    pub seed: Option<u64>,

    // Analysis.
    pub histogram_bins: Option<usize>,
    pub curve_bins: Option<usize>,

    // Regressor.
    pub arch: Option<String>,
    pub squash: Option<String>,
    pub embedding_dim: Option<usize>,
    pub hidden_dims: Option<Vec<usize>>,
    pub learning_rate: Option<f64>,
    pub epochs: Option<usize>,
    pub train_fraction: Option<f64>,
    pub patience: Option<usize>,
    pub weight_decay: Option<f64>,
    pub optimizer: Option<String>,

    // Selection.
    pub budget: Option<usize>,
    pub eval_size: Option<usize>,
    pub allow_eval_overlap: Option<bool>,
    pub invert_ranking: Option<bool>,
    pub corrupt_eval: Option<bool>,
}

impl FileConfig {
    /// Reads and validates a config file.
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| input(format!("cannot read config {}: {e}", path.display())))?;
        let config: FileConfig = serde_json::from_str(&text)
            .map_err(|e| input(format!("config {}: {e}", path.display())))?;
        if let Some(v) = config.version {
            if v != CONFIG_VERSION {
                return Err(input(format!(
                    "config {} has version {v}, this build reads version {CONFIG_VERSION}",
                    path.display()
                )));
            }
        }
        Ok(config)
    }
}

/// Command-line values that override the config file. Mirrors [`FileConfig`]
/// field for field; `None` means the flag was not given.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub triplets: Option<PathBuf>,
    pub templates: Option<PathBuf>,
    pub cache: Option<PathBuf>,
    pub embeddings: Option<PathBuf>,
    pub checkpoint: Option<PathBuf>,
    pub output_dir: Option<PathBuf>,
    pub column_order: Option<String>,
    pub component_mode: Option<String>,
    pub temporal: bool,
    pub endpoint: Option<String>,
    pub model: Option<String>,
    pub api_key_env: Option<String>,
    pub max_parallel: Option<usize>,
    pub requests_per_second: Option<f64>,
    pub max_attempts: Option<usize>,
    pub timeout_secs: Option<u64>,
    pub mock: bool,
    pub mock_rate: Option<f64>,
    pub seed: Option<u64>,
    pub histogram_bins: Option<usize>,
    pub curve_bins: Option<usize>,
    pub arch: Option<String>,
    pub squash: Option<String>,
    pub embedding_dim: Option<usize>,
    pub hidden_dims: Option<Vec<usize>>,
    pub learning_rate: Option<f64>,
    pub epochs: Option<usize>,
    pub train_fraction: Option<f64>,
    pub patience: Option<usize>,
    pub weight_decay: Option<f64>,
    pub optimizer: Option<String>,
    pub budget: Option<usize>,
    pub eval_size: Option<usize>,
    pub allow_eval_overlap: bool,
    pub invert_ranking: bool,
    pub no_corrupt_eval: bool,
}

/// Fully resolved settings: flag beats config beats default.
#[derive(Debug, Clone)]
pub struct Settings {
    pub triplets: Option<PathBuf>,
    pub templates: Option<PathBuf>,
    pub cache: PathBuf,
    pub embeddings: Option<PathBuf>,
    pub checkpoint: PathBuf,
    pub output_dir: PathBuf,
    pub column_order: ColumnOrder,
    pub component_mode: ComponentMode,
    pub temporal: bool,
    pub client: LlmClientConfig,
    pub mock: bool,
    pub mock_rate: f64,
    pub seed: u64,
    pub histogram_bins: usize,
    pub curve_bins: usize,
    pub arch: Arch,
    pub squash: Squash,
    pub embedding_dim: usize,
    pub hidden_dims: Vec<usize>,
    pub train: TrainConfig,
    pub budget: Option<usize>,
    pub eval_size: usize,
    pub allow_eval_overlap: bool,
    pub invert_ranking: bool,
    pub corrupt_eval: bool,
}

impl Settings {
    /// Merges flags over a config file over built-in defaults.
    pub fn resolve(file: FileConfig, flags: Overrides) -> Result<Settings, CliError> {
        let output_dir = flags
            .output_dir
            .or(file.output_dir)
            .unwrap_or_else(|| PathBuf::from("out"));

        let column_order = parse_field::<ColumnOrder>(
            flags.column_order.or(file.column_order),
            "column order",
            ColumnOrder::HeadRelationTail,
        )?;
        let component_mode = match flags
            .component_mode
            .or(file.component_mode)
            .as_deref()
        {
            None | Some("weak") => ComponentMode::Weak,
            Some("strong") => ComponentMode::Strong,
            Some(other) => {
                return Err(input(format!(
                    "unknown component mode {other:?} (expected \"weak\" or \"strong\")"
                )))
            }
        };

        let retry_default = RetryPolicy::default();
        let client = LlmClientConfig {
            endpoint: flags.endpoint.or(file.endpoint).unwrap_or_default(),
            model: flags.model.or(file.model).unwrap_or_default(),
            api_key_env: flags.api_key_env.or(file.api_key_env),
            max_parallel: flags.max_parallel.or(file.max_parallel).unwrap_or(4),
            requests_per_second: flags
                .requests_per_second
                .or(file.requests_per_second)
                .unwrap_or(4.0),
            retry: RetryPolicy {
                max_attempts: flags
                    .max_attempts
                    .or(file.max_attempts)
                    .unwrap_or(retry_default.max_attempts),
                initial_backoff_ms: file
                    .initial_backoff_ms
                    .unwrap_or(retry_default.initial_backoff_ms),
                backoff_multiplier: file
                    .backoff_multiplier
                    .unwrap_or(retry_default.backoff_multiplier),
            },
            system_message: file
                .system_message
                .unwrap_or_else(|| LlmClientConfig::default().system_message),
            timeout_secs: flags.timeout_secs.or(file.timeout_secs).unwrap_or(60),
        };

        let arch = parse_field::<Arch>(
            flags.arch.or(file.arch),
            "arch",
            Arch::Gnn(Aggregator::MeanSelf),
        )?;
        let squash =
            parse_field::<Squash>(flags.squash.or(file.squash), "squash", Squash::Clamp)?;
        let optimizer = parse_field::<Optimizer>(
            flags.optimizer.or(file.optimizer),
            "optimizer",
            Optimizer::default_adam(),
        )?;

        let seed = flags.seed.or(file.seed).unwrap_or(0);
        let train_defaults = TrainConfig::default();
        let train = TrainConfig {
            learning_rate: flags
                .learning_rate
                .or(file.learning_rate)
                .unwrap_or(train_defaults.learning_rate),
            epochs: flags.epochs.or(file.epochs).unwrap_or(train_defaults.epochs),
            train_fraction: flags
                .train_fraction
                .or(file.train_fraction)
                .unwrap_or(train_defaults.train_fraction),
            patience: flags
                .patience
                .or(file.patience)
                .unwrap_or(train_defaults.patience),
            weight_decay: flags
                .weight_decay
                .or(file.weight_decay)
                .unwrap_or(train_defaults.weight_decay),
            optimizer,
            seed,
        };

        let cache = flags
            .cache
            .or(file.cache)
            .unwrap_or_else(|| output_dir.join("cache.jsonl"));
        let checkpoint = flags
            .checkpoint
            .or(file.checkpoint)
            .unwrap_or_else(|| output_dir.join("model.json"));

        let mock_rate = flags.mock_rate.or(file.mock_rate).unwrap_or(0.5);
        if !(0.0..=1.0).contains(&mock_rate) {
            return Err(input(format!("mock rate {mock_rate} is outside [0, 1]")));
        }

        Ok(Settings {
            triplets: flags.triplets.or(file.triplets),
            templates: flags.templates.or(file.templates),
            cache,
            embeddings: flags.embeddings.or(file.embeddings),
            checkpoint,
            output_dir,
            column_order,
            component_mode,
            temporal: flags.temporal || file.temporal.unwrap_or(false),
            client,
            mock: flags.mock || file.mock.unwrap_or(false),
            mock_rate,
            seed,
            histogram_bins: flags
                .histogram_bins
                .or(file.histogram_bins)
                .unwrap_or(kg_score::DEFAULT_BINS),
            curve_bins: flags.curve_bins.or(file.curve_bins).unwrap_or(10),
            arch,
            squash,
            embedding_dim: flags.embedding_dim.or(file.embedding_dim).unwrap_or(32),
            hidden_dims: flags
                .hidden_dims
                .or(file.hidden_dims)
                .unwrap_or_else(|| vec![32, 32]),
            train,
            budget: flags.budget.or(file.budget),
            eval_size: flags.eval_size.or(file.eval_size).unwrap_or(0),
            allow_eval_overlap: flags.allow_eval_overlap
                || file.allow_eval_overlap.unwrap_or(false),
            invert_ranking: flags.invert_ranking || file.invert_ranking.unwrap_or(false),
            corrupt_eval: if flags.no_corrupt_eval {
                false
            } else {
                file.corrupt_eval.unwrap_or(true)
            },
        })
    }
}

fn parse_field<T: FromStr>(
    raw: Option<String>,
    what: &str,
    default: T,
) -> Result<T, CliError>
where
    T::Err: std::fmt::Display,
{
    match raw {
        None => Ok(default),
        Some(s) => s
            .parse()
            .map_err(|e| input(format!("invalid {what} {s:?}: {e}"))),
    }
}
