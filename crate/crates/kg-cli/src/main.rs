//! `kgprobe` — knowledge-graph probing from the command line.
//!
//! Typical pipeline:
//!
//! ```text
//! kgprobe ingest  --triplets corpus.tsv --output-dir out
//! kgprobe probe   --triplets out/component.tsv --templates templates.json --mock --seed 7
//! kgprobe analyze --triplets out/component.tsv --mock --seed 7
//! kgprobe train   --triplets out/component.tsv --mock --seed 7
//! kgprobe predict --triplets out/component.tsv
//! kgprobe select  --triplets out/component.tsv --templates templates.json \
//!                 --mock --seed 7 --budget 200 --eval-size 50
//! ```
//!
//! Every command reruns byte-identically on the same inputs; wall-clock time
//! only ever appears in the cache's sidecar `.log`.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use kg_cli::commands;
use kg_cli::config::{FileConfig, Overrides, Settings};
use kg_cli::errors::CliError;

#[derive(Parser)]
#[command(
    name = "kgprobe",
    version,
    about = "Probe a language model's knowledge of a knowledge graph, score entities, \
             train a score regressor, and plan probing budgets.",
    after_help = "Exit codes: 0 success, 2 invalid input or configuration, \
                  3 network/probing failure, 4 numeric failure.\n\
                  Flags override the config file; the config file overrides built-in defaults."
)]
struct Cli {
    #[command(flatten)]
    flags: Flags,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a triplet file, keep the largest connected component, and write
    /// graph statistics.
    Ingest,
    /// Judge every statement of the graph with the model (or offline mock),
    /// filling the resumable verdict cache.
    Probe,
    /// Aggregate cached verdicts into entity scores, neighborhood agreement,
    /// histograms, and centrality curves.
    Analyze,
    /// Fit the score regressor to cached verdicts and save a checkpoint.
    Train,
    /// Score every entity with a saved checkpoint.
    Predict,
    /// Plan a probing budget end to end: initial sample, probe, train, rank,
    /// and expand — with a random-expansion control sharing the initial set.
    Select,
    /// Rewrite the verdict cache keeping only the latest record per
    /// statement.
    CompactCache,
}

/// One flat set of options, all usable before or after the subcommand.
/// Irrelevant options are ignored by commands that don't use them.
#[derive(Args)]
struct Flags {
    /// JSON config file supplying any of these options.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Tab-separated triplet file: head, relation, tail, optional date.
    #[arg(long, global = true, value_name = "PATH")]
    triplets: Option<PathBuf>,

    /// JSON template map: relation -> statement pattern.
    #[arg(long, global = true, value_name = "PATH")]
    templates: Option<PathBuf>,

    /// Verdict cache file (default: <output-dir>/cache.jsonl).
    #[arg(long, global = true, value_name = "PATH")]
    cache: Option<PathBuf>,

    /// External per-entity feature table (CSV: entity,x0,x1,...).
    #[arg(long, global = true, value_name = "PATH")]
    embeddings: Option<PathBuf>,

    /// Model checkpoint path (default: <output-dir>/model.json).
    #[arg(long, global = true, value_name = "PATH")]
    checkpoint: Option<PathBuf>,

    /// Directory for all output files.
    #[arg(long, global = true, value_name = "DIR")]
    output_dir: Option<PathBuf>,

    /// Triplet file column order: "hrt" or "htr".
    #[arg(long, global = true, value_name = "ORDER")]
    column_order: Option<String>,

    /// Component extraction mode: "weak" or "strong".
    #[arg(long, global = true, value_name = "MODE")]
    component_mode: Option<String>,

    /// Use dated statement phrasing for timestamped facts.
    #[arg(long, global = true)]
    temporal: bool,

    /// Chat-completion endpoint URL.
    #[arg(long, global = true, value_name = "URL")]
    endpoint: Option<String>,

    /// Model name sent to the endpoint (and recorded with each verdict).
    #[arg(long, global = true, value_name = "NAME")]
    model: Option<String>,

    /// Environment variable holding the API key.
    #[arg(long, global = true, value_name = "VAR")]
    api_key_env: Option<String>,

    /// Concurrent probe requests.
    #[arg(long, global = true, value_name = "N")]
    max_parallel: Option<usize>,

    /// Request-rate ceiling (requests per second).
    #[arg(long, global = true, value_name = "RATE")]
    requests_per_second: Option<f64>,

    /// Attempts per statement before recording a failure.
    #[arg(long, global = true, value_name = "N")]
    max_attempts: Option<usize>,

    /// HTTP timeout in seconds.
    #[arg(long, global = true, value_name = "SECS")]
    timeout_secs: Option<u64>,

    /// Use deterministic offline verdicts instead of the endpoint.
    #[arg(long, global = true)]
    mock: bool,

    /// Probability a mock verdict is True (default 0.5).
    #[arg(long, global = true, value_name = "RATE")]
    mock_rate: Option<f64>,

    /// Seed for everything seeded: mock verdicts, splits, training,
    /// selection.
    #[arg(long, global = true, value_name = "SEED")]
    seed: Option<u64>,

    /// Bins in score histograms (default 21).
    #[arg(long, global = true, value_name = "N")]
    histogram_bins: Option<usize>,

    /// Bins in property-vs-score curves (default 10).
    #[arg(long, global = true, value_name = "N")]
    curve_bins: Option<usize>,

    /// Regressor architecture: gnn, gnn-mean, gnn-gcn, gnn-sage, or mlp.
    #[arg(long, global = true, value_name = "ARCH")]
    arch: Option<String>,

    /// Output squash: clamp, sigmoid, or linear.
    #[arg(long, global = true, value_name = "SQUASH")]
    squash: Option<String>,

    /// Trainable embedding width when no external features are given.
    #[arg(long, global = true, value_name = "DIM")]
    embedding_dim: Option<usize>,

    /// Hidden layer widths, comma-separated (default 32,32).
    #[arg(long, global = true, value_name = "DIMS", value_delimiter = ',')]
    hidden_dims: Option<Vec<usize>>,

    /// Learning rate.
    #[arg(long, global = true, value_name = "LR")]
    learning_rate: Option<f64>,

    /// Training epoch budget.
    #[arg(long, global = true, value_name = "N")]
    epochs: Option<usize>,

    /// Fraction of labelled entities used for gradient steps.
    #[arg(long, global = true, value_name = "FRACTION")]
    train_fraction: Option<f64>,

    /// Epochs without validation improvement before stopping.
    #[arg(long, global = true, value_name = "N")]
    patience: Option<usize>,

    /// L2 penalty on weights and embeddings.
    #[arg(long, global = true, value_name = "LAMBDA")]
    weight_decay: Option<f64>,

    /// Optimizer: adam or sgd.
    #[arg(long, global = true, value_name = "OPT")]
    optimizer: Option<String>,

    /// Total probing budget for select (initial set plus expansion).
    #[arg(long, global = true, value_name = "N")]
    budget: Option<usize>,

    /// Triplets held out for evaluation before selection.
    #[arg(long, global = true, value_name = "N")]
    eval_size: Option<usize>,

    /// Let the fine-tuning sets overlap the evaluation set.
    #[arg(long, global = true)]
    allow_eval_overlap: bool,

    /// Rank the most knowledgeable entities first instead (diagnostic).
    #[arg(long, global = true)]
    invert_ranking: bool,

    /// Emit evaluation statements without corrupted negatives.
    #[arg(long, global = true)]
    no_corrupt_eval: bool,
}

impl Flags {
    fn into_overrides(self) -> (Option<PathBuf>, Overrides) {
        let config = self.config;
        let overrides = Overrides {
            triplets: self.triplets,
            templates: self.templates,
            cache: self.cache,
            embeddings: self.embeddings,
            checkpoint: self.checkpoint,
            output_dir: self.output_dir,
            column_order: self.column_order,
            component_mode: self.component_mode,
            temporal: self.temporal,
            endpoint: self.endpoint,
            model: self.model,
            api_key_env: self.api_key_env,
            max_parallel: self.max_parallel,
            requests_per_second: self.requests_per_second,
            max_attempts: self.max_attempts,
            timeout_secs: self.timeout_secs,
            mock: self.mock,
            mock_rate: self.mock_rate,
            seed: self.seed,
            histogram_bins: self.histogram_bins,
            curve_bins: self.curve_bins,
            arch: self.arch,
            squash: self.squash,
            embedding_dim: self.embedding_dim,
            hidden_dims: self.hidden_dims,
            learning_rate: self.learning_rate,
            epochs: self.epochs,
            train_fraction: self.train_fraction,
            patience: self.patience,
            weight_decay: self.weight_decay,
            optimizer: self.optimizer,
            budget: self.budget,
            eval_size: self.eval_size,
            allow_eval_overlap: self.allow_eval_overlap,
            invert_ranking: self.invert_ranking,
            no_corrupt_eval: self.no_corrupt_eval,
        };
        (config, overrides)
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let (config_path, overrides) = cli.flags.into_overrides();
    let file = match config_path {
        Some(path) => FileConfig::load(&path)?,
        None => FileConfig::default(),
    };
    let settings = Settings::resolve(file, overrides)?;

    match cli.command {
        Command::Ingest => commands::ingest::run(&settings),
        Command::Probe => commands::probe::run(&settings),
        Command::Analyze => commands::analyze::run(&settings),
        Command::Train => commands::train::run(&settings),
        Command::Predict => commands::predict::run(&settings),
        Command::Select => commands::select::run(&settings),
        Command::CompactCache => commands::compact::run(&settings),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            // i32 -> u8 is safe: codes are 2..=4.
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
