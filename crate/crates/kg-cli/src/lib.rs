//! Library behind the `kgprobe` binary: configuration resolution, file
//! plumbing, failure classification, and the subcommand implementations.
//!
//! The binary in `main.rs` only parses flags and dispatches here, so
//! everything observable — output files, error classes, determinism — can be
//! exercised as a library too.

pub mod commands;
pub mod config;
pub mod errors;
pub mod io;

pub use config::{FileConfig, Overrides, Settings, CONFIG_VERSION, MIN_SCORED_ENTITIES};
pub use errors::{input, CliError, EXIT_INPUT, EXIT_NETWORK, EXIT_NUMERIC};
