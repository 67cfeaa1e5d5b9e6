//! Command-line front end for `prosodyne`.
//!
//! `compare` scores one reference/prediction pair, `eval-corpus` scores a
//! manifest of pairs in parallel, `filter` applies dataset curation rules
//! and `attn-check` runs the attention diagnostics.

pub mod commands;
pub mod config;
mod error;
pub mod output;

use clap::{Parser, Subcommand};

pub use config::{Format, RunConfig};
pub use error::CliError;

#[derive(Debug, Parser)]
#[command(name = "prosodyne", version, about = "Prosody metrics, dataset filtering and attention diagnostics")]
pub struct Cli {
    #[command(flatten)]
    pub global: config::GlobalFlags,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Score a predicted WAV against its reference.
    Compare(commands::compare::CompareArgs),
    /// Score every utterance of a corpus manifest.
    EvalCorpus(commands::corpus::EvalCorpusArgs),
    /// Apply dataset filters to a metadata manifest.
    Filter(commands::filter::FilterArgs),
    /// Verify attention gradients, monotonicity and source isolation.
    AttnCheck(commands::attn::AttnCheckArgs),
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    let config = RunConfig::resolve(&cli.global)?;
    match &cli.command {
        Command::Compare(args) => commands::compare::run(args, config),
        Command::EvalCorpus(args) => commands::corpus::run(args, config),
        Command::Filter(args) => commands::filter::run(args, config),
        Command::AttnCheck(args) => commands::attn::run(args, config),
    }
}
