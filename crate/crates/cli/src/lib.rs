//! Batch front end for the `bangbang` library: one JSON config in, a
//! directory of JSON, CSV and SVG artifacts out.

pub mod config;
pub mod error;
pub mod output;
pub mod plot;
pub mod report;
pub mod tasks;

use std::path::PathBuf;

pub use config::{ExperimentConfig, LoadedConfig, ModelConfig, Overrides, Task};
pub use error::{exit, CliError};
pub use plot::{emit_plots, PlotKind};
pub use report::{Report, TaskResult};
pub use tasks::{run, validate_report, Outcome};

/// Flags shared by every subcommand.
#[derive(Clone, Debug, clap::Args)]
pub struct CommonArgs {
    /// Experiment config (JSON).
    #[arg(long)]
    pub config: PathBuf,
    /// Output directory (default: the config's "out", else ./bangbang-out).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Root seed; overrides the config.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Number of simulated paths; overrides the config.
    #[arg(long)]
    pub paths: Option<usize>,
    /// Print nothing on success.
    #[arg(long)]
    pub quiet: bool,
}

/// Loads, runs and writes; returns the exit status.
pub fn execute(task: Task, args: &CommonArgs) -> Result<i32, CliError> {
    let loaded = LoadedConfig::from_file(&args.config)?;
    let out = args.out.clone().or_else(|| loaded.config.out.clone()).unwrap_or_else(|| PathBuf::from("bangbang-out"));
    let outcome = run(&loaded, task, &Overrides { seed: args.seed, paths: args.paths })?;
    outcome.artifacts.write_to(&out)?;
    let r = &outcome.report;
    for f in &r.failures {
        eprintln!("assertion failed: {f}");
    }
    if !args.quiet {
        println!(
            "{task}: {} ({} file{} in {})",
            if r.pass { "PASS" } else { "FAIL" },
            outcome.artifacts.files.len(),
            if outcome.artifacts.files.len() == 1 { "" } else { "s" },
            out.display()
        );
    }
    Ok(if r.pass { exit::PASS } else { exit::ASSERTION })
}

#[cfg(doctest)]
#[doc = include_str!("../../../book/src/cli.md")]
pub mod chapter5 {}
