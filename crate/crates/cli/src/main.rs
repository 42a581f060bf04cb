//! `ftcal` — in-situ force–torque sensor calibration from the command line.
//!
//! The pipeline is four subcommands chained through files:
//!
//! ```text
//! ftcal synth --preset paper --out-dir logs        # or record real logs
//! ftcal offset logs/dataset1.csv … --out offset.json
//! ftcal calibrate logs/dataset1.csv … --offset-report offset.json --out cal.json
//! ftcal validate --calibration cal.json logs/dataset5.csv … --out val.json
//! ```
//!
//! Every report is JSON (see `schemas/`); `--format text` renders the same
//! data as tables. Exit codes are documented in [`error`].

// `!(x > floor)` is used instead of `x <= floor` in the numeric gates: the
// negated form also fails NaN into the error branch.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;
mod error;
mod ingest;
mod report;

use clap::{Parser, Subcommand};
use std::path::PathBuf;

use commands::{
    calibrate::CalibrateArgs, offset::OffsetArgs, synth::SynthArgs, validate::ValidateArgs,
};

#[derive(Debug, Parser)]
#[command(
    name = "ftcal",
    version,
    about = "In-situ calibration of six-axis force-torque sensors",
    propagate_version = true
)]
struct Cli {
    /// Defaults file of `key=value` lines (sg_window, decimation, jobs, …);
    /// explicit flags take precedence
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate synthetic logs with a known ground truth
    Synth(SynthArgs),
    /// Estimate the raw-side offset from static-pose logs
    Offset(OffsetArgs),
    /// Estimate the calibration matrix and body inertia from logs with
    /// at least three distinct added loads
    Calibrate(CalibrateArgs),
    /// Check a calibration geometrically against held-out logs
    Validate(ValidateArgs),
}

fn run(cli: &Cli) -> error::Result<()> {
    let file_config = cli.config.as_deref().map(config::read_config).transpose()?;
    match &cli.command {
        Command::Synth(args) => commands::synth::run(args),
        Command::Offset(args) => commands::offset::run(args, file_config.as_ref()),
        Command::Calibrate(args) => commands::calibrate::run(args, file_config.as_ref()),
        Command::Validate(args) => commands::validate::run(args, file_config.as_ref()),
    }
}

fn main() {
    let cli = Cli::parse();
    if let Err(err) = run(&cli) {
        eprintln!("error: {err}");
        std::process::exit(err.exit_code());
    }
}
