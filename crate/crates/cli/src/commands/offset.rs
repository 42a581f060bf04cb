//! `ftcal offset` — estimate the raw-side bias from static-pose logs.

use std::path::PathBuf;

use ftcal_core::offset::{estimate_offset, OffsetOptions};

use crate::commands::CommonArgs;
use crate::config::{FileConfig, Settings};
use crate::error::Result;
use crate::ingest::{load_all, resolve_items};
use crate::report::{emit, OffsetReport};

#[derive(Debug, clap::Args)]
pub struct OffsetArgs {
    /// Dataset log files; `.meta` sidecars are optional here (only labels
    /// are used)
    #[arg(value_name = "LOG", num_args = 1.., required = true)]
    pub files: Vec<PathBuf>,

    #[command(flatten)]
    pub common: CommonArgs,
}

pub fn run(args: &OffsetArgs, file_config: Option<&FileConfig>) -> Result<()> {
    let settings = Settings::resolve(file_config, &args.common.overrides())?;
    let items = resolve_items(&args.files, false)?;
    let loaded = load_all(&items, &settings.ingest, settings.jobs)?;

    let mut warnings = Vec::new();
    let mut datasets = Vec::with_capacity(loaded.len());
    for l in loaded {
        warnings.extend(l.warnings);
        datasets.push(l.dataset);
    }

    let options = OffsetOptions {
        span_ratio_threshold: settings.span_ratio_threshold,
        rank_tolerance: settings.rank_tolerance,
        gravity: settings.ingest.gravity,
        ..OffsetOptions::default()
    };
    let summary = estimate_offset(&datasets, &options)?;
    let report = OffsetReport::new(&summary, settings.ingest.gravity.norm, warnings);
    emit(&report, report.render_text(), args.common.format, args.common.out.as_deref())
}
