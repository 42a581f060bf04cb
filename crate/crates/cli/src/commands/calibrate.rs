//! `ftcal calibrate` — joint least squares for the calibration matrix and
//! the attached body's inertial parameters.

use std::fs;
use std::path::{Path, PathBuf};

use ftcal_core::calib::{build_calib_system, solve_calibration, CalibOptions};
use nalgebra::Vector6;

use crate::commands::CommonArgs;
use crate::config::{FileConfig, Settings};
use crate::error::{CliError, Result};
use crate::ingest::{load_all, resolve_items};
use crate::report::{emit, CalibrationReport, OffsetReport, OFFSET_SCHEMA};

#[derive(Debug, clap::Args)]
pub struct CalibrateArgs {
    /// Dataset log files — at least three with pairwise-distinct added-mass
    /// specs; `.meta` sidecars are required
    #[arg(value_name = "LOG", num_args = 1.., required = true)]
    pub files: Vec<PathBuf>,

    /// Offset report produced by `ftcal offset`
    #[arg(long, value_name = "FILE", conflicts_with = "offset")]
    pub offset_report: Option<PathBuf>,

    /// Inline offset: six comma-separated values in raw units
    #[arg(
        long,
        value_name = "O1,..,O6",
        value_delimiter = ',',
        num_args = 1,
        allow_negative_numbers = true
    )]
    pub offset: Option<Vec<f64>>,

    /// Accept an ill-conditioned system instead of failing with exit 6
    #[arg(long)]
    pub force: bool,

    #[command(flatten)]
    pub common: CommonArgs,
}

fn read_offset_report(path: &Path) -> Result<Vector6<f64>> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let report: OffsetReport = serde_json::from_str(&text).map_err(|e| CliError::Parse {
        path: path.to_path_buf(),
        line: e.line(),
        what: e.to_string(),
    })?;
    if report.schema != OFFSET_SCHEMA {
        return Err(CliError::Parse {
            path: path.to_path_buf(),
            line: 1,
            what: format!("expected schema `{OFFSET_SCHEMA}`, got `{}`", report.schema),
        });
    }
    Ok(Vector6::from_column_slice(&report.offset))
}

pub fn run(args: &CalibrateArgs, file_config: Option<&FileConfig>) -> Result<()> {
    let settings = Settings::resolve(file_config, &args.common.overrides())?;
    let offset = match (&args.offset_report, &args.offset) {
        (Some(path), _) => read_offset_report(path)?,
        (None, Some(values)) => {
            if values.len() != 6 {
                return Err(CliError::Usage(format!(
                    "--offset expects 6 comma-separated values, got {}",
                    values.len()
                )));
            }
            Vector6::from_column_slice(values)
        }
        (None, None) => {
            return Err(CliError::Usage(
                "an offset is required: pass --offset-report FILE (from `ftcal offset`) \
                 or --offset O1,..,O6"
                    .into(),
            ))
        }
    };

    let items = resolve_items(&args.files, true)?;
    let loaded = load_all(&items, &settings.ingest, settings.jobs)?;
    let mut warnings = Vec::new();
    let mut datasets = Vec::with_capacity(loaded.len());
    for l in loaded {
        warnings.extend(l.warnings);
        datasets.push(l.dataset);
    }

    let system = build_calib_system(&datasets, &offset, &settings.ingest.gravity)?;
    let options = CalibOptions {
        rank_tolerance: settings.rank_tolerance,
        condition_warning: settings.condition_warning,
        ..CalibOptions::default()
    };
    let estimate = solve_calibration(&system, &options)?;
    if estimate.ill_conditioned && !args.force {
        return Err(CliError::IllConditioned { condition: estimate.theta_condition });
    }
    let forced = estimate.ill_conditioned && args.force;
    if forced {
        warnings.push(format!(
            "ill-conditioned system accepted via --force (condition {:.3e})",
            estimate.theta_condition
        ));
    }

    let report = CalibrationReport::new(&estimate, &offset, &datasets, forced, warnings);
    emit(&report, report.render_text(), args.common.format, args.common.out.as_deref())
}
