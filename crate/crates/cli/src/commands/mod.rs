//! Subcommand implementations and the flag set they share.

pub mod calibrate;
pub mod offset;
pub mod synth;
pub mod validate;

use std::path::PathBuf;

use crate::config::Overrides;
use crate::report::Format;

/// Ingestion and solver flags shared by `offset`, `calibrate` and
/// `validate`. Defaults live in [`crate::config::Settings`]; a `--config`
/// file sits between the defaults and these flags.
#[derive(Debug, clap::Args)]
pub struct CommonArgs {
    /// Savitzky–Golay window in samples, odd and >= 5; 0 disables smoothing
    /// [default: 301]
    #[arg(long, value_name = "N")]
    pub sg_window: Option<usize>,

    /// Savitzky–Golay polynomial order [default: 3]
    #[arg(long, value_name = "N")]
    pub sg_order: Option<usize>,

    /// Keep every K-th sample after filtering [default: 1]
    #[arg(long, value_name = "K")]
    pub decimate: Option<usize>,

    /// The accelerometer column already holds the gravity vector; skip the
    /// default specific-force negation
    #[arg(long)]
    pub accel_reports_gravity: bool,

    /// Expected gravity magnitude in m/s^2 [default: 9.80665]
    #[arg(long, value_name = "G")]
    pub gravity_norm: Option<f64>,

    /// Relative half-width of the accepted gravity-norm band; samples beyond
    /// twice this are dropped [default: 0.05]
    #[arg(long, value_name = "FRAC")]
    pub gravity_tolerance: Option<f64>,

    /// sigma3/sigma1 floor for the measurement-span check [default: 1e-6]
    #[arg(long, value_name = "RATIO")]
    pub span_threshold: Option<f64>,

    /// Singular values above sigma1 times this count toward the rank
    /// [default: 1e-10]
    #[arg(long, value_name = "TOL")]
    pub rank_tolerance: Option<f64>,

    /// Condition number above which a calibration counts as ill-conditioned
    /// [default: 1e10]
    #[arg(long, value_name = "COND")]
    pub condition_warning: Option<f64>,

    /// Load up to N dataset files in parallel [default: 1]
    #[arg(long, value_name = "N")]
    pub jobs: Option<usize>,

    /// Stdout rendering of the report
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,

    /// Also write the JSON report to this file
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

impl CommonArgs {
    pub fn overrides(&self) -> Overrides {
        Overrides {
            sg_window: self.sg_window,
            sg_order: self.sg_order,
            decimation: self.decimate,
            accel_reports_gravity: self.accel_reports_gravity,
            gravity_norm: self.gravity_norm,
            gravity_tolerance: self.gravity_tolerance,
            span_ratio_threshold: self.span_threshold,
            rank_tolerance: self.rank_tolerance,
            condition_warning: self.condition_warning,
            jobs: self.jobs,
        }
    }
}
