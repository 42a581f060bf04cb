//! Shared run configuration: built-in defaults, overridden by an optional
//! `key=value` config file, overridden in turn by explicit CLI flags.
//! Everything is validated before any computation starts.

use std::fs;
use std::path::{Path, PathBuf};

use ftcal_core::subspace::DEFAULT_SPAN_RATIO_THRESHOLD;
use ftcal_core::GravityBand;

use crate::error::{CliError, Result};
use crate::ingest::{IngestConfig, Smoothing};

/// Parsed config file: `(line, key, value)` triples in file order. Comments
/// (`#`) and blank lines are skipped; keys are validated on application so
/// the error can cite the line.
#[derive(Debug, Clone)]
pub struct FileConfig {
    pub path: PathBuf,
    pub entries: Vec<(usize, String, String)>,
}

pub fn read_config(path: &Path) -> Result<FileConfig> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let mut entries = Vec::new();
    for (index, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            CliError::Config(format!(
                "{}:{}: expected `key=value`, got `{line}`",
                path.display(),
                index + 1
            ))
        })?;
        entries.push((index + 1, key.trim().to_string(), value.trim().to_string()));
    }
    Ok(FileConfig { path: path.to_path_buf(), entries })
}

/// Flag-level overrides; `None` means "not given on the command line".
#[derive(Debug, Clone, Copy, Default)]
pub struct Overrides {
    pub sg_window: Option<usize>,
    pub sg_order: Option<usize>,
    pub decimation: Option<usize>,
    /// `--accel-reports-gravity`: skip the specific-force negation.
    pub accel_reports_gravity: bool,
    pub gravity_norm: Option<f64>,
    pub gravity_tolerance: Option<f64>,
    pub span_ratio_threshold: Option<f64>,
    pub rank_tolerance: Option<f64>,
    pub condition_warning: Option<f64>,
    pub jobs: Option<usize>,
}

/// Fully resolved options shared by the pipeline commands.
#[derive(Debug, Clone, PartialEq)]
pub struct Settings {
    pub ingest: IngestConfig,
    pub span_ratio_threshold: f64,
    pub rank_tolerance: f64,
    pub condition_warning: f64,
    pub jobs: usize,
}

impl Default for Settings {
    fn default() -> Self {
        Self {
            ingest: IngestConfig::default(),
            span_ratio_threshold: DEFAULT_SPAN_RATIO_THRESHOLD,
            rank_tolerance: 1e-10,
            condition_warning: 1e10,
            jobs: 1,
        }
    }
}

impl Settings {
    pub fn resolve(file: Option<&FileConfig>, flags: &Overrides) -> Result<Self> {
        let mut s = Self::default();
        // Window/order are tracked as plain integers so a file and a flag can
        // each adjust one of them; window 0 means "no smoothing".
        let (mut window, mut order) = match s.ingest.smoothing {
            Some(Smoothing { window, order }) => (window, order),
            None => (0, 3),
        };

        if let Some(config) = file {
            for (line, key, value) in &config.entries {
                let bad = |what: String| {
                    CliError::Config(format!("{}:{line}: {what}", config.path.display()))
                };
                let invalid = |k: &str, v: &str| bad(format!("{k}: invalid value `{v}`"));
                match key.as_str() {
                    "sg_window" => window = value.parse().map_err(|_| invalid(key, value))?,
                    "sg_order" => order = value.parse().map_err(|_| invalid(key, value))?,
                    "decimation" => {
                        s.ingest.decimation = value.parse().map_err(|_| invalid(key, value))?
                    }
                    "accel_is_specific_force" => {
                        s.ingest.accel_is_specific_force = match value.as_str() {
                            "true" => true,
                            "false" => false,
                            _ => return Err(invalid(key, value)),
                        }
                    }
                    "gravity_norm" => {
                        s.ingest.gravity.norm = value.parse().map_err(|_| invalid(key, value))?
                    }
                    "gravity_tolerance" => {
                        s.ingest.gravity.tolerance =
                            value.parse().map_err(|_| invalid(key, value))?
                    }
                    "span_ratio_threshold" => {
                        s.span_ratio_threshold = value.parse().map_err(|_| invalid(key, value))?
                    }
                    "rank_tolerance" => {
                        s.rank_tolerance = value.parse().map_err(|_| invalid(key, value))?
                    }
                    "condition_warning" => {
                        s.condition_warning = value.parse().map_err(|_| invalid(key, value))?
                    }
                    "jobs" => s.jobs = value.parse().map_err(|_| invalid(key, value))?,
                    other => return Err(bad(format!("unknown key `{other}`"))),
                }
            }
        }

        if let Some(w) = flags.sg_window {
            window = w;
        }
        if let Some(o) = flags.sg_order {
            order = o;
        }
        if let Some(d) = flags.decimation {
            s.ingest.decimation = d;
        }
        if flags.accel_reports_gravity {
            s.ingest.accel_is_specific_force = false;
        }
        if let Some(g) = flags.gravity_norm {
            s.ingest.gravity = GravityBand::new(g, s.ingest.gravity.tolerance);
        }
        if let Some(t) = flags.gravity_tolerance {
            s.ingest.gravity = GravityBand::new(s.ingest.gravity.norm, t);
        }
        if let Some(v) = flags.span_ratio_threshold {
            s.span_ratio_threshold = v;
        }
        if let Some(v) = flags.rank_tolerance {
            s.rank_tolerance = v;
        }
        if let Some(v) = flags.condition_warning {
            s.condition_warning = v;
        }
        if let Some(j) = flags.jobs {
            s.jobs = j;
        }

        s.ingest.smoothing = (window != 0).then_some(Smoothing { window, order });
        s.ingest.validate()?;
        if !(s.span_ratio_threshold > 0.0)
            || !(s.rank_tolerance > 0.0)
            || !(s.condition_warning > 0.0)
        {
            return Err(CliError::Config("thresholds must be positive".into()));
        }
        if s.jobs == 0 {
            return Err(CliError::Config("jobs must be at least 1".into()));
        }
        Ok(s)
    }
}

// ── tests ────────────────────────────────────────────────────────────────
