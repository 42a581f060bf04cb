//! `ftcal validate` — geometric validation of a calibration against
//! held-out datasets: sphericity of the calibrated forces and recovery of
//! the known added loads.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use ftcal_core::geometry::validation_report;
use ftcal_core::model::DEFAULT_MASS_FLOOR;
use ftcal_core::subspace::{centroid, svd_basis};
use ftcal_core::{CalibrationModel, Dataset};
use nalgebra::Vector6;

use crate::commands::CommonArgs;
use crate::config::{FileConfig, Settings};
use crate::error::{CliError, Result};
use crate::ingest::{load_all, resolve_items};
use crate::report::{
    emit, matrix_from_rows, CalibrationReport, ValidationReport, CALIBRATION_SCHEMA,
};

#[derive(Debug, clap::Args)]
pub struct ValidateArgs {
    /// Calibration report produced by `ftcal calibrate`
    #[arg(long, value_name = "FILE")]
    pub calibration: PathBuf,

    /// Held-out dataset log files; `.meta` sidecars are required
    #[arg(value_name = "LOG", num_args = 1.., required = true)]
    pub files: Vec<PathBuf>,

    /// Label of the baseline dataset whose inertial estimate is subtracted
    /// from the others (default: the unique zero-mass dataset)
    #[arg(long, value_name = "LABEL")]
    pub baseline: Option<String>,

    /// Write per-dataset point clouds here for external plotting:
    /// `<label>_forces.csv` (calibrated forces) and `<label>_projected.csv`
    /// (raw readings in the 3-D measurement-subspace coordinates)
    #[arg(long, value_name = "DIR")]
    pub points_dir: Option<PathBuf>,

    #[command(flatten)]
    pub common: CommonArgs,
}

fn read_calibration_report(path: &Path) -> Result<CalibrationReport> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let report: CalibrationReport = serde_json::from_str(&text).map_err(|e| CliError::Parse {
        path: path.to_path_buf(),
        line: e.line(),
        what: e.to_string(),
    })?;
    if report.schema != CALIBRATION_SCHEMA {
        return Err(CliError::Parse {
            path: path.to_path_buf(),
            line: 1,
            what: format!("expected schema `{CALIBRATION_SCHEMA}`, got `{}`", report.schema),
        });
    }
    Ok(report)
}

fn baseline_index(datasets: &[Dataset], requested: Option<&str>) -> Result<usize> {
    if let Some(label) = requested {
        return datasets.iter().position(|d| d.label() == label).ok_or_else(|| {
            CliError::Usage(format!(
                "--baseline `{label}` does not match any dataset (labels: {})",
                datasets.iter().map(Dataset::label).collect::<Vec<_>>().join(", ")
            ))
        });
    }
    let zero_mass: Vec<usize> = datasets
        .iter()
        .enumerate()
        .filter(|(_, d)| d.added_mass().mass() <= DEFAULT_MASS_FLOOR)
        .map(|(i, _)| i)
        .collect();
    match zero_mass.as_slice() {
        [index] => Ok(*index),
        [] => Err(CliError::Usage(
            "no zero-mass dataset found; pass --baseline LABEL to pick one".into(),
        )),
        several => Err(CliError::Usage(format!(
            "{} zero-mass datasets found ({}); pass --baseline LABEL to disambiguate",
            several.len(),
            several.iter().map(|&i| datasets[i].label()).collect::<Vec<_>>().join(", ")
        ))),
    }
}

fn dump_points(
    dir: &Path,
    model: &CalibrationModel,
    datasets: &[Dataset],
    span_threshold: f64,
) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    for dataset in datasets {
        let mut forces = String::from("fx,fy,fz\n");
        for (r, _) in dataset.samples() {
            let f = model.predict_wrench(r).force;
            let _ = writeln!(forces, "{},{},{}", f.x, f.y, f.z);
        }
        let path = dir.join(format!("{}_forces.csv", dataset.label()));
        fs::write(&path, forces).map_err(|e| CliError::io(&path, e))?;

        let readings = dataset.readings();
        let r_m = centroid(&readings)?;
        let basis = svd_basis(&readings, &r_m, span_threshold)?;
        let mut projected = String::from("p1,p2,p3\n");
        for r in &readings {
            let p = basis.project(r);
            let _ = writeln!(projected, "{},{},{}", p.x, p.y, p.z);
        }
        let path = dir.join(format!("{}_projected.csv", dataset.label()));
        fs::write(&path, projected).map_err(|e| CliError::io(&path, e))?;
    }
    Ok(())
}

pub fn run(args: &ValidateArgs, file_config: Option<&FileConfig>) -> Result<()> {
    let settings = Settings::resolve(file_config, &args.common.overrides())?;
    let calibration = read_calibration_report(&args.calibration)?;
    let model = CalibrationModel::new(
        matrix_from_rows(&calibration.c),
        Vector6::from_column_slice(&calibration.offset),
    )?;

    let items = resolve_items(&args.files, true)?;
    let loaded = load_all(&items, &settings.ingest, settings.jobs)?;
    let mut warnings = Vec::new();
    let mut datasets = Vec::with_capacity(loaded.len());
    for l in loaded {
        warnings.extend(l.warnings);
        datasets.push(l.dataset);
    }

    let baseline = baseline_index(&datasets, args.baseline.as_deref())?;
    let core = validation_report(&model, &datasets, baseline, &settings.ingest.gravity)?;
    if let Some(dir) = &args.points_dir {
        dump_points(dir, &model, &datasets, settings.span_ratio_threshold)?;
    }

    let report = ValidationReport::new(&core, settings.ingest.gravity.norm, warnings);
    emit(&report, report.render_text(), args.common.format, args.common.out.as_deref())
}
