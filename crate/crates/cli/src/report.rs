//! JSON report types and their plain-text renderings.
//!
//! Reports are JSON-first: the text tables are derived from the same structs
//! that serialize to JSON, never computed separately. Field order is fixed by
//! the struct definitions and no timestamps are embedded, so re-running a
//! command on identical inputs produces byte-identical output. Each document
//! carries a `schema` tag versioned alongside the JSON Schema files under
//! `schemas/`.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use clap::ValueEnum;
use ftcal_core::calib::CalibEstimate;
use ftcal_core::geometry::ValidationReport as CoreValidation;
use ftcal_core::offset::OffsetSummary;
use ftcal_core::synth::GroundTruth;
use ftcal_core::Dataset;
use nalgebra::{Matrix6, Vector3, Vector6};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

pub const OFFSET_SCHEMA: &str = "ftcal/offset-report/v1";
pub const CALIBRATION_SCHEMA: &str = "ftcal/calibration-report/v1";
pub const VALIDATION_SCHEMA: &str = "ftcal/validation-report/v1";
pub const GROUND_TRUTH_SCHEMA: &str = "ftcal/ground-truth/v1";

/// Stdout rendering selected by `--format`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

// ── helpers ──────────────────────────────────────────────────────────────

fn array6(v: &Vector6<f64>) -> [f64; 6] {
    v.as_slice().try_into().unwrap()
}

fn array3(v: &Vector3<f64>) -> [f64; 3] {
    v.as_slice().try_into().unwrap()
}

/// Row-major nested arrays: `rows[i][j]` is the matrix entry at row `i`,
/// column `j`.
pub fn matrix_rows(m: &Matrix6<f64>) -> [[f64; 6]; 6] {
    let mut rows = [[0.0; 6]; 6];
    for (i, row) in rows.iter_mut().enumerate() {
        for (j, value) in row.iter_mut().enumerate() {
            *value = m[(i, j)];
        }
    }
    rows
}

pub fn matrix_from_rows(rows: &[[f64; 6]; 6]) -> Matrix6<f64> {
    Matrix6::from_fn(|i, j| rows[i][j])
}

pub fn to_json_string<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports always serialize");
    s.push('\n');
    s
}

/// Write the JSON to `--out` (when given) and render to stdout per format.
pub fn emit<T: Serialize>(
    report: &T,
    text: String,
    format: Format,
    out: Option<&Path>,
) -> Result<()> {
    let json = to_json_string(report);
    if let Some(path) = out {
        fs::write(path, &json).map_err(|e| CliError::io(path, e))?;
    }
    match format {
        Format::Json => print!("{json}"),
        Format::Text => print!("{text}"),
    }
    Ok(())
}

fn com_cm(com: &[f64; 3]) -> String {
    format!("({:6.2}, {:6.2}, {:6.2}) cm", com[0] * 100.0, com[1] * 100.0, com[2] * 100.0)
}

fn warnings_block(out: &mut String, warnings: &[String]) {
    for w in warnings {
        let _ = writeln!(out, "warning: {w}");
    }
}

// ── offset report ────────────────────────────────────────────────────────

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OffsetPerDataset {
    pub label: String,
    pub samples: usize,
    pub o_hat: [f64; 6],
    pub lambda_o: [f64; 3],
    pub singular_values: [f64; 6],
    pub condition: f64,
    pub residual_rms: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OffsetReport {
    pub schema: String,
    pub gravity_norm: f64,
    /// Mean of the per-dataset estimates, in raw sensor units.
    pub offset: [f64; 6],
    /// Largest deviation of a per-dataset estimate from the mean.
    pub spread: f64,
    pub per_dataset: Vec<OffsetPerDataset>,
    pub warnings: Vec<String>,
}

impl OffsetReport {
    pub fn new(summary: &OffsetSummary, gravity_norm: f64, mut warnings: Vec<String>) -> Self {
        warnings.extend(summary.warnings.iter().cloned());
        Self {
            schema: OFFSET_SCHEMA.to_string(),
            gravity_norm,
            offset: array6(&summary.offset),
            spread: summary.spread,
            per_dataset: summary
                .per_dataset
                .iter()
                .map(|d| OffsetPerDataset {
                    label: d.label.clone(),
                    samples: d.sample_count,
                    o_hat: array6(&d.estimate.o_hat),
                    lambda_o: array3(&d.estimate.lambda_o),
                    singular_values: array6(&d.singular_values),
                    condition: d.estimate.condition_number,
                    residual_rms: d.estimate.residual_rms,
                })
                .collect(),
            warnings,
        }
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        warnings_block(&mut out, &self.warnings);
        let _ = writeln!(out, "offset estimate (raw units)");
        let _ = writeln!(out, "  o = [{}]", self.offset.map(|v| format!("{v:.6}")).join(", "));
        let _ = writeln!(out, "  spread across datasets: {:.3e}", self.spread);
        let _ = writeln!(out);
        let _ =
            writeln!(out, "{:<14} {:>8} {:>12} {:>12}", "dataset", "samples", "condition", "rms");
        for d in &self.per_dataset {
            let _ = writeln!(
                out,
                "{:<14} {:>8} {:>12.4e} {:>12.4e}",
                d.label, d.samples, d.condition, d.residual_rms
            );
        }
        out
    }
}

// ── calibration report ───────────────────────────────────────────────────

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DatasetStamp {
    pub label: String,
    pub samples: usize,
    pub mass_kg: f64,
    pub com_m: [f64; 3],
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CalibrationReport {
    pub schema: String,
    /// Offset subtracted before the fit, in raw units.
    pub offset: [f64; 6],
    /// Calibration matrix, row-major: `c[i][j]` maps raw channel `j` into
    /// wrench component `i` (fx, fy, fz, tx, ty, tz).
    pub c: [[f64; 6]; 6],
    /// Attached-body mass (kg) and first moment (kg·m), jointly estimated.
    pub mass_kg: f64,
    pub first_moment_kg_m: [f64; 3],
    /// First moment over mass; absent when the mass is numerically zero.
    pub com_m: Option<[f64; 3]>,
    pub theta_rank: usize,
    pub condition: f64,
    pub residual_rms: f64,
    pub ill_conditioned: bool,
    /// True when `--force` accepted an ill-conditioned system.
    pub forced: bool,
    pub datasets: Vec<DatasetStamp>,
    pub warnings: Vec<String>,
}

impl CalibrationReport {
    pub fn new(
        est: &CalibEstimate,
        offset: &Vector6<f64>,
        datasets: &[Dataset],
        forced: bool,
        warnings: Vec<String>,
    ) -> Self {
        Self {
            schema: CALIBRATION_SCHEMA.to_string(),
            offset: array6(offset),
            c: matrix_rows(&est.c_hat),
            mass_kg: est.m_hat,
            first_moment_kg_m: array3(&est.mc_hat),
            com_m: est.com_hat.as_ref().map(array3),
            theta_rank: est.theta_rank,
            condition: est.theta_condition,
            residual_rms: est.residual_rms,
            ill_conditioned: est.ill_conditioned,
            forced,
            datasets: datasets
                .iter()
                .map(|d| DatasetStamp {
                    label: d.label().to_string(),
                    samples: d.len(),
                    mass_kg: d.added_mass().mass(),
                    com_m: array3(&d.added_mass().com()),
                })
                .collect(),
            warnings,
        }
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        warnings_block(&mut out, &self.warnings);
        let _ = writeln!(out, "calibration matrix C (wrench row × raw column)");
        for row in &self.c {
            let cells: Vec<String> = row.iter().map(|v| format!("{v:>12.5e}")).collect();
            let _ = writeln!(out, "  {}", cells.join(" "));
        }
        let _ = writeln!(out);
        let _ = writeln!(out, "attached body: {:.4} kg", self.mass_kg);
        if let Some(com) = self.com_m {
            let _ = writeln!(out, "  centre of mass {}", com_cm(&com));
        }
        let _ = writeln!(
            out,
            "theta: rank {} / 40, condition {:.3e}, residual rms {:.3e}{}",
            self.theta_rank,
            self.condition,
            self.residual_rms,
            if self.ill_conditioned { "  (ill-conditioned)" } else { "" }
        );
        let _ = writeln!(out);
        let _ = writeln!(out, "{:<14} {:>8} {:>9}  com", "dataset", "samples", "mass [kg]");
        for d in &self.datasets {
            let _ = writeln!(
                out,
                "{:<14} {:>8} {:>9.3}  {}",
                d.label,
                d.samples,
                d.mass_kg,
                com_cm(&d.com_m)
            );
        }
        out
    }
}

// ── validation report ────────────────────────────────────────────────────

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InertialOut {
    /// Total mass on the sensor (body + added), kg.
    pub mass_kg: f64,
    pub first_moment_kg_m: [f64; 3],
    pub com_m: Option<[f64; 3]>,
    pub residual_rms: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RecoveryOut {
    pub mass_est_kg: f64,
    pub mass_truth_kg: f64,
    pub mass_error_kg: f64,
    pub com_est_m: Option<[f64; 3]>,
    pub com_truth_m: Option<[f64; 3]>,
    pub com_error_m: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ValidationRowOut {
    pub label: String,
    pub added_mass_kg: f64,
    pub added_com_m: [f64; 3],
    /// Semiaxes of the ellipsoid fitted to the calibrated forces, in newtons,
    /// descending; equal semiaxes mean the forces sweep a sphere.
    pub semiaxes_n: [f64; 3],
    pub anisotropy: f64,
    pub mean_force_n: f64,
    pub inertial: InertialOut,
    /// Absent on the baseline row.
    pub recovery: Option<RecoveryOut>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ValidationReport {
    pub schema: String,
    pub baseline: String,
    pub gravity_norm: f64,
    pub rows: Vec<ValidationRowOut>,
    pub warnings: Vec<String>,
}

impl ValidationReport {
    pub fn new(core: &CoreValidation, gravity_norm: f64, warnings: Vec<String>) -> Self {
        Self {
            schema: VALIDATION_SCHEMA.to_string(),
            baseline: core.baseline_label.clone(),
            gravity_norm,
            rows: core
                .rows
                .iter()
                .map(|row| ValidationRowOut {
                    label: row.label.clone(),
                    added_mass_kg: row.added_mass.mass(),
                    added_com_m: array3(&row.added_mass.com()),
                    semiaxes_n: array3(&row.sphericity.semiaxes),
                    anisotropy: row.sphericity.anisotropy,
                    mean_force_n: row.sphericity.mean_force_norm,
                    inertial: InertialOut {
                        mass_kg: row.inertial.mass,
                        first_moment_kg_m: array3(&row.inertial.mass_com),
                        com_m: row.inertial.com.as_ref().map(array3),
                        residual_rms: row.inertial.residual_rms,
                    },
                    recovery: row.recovery.as_ref().map(|r| RecoveryOut {
                        mass_est_kg: r.mass_est,
                        mass_truth_kg: r.mass_truth,
                        mass_error_kg: r.mass_error(),
                        com_est_m: r.com_est.as_ref().map(array3),
                        com_truth_m: r.com_truth.as_ref().map(array3),
                        com_error_m: r.com_error(),
                    }),
                })
                .collect(),
            warnings,
        }
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        warnings_block(&mut out, &self.warnings);
        let _ = writeln!(out, "validation against baseline `{}`", self.baseline);
        let _ = writeln!(out);
        let _ = writeln!(
            out,
            "{:<14} {:>9} {:>30} {:>11}",
            "dataset", "mass [kg]", "semiaxes [N]", "anisotropy"
        );
        for row in &self.rows {
            let s = row.semiaxes_n;
            let _ = writeln!(
                out,
                "{:<14} {:>9.3} {:>9.4} {:>9.4} {:>9.4} {:>11.3e}",
                row.label, row.added_mass_kg, s[0], s[1], s[2], row.anisotropy
            );
        }
        let _ = writeln!(out);
        let _ = writeln!(
            out,
            "{:<14} {:>14} {:>14} {:>12}",
            "dataset", "mass est [kg]", "mass true [kg]", "com err [cm]"
        );
        for row in &self.rows {
            match &row.recovery {
                Some(r) => {
                    let com = r
                        .com_error_m
                        .map(|e| format!("{:>12.3}", e * 100.0))
                        .unwrap_or_else(|| format!("{:>12}", "-"));
                    let _ = writeln!(
                        out,
                        "{:<14} {:>14.4} {:>14.4} {com}",
                        row.label, r.mass_est_kg, r.mass_truth_kg
                    );
                }
                None => {
                    let _ = writeln!(
                        out,
                        "{:<14} {:>14} {:>14} {:>12}",
                        row.label, "-", "-", "baseline"
                    );
                }
            }
        }
        out
    }
}

// ── synthetic ground truth ───────────────────────────────────────────────

/// Emitted by `synth` so test harnesses can score the pipeline. A real rig
/// never knows these values; nothing in the pipeline reads this file.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GroundTruthFile {
    pub schema: String,
    pub note: String,
    pub preset: String,
    pub seed: u64,
    pub noise_fraction: f64,
    pub gravity_norm: f64,
    pub c: [[f64; 6]; 6],
    pub offset: [f64; 6],
    pub body_mass_kg: f64,
    pub body_com_m: [f64; 3],
}

impl GroundTruthFile {
    pub fn new(truth: &GroundTruth, preset: &str, seed: u64, noise_fraction: f64) -> Self {
        Self {
            schema: GROUND_TRUTH_SCHEMA.to_string(),
            note: "synthetic ground truth for test harnesses only; \
                   a real calibration never has access to these values"
                .to_string(),
            preset: preset.to_string(),
            seed,
            noise_fraction,
            gravity_norm: truth.gravity_norm,
            c: matrix_rows(truth.model.c()),
            offset: array6(truth.model.offset()),
            body_mass_kg: truth.body.mass(),
            body_com_m: array3(&truth.body.com()),
        }
    }
}
