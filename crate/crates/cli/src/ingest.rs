//! Log-file ingestion: CSV parsing, smoothing, decimation, gravity screening.
//!
//! A log is a UTF-8 CSV with the exact header `t,r1,r2,r3,r4,r5,r6,ax,ay,az`:
//! a timestamp in seconds (strictly increasing), six raw sensor channels, and
//! three accelerometer channels in m/s². Added-mass metadata travels in a
//! sidecar `<stem>.meta` file of `key=value` lines (`mass_kg=`, `com_m=x,y,z`,
//! optional `label=`).
//!
//! Accelerometer sign: a static accelerometer measures specific force, i.e.
//! **minus** gravity. By default every accelerometer row is negated on ingest
//! (`accel_is_specific_force = true`). If your driver already reports the
//! gravity vector, disable the negation — getting this wrong flips every
//! fitted ellipsoid through its centre and silently corrupts the calibration.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::thread;

use ftcal_core::savgol::savitzky_golay;
use ftcal_core::{AddedMassSpec, Dataset, GravityBand, GravitySample, RawReading};
use nalgebra::Vector3;

use crate::error::{CliError, Result};

pub const CSV_HEADER: &str = "t,r1,r2,r3,r4,r5,r6,ax,ay,az";
const COLUMNS: [&str; 10] = ["t", "r1", "r2", "r3", "r4", "r5", "r6", "ax", "ay", "az"];

/// One parsed log row.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogRecord {
    pub t: f64,
    pub r: [f64; 6],
    pub a: [f64; 3],
}

/// Savitzky–Golay parameters; `None` in [`IngestConfig`] skips smoothing.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Smoothing {
    pub window: usize,
    pub order: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IngestConfig {
    pub smoothing: Option<Smoothing>,
    /// Keep every k-th post-filter sample, starting at index 0.
    pub decimation: usize,
    /// Negate accelerometer rows on ingest (see module docs).
    pub accel_is_specific_force: bool,
    /// Samples outside this band are flagged; outside twice the band they
    /// are dropped.
    pub gravity: GravityBand,
}

impl Default for IngestConfig {
    fn default() -> Self {
        Self {
            smoothing: Some(Smoothing { window: 301, order: 3 }),
            decimation: 1,
            accel_is_specific_force: true,
            gravity: GravityBand::default(),
        }
    }
}

impl IngestConfig {
    /// Pre-execution validation; called before any file is touched.
    pub fn validate(&self) -> Result<()> {
        if let Some(Smoothing { window, order }) = self.smoothing {
            if window % 2 == 0 || window < 5 {
                return Err(CliError::Config(format!(
                    "smoothing window must be odd and at least 5 (got {window}); \
                     use 0 to disable smoothing"
                )));
            }
            if order >= window {
                return Err(CliError::Config(format!(
                    "smoothing order {order} must be smaller than the window {window}"
                )));
            }
        }
        if self.decimation == 0 {
            return Err(CliError::Config("decimation must be at least 1".into()));
        }
        if !(self.gravity.norm > 0.0) || !(self.gravity.tolerance > 0.0) {
            return Err(CliError::Config("gravity norm and tolerance must be positive".into()));
        }
        Ok(())
    }
}

// ── CSV ──────────────────────────────────────────────────────────────────

/// Parse a log file. Errors carry the path and 1-based line number.
pub fn parse_log(path: &Path) -> Result<Vec<LogRecord>> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let parse_err =
        |line: usize, what: String| CliError::Parse { path: path.to_path_buf(), line, what };

    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header.trim_end_matches('\r') == CSV_HEADER => {}
        Some((_, header)) => {
            return Err(parse_err(1, format!("expected header `{CSV_HEADER}`, got `{header}`")))
        }
        None => return Err(parse_err(1, "empty file".into())),
    }

    let mut records = Vec::new();
    let mut last_t = f64::NEG_INFINITY;
    for (index, line) in lines {
        let line = line.trim_end_matches('\r');
        if line.is_empty() {
            continue;
        }
        let lineno = index + 1;
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != COLUMNS.len() {
            return Err(parse_err(
                lineno,
                format!("expected {} comma-separated values, got {}", COLUMNS.len(), fields.len()),
            ));
        }
        let mut values = [0.0_f64; 10];
        for (k, field) in fields.iter().enumerate() {
            let value: f64 = field.trim().parse().map_err(|_| {
                parse_err(lineno, format!("column {}: invalid number `{field}`", COLUMNS[k]))
            })?;
            if !value.is_finite() {
                return Err(parse_err(
                    lineno,
                    format!("column {}: non-finite value `{field}`", COLUMNS[k]),
                ));
            }
            values[k] = value;
        }
        if values[0] <= last_t {
            return Err(parse_err(
                lineno,
                format!("timestamp {} does not increase (previous {})", values[0], last_t),
            ));
        }
        last_t = values[0];
        records.push(LogRecord {
            t: values[0],
            r: values[1..7].try_into().unwrap(),
            a: values[7..10].try_into().unwrap(),
        });
    }
    Ok(records)
}

/// Write a dataset as a log file at the given sample rate, using the
/// specific-force accelerometer convention (the stored gravity vector is
/// negated, so a default-config ingest restores it).
pub fn write_log(path: &Path, dataset: &Dataset, sample_rate: f64) -> Result<()> {
    let mut text = String::from(CSV_HEADER);
    text.push('\n');
    for (i, (r, g)) in dataset.samples().iter().enumerate() {
        let t = i as f64 / sample_rate;
        text.push_str(&format!("{t}"));
        for v in r.vector().iter() {
            text.push_str(&format!(",{v}"));
        }
        for v in g.vector().iter() {
            let a = -v;
            text.push_str(&format!(",{a}"));
        }
        text.push('\n');
    }
    fs::write(path, text).map_err(|e| CliError::io(path, e))
}

// ── sidecar metadata ─────────────────────────────────────────────────────

#[derive(Debug, Clone, PartialEq)]
pub struct Sidecar {
    pub added: AddedMassSpec,
    pub label: Option<String>,
}

/// `<stem>.meta` next to the log file.
pub fn sidecar_path(log: &Path) -> PathBuf {
    log.with_extension("meta")
}

pub fn read_sidecar(path: &Path) -> Result<Sidecar> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let parse_err =
        |line: usize, what: String| CliError::Parse { path: path.to_path_buf(), line, what };

    let mut mass: Option<f64> = None;
    let mut com: Option<Vector3<f64>> = None;
    let mut label: Option<String> = None;
    for (index, raw) in text.lines().enumerate() {
        let lineno = index + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| parse_err(lineno, format!("expected `key=value`, got `{line}`")))?;
        let (key, value) = (key.trim(), value.trim());
        let duplicate = |what: &str| parse_err(lineno, format!("duplicate key `{what}`"));
        match key {
            "mass_kg" => {
                if mass.is_some() {
                    return Err(duplicate(key));
                }
                mass = Some(value.parse().map_err(|_| {
                    parse_err(lineno, format!("mass_kg: invalid number `{value}`"))
                })?);
            }
            "com_m" => {
                if com.is_some() {
                    return Err(duplicate(key));
                }
                let parts: Vec<&str> = value.split(',').collect();
                if parts.len() != 3 {
                    return Err(parse_err(
                        lineno,
                        format!("com_m: expected `x,y,z`, got `{value}`"),
                    ));
                }
                let mut v = [0.0; 3];
                for (k, p) in parts.iter().enumerate() {
                    v[k] = p
                        .trim()
                        .parse()
                        .map_err(|_| parse_err(lineno, format!("com_m: invalid number `{p}`")))?;
                }
                com = Some(Vector3::from_column_slice(&v));
            }
            "label" => {
                if label.is_some() {
                    return Err(duplicate(key));
                }
                label = Some(value.to_string());
            }
            other => return Err(parse_err(lineno, format!("unknown key `{other}`"))),
        }
    }
    let mass = mass.ok_or_else(|| parse_err(0, "missing required key `mass_kg`".into()))?;
    let com = com.ok_or_else(|| parse_err(0, "missing required key `com_m`".into()))?;
    let added = AddedMassSpec::new(mass, com)?;
    Ok(Sidecar { added, label })
}

pub fn write_sidecar(path: &Path, added: &AddedMassSpec, label: &str) -> Result<()> {
    let com = added.com();
    let text =
        format!("mass_kg={}\ncom_m={},{},{}\nlabel={label}\n", added.mass(), com.x, com.y, com.z);
    fs::write(path, text).map_err(|e| CliError::io(path, e))
}

// ── dataset loading ──────────────────────────────────────────────────────

/// One file to load, with its (possibly sidecar-derived) metadata.
#[derive(Debug, Clone)]
pub struct LoadItem {
    pub path: PathBuf,
    pub added: AddedMassSpec,
    pub label: String,
}

#[derive(Debug, Clone)]
pub struct LoadedDataset {
    pub dataset: Dataset,
    /// Soft gravity-band violations and drop counts, ready for the report.
    pub warnings: Vec<String>,
}

/// Parse → smooth → decimate → accelerometer sign → gravity screening.
pub fn load_dataset(item: &LoadItem, config: &IngestConfig) -> Result<LoadedDataset> {
    let records = parse_log(&item.path)?;
    let records = match config.smoothing {
        Some(Smoothing { window, order }) => smooth_records(&records, window, order)?,
        None => records,
    };

    let band = config.gravity;
    let hard_band = band.widened(2.0);
    let mut samples = Vec::new();
    let mut soft = 0usize;
    let mut dropped = 0usize;
    let mut worst: f64 = band.norm;
    for record in records.iter().step_by(config.decimation) {
        let a = Vector3::from_column_slice(&record.a);
        let g = if config.accel_is_specific_force { -a } else { a };
        let norm = g.norm();
        if !hard_band.contains(norm) {
            dropped += 1;
            continue;
        }
        if !band.contains(norm) {
            soft += 1;
            if (norm - band.norm).abs() > (worst - band.norm).abs() {
                worst = norm;
            }
        }
        samples.push((RawReading::from_array(record.r)?, GravitySample::new(g)?));
    }

    let mut warnings = Vec::new();
    if soft > 0 {
        let (lo, hi) = band.bounds();
        warnings.push(format!(
            "{}: {soft} sample(s) outside the gravity band [{lo:.3}, {hi:.3}] m/s² (worst {worst:.3}); kept",
            item.path.display()
        ));
    }
    if dropped > 0 {
        warnings.push(format!(
            "{}: {dropped} sample(s) beyond twice the gravity band; dropped",
            item.path.display()
        ));
    }
    if samples.is_empty() {
        return Err(CliError::NoValidSamples { path: item.path.clone() });
    }
    let dataset = Dataset::new(samples, item.added, item.label.clone())?;
    Ok(LoadedDataset { dataset, warnings })
}

fn smooth_records(records: &[LogRecord], window: usize, order: usize) -> Result<Vec<LogRecord>> {
    let n = records.len();
    let mut channels: Vec<Vec<f64>> = Vec::with_capacity(9);
    for k in 0..6 {
        channels.push(records.iter().map(|rec| rec.r[k]).collect());
    }
    for k in 0..3 {
        channels.push(records.iter().map(|rec| rec.a[k]).collect());
    }
    let smoothed: Vec<Vec<f64>> = channels
        .iter()
        .map(|c| savitzky_golay(c, window, order))
        .collect::<ftcal_core::Result<_>>()?;

    Ok((0..n)
        .map(|i| LogRecord {
            t: records[i].t,
            r: [
                smoothed[0][i],
                smoothed[1][i],
                smoothed[2][i],
                smoothed[3][i],
                smoothed[4][i],
                smoothed[5][i],
            ],
            a: [smoothed[6][i], smoothed[7][i], smoothed[8][i]],
        })
        .collect())
}

/// Load many files, up to `jobs` in parallel, preserving input order.
pub fn load_all(
    items: &[LoadItem],
    config: &IngestConfig,
    jobs: usize,
) -> Result<Vec<LoadedDataset>> {
    config.validate()?;
    if jobs <= 1 || items.len() <= 1 {
        return items.iter().map(|item| load_dataset(item, config)).collect();
    }

    let next = AtomicUsize::new(0);
    let slots: Vec<Mutex<Option<Result<LoadedDataset>>>> =
        items.iter().map(|_| Mutex::new(None)).collect();
    thread::scope(|scope| {
        for _ in 0..jobs.min(items.len()) {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= items.len() {
                    break;
                }
                let result = load_dataset(&items[i], config);
                *slots[i].lock().unwrap() = Some(result);
            });
        }
    });
    slots
        .into_iter()
        .map(|slot| slot.into_inner().unwrap().expect("every slot is filled"))
        .collect()
}

/// Resolve the metadata for each log file: sidecar when present, else a
/// zero-mass spec labelled by the file stem. `require_sidecar` turns a
/// missing sidecar into an error (calibration and validation need the specs).
pub fn resolve_items(paths: &[PathBuf], require_sidecar: bool) -> Result<Vec<LoadItem>> {
    paths
        .iter()
        .map(|path| {
            let meta = sidecar_path(path);
            let stem = path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| path.display().to_string());
            if meta.exists() {
                let sidecar = read_sidecar(&meta)?;
                Ok(LoadItem {
                    path: path.clone(),
                    added: sidecar.added,
                    label: sidecar.label.unwrap_or(stem),
                })
            } else if require_sidecar {
                Err(CliError::io(
                    &meta,
                    std::io::Error::new(
                        std::io::ErrorKind::NotFound,
                        "added-mass sidecar required (mass_kg=, com_m=x,y,z)",
                    ),
                ))
            } else {
                Ok(LoadItem { path: path.clone(), added: AddedMassSpec::none(), label: stem })
            }
        })
        .collect()
}

// ── tests ────────────────────────────────────────────────────────────────
