//! `ftcal synth` — write synthetic logs plus their ground truth.

use std::fs;
use std::path::PathBuf;

use clap::ValueEnum;
use ftcal_core::synth::{reference_scenario, robustness_scenario, BenchScenario};

use crate::error::{CliError, Result};
use crate::ingest::{sidecar_path, write_log, write_sidecar};
use crate::report::{to_json_string, GroundTruthFile};

const SAMPLE_RATE_HZ: f64 = 100.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Preset {
    /// Eight 50-pose datasets: a baseline plus 0.51 kg loads for
    /// calibration, four more held out for validation.
    Paper,
    /// The same shape with a mildly conditioned sensor and 2 kg loads,
    /// suited to noise studies.
    Robustness,
}

impl Preset {
    fn name(self) -> &'static str {
        match self {
            Preset::Paper => "paper",
            Preset::Robustness => "robustness",
        }
    }

    fn scenario(self, seed: u64, noise: f64) -> BenchScenario {
        match self {
            Preset::Paper => reference_scenario(seed, noise),
            Preset::Robustness => robustness_scenario(seed, noise),
        }
    }
}

#[derive(Debug, clap::Args)]
pub struct SynthArgs {
    /// Scenario to generate
    #[arg(long, value_enum, default_value_t = Preset::Paper)]
    pub preset: Preset,

    /// Seed for the simulated sensor, sweep and noise streams
    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Relative Gaussian noise on raw and accelerometer channels
    /// (fraction of each channel's signal RMS; 0 = noiseless)
    #[arg(long, default_value_t = 0.0)]
    pub noise: f64,

    /// Directory for the CSV/sidecar files and ground_truth.json
    #[arg(long, value_name = "DIR")]
    pub out_dir: PathBuf,
}

pub fn run(args: &SynthArgs) -> Result<()> {
    if !args.noise.is_finite() || args.noise < 0.0 {
        return Err(CliError::Config(format!("noise fraction must be >= 0, got {}", args.noise)));
    }
    let scenario = args.preset.scenario(args.seed, args.noise);

    fs::create_dir_all(&args.out_dir).map_err(|e| CliError::io(&args.out_dir, e))?;
    let mut written = 0usize;
    for dataset in scenario.calibration.iter().chain(scenario.validation.iter()) {
        let csv = args.out_dir.join(format!("{}.csv", dataset.label()));
        write_log(&csv, dataset, SAMPLE_RATE_HZ)?;
        write_sidecar(&sidecar_path(&csv), dataset.added_mass(), dataset.label())?;
        written += 1;
    }

    let truth = GroundTruthFile::new(&scenario.truth, args.preset.name(), args.seed, args.noise);
    let truth_path = args.out_dir.join("ground_truth.json");
    fs::write(&truth_path, to_json_string(&truth)).map_err(|e| CliError::io(&truth_path, e))?;

    println!(
        "wrote {written} datasets ({} calibration + {} validation) and ground_truth.json to {}",
        scenario.calibration.len(),
        scenario.validation.len(),
        args.out_dir.display()
    );
    Ok(())
}
