//! Synthetic data generation: a simulated sensor with known calibration,
//! offset, and attached body, swept through a grid of static orientations.
//!
//! Everything here is deterministic given the seeds, so estimator tests can
//! assert exact recovery on clean data and reproducible behaviour under
//! noise. A zero-noise spec never touches the random stream: two silent
//! specs produce bit-identical datasets regardless of their seeds.

use alloc::{format, vec::Vec};

use nalgebra::{Matrix6, Rotation3, Vector3, Vector6};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;

#[cfg(not(feature = "std"))]
use num_traits::Float as _;

use crate::model::{
    AddedMassSpec, CalibrationModel, Dataset, GravitySample, InertialParams, RawReading,
    STANDARD_GRAVITY,
};

/// A fully known simulated sensor: the quantities an estimator must recover.
#[derive(Debug, Clone, Copy)]
pub struct GroundTruth {
    pub model: CalibrationModel,
    /// The permanently attached body (tool plate, cabling, …).
    pub body: InertialParams,
    pub gravity_norm: f64,
}

/// Grid of static orientations: front-back tilts crossed with lateral tilts,
/// both inclusive linspaces centred on upright.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepSpec {
    /// Total front-back span (degrees); tilts run ±half of it.
    pub frontback_range_deg: f64,
    /// Total lateral span (degrees).
    pub lateral_range_deg: f64,
    pub frontback_steps: usize,
    pub lateral_steps: usize,
    /// Stream-splitting constant mixed into the noise seed; the grid itself
    /// is deterministic.
    pub seed: u64,
}

impl Default for SweepSpec {
    fn default() -> Self {
        Self {
            frontback_range_deg: 70.0,
            lateral_range_deg: 90.0,
            frontback_steps: 10,
            lateral_steps: 5,
            seed: 0,
        }
    }
}

/// Additive zero-mean gaussian noise, per channel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseSpec {
    pub raw_sigma: Vector6<f64>,
    pub accel_sigma: Vector3<f64>,
    pub seed: u64,
}

impl NoiseSpec {
    pub fn none() -> Self {
        Self { raw_sigma: Vector6::zeros(), accel_sigma: Vector3::zeros(), seed: 0 }
    }

    pub fn is_silent(&self) -> bool {
        self.raw_sigma.iter().all(|s| *s == 0.0) && self.accel_sigma.iter().all(|s| *s == 0.0)
    }
}

/// Haar-distributed random orthogonal matrix: gaussian QR with the R-diagonal
/// sign fix.
fn random_orthogonal(rng: &mut ChaCha12Rng) -> Matrix6<f64> {
    let gauss = Matrix6::from_fn(|_, _| rng.sample::<f64, _>(StandardNormal));
    let qr = gauss.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..6 {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    q
}

/// Draw a random sensor.
///
/// The calibration matrix has log-spaced singular values from `conditioning`
/// down to 1 between random orthogonal factors, the offset is uniform in
/// ±20 counts per channel, and the body has 0.5–5 kg within 0.5 m of the
/// sensor origin.
///
/// # Panics
///
/// If `conditioning` is outside `[1, 1e6]`.
pub fn make_ground_truth(seed: u64, conditioning: f64) -> GroundTruth {
    assert!(
        (1.0..=1e6).contains(&conditioning),
        "conditioning must be in [1, 1e6], got {conditioning}"
    );
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let u = random_orthogonal(&mut rng);
    let v = random_orthogonal(&mut rng);
    let sigma = Vector6::from_fn(|i, _| conditioning.powf((5 - i) as f64 / 5.0));
    let c = u * Matrix6::from_diagonal(&sigma) * v.transpose();
    let offset = Vector6::from_fn(|_, _| rng.random_range(-20.0..20.0));
    let mass = rng.random_range(0.5..5.0);
    let com = loop {
        let candidate = Vector3::from_fn(|_, _| rng.random_range(-0.5..0.5));
        if candidate.norm() <= 0.5 {
            break candidate;
        }
    };
    GroundTruth {
        model: CalibrationModel::with_condition_floor(c, offset, 1e-7)
            .expect("conditioning is capped at 1e6"),
        body: InertialParams::new(mass, com).expect("drawn from finite ranges"),
        gravity_norm: STANDARD_GRAVITY,
    }
}

/// The orientation grid of a sweep, row-major over (front-back, lateral).
///
/// # Panics
///
/// If either range is non-positive or either step count is below 2.
pub fn orientation_sweep(spec: &SweepSpec) -> Vec<Rotation3<f64>> {
    assert!(
        spec.frontback_range_deg > 0.0 && spec.lateral_range_deg > 0.0,
        "sweep ranges must be positive"
    );
    assert!(
        spec.frontback_steps >= 2 && spec.lateral_steps >= 2,
        "sweep needs at least 2 steps per axis"
    );
    let deg = core::f64::consts::PI / 180.0;
    let linspace = |range: f64, steps: usize, i: usize| -> f64 {
        let half = range / 2.0;
        (-half + range * i as f64 / (steps - 1) as f64) * deg
    };
    let mut rotations = Vec::with_capacity(spec.frontback_steps * spec.lateral_steps);
    for i in 0..spec.frontback_steps {
        let a = linspace(spec.frontback_range_deg, spec.frontback_steps, i);
        for j in 0..spec.lateral_steps {
            let b = linspace(spec.lateral_range_deg, spec.lateral_steps, j);
            rotations.push(
                Rotation3::from_axis_angle(&Vector3::y_axis(), a)
                    * Rotation3::from_axis_angle(&Vector3::x_axis(), b),
            );
        }
    }
    rotations
}

/// Simulate one dataset: the sensor carrying `added` on top of the body,
/// held still at every sweep orientation.
///
/// Readings follow `r = C⁻¹·(M_b + M_a)·g + o` with sensor-frame gravity
/// `g = Rᵀ·(0, 0, −g₀)`; noise (if any) is then added per channel from a
/// stream seeded by `noise.seed` mixed with the sweep seed.
pub fn generate_dataset(
    truth: &GroundTruth,
    added: &AddedMassSpec,
    sweep: &SweepSpec,
    noise: &NoiseSpec,
) -> Dataset {
    let c_inv = truth.model.inverse_c();
    let offset = truth.model.offset();
    let m_total = truth.body.wrench_map() + added.wrench_map();
    let g_world = Vector3::new(0.0, 0.0, -truth.gravity_norm);

    let mut rng = (!noise.is_silent()).then(|| {
        ChaCha12Rng::seed_from_u64(noise.seed ^ sweep.seed.wrapping_mul(0x9E3779B97F4A7C15))
    });

    let samples = orientation_sweep(sweep)
        .iter()
        .map(|rotation| {
            let g = rotation.inverse() * g_world;
            let mut reading = c_inv * (m_total * g) + offset;
            let mut measured = g;
            if let Some(rng) = rng.as_mut() {
                for k in 0..6 {
                    reading[k] += noise.raw_sigma[k] * rng.sample::<f64, _>(StandardNormal);
                }
                for k in 0..3 {
                    measured[k] += noise.accel_sigma[k] * rng.sample::<f64, _>(StandardNormal);
                }
            }
            (
                RawReading::new(reading).expect("finite by construction"),
                GravitySample::new(measured).expect("finite by construction"),
            )
        })
        .collect();
    Dataset::new(samples, *added, "synthetic").expect("sweep yields at least 4 samples")
}

/// Noise sized relative to the clean signal: each σ is `fraction` times the
/// centred per-channel RMS of the noiseless dataset.
pub fn relative_noise_spec(
    truth: &GroundTruth,
    added: &AddedMassSpec,
    sweep: &SweepSpec,
    fraction: f64,
    seed: u64,
) -> NoiseSpec {
    assert!(fraction >= 0.0 && fraction.is_finite(), "fraction must be finite and >= 0");
    let clean = generate_dataset(truth, added, sweep, &NoiseSpec::none());
    let n = clean.len() as f64;

    let mut raw_mean = Vector6::zeros();
    let mut acc_mean = Vector3::zeros();
    for (r, g) in clean.samples() {
        raw_mean += r.vector();
        acc_mean += g.vector();
    }
    raw_mean /= n;
    acc_mean /= n;

    let mut raw_var = Vector6::zeros();
    let mut acc_var = Vector3::zeros();
    for (r, g) in clean.samples() {
        let dr = r.vector() - raw_mean;
        let dg = g.vector() - acc_mean;
        for k in 0..6 {
            raw_var[k] += dr[k] * dr[k];
        }
        for k in 0..3 {
            acc_var[k] += dg[k] * dg[k];
        }
    }
    NoiseSpec {
        raw_sigma: raw_var.map(|v: f64| fraction * (v / n).sqrt()),
        accel_sigma: acc_var.map(|v: f64| fraction * (v / n).sqrt()),
        seed,
    }
}

// ── benchmark scenarios ──────────────────────────────────────────────────

/// A complete benchmark: calibration datasets plus held-out validation
/// datasets from the same simulated sensor.
#[derive(Debug, Clone)]
pub struct BenchScenario {
    pub truth: GroundTruth,
    pub calibration: Vec<Dataset>,
    pub validation: Vec<Dataset>,
}

fn build_scenario(
    truth: GroundTruth,
    sweep: &SweepSpec,
    calibration_specs: &[AddedMassSpec],
    validation_specs: &[AddedMassSpec],
    noise_fraction: f64,
    seed: u64,
) -> BenchScenario {
    let generate = |specs: &[AddedMassSpec], base: usize| -> Vec<Dataset> {
        specs
            .iter()
            .enumerate()
            .map(|(j, spec)| {
                let index = base + j;
                let noise = if noise_fraction > 0.0 {
                    relative_noise_spec(
                        &truth,
                        spec,
                        sweep,
                        noise_fraction,
                        seed.wrapping_add(index as u64),
                    )
                } else {
                    NoiseSpec::none()
                };
                generate_dataset(&truth, spec, sweep, &noise)
                    .with_label(format!("dataset{}", index + 1))
            })
            .collect()
    };

    BenchScenario {
        calibration: generate(calibration_specs, 0),
        validation: generate(validation_specs, calibration_specs.len()),
        truth,
    }
}

/// The standard eight-dataset benchmark: a baseline plus three distinct
/// 0.51 kg loads for calibration, and four more configurations (one of them
/// empty) held out for validation. Labels run `dataset1`–`dataset8`.
pub fn reference_scenario(seed: u64, noise_fraction: f64) -> BenchScenario {
    let truth = make_ground_truth(seed, 100.0);
    let sweep = SweepSpec { seed, ..SweepSpec::default() };
    let calibration_specs = [
        AddedMassSpec::none(),
        AddedMassSpec::new(0.51, Vector3::new(0.10, 0.0, 0.03)).unwrap(),
        AddedMassSpec::new(0.51, Vector3::new(0.25, 0.0, 0.03)).unwrap(),
        AddedMassSpec::new(0.51, Vector3::new(-0.10, 0.0, 0.03)).unwrap(),
    ];
    let validation_specs = [
        AddedMassSpec::new(0.51, Vector3::new(0.39, -0.035, 0.029)).unwrap(),
        AddedMassSpec::new(0.51, Vector3::new(0.21, 0.0, 0.063)).unwrap(),
        AddedMassSpec::none(),
        AddedMassSpec::new(0.51, Vector3::new(-0.04, 0.0, 0.063)).unwrap(),
    ];
    build_scenario(truth, &sweep, &calibration_specs, &validation_specs, noise_fraction, seed)
}

/// A benchmark tuned for noise studies rather than exact recovery.
///
/// The estimator regresses noisy readings on noisy readings, so what a given
/// noise fraction costs depends on how large the load *differences* between
/// datasets are relative to the full per-channel signal. Light 0.51 kg loads
/// on top of a multi-kilogram body leave that ratio near 10%, and percent-level
/// noise then swamps the identifying signal. This scenario keeps the same
/// eight-dataset shape as [`reference_scenario`] but uses a mildly conditioned
/// sensor and well-spread 2 kg loads, which keeps the median calibration error
/// at 1% relative noise comfortably in the low percent range.
pub fn robustness_scenario(seed: u64, noise_fraction: f64) -> BenchScenario {
    let truth = make_ground_truth(seed, 3.0);
    let sweep = SweepSpec { seed, ..SweepSpec::default() };
    let calibration_specs = [
        AddedMassSpec::none(),
        AddedMassSpec::new(2.0, Vector3::new(0.20, 0.0, 0.10)).unwrap(),
        AddedMassSpec::new(2.0, Vector3::new(-0.15, 0.15, 0.10)).unwrap(),
        AddedMassSpec::new(2.0, Vector3::new(0.0, -0.20, 0.15)).unwrap(),
    ];
    let validation_specs = [
        AddedMassSpec::new(2.0, Vector3::new(0.25, -0.10, 0.05)).unwrap(),
        AddedMassSpec::new(1.0, Vector3::new(0.10, 0.20, -0.05)).unwrap(),
        AddedMassSpec::none(),
        AddedMassSpec::new(2.0, Vector3::new(-0.10, -0.10, 0.15)).unwrap(),
    ];
    build_scenario(truth, &sweep, &calibration_specs, &validation_specs, noise_fraction, seed)
}

// ── tests ────────────────────────────────────────────────────────────────
