//! Identification of the 3-D affine subspace spanned by gravity-only raw data.
//!
//! With a constant offset and a rank-3 gravitational wrench map, a noiseless
//! reading satisfies `r = C⁻¹·M·g + o`, so centred readings live in the 3-D
//! column space of `C⁻¹·M`. The three dominant left singular vectors of the
//! centred sample matrix recover that span without knowing `C` or `M`; they
//! compress each reading to three in-plane coordinates and pin down the
//! affine set on which the offset must lie.

use nalgebra::{DMatrix, SMatrix, Vector3, Vector6};

#[cfg(not(feature = "std"))]
use num_traits::Float as _;

use crate::error::{Error, Result};
use crate::model::RawReading;

/// Default σ₃/σ₁ floor below which the centred samples are declared
/// degenerate. Suitable for clean or synthetic data; see
/// [`NOISY_SPAN_RATIO_THRESHOLD`] for real recordings.
pub const DEFAULT_SPAN_RATIO_THRESHOLD: f64 = 1e-6;

/// Suggested `svd_basis` threshold for visibly noisy recordings, where sensor
/// noise alone can lift σ₃ above the clean-data floor even when the poses do
/// not excite three directions.
pub const NOISY_SPAN_RATIO_THRESHOLD: f64 = 1e-3;

/// Sample mean of the raw readings.
pub fn centroid(samples: &[RawReading]) -> Result<Vector6<f64>> {
    if samples.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let mut sum = Vector6::zeros();
    for r in samples {
        sum += r.vector();
    }
    Ok(sum / samples.len() as f64)
}

/// Orthonormal basis of the dominant 3-D subspace of the centred samples,
/// anchored at the sample mean `r_m`.
///
/// Invariants: `u1` has orthonormal columns ordered by decreasing singular
/// value, each column's largest-magnitude entry is positive (sign
/// convention), and `singular_values` holds all six singular values in
/// descending order (zero-padded when fewer samples than channels).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AffineBasis {
    pub r_m: Vector6<f64>,
    pub u1: SMatrix<f64, 6, 3>,
    pub singular_values: Vector6<f64>,
}

/// Health indicators of a computed basis over the samples that produced it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubspaceDiagnostics {
    /// σ₄/σ₃ — how much energy leaks out of the retained span (0 = none).
    pub sigma_ratio: f64,
    pub sample_count: usize,
    /// RMS norm of the projected (in-plane) coordinates, in raw units.
    pub in_plane_rms: f64,
}

/// Compute the dominant affine basis of `samples` centred at `r_m`.
///
/// Fails with [`Error::DegenerateSpan`] when σ₃/σ₁ does not exceed
/// `span_ratio_threshold`, e.g. when every pose rotated about a single axis.
pub fn svd_basis(
    samples: &[RawReading],
    r_m: &Vector6<f64>,
    span_ratio_threshold: f64,
) -> Result<AffineBasis> {
    if samples.len() < 4 {
        return Err(Error::InsufficientSamples { needed: 4, got: samples.len() });
    }
    let n = samples.len();
    let mut centred = DMatrix::zeros(6, n);
    for (j, r) in samples.iter().enumerate() {
        centred.column_mut(j).copy_from(&(r.vector() - r_m));
    }
    let svd = centred.svd(true, false);
    let u = svd.u.as_ref().expect("u requested");

    let mut singular_values = Vector6::zeros();
    for (k, s) in svd.singular_values.iter().enumerate().take(6) {
        singular_values[k] = *s;
    }

    let ratio =
        if singular_values[0] > 0.0 { singular_values[2] / singular_values[0] } else { 0.0 };
    if !(ratio > span_ratio_threshold) {
        return Err(Error::DegenerateSpan { ratio, threshold: span_ratio_threshold });
    }

    let mut u1: SMatrix<f64, 6, 3> = u.fixed_view::<6, 3>(0, 0).into_owned();
    fix_column_signs(&mut u1);

    Ok(AffineBasis { r_m: *r_m, u1, singular_values })
}

/// Make each column's largest-magnitude entry positive (ties resolved by the
/// first such entry), so bases are reproducible across runs and platforms.
fn fix_column_signs(u1: &mut SMatrix<f64, 6, 3>) {
    for mut col in u1.column_iter_mut() {
        let mut lead = 0;
        for k in 1..6 {
            if col[k].abs() > col[lead].abs() {
                lead = k;
            }
        }
        if col[lead] < 0.0 {
            col.neg_mut();
        }
    }
}

impl AffineBasis {
    /// In-plane coordinates of a reading: `U₁ᵀ·(r − r_m)`.
    pub fn project(&self, r: &RawReading) -> Vector3<f64> {
        self.u1.transpose() * (r.vector() - self.r_m)
    }

    /// Reading reconstructed from in-plane coordinates: `r_m + U₁·λ`.
    pub fn lift(&self, lambda: &Vector3<f64>) -> Vector6<f64> {
        self.r_m + self.u1 * lambda
    }

    pub fn diagnostics(&self, samples: &[RawReading]) -> SubspaceDiagnostics {
        let sigma_ratio = if self.singular_values[2] > 0.0 {
            self.singular_values[3] / self.singular_values[2]
        } else {
            0.0
        };
        let mut sum_sq = 0.0;
        for r in samples {
            sum_sq += self.project(r).norm_squared();
        }
        let in_plane_rms =
            if samples.is_empty() { 0.0 } else { (sum_sq / samples.len() as f64).sqrt() };
        SubspaceDiagnostics { sigma_ratio, sample_count: samples.len(), in_plane_rms }
    }
}
