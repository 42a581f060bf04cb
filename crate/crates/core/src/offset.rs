//! Sensor-offset estimation from gravity-only raw data.
//!
//! Inside the affine basis of [`crate::subspace`], every sample obeys
//! `U₁ᵀ(rᵢ − r_m) = K·gᵢ + λ_o` with `K = U₁ᵀ·C⁻¹·M` and `λ_o` the in-plane
//! coordinate of the offset. Stacking the samples gives one linear system in
//! the twelve unknowns `(vec K, λ_o)`; the offset is recovered by lifting
//! `λ̂_o` back to raw coordinates. The calibration matrix is never needed,
//! which is what makes the offset estimable on its own.

use alloc::{format, string::String, vec::Vec};

use nalgebra::{DMatrix, DVector, Matrix3, Vector3, Vector6};

#[cfg(not(feature = "std"))]
use num_traits::Float as _;

use crate::error::{Error, Result};
use crate::model::{Dataset, GravityBand, GravitySample, RawReading};
use crate::subspace::{centroid, svd_basis, AffineBasis, DEFAULT_SPAN_RATIO_THRESHOLD};

/// Tunables for [`estimate_offset`]. The defaults suit clean or synthetic
/// data; widen `gravity` and raise `span_ratio_threshold` for noisy logs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OffsetOptions {
    /// σ₃/σ₁ floor forwarded to [`svd_basis`].
    pub span_ratio_threshold: f64,
    /// Singular values above σ₁ × this count toward the rank of the stacked
    /// system; anything below trips [`Error::RankDeficientSystem`].
    pub rank_tolerance: f64,
    /// Hard validation band for every gravity sample.
    pub gravity: GravityBand,
    /// Below this many samples per dataset a warning is attached (twelve
    /// unknowns want comfortable overdetermination).
    pub recommended_samples: usize,
}

impl Default for OffsetOptions {
    fn default() -> Self {
        Self {
            span_ratio_threshold: DEFAULT_SPAN_RATIO_THRESHOLD,
            rank_tolerance: 1e-10,
            gravity: GravityBand::default(),
            recommended_samples: 12,
        }
    }
}

/// Stacked least-squares system `Γ·x = r̄` with block rows
/// `(gᵢᵀ ⊗ I₃ | I₃)` and `r̄ᵢ = U₁ᵀ(rᵢ − r_m)`.
#[derive(Debug, Clone, PartialEq)]
pub struct OffsetSystem {
    pub gamma: DMatrix<f64>,
    pub rbar: DVector<f64>,
    pub basis: AffineBasis,
}

/// Solution of one offset system.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OffsetEstimate {
    /// Offset lifted back to raw coordinates: `r_m + U₁·λ̂_o`.
    pub o_hat: Vector6<f64>,
    /// In-plane offset coordinate.
    pub lambda_o: Vector3<f64>,
    /// Recovered `K = U₁ᵀ·C⁻¹·M` (diagnostic; exact on noiseless data).
    pub k_hat: Matrix3<f64>,
    /// RMS of the 3N stacked equation residuals, in raw units.
    pub residual_rms: f64,
    /// σ₁/σ₁₂ of Γ.
    pub condition_number: f64,
}

/// Per-dataset detail inside an [`OffsetSummary`].
#[derive(Debug, Clone, PartialEq)]
pub struct PerDatasetOffset {
    pub label: String,
    pub sample_count: usize,
    /// Singular values of the dataset's centred sample matrix.
    pub singular_values: Vector6<f64>,
    pub estimate: OffsetEstimate,
}

/// Result of [`estimate_offset`] over one or more datasets.
#[derive(Debug, Clone, PartialEq)]
pub struct OffsetSummary {
    /// Mean of the per-dataset offset estimates.
    pub offset: Vector6<f64>,
    /// Largest deviation of a per-dataset estimate from the mean (0 when a
    /// single dataset is given).
    pub spread: f64,
    pub per_dataset: Vec<PerDatasetOffset>,
    pub warnings: Vec<String>,
}

/// Assemble the stacked system for one dataset's samples in the given basis.
///
/// Every gravity sample is validated against `gravity` — a wrong-norm sample
/// would silently corrupt the recovered scale.
pub fn build_offset_system(
    basis: &AffineBasis,
    samples: &[(RawReading, GravitySample)],
    gravity: &GravityBand,
) -> Result<OffsetSystem> {
    if samples.is_empty() {
        return Err(Error::EmptyDataset);
    }
    for (_, g) in samples {
        gravity.check(g)?;
    }
    let n = samples.len();
    let mut gamma = DMatrix::zeros(3 * n, 12);
    let mut rbar = DVector::zeros(3 * n);
    for (i, (r, g)) in samples.iter().enumerate() {
        let lambda = basis.project(r);
        let gv = g.vector();
        for k in 0..3 {
            rbar[3 * i + k] = lambda[k];
            // (gᵀ ⊗ I₃): column block c of vec(K) carries g[c] on the diagonal.
            for c in 0..3 {
                gamma[(3 * i + k, 3 * c + k)] = gv[c];
            }
            gamma[(3 * i + k, 9 + k)] = 1.0;
        }
    }
    Ok(OffsetSystem { gamma, rbar, basis: *basis })
}

/// Solve a stacked offset system by SVD least squares.
pub fn solve_offset(system: &OffsetSystem, rank_tolerance: f64) -> Result<OffsetEstimate> {
    let svd = system.gamma.clone().svd(true, true);
    let sv = &svd.singular_values;
    let smax = sv[0];
    let rank = sv.iter().filter(|&&s| s > smax * rank_tolerance).count();
    if sv.len() < 12 || rank < 12 {
        return Err(Error::RankDeficientSystem { rank, cols: 12 });
    }
    let x = svd.solve(&system.rbar, 0.0).expect("u and v_t were requested");

    let k_hat = Matrix3::from_column_slice(&x.as_slice()[0..9]);
    let lambda_o = Vector3::new(x[9], x[10], x[11]);
    let o_hat = system.basis.lift(&lambda_o);
    let residual = &system.gamma * &x - &system.rbar;
    let residual_rms = residual.norm() / (system.rbar.len() as f64).sqrt();
    let condition_number = smax / sv[sv.len() - 1];

    Ok(OffsetEstimate { o_hat, lambda_o, k_hat, residual_rms, condition_number })
}

fn estimate_single(
    readings: &[RawReading],
    samples: &[(RawReading, GravitySample)],
    options: &OffsetOptions,
) -> Result<(AffineBasis, OffsetEstimate)> {
    let r_m = centroid(readings)?;
    let basis = svd_basis(readings, &r_m, options.span_ratio_threshold)?;
    let system = build_offset_system(&basis, samples, &options.gravity)?;
    let estimate = solve_offset(&system, options.rank_tolerance)?;
    Ok((basis, estimate))
}

/// Estimate the offset per dataset and summarise across datasets.
///
/// Each dataset gets its own basis and solve — loads with different wrench
/// maps span different subspaces, so their samples must not be mixed — and
/// the summary offset is the across-dataset mean with the worst-case spread
/// attached. For pooling same-load datasets see [`estimate_offset_pooled`].
pub fn estimate_offset(datasets: &[Dataset], options: &OffsetOptions) -> Result<OffsetSummary> {
    if datasets.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let mut warnings = Vec::new();
    let mut per_dataset = Vec::with_capacity(datasets.len());
    for ds in datasets {
        if ds.len() < 4 {
            return Err(Error::InsufficientSamples { needed: 4, got: ds.len() });
        }
        if ds.len() < options.recommended_samples {
            warnings.push(format!(
                "dataset '{}': {} samples, at least {} recommended for a stable solve",
                ds.label(),
                ds.len(),
                options.recommended_samples
            ));
        }
        let readings = ds.readings();
        let (basis, estimate) = estimate_single(&readings, ds.samples(), options)?;
        per_dataset.push(PerDatasetOffset {
            label: ds.label().into(),
            sample_count: ds.len(),
            singular_values: basis.singular_values,
            estimate,
        });
    }

    let mut offset = Vector6::zeros();
    for d in &per_dataset {
        offset += d.estimate.o_hat;
    }
    offset /= per_dataset.len() as f64;
    let spread =
        per_dataset.iter().map(|d| (d.estimate.o_hat - offset).norm()).fold(0.0f64, f64::max);

    Ok(OffsetSummary { offset, spread, per_dataset, warnings })
}

/// Merge all samples into one solve.
///
/// Only meaningful when every dataset carries the same load (identical
/// wrench map): the merged readings must still span a single 3-D subspace.
pub fn estimate_offset_pooled(
    datasets: &[Dataset],
    options: &OffsetOptions,
) -> Result<OffsetEstimate> {
    if datasets.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let mut samples = Vec::new();
    for ds in datasets {
        samples.extend_from_slice(ds.samples());
    }
    if samples.len() < 4 {
        return Err(Error::InsufficientSamples { needed: 4, got: samples.len() });
    }
    let readings: Vec<RawReading> = samples.iter().map(|(r, _)| *r).collect();
    let (_, estimate) = estimate_single(&readings, &samples, options)?;
    Ok(estimate)
}
