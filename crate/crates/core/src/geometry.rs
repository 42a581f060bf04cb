//! Geometric and inertial validation of a calibration.
//!
//! Two checks, both independent of how the calibration was obtained:
//!
//! * **Sphericity** — a rigidly loaded sensor swept through static poses sees
//!   gravity forces of constant magnitude `m·‖g‖`, so the calibrated force
//!   vectors must lie on a sphere. Fitting a general quadric
//!   ([`fit_ellipsoid`]) and comparing its semiaxes exposes per-axis scale
//!   errors that a sphere fit would average away.
//! * **Added-mass recovery** — solving each dataset's calibrated wrenches for
//!   mass and first moment ([`estimate_inertial`]) and subtracting the
//!   baseline dataset must reproduce the known added loads
//!   ([`added_mass_recovery`]).

use alloc::{string::String, vec::Vec};

use nalgebra::{DMatrix, DVector, Matrix3, Vector3};

#[cfg(not(feature = "std"))]
use num_traits::Float as _;

use crate::calib::jacobian_blocks;
use crate::error::{Error, Result};
use crate::model::{AddedMassSpec, CalibrationModel, Dataset, GravityBand, DEFAULT_MASS_FLOOR};

/// A 10-parameter quadric has this many degrees of freedom to pin down.
pub const MIN_QUADRIC_POINTS: usize = 10;

/// σ₃/σ₁ of the centred point cloud at or below this is treated as coplanar.
pub const COPLANARITY_THRESHOLD: f64 = 1e-8;

// ── ellipsoid fitting ────────────────────────────────────────────────────

/// Ellipsoid recovered from a point cloud by algebraic quadric fitting.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EllipsoidFit {
    pub center: Vector3<f64>,
    /// Semiaxis lengths, descending.
    pub semiaxes: Vector3<f64>,
    /// Unit principal directions as columns, matching [`Self::semiaxes`];
    /// right-handed.
    pub axes: Matrix3<f64>,
    /// σ_min of the normalised design matrix over √N — an algebraic misfit
    /// measure, zero for points exactly on a quadric. The points are centred
    /// and scaled to unit RMS first, so the value is comparable across
    /// clouds of different size.
    pub rms_residual: f64,
}

/// Fit the general quadric `xᵀA x + bᵀx + d = 0` in the least-squares sense
/// (`‖θ‖ = 1` on the 10 stacked coefficients) and extract the ellipsoid it
/// describes.
///
/// The cloud is centred and scaled to unit RMS before the fit, which keeps
/// the design matrix well conditioned regardless of units. Errors:
/// fewer than [`MIN_QUADRIC_POINTS`] points, a coplanar/collinear cloud, or
/// a quadric that is not an ellipsoid (mixed-sign eigenvalues, paraboloid,
/// or imaginary radius).
pub fn fit_ellipsoid(points: &[Vector3<f64>]) -> Result<EllipsoidFit> {
    let n = points.len();
    if n < MIN_QUADRIC_POINTS {
        return Err(Error::InsufficientSamples { needed: MIN_QUADRIC_POINTS, got: n });
    }
    for p in points {
        if !(p[0].is_finite() && p[1].is_finite() && p[2].is_finite()) {
            return Err(Error::NonFinite { what: "quadric point" });
        }
    }

    let mean = points.iter().fold(Vector3::zeros(), |acc, p| acc + p) / n as f64;
    let spread: f64 = points.iter().map(|p| (p - mean).norm_squared()).sum();
    let scale = (spread / n as f64).sqrt();
    if !(scale > 0.0) {
        return Err(Error::DegeneratePointSet { what: "all points coincide" });
    }
    let q: Vec<Vector3<f64>> = points.iter().map(|p| (p - mean) / scale).collect();

    let centred = DMatrix::from_fn(3, n, |i, j| q[j][i]);
    let sv = centred.svd(false, false).singular_values;
    if sv[2] <= sv[0] * COPLANARITY_THRESHOLD {
        return Err(Error::DegeneratePointSet { what: "points are coplanar or collinear" });
    }

    // Design rows (x², y², z², xy, xz, yz, x, y, z, 1); the best quadric is
    // the right singular vector of the smallest singular value.
    let design = DMatrix::from_fn(n, 10, |i, j| {
        let p = &q[i];
        match j {
            0 => p[0] * p[0],
            1 => p[1] * p[1],
            2 => p[2] * p[2],
            3 => p[0] * p[1],
            4 => p[0] * p[2],
            5 => p[1] * p[2],
            6 => p[0],
            7 => p[1],
            8 => p[2],
            _ => 1.0,
        }
    });
    let svd = design.svd(false, true);
    let v_t = svd.v_t.as_ref().expect("v_t was requested");
    let sigma_min = svd.singular_values[9];
    let mut theta = [0.0f64; 10];
    for (k, t) in theta.iter_mut().enumerate() {
        *t = v_t[(9, k)];
    }
    // θ and −θ describe the same quadric; pick the sign with positive trace
    // so an ellipsoid yields a positive definite A.
    if theta[0] + theta[1] + theta[2] < 0.0 {
        for t in &mut theta {
            *t = -*t;
        }
    }

    let a = Matrix3::new(
        theta[0],
        theta[3] / 2.0,
        theta[4] / 2.0,
        theta[3] / 2.0,
        theta[1],
        theta[5] / 2.0,
        theta[4] / 2.0,
        theta[5] / 2.0,
        theta[2],
    );
    let b = Vector3::new(theta[6], theta[7], theta[8]);

    let eig = a.symmetric_eigen();
    let mut order = [0usize, 1, 2];
    order.sort_by(|&i, &j| {
        eig.eigenvalues[i]
            .partial_cmp(&eig.eigenvalues[j])
            .expect("eigenvalues of a finite symmetric matrix are finite")
    });
    let (l_min, l_max) = (eig.eigenvalues[order[0]], eig.eigenvalues[order[2]]);
    if !(l_max > 0.0) || !(l_min > l_max * 1e-12) {
        return Err(Error::NonEllipsoidQuadric);
    }

    // Centre x₀ = −A⁻¹b/2 through the eigendecomposition, then the radius
    // term k with (x − x₀)ᵀA(x − x₀) = k.
    let vt_b = eig.eigenvectors.transpose() * b;
    let solved = Vector3::from_fn(|i, _| vt_b[i] / eig.eigenvalues[i]);
    let centre_n = -0.5 * (eig.eigenvectors * solved);
    let k = centre_n.dot(&(a * centre_n)) - theta[9];
    if !(k > 0.0) {
        return Err(Error::NonEllipsoidQuadric);
    }

    // λ ascending ⇒ semiaxes √(k/λ) descending.
    let mut semiaxes = Vector3::zeros();
    let mut axes = Matrix3::zeros();
    for (slot, &idx) in order.iter().enumerate() {
        semiaxes[slot] = scale * (k / eig.eigenvalues[idx]).sqrt();
        axes.set_column(slot, &eig.eigenvectors.column(idx));
    }
    fix_axis_signs(&mut axes);
    if axes.determinant() < 0.0 {
        axes.column_mut(2).neg_mut();
    }

    Ok(EllipsoidFit {
        center: mean + scale * centre_n,
        semiaxes,
        axes,
        rms_residual: sigma_min / (n as f64).sqrt(),
    })
}

/// Deterministic eigenvector orientation: largest-magnitude entry positive.
fn fix_axis_signs(axes: &mut Matrix3<f64>) {
    for mut col in axes.column_iter_mut() {
        let mut dominant = 0;
        for k in 1..3 {
            if col[k].abs() > col[dominant].abs() {
                dominant = k;
            }
        }
        if col[dominant] < 0.0 {
            col.neg_mut();
        }
    }
}

// ── sphericity ───────────────────────────────────────────────────────────

/// How spherical a cloud of calibrated force vectors is.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SphericityReport {
    /// Semiaxes of the fitted ellipsoid, descending.
    pub semiaxes: Vector3<f64>,
    /// `(max − min) / mean` of the semiaxes; 0 for a perfect sphere.
    pub anisotropy: f64,
    pub mean_force_norm: f64,
}

/// Fit an ellipsoid to calibrated force vectors and report its anisotropy.
///
/// A correctly calibrated sensor under a constant rigid load produces forces
/// of constant magnitude, so anisotropy directly measures residual per-axis
/// scale error.
pub fn sphericity(forces: &[Vector3<f64>]) -> Result<SphericityReport> {
    let fit = fit_ellipsoid(forces)?;
    let s = fit.semiaxes;
    let mean = (s[0] + s[1] + s[2]) / 3.0;
    let norm_sum: f64 = forces.iter().map(Vector3::norm).sum();
    Ok(SphericityReport {
        semiaxes: s,
        anisotropy: (s[0] - s[2]) / mean,
        mean_force_norm: norm_sum / forces.len() as f64,
    })
}

// ── inertial estimation ──────────────────────────────────────────────────

/// Mass and first moment solved from one dataset's calibrated wrenches.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InertialEstimate {
    /// Total mass on the sensor (kg): attached body plus any added load.
    pub mass: f64,
    /// Total first moment `m·c` (kg·m).
    pub mass_com: Vector3<f64>,
    /// `m·c / m`; undefined when the mass is at or below the floor.
    pub com: Option<Vector3<f64>>,
    /// RMS of the stacked wrench-equation residuals.
    pub residual_rms: f64,
}

/// Solve `M(m, m·c)·gᵢ = C(rᵢ − o)` for the total inertial parameters.
///
/// Gravity samples are validated against `gravity`. At least two distinct
/// gravity directions are needed; with fewer the 4-column system loses rank
/// and [`Error::RankDeficientInertial`] is returned.
pub fn estimate_inertial(
    model: &CalibrationModel,
    dataset: &Dataset,
    gravity: &GravityBand,
) -> Result<InertialEstimate> {
    let blocks = jacobian_blocks();
    let n = dataset.len();
    let mut a = DMatrix::zeros(6 * n, 4);
    let mut rhs = DVector::zeros(6 * n);
    for (i, (r, g)) in dataset.samples().iter().enumerate() {
        gravity.check(g)?;
        let gv = g.vector();
        let block = blocks[0] * gv[0] + blocks[1] * gv[1] + blocks[2] * gv[2];
        a.view_mut((6 * i, 0), (6, 4)).copy_from(&block);
        rhs.rows_mut(6 * i, 6).copy_from(&model.predict_wrench(r).to_vector());
    }

    let svd = a.clone().svd(true, true);
    let sv = &svd.singular_values;
    if !(sv[3] > sv[0] * 1e-10) {
        return Err(Error::RankDeficientInertial);
    }
    let x = svd.solve(&rhs, 0.0).expect("u and v_t were requested");
    let residual_rms = (&a * &x - &rhs).norm() / (6.0 * n as f64).sqrt();

    let mass = x[0];
    let mass_com = Vector3::new(x[1], x[2], x[3]);
    Ok(InertialEstimate {
        mass,
        mass_com,
        com: (mass > DEFAULT_MASS_FLOOR).then(|| mass_com / mass),
        residual_rms,
    })
}

// ── added-mass recovery ──────────────────────────────────────────────────

/// Difference of two inertial estimates compared against a known added load.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InertialRecovery {
    /// Estimated added mass: total minus baseline.
    pub mass_est: f64,
    /// Estimated added-load centre of mass, when the mass difference clears
    /// the floor.
    pub com_est: Option<Vector3<f64>>,
    pub mass_truth: f64,
    /// Undefined for a zero-mass (baseline) spec.
    pub com_truth: Option<Vector3<f64>>,
}

impl InertialRecovery {
    pub fn mass_error(&self) -> f64 {
        (self.mass_est - self.mass_truth).abs()
    }

    /// Euclidean COM error (m), when both sides are defined.
    pub fn com_error(&self) -> Option<f64> {
        match (self.com_est, self.com_truth) {
            (Some(est), Some(truth)) => Some((est - truth).norm()),
            _ => None,
        }
    }
}

/// Compare `total − baseline` against the declared added load.
pub fn added_mass_recovery(
    total: &InertialEstimate,
    baseline: &InertialEstimate,
    truth: &AddedMassSpec,
) -> InertialRecovery {
    let mass_est = total.mass - baseline.mass;
    let mc_est = total.mass_com - baseline.mass_com;
    InertialRecovery {
        mass_est,
        com_est: (mass_est > DEFAULT_MASS_FLOOR).then(|| mc_est / mass_est),
        mass_truth: truth.mass(),
        com_truth: (truth.mass() > DEFAULT_MASS_FLOOR).then(|| truth.com()),
    }
}

// ── validation report ────────────────────────────────────────────────────

/// Validation results for one dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidationRow {
    pub label: String,
    pub added_mass: AddedMassSpec,
    pub sphericity: SphericityReport,
    pub inertial: InertialEstimate,
    /// `None` for the baseline row.
    pub recovery: Option<InertialRecovery>,
}

/// Full validation of a calibration against held-out datasets.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub baseline_label: String,
    pub rows: Vec<ValidationRow>,
}

/// Run both validation checks on every dataset.
///
/// `baseline_index` selects the dataset whose inertial estimate is
/// subtracted to recover the added loads — normally the one recorded with
/// nothing added.
pub fn validation_report(
    model: &CalibrationModel,
    datasets: &[Dataset],
    baseline_index: usize,
    gravity: &GravityBand,
) -> Result<ValidationReport> {
    if baseline_index >= datasets.len() {
        return Err(Error::BaselineOutOfRange { index: baseline_index, len: datasets.len() });
    }
    let inertials: Vec<InertialEstimate> =
        datasets.iter().map(|ds| estimate_inertial(model, ds, gravity)).collect::<Result<_>>()?;
    let baseline = inertials[baseline_index];

    let mut rows = Vec::with_capacity(datasets.len());
    for (j, ds) in datasets.iter().enumerate() {
        let forces: Vec<Vector3<f64>> =
            ds.samples().iter().map(|(r, _)| model.predict_wrench(r).force).collect();
        rows.push(ValidationRow {
            label: ds.label().into(),
            added_mass: *ds.added_mass(),
            sphericity: sphericity(&forces)?,
            inertial: inertials[j],
            recovery: (j != baseline_index)
                .then(|| added_mass_recovery(&inertials[j], &baseline, ds.added_mass())),
        });
    }

    Ok(ValidationReport { baseline_label: datasets[baseline_index].label().into(), rows })
}

// ── tests ────────────────────────────────────────────────────────────────
