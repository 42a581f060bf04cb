//! Sensor, load, and dataset primitives shared by every estimator.
//!
//! Conventions fixed across the crate:
//!
//! * a wrench stacks force (N) on top of torque (N·m);
//! * vectorisation ([`vectorize`]) is column-major, and every flattened
//!   parameter block inside a solution vector follows that order;
//! * gravity samples store the gravity vector `g` expressed in the sensor
//!   frame (pointing "down"), not the accelerometer's specific force `-g`;
//!   ingest performs the sign flip when loading IMU logs.

use alloc::{string::String, vec::Vec};

use nalgebra::{DMatrix, DVector, Matrix3, Matrix6, SMatrix, Vector3, Vector6};

use crate::error::{Error, Result};

/// Standard gravity (m/s²), the default norm for gravity-sample validation.
pub const STANDARD_GRAVITY: f64 = 9.80665;

/// Default floor for the reciprocal condition number of a calibration matrix.
pub const DEFAULT_CONDITION_FLOOR: f64 = 1e-12;

/// Below this mass (kg) a centre-of-mass estimate `m·c / m` is meaningless
/// and is reported as undefined instead.
pub const DEFAULT_MASS_FLOOR: f64 = 1e-6;

fn ensure_finite(values: &[f64], what: &'static str) -> Result<()> {
    if values.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite { what })
    }
}

// ── raw samples ──────────────────────────────────────────────────────────

/// One uncalibrated six-channel sensor sample (raw counts).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RawReading(Vector6<f64>);

impl RawReading {
    pub fn new(values: Vector6<f64>) -> Result<Self> {
        ensure_finite(values.as_slice(), "raw reading")?;
        Ok(Self(values))
    }

    pub fn from_array(values: [f64; 6]) -> Result<Self> {
        Self::new(Vector6::from_column_slice(&values))
    }

    pub fn vector(&self) -> &Vector6<f64> {
        &self.0
    }
}

/// Gravity vector in the sensor frame, paired with a raw reading.
///
/// The norm is only validated against a [`GravityBand`] when the sample
/// enters an estimator (hard error) or ingestion (warning); the constructor
/// merely requires finite entries so synthetic and unit-test data can carry
/// arbitrary magnitudes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GravitySample(Vector3<f64>);

impl GravitySample {
    pub fn new(g: Vector3<f64>) -> Result<Self> {
        ensure_finite(g.as_slice(), "gravity sample")?;
        Ok(Self(g))
    }

    pub fn from_array(g: [f64; 3]) -> Result<Self> {
        Self::new(Vector3::from_column_slice(&g))
    }

    pub fn vector(&self) -> &Vector3<f64> {
        &self.0
    }

    pub fn norm(&self) -> f64 {
        self.0.norm()
    }
}

/// Accepted band for gravity-sample norms: `norm · (1 ± tolerance)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GravityBand {
    pub norm: f64,
    pub tolerance: f64,
}

impl Default for GravityBand {
    fn default() -> Self {
        Self { norm: STANDARD_GRAVITY, tolerance: 0.05 }
    }
}

impl GravityBand {
    pub fn new(norm: f64, tolerance: f64) -> Self {
        Self { norm, tolerance }
    }

    pub fn bounds(&self) -> (f64, f64) {
        (self.norm * (1.0 - self.tolerance), self.norm * (1.0 + self.tolerance))
    }

    pub fn contains(&self, norm: f64) -> bool {
        let (lo, hi) = self.bounds();
        norm >= lo && norm <= hi
    }

    /// Same centre, tolerance scaled by `factor` (ingest uses 2× for its
    /// drop threshold; noise studies widen the band explicitly).
    pub fn widened(&self, factor: f64) -> Self {
        Self { norm: self.norm, tolerance: self.tolerance * factor }
    }

    /// Hard validation used by the estimators.
    pub fn check(&self, g: &GravitySample) -> Result<()> {
        let norm = g.norm();
        if self.contains(norm) {
            Ok(())
        } else {
            let (lo, hi) = self.bounds();
            Err(Error::GravityNormOutOfBand { norm, lo, hi })
        }
    }
}

// ── wrenches and loads ───────────────────────────────────────────────────

/// Force (N) and torque (N·m) at the sensor frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Wrench {
    pub force: Vector3<f64>,
    pub torque: Vector3<f64>,
}

impl Wrench {
    pub fn from_vector(w: &Vector6<f64>) -> Self {
        Self { force: Vector3::new(w[0], w[1], w[2]), torque: Vector3::new(w[3], w[4], w[5]) }
    }

    pub fn to_vector(&self) -> Vector6<f64> {
        Vector6::new(
            self.force[0],
            self.force[1],
            self.force[2],
            self.torque[0],
            self.torque[1],
            self.torque[2],
        )
    }
}

fn wrench_map_of(mass: f64, mass_com: Vector3<f64>) -> SMatrix<f64, 6, 3> {
    let mut m = SMatrix::<f64, 6, 3>::zeros();
    m.fixed_view_mut::<3, 3>(0, 0).copy_from(&(Matrix3::identity() * mass));
    m.fixed_view_mut::<3, 3>(3, 0).copy_from(&mass_com.cross_matrix());
    m
}

/// Rigid-body load: mass (kg) and centre of mass (m) in the sensor frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InertialParams {
    mass: f64,
    com: Vector3<f64>,
}

impl InertialParams {
    pub fn new(mass: f64, com: Vector3<f64>) -> Result<Self> {
        if !mass.is_finite() {
            return Err(Error::NonFinite { what: "mass" });
        }
        if mass < 0.0 {
            return Err(Error::NegativeMass { mass });
        }
        ensure_finite(com.as_slice(), "centre of mass")?;
        Ok(Self { mass, com })
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn com(&self) -> Vector3<f64> {
        self.com
    }

    /// First moment `m·c`, the torque-side unknown of the estimators.
    pub fn mass_com(&self) -> Vector3<f64> {
        self.mass * self.com
    }

    /// The 6×3 map `M` with `M·g` = gravitational wrench of this body:
    /// `m·I` on the force rows, the cross-product matrix `(m·c)×` below.
    /// Rank 3 whenever the mass is positive.
    pub fn wrench_map(&self) -> SMatrix<f64, 6, 3> {
        wrench_map_of(self.mass, self.mass_com())
    }

    /// Wrench exerted by gravity on this body: force `m·g`, torque `(m·c)×g`.
    pub fn gravitational_wrench(&self, g: &GravitySample) -> Wrench {
        Wrench { force: self.mass * g.vector(), torque: self.mass_com().cross(g.vector()) }
    }
}

/// Known calibration load added to the sensor for one dataset.
///
/// Zero mass is legal (it marks a baseline dataset), but a calibration run
/// needs loads that differ across datasets — see the distinctness gate in
/// [`crate::calib`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AddedMassSpec {
    mass: f64,
    com: Vector3<f64>,
}

impl AddedMassSpec {
    pub fn new(mass: f64, com: Vector3<f64>) -> Result<Self> {
        let params = InertialParams::new(mass, com)?;
        Ok(Self { mass: params.mass, com: params.com })
    }

    /// Load with zero mass; used for baseline (sensor-only) datasets.
    pub fn none() -> Self {
        Self { mass: 0.0, com: Vector3::zeros() }
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn com(&self) -> Vector3<f64> {
        self.com
    }

    pub fn mass_com(&self) -> Vector3<f64> {
        self.mass * self.com
    }

    pub fn wrench_map(&self) -> SMatrix<f64, 6, 3> {
        wrench_map_of(self.mass, self.mass_com())
    }

    /// Equality within the given absolute mass (kg) and COM (m, Euclidean)
    /// tolerances.
    pub fn approx_eq(&self, other: &Self, mass_tol: f64, com_tol: f64) -> bool {
        (self.mass - other.mass).abs() <= mass_tol && (self.com - other.com).norm() <= com_tol
    }
}

impl From<AddedMassSpec> for InertialParams {
    fn from(spec: AddedMassSpec) -> Self {
        Self { mass: spec.mass, com: spec.com }
    }
}

// ── calibration model ────────────────────────────────────────────────────

/// Affine sensor model `wrench = C · (reading − offset)`.
///
/// Construction checks that `C` is numerically invertible: its reciprocal
/// condition number must exceed the floor (default
/// [`DEFAULT_CONDITION_FLOOR`]).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CalibrationModel {
    c: Matrix6<f64>,
    offset: Vector6<f64>,
    rcond: f64,
}

impl CalibrationModel {
    pub fn new(c: Matrix6<f64>, offset: Vector6<f64>) -> Result<Self> {
        Self::with_condition_floor(c, offset, DEFAULT_CONDITION_FLOOR)
    }

    pub fn with_condition_floor(c: Matrix6<f64>, offset: Vector6<f64>, floor: f64) -> Result<Self> {
        ensure_finite(c.as_slice(), "calibration matrix")?;
        ensure_finite(offset.as_slice(), "offset")?;
        let sv = c.svd(false, false).singular_values;
        let rcond = sv[5] / sv[0];
        if !(rcond > floor) {
            return Err(Error::SingularMatrix { rcond, floor });
        }
        Ok(Self { c, offset, rcond })
    }

    pub fn c(&self) -> &Matrix6<f64> {
        &self.c
    }

    pub fn offset(&self) -> &Vector6<f64> {
        &self.offset
    }

    /// σ_min/σ_max of `C`, computed at construction.
    pub fn reciprocal_condition(&self) -> f64 {
        self.rcond
    }

    /// `C⁻¹`; cannot fail thanks to the construction gate.
    pub fn inverse_c(&self) -> Matrix6<f64> {
        self.c.try_inverse().expect("invertibility checked at construction")
    }

    /// Apply the model to one raw reading.
    pub fn predict_wrench(&self, reading: &RawReading) -> Wrench {
        Wrench::from_vector(&(self.c * (reading.vector() - self.offset)))
    }
}

// ── datasets ─────────────────────────────────────────────────────────────

/// Static-pose samples recorded under one physical configuration (one added
/// load). Guaranteed non-empty.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    samples: Vec<(RawReading, GravitySample)>,
    added_mass: AddedMassSpec,
    label: String,
}

impl Dataset {
    pub fn new(
        samples: Vec<(RawReading, GravitySample)>,
        added_mass: AddedMassSpec,
        label: impl Into<String>,
    ) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::EmptyDataset);
        }
        Ok(Self { samples, added_mass, label: label.into() })
    }

    pub fn samples(&self) -> &[(RawReading, GravitySample)] {
        &self.samples
    }

    pub fn added_mass(&self) -> &AddedMassSpec {
        &self.added_mass
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn readings(&self) -> Vec<RawReading> {
        self.samples.iter().map(|(r, _)| *r).collect()
    }
}

// ── vectorisation helpers ────────────────────────────────────────────────

/// Column-major vectorisation: stacks the columns of `m` into one vector.
pub fn vectorize(m: &DMatrix<f64>) -> DVector<f64> {
    DVector::from_column_slice(m.as_slice())
}

/// Kronecker product `a ⊗ b`.
///
/// Together with [`vectorize`] it turns matrix equations into linear systems
/// via `vec(A·X·B) = (Bᵀ ⊗ A)·vec(X)`.
pub fn kronecker(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    a.kronecker(b)
}

// ── tests ────────────────────────────────────────────────────────────────

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha12Rng;

    #[test]
    fn vectorize_is_column_major() {
        // rows (1,2) / (3,4): columns are (1,3) then (2,4).
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 3.0, 4.0]);
        let v = vectorize(&m);
        assert_eq!(v.as_slice(), &[1.0, 3.0, 2.0, 4.0]);
    }

    #[test]
    fn vectorize_identity2() {
        let v = vectorize(&DMatrix::identity(2, 2));
        assert_eq!(v.as_slice(), &[1.0, 0.0, 0.0, 1.0]);
    }

    #[test]
    fn kronecker_identity_is_block_diagonal() {
        let b = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 3.0, 4.0]);
        let k = kronecker(&DMatrix::identity(2, 2), &b);
        assert_eq!(k.shape(), (4, 4));
        assert_eq!(k[(0, 0)], 1.0);
        assert_eq!(k[(1, 1)], 4.0);
        assert_eq!(k[(2, 2)], 1.0);
        assert_eq!(k[(3, 2)], 3.0);
        assert_eq!(k[(0, 2)], 0.0);
        assert_eq!(k[(2, 0)], 0.0);
    }

    #[test]
    fn kronecker_dimensions() {
        let a = DMatrix::repeat(2, 3, 1.0);
        let b = DMatrix::repeat(4, 5, 1.0);
        assert_eq!(kronecker(&a, &b).shape(), (8, 15));
    }

    fn random_dmatrix(rng: &mut ChaCha12Rng, r: usize, c: usize) -> DMatrix<f64> {
        DMatrix::from_fn(r, c, |_, _| rng.random_range(-10.0..10.0))
    }

    #[test]
    fn vec_kron_identity_random_shapes() {
        // vec(A·X·B) = (Bᵀ ⊗ A)·vec(X) over random shapes and entries.
        let mut rng = ChaCha12Rng::seed_from_u64(7);
        for _ in 0..50 {
            let (m, n, p) = (
                rng.random_range(1..5usize),
                rng.random_range(1..5usize),
                rng.random_range(1..5usize),
            );
            let a = random_dmatrix(&mut rng, m, n);
            let x = random_dmatrix(&mut rng, n, p);
            let q = rng.random_range(1..5usize);
            let b = random_dmatrix(&mut rng, p, q);
            let lhs = vectorize(&(&a * &x * &b));
            let rhs = kronecker(&b.transpose(), &a) * vectorize(&x);
            assert_relative_eq!(lhs, rhs, epsilon = 1e-10, max_relative = 1e-10);
        }
    }

    #[test]
    fn wrench_map_example() {
        let p = InertialParams::new(2.0, Vector3::new(0.0, 0.0, 0.1)).unwrap();
        let m = p.wrench_map();
        let expected_top = Matrix3::identity() * 2.0;
        assert_eq!(m.fixed_view::<3, 3>(0, 0), expected_top.fixed_view::<3, 3>(0, 0));
        let bottom = m.fixed_view::<3, 3>(3, 0);
        let expected = Matrix3::new(0.0, -0.2, 0.0, 0.2, 0.0, 0.0, 0.0, 0.0, 0.0);
        assert_relative_eq!(bottom.into_owned(), expected, epsilon = 1e-15);
    }

    #[test]
    fn wrench_map_has_rank_3_for_positive_mass() {
        let mut rng = ChaCha12Rng::seed_from_u64(3);
        for _ in 0..20 {
            let p = InertialParams::new(
                rng.random_range(0.1..5.0),
                Vector3::from_fn(|_, _| rng.random_range(-0.5..0.5)),
            )
            .unwrap();
            let m = DMatrix::from_column_slice(6, 3, p.wrench_map().as_slice());
            let svd = m.svd(false, false);
            let rank =
                svd.singular_values.iter().filter(|&&s| s > svd.singular_values[0] * 1e-12).count();
            assert_eq!(rank, 3);
        }
    }

    #[test]
    fn gravitational_wrench_example() {
        let p = InertialParams::new(0.51, Vector3::zeros()).unwrap();
        let g = GravitySample::from_array([0.0, 0.0, -9.81]).unwrap();
        let w = p.gravitational_wrench(&g);
        assert_relative_eq!(w.force.norm(), 5.003, epsilon = 1e-3);
        assert_eq!(w.torque, Vector3::zeros());
    }

    proptest! {
        #[test]
        fn torque_is_com_cross_force(
            mass in 0.01f64..10.0,
            cx in -1.0f64..1.0, cy in -1.0f64..1.0, cz in -1.0f64..1.0,
            gx in -10.0f64..10.0, gy in -10.0f64..10.0, gz in -10.0f64..10.0,
        ) {
            let p = InertialParams::new(mass, Vector3::new(cx, cy, cz)).unwrap();
            let g = GravitySample::new(Vector3::new(gx, gy, gz)).unwrap();
            let w = p.gravitational_wrench(&g);
            let expected = p.com().cross(&w.force);
            prop_assert!((w.torque - expected).norm() <= 1e-12 * (1.0 + expected.norm()));
        }

        #[test]
        fn wrench_map_matches_gravitational_wrench(
            mass in 0.0f64..10.0,
            cx in -1.0f64..1.0, cy in -1.0f64..1.0, cz in -1.0f64..1.0,
            gx in -10.0f64..10.0, gy in -10.0f64..10.0, gz in -10.0f64..10.0,
        ) {
            let p = InertialParams::new(mass, Vector3::new(cx, cy, cz)).unwrap();
            let g = GravitySample::new(Vector3::new(gx, gy, gz)).unwrap();
            let via_map = p.wrench_map() * g.vector();
            let direct = p.gravitational_wrench(&g).to_vector();
            prop_assert!((via_map - direct).norm() <= 1e-12 * (1.0 + direct.norm()));
        }
    }

    #[test]
    fn predict_wrench_example() {
        let model = CalibrationModel::new(Matrix6::identity() * 2.0, Vector6::repeat(1.0)).unwrap();
        let r = RawReading::from_array([2.0, 1.0, 0.0, 0.0, 0.0, 1.0]).unwrap();
        let w = model.predict_wrench(&r).to_vector();
        assert_eq!(w.as_slice(), &[2.0, 0.0, -2.0, -2.0, -2.0, 0.0]);
    }

    #[test]
    fn predict_wrench_is_affine() {
        let mut rng = ChaCha12Rng::seed_from_u64(11);
        let c = Matrix6::from_fn(|_, _| rng.random_range(-1.0..1.0)) + Matrix6::identity() * 3.0;
        let o = Vector6::from_fn(|_, _| rng.random_range(-5.0..5.0));
        let model = CalibrationModel::new(c, o).unwrap();
        let r1 = Vector6::from_fn(|_, _| rng.random_range(-5.0..5.0));
        let r2 = Vector6::from_fn(|_, _| rng.random_range(-5.0..5.0));
        let w1 = model.predict_wrench(&RawReading::new(r1).unwrap()).to_vector();
        let w2 = model.predict_wrench(&RawReading::new(r2).unwrap()).to_vector();
        let mid = model.predict_wrench(&RawReading::new((r1 + r2) * 0.5).unwrap()).to_vector();
        assert_relative_eq!(mid, (w1 + w2) * 0.5, epsilon = 1e-12, max_relative = 1e-12);
    }

    #[test]
    fn calibration_model_rejects_singular_c() {
        let mut c = Matrix6::identity();
        c[(5, 5)] = 0.0;
        let err = CalibrationModel::new(c, Vector6::zeros()).unwrap_err();
        assert!(matches!(err, Error::SingularMatrix { .. }));
    }

    #[test]
    fn calibration_model_reports_reciprocal_condition() {
        let c = Matrix6::from_diagonal(&Vector6::new(6.0, 5.0, 4.0, 3.0, 2.0, 1.0));
        let model = CalibrationModel::new(c, Vector6::zeros()).unwrap();
        assert_relative_eq!(model.reciprocal_condition(), 1.0 / 6.0, epsilon = 1e-12);
    }

    #[test]
    fn calibration_model_respects_custom_floor() {
        let c = Matrix6::from_diagonal(&Vector6::new(1.0, 1.0, 1.0, 1.0, 1.0, 1e-4));
        assert!(CalibrationModel::with_condition_floor(c, Vector6::zeros(), 1e-3).is_err());
        assert!(CalibrationModel::with_condition_floor(c, Vector6::zeros(), 1e-5).is_ok());
    }

    #[test]
    fn gravity_band_default_bounds() {
        let band = GravityBand::default();
        let (lo, hi) = band.bounds();
        assert_relative_eq!(lo, 9.3163175, epsilon = 1e-9);
        assert_relative_eq!(hi, 10.2969825, epsilon = 1e-9);
        assert!(band.contains(STANDARD_GRAVITY));
        assert!(!band.contains(5.0));
    }

    #[test]
    fn gravity_band_check_is_hard_error() {
        let band = GravityBand::default();
        let g = GravitySample::from_array([0.0, 0.0, -5.0]).unwrap();
        assert!(matches!(band.check(&g), Err(Error::GravityNormOutOfBand { .. })));
        let ok = GravitySample::from_array([0.0, 0.0, -STANDARD_GRAVITY]).unwrap();
        assert!(band.check(&ok).is_ok());
    }

    #[test]
    fn constructors_reject_non_finite_and_negative() {
        assert!(RawReading::from_array([f64::NAN, 0.0, 0.0, 0.0, 0.0, 0.0]).is_err());
        assert!(GravitySample::from_array([0.0, f64::INFINITY, 0.0]).is_err());
        assert!(matches!(
            InertialParams::new(-1.0, Vector3::zeros()),
            Err(Error::NegativeMass { .. })
        ));
        assert!(AddedMassSpec::new(0.0, Vector3::zeros()).is_ok());
    }

    #[test]
    fn empty_dataset_is_rejected() {
        assert_eq!(
            Dataset::new(Vec::new(), AddedMassSpec::none(), "x").unwrap_err(),
            Error::EmptyDataset
        );
    }

    #[test]
    fn zero_mass_wrench_map_is_zero() {
        let spec = AddedMassSpec::new(0.0, Vector3::new(0.3, 0.2, 0.1)).unwrap();
        assert_eq!(spec.wrench_map(), SMatrix::<f64, 6, 3>::zeros());
    }

    #[test]
    fn added_mass_approx_eq_tolerances() {
        let a = AddedMassSpec::new(0.51, Vector3::new(0.1, 0.0, 0.0)).unwrap();
        let b = AddedMassSpec::new(0.51 + 5e-10, Vector3::new(0.1, 5e-10, 0.0)).unwrap();
        let c = AddedMassSpec::new(0.52, Vector3::new(0.1, 0.0, 0.0)).unwrap();
        assert!(a.approx_eq(&b, 1e-9, 1e-9));
        assert!(!a.approx_eq(&c, 1e-9, 1e-9));
    }
}
