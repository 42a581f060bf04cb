//! Joint estimation of the 6×6 calibration matrix and the attached body's
//! inertial parameters from offset-corrected raw data under known added loads.
//!
//! For dataset `j` with readings `R_j` (offset already subtracted), gravity
//! samples `G_j`, unknown body wrench map `M_b` and known added map `M_a^j`:
//!
//! ```text
//! C·R_j − M_b·G_j = M_a^j·G_j
//! ```
//!
//! Vectorising column-major and writing `vec(M_b) = H·(m, m·c)` with the
//! sparse selector `H` (see [`wrench_map_jacobian`]) yields block rows
//!
//! ```text
//! Θ_j = [ R_jᵀ ⊗ I₆ | −(G_jᵀ ⊗ I₆)·H ],   β_j = vec(M_a^j·G_j),
//! ```
//!
//! one linear system `Θ·x = β` in the forty unknowns
//! `x = (vec C, m, m·c)`. Identifiability needs at least three datasets with
//! distinct added loads: for any two wrench maps the stacked 6×6 matrix
//! `(M₁ | M₂)` is singular (its Schur complement is an odd-dimensional skew
//! matrix), so two loads can never excite all six wrench directions.

use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector, Matrix6, SMatrix, Vector3, Vector6};

#[cfg(not(feature = "std"))]
use num_traits::Float as _;

use crate::error::{Error, IdentifiabilityFailure, Result};
use crate::model::{AddedMassSpec, Dataset, GravityBand, InertialParams, DEFAULT_MASS_FLOOR};

/// Jacobian `H` of the column-major vectorised wrench map with respect to
/// `(m, m·c)`: `vec(M(m, c)) = H·(m, (m·c)₁, (m·c)₂, (m·c)₃)`.
///
/// Nine nonzero entries, all ±1; at most one per row.
pub fn wrench_map_jacobian() -> SMatrix<f64, 18, 4> {
    let mut h = SMatrix::<f64, 18, 4>::zeros();
    // Column 1 of M: (m, 0, 0 | 0, (mc)₃, −(mc)₂)
    h[(0, 0)] = 1.0;
    h[(4, 3)] = 1.0;
    h[(5, 2)] = -1.0;
    // Column 2 of M: (0, m, 0 | −(mc)₃, 0, (mc)₁)
    h[(7, 0)] = 1.0;
    h[(9, 3)] = -1.0;
    h[(11, 1)] = 1.0;
    // Column 3 of M: (0, 0, m | (mc)₂, −(mc)₁, 0)
    h[(14, 0)] = 1.0;
    h[(15, 2)] = 1.0;
    h[(16, 1)] = -1.0;
    h
}

/// The three 6×4 slices of [`wrench_map_jacobian`], one per gravity
/// component: `∂(M·g)/∂(m, m·c) = g₁·B₁ + g₂·B₂ + g₃·B₃`.
pub(crate) fn jacobian_blocks() -> [SMatrix<f64, 6, 4>; 3] {
    let h = wrench_map_jacobian();
    [
        h.fixed_view::<6, 4>(0, 0).into_owned(),
        h.fixed_view::<6, 4>(6, 0).into_owned(),
        h.fixed_view::<6, 4>(12, 0).into_owned(),
    ]
}

/// Tunables for [`solve_calibration`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CalibOptions {
    /// Singular values above σ₁ × this count toward the numerical rank.
    pub rank_tolerance: f64,
    /// Condition number above which the estimate is flagged
    /// [`CalibEstimate::ill_conditioned`] (the result is still returned).
    pub condition_warning: f64,
    /// Below this mass (kg) the recovered centre of mass is undefined.
    pub mass_floor: f64,
    /// Absolute tolerances of the added-load distinctness gate.
    pub added_mass_tolerance: f64,
    pub added_com_tolerance: f64,
}

impl Default for CalibOptions {
    fn default() -> Self {
        Self {
            rank_tolerance: 1e-10,
            condition_warning: 1e10,
            mass_floor: DEFAULT_MASS_FLOOR,
            added_mass_tolerance: 1e-9,
            added_com_tolerance: 1e-9,
        }
    }
}

/// Stacked system `Θ·x = β` over all datasets, plus the added-load specs the
/// solve gates need.
#[derive(Debug, Clone, PartialEq)]
pub struct CalibSystem {
    pub theta: DMatrix<f64>,
    pub beta: DVector<f64>,
    pub dataset_sizes: Vec<usize>,
    pub added: Vec<AddedMassSpec>,
}

impl CalibSystem {
    pub fn dataset_count(&self) -> usize {
        self.dataset_sizes.len()
    }
}

/// Rank and conditioning diagnostics of a [`CalibSystem`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdentifiabilityReport {
    /// At least three datasets present.
    pub nd_ok: bool,
    /// Numerical rank of the (column-equilibrated) Θ at σ₁ × tolerance.
    pub rank: usize,
    /// `rank == 40`.
    pub full_rank: bool,
    /// σ₁/σ₄₀ of the equilibrated Θ (∞ when σ₄₀ vanishes).
    pub condition: f64,
}

/// Solution of one calibration system.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CalibEstimate {
    pub c_hat: Matrix6<f64>,
    /// Estimated body mass (kg).
    pub m_hat: f64,
    /// Estimated first moment `m·c` (kg·m).
    pub mc_hat: Vector3<f64>,
    /// `m·c / m`, undefined below the mass floor.
    pub com_hat: Option<Vector3<f64>>,
    /// RMS of the stacked equation residuals (N / N·m mix).
    pub residual_rms: f64,
    /// σ₁/σ₄₀ of the equilibrated Θ.
    pub theta_condition: f64,
    pub theta_rank: usize,
    /// Condition exceeded [`CalibOptions::condition_warning`]; treat the
    /// estimate with suspicion.
    pub ill_conditioned: bool,
}

impl CalibEstimate {
    /// Body parameters when the mass cleared the floor.
    pub fn body(&self) -> Option<InertialParams> {
        self.com_hat
            .map(|com| InertialParams::new(self.m_hat, com).expect("finite by construction"))
    }
}

/// Assemble `Θ` and `β` from offset-corrected datasets.
///
/// Every gravity sample is validated against `gravity`; the offset is the
/// caller's best estimate (see [`crate::offset`]).
pub fn build_calib_system(
    datasets: &[Dataset],
    offset: &Vector6<f64>,
    gravity: &GravityBand,
) -> Result<CalibSystem> {
    if datasets.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if !offset.iter().all(|v| v.is_finite()) {
        return Err(Error::NonFinite { what: "offset" });
    }
    let n_t: usize = datasets.iter().map(Dataset::len).sum();
    let h_blocks = jacobian_blocks();

    let mut theta = DMatrix::zeros(6 * n_t, 40);
    let mut beta = DVector::zeros(6 * n_t);
    let mut row = 0;
    for ds in datasets {
        let ma = ds.added_mass().wrench_map();
        for (r, g) in ds.samples() {
            gravity.check(g)?;
            let corrected = r.vector() - offset;
            // (r̃ᵀ ⊗ I₆): column block c of vec(C) carries r̃[c] on the diagonal.
            for c in 0..6 {
                for k in 0..6 {
                    theta[(row + k, 6 * c + k)] = corrected[c];
                }
            }
            let gv = g.vector();
            let right: SMatrix<f64, 6, 4> =
                -(h_blocks[0] * gv[0] + h_blocks[1] * gv[1] + h_blocks[2] * gv[2]);
            theta.view_mut((row, 36), (6, 4)).copy_from(&right);
            beta.rows_mut(row, 6).copy_from(&(ma * gv));
            row += 6;
        }
    }

    Ok(CalibSystem {
        theta,
        beta,
        dataset_sizes: datasets.iter().map(Dataset::len).collect(),
        added: datasets.iter().map(|d| *d.added_mass()).collect(),
    })
}

/// Column-equilibrated copy of `theta` and the scale factors used, so rank
/// and condition tests are invariant to the mixed units of the unknowns.
fn equilibrated(theta: &DMatrix<f64>) -> (DMatrix<f64>, Vec<f64>) {
    let mut scaled = theta.clone();
    let mut norms = Vec::with_capacity(theta.ncols());
    for mut col in scaled.column_iter_mut() {
        let n = col.norm();
        let n = if n > 0.0 { n } else { 1.0 };
        col /= n;
        norms.push(n);
    }
    (scaled, norms)
}

fn analyze_singular_values(
    sv: &[f64],
    n_datasets: usize,
    rank_tolerance: f64,
) -> IdentifiabilityReport {
    let smax = sv.first().copied().unwrap_or(0.0);
    let rank =
        if smax > 0.0 { sv.iter().filter(|&&s| s > smax * rank_tolerance).count() } else { 0 };
    let sigma40 = if sv.len() >= 40 { sv[39] } else { 0.0 };
    let condition = if sigma40 > 0.0 { smax / sigma40 } else { f64::INFINITY };
    IdentifiabilityReport { nd_ok: n_datasets >= 3, rank, full_rank: rank == 40, condition }
}

/// Rank/conditioning diagnostics without solving.
pub fn check_identifiability(system: &CalibSystem, rank_tolerance: f64) -> IdentifiabilityReport {
    let (scaled, _) = equilibrated(&system.theta);
    let sv = scaled.svd(false, false).singular_values;
    analyze_singular_values(sv.as_slice(), system.dataset_count(), rank_tolerance)
}

fn all_added_identical(specs: &[AddedMassSpec], mass_tol: f64, com_tol: f64) -> bool {
    let first = &specs[0];
    specs[1..].iter().all(|s| s.approx_eq(first, mass_tol, com_tol))
}

/// Solve `Θ·x = β` by column-equilibrated SVD least squares.
///
/// Gates, in order: at least three datasets; added loads not all identical;
/// full numerical rank. An estimate whose condition number exceeds
/// [`CalibOptions::condition_warning`] is still returned, flagged
/// `ill_conditioned`.
pub fn solve_calibration(system: &CalibSystem, options: &CalibOptions) -> Result<CalibEstimate> {
    let nd = system.dataset_count();
    if nd < 3 {
        return Err(Error::NotIdentifiable(IdentifiabilityFailure::TooFewDatasets { got: nd }));
    }
    if all_added_identical(&system.added, options.added_mass_tolerance, options.added_com_tolerance)
    {
        return Err(Error::NotIdentifiable(IdentifiabilityFailure::IndistinctAddedMasses));
    }

    let (scaled, norms) = equilibrated(&system.theta);
    let svd = scaled.svd(true, true);
    let report =
        analyze_singular_values(svd.singular_values.as_slice(), nd, options.rank_tolerance);
    if !report.full_rank {
        return Err(Error::NotIdentifiable(IdentifiabilityFailure::RankDeficient {
            rank: report.rank,
            condition: report.condition,
        }));
    }

    let y = svd.solve(&system.beta, 0.0).expect("u and v_t were requested");
    let mut x = y;
    for (xi, n) in x.iter_mut().zip(&norms) {
        *xi /= n;
    }

    let c_hat = Matrix6::from_column_slice(&x.as_slice()[0..36]);
    let m_hat = x[36];
    let mc_hat = Vector3::new(x[37], x[38], x[39]);
    let com_hat = (m_hat > options.mass_floor).then(|| mc_hat / m_hat);

    let residual = &system.theta * &x - &system.beta;
    let residual_rms = residual.norm() / (system.beta.len() as f64).sqrt();

    Ok(CalibEstimate {
        c_hat,
        m_hat,
        mc_hat,
        com_hat,
        residual_rms,
        theta_condition: report.condition,
        theta_rank: report.rank,
        ill_conditioned: report.condition > options.condition_warning,
    })
}
