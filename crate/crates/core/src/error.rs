//! Error type shared by all estimation modules.

use thiserror::Error;

/// Convenience alias used throughout the crate.
pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A constructor received NaN or an infinity.
    #[error("{what} must be finite")]
    NonFinite { what: &'static str },

    #[error("mass must be non-negative, got {mass}")]
    NegativeMass { mass: f64 },

    #[error("dataset contains no samples")]
    EmptyDataset,

    #[error("need at least {needed} samples, got {got}")]
    InsufficientSamples { needed: usize, got: usize },

    #[error("dimension mismatch: {what}")]
    DimensionMismatch { what: &'static str },

    /// A calibration matrix failed the invertibility gate.
    #[error(
        "matrix numerically singular: reciprocal condition {rcond:e} not above floor {floor:e}"
    )]
    SingularMatrix { rcond: f64, floor: f64 },

    /// Estimators reject gravity samples whose norm is outside the accepted
    /// band because a wrong-norm sample silently corrupts the recovered scale.
    #[error("gravity sample norm {norm} outside accepted band [{lo}, {hi}]")]
    GravityNormOutOfBand { norm: f64, lo: f64, hi: f64 },

    /// Centred raw samples do not excite three directions, e.g. because every
    /// pose rotated about a single axis.
    #[error("raw samples do not span a 3-D subspace: sigma3/sigma1 = {ratio:e} <= {threshold:e}")]
    DegenerateSpan { ratio: f64, threshold: f64 },

    #[error("offset system rank deficient: rank {rank} < {cols} columns")]
    RankDeficientSystem { rank: usize, cols: usize },

    #[error("calibration not identifiable: {0}")]
    NotIdentifiable(IdentifiabilityFailure),

    #[error("degenerate point set for quadric fitting: {what}")]
    DegeneratePointSet { what: &'static str },

    #[error("fitted quadric is not an ellipsoid")]
    NonEllipsoidQuadric,

    #[error("inertial solve rank deficient: gravity directions insufficient")]
    RankDeficientInertial,

    #[error("baseline dataset index {index} out of range ({len} datasets)")]
    BaselineOutOfRange { index: usize, len: usize },

    #[error("signal of {len} samples shorter than filter window {window}")]
    SignalTooShort { len: usize, window: usize },

    #[error("bad filter window: {what}")]
    BadWindow { what: &'static str },
}

/// Why a calibration run cannot determine all forty unknowns.
#[derive(Debug, Clone, PartialEq)]
pub enum IdentifiabilityFailure {
    /// Fewer than the three distinct-load datasets a unique solution needs.
    TooFewDatasets { got: usize },
    /// Every dataset declares the same added mass and centre of mass.
    IndistinctAddedMasses,
    /// The stacked system lost rank numerically.
    RankDeficient { rank: usize, condition: f64 },
}

impl core::fmt::Display for IdentifiabilityFailure {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            Self::TooFewDatasets { got } => {
                write!(f, "at least 3 datasets with distinct added masses are required, got {got}")
            }
            Self::IndistinctAddedMasses => write!(
                f,
                "all added-mass specifications are identical; vary the added load across datasets"
            ),
            Self::RankDeficient { rank, condition } => {
                write!(f, "stacked system has numerical rank {rank} < 40 (condition {condition:e})")
            }
        }
    }
}
