//! In-situ calibration for six-axis force–torque sensors.
//!
//! A mounted sensor reporting raw counts `r` is modelled affinely:
//! `w = C·(r − o)` with an unknown 6×6 calibration matrix `C` and bias `o`.
//! Holding the sensor still in many orientations and pairing each raw
//! reading with an accelerometer's gravity measurement makes both
//! recoverable without a test bench:
//!
//! 1. [`subspace`] — centred raw readings live in a 3-D affine subspace
//!    (gravity has only three degrees of freedom); its SVD basis underpins
//!    the offset stage.
//! 2. [`offset`] — the bias `o` is found inside that subspace by linear
//!    least squares against the gravity directions.
//! 3. [`calib`] — with the offset known, datasets recorded under distinct
//!    added loads identify `C` and the attached body's mass and first
//!    moment jointly (at least three distinct loads are required).
//! 4. [`geometry`] — a calibration is validated geometrically: calibrated
//!    gravity forces must sweep a sphere, and the inertial parameters
//!    solved per dataset must differ by exactly the known added loads.
//!
//! [`synth`] simulates all of it deterministically for testing, and
//! [`savgol`] provides the smoothing filter used when ingesting raw logs.
//!
//! The crate is `no_std` (with `alloc`) unless the default `std` feature is
//! enabled.

#![cfg_attr(not(feature = "std"), no_std)]
#![forbid(unsafe_code)]
// `!(x > floor)` is used instead of `x <= floor` throughout the numeric
// gates: the negated form also fails NaN into the error branch.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod calib;
pub mod error;
pub mod geometry;
pub mod model;
pub mod offset;
pub mod savgol;
pub mod subspace;
pub mod synth;

pub use error::{Error, IdentifiabilityFailure, Result};
pub use model::{
    AddedMassSpec, CalibrationModel, Dataset, GravityBand, GravitySample, InertialParams,
    RawReading, Wrench, STANDARD_GRAVITY,
};
