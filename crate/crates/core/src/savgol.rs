//! Savitzky–Golay smoothing for evenly sampled signals.
//!
//! A least-squares polynomial of fixed order is fitted around every sample
//! and evaluated at that sample's position. Interior samples share one set
//! of precomputed convolution weights; near the boundaries the fit is
//! repeated on the truncated window that remains inside the signal, with the
//! order capped at `window_points − 1` when truncation leaves too few points
//! for the requested order.

use alloc::{vec, vec::Vec};

use nalgebra::{Cholesky, DMatrix, DVector};

#[cfg(not(feature = "std"))]
use num_traits::Float as _;

use crate::error::{Error, Result};

/// Smooth `signal` with a window of `window` samples (odd) and a polynomial
/// of the given `order`.
///
/// Polynomials of degree ≤ `order` are reproduced exactly on interior
/// samples (and everywhere once the truncated edge windows still hold
/// `order + 1` points, i.e. `window ≥ 2·order + 1`).
pub fn savitzky_golay(signal: &[f64], window: usize, order: usize) -> Result<Vec<f64>> {
    if window.is_multiple_of(2) {
        return Err(Error::BadWindow { what: "window length must be odd" });
    }
    if window < order + 1 {
        return Err(Error::BadWindow { what: "window must hold at least order + 1 samples" });
    }
    if signal.len() < window {
        return Err(Error::SignalTooShort { len: signal.len(), window });
    }

    let n = signal.len();
    let half = window / 2;
    let weights = central_weights(window, order);

    let mut out = vec![0.0; n];
    for i in half..n - half {
        let mut acc = 0.0;
        for (k, w) in weights.iter().enumerate() {
            acc += w * signal[i - half + k];
        }
        out[i] = acc;
    }
    for (i, o) in out.iter_mut().enumerate().take(half) {
        *o = edge_fit(signal, i, half, order);
    }
    for (i, o) in out.iter_mut().enumerate().skip(n - half) {
        *o = edge_fit(signal, i, half, order);
    }
    Ok(out)
}

/// Convolution weights for a centred window: the value at the centre of the
/// least-squares polynomial through the window samples.
fn central_weights(window: usize, order: usize) -> Vec<f64> {
    let half = (window / 2) as f64;
    // Vandermonde in the scaled abscissa t = (k - half)/half ∈ [-1, 1]; the
    // fitted value at t = 0 is the constant coefficient, which is invariant
    // under the scaling.
    let a = DMatrix::from_fn(window, order + 1, |r, c| {
        let t = (r as f64 - half) / half.max(1.0);
        t.powi(c as i32)
    });
    let gram = a.transpose() * &a;
    let mut e0 = DVector::zeros(order + 1);
    e0[0] = 1.0;
    let z = Cholesky::new(gram)
        .expect("Gram matrix of a Vandermonde with distinct nodes is positive definite")
        .solve(&e0);
    (a * z).as_slice().to_vec()
}

/// Least-squares polynomial fit on the truncated window around sample `i`,
/// evaluated at `i`.
fn edge_fit(signal: &[f64], i: usize, half: usize, order: usize) -> f64 {
    let lo = i.saturating_sub(half);
    let hi = (i + half).min(signal.len() - 1);
    let m = hi - lo + 1;
    let order = order.min(m - 1);
    let scale = (half as f64).max(1.0);
    let a = DMatrix::from_fn(m, order + 1, |r, c| {
        let t = ((lo + r) as f64 - i as f64) / scale;
        t.powi(c as i32)
    });
    let y = DVector::from_iterator(m, signal[lo..=hi].iter().copied());
    let gram = a.transpose() * &a;
    let rhs = a.transpose() * y;
    let coeffs =
        Cholesky::new(gram).expect("truncated-window Gram matrix is positive definite").solve(&rhs);
    coeffs[0]
}
