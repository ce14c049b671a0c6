//! Numerical checks of TeLU's analytic properties: the isolated zero of the
//! derivative, the Lipschitz supremum, zero-centering, and closed-form
//! derivative consistency.

use serde::{Deserialize, Serialize};

use super::AnalysisError;
use crate::activations::{self, ActivationId, Precision};
use crate::quadrature::{gaussian_expectation, QuadratureConfig};

const SUPREMUM_GRID_STEP: f64 = 1e-3;
const SUPREMUM_X_TOL: f64 = 1e-8;

/// Bisection root of `f'` on `[lo, hi]`.
pub fn find_derivative_root(id: ActivationId, bracket: (f64, f64), tol: f64) -> Result<f64, AnalysisError> {
    let (mut lo, mut hi) = bracket;
    if !(tol > 0.0) || !(hi > lo) {
        return Err(AnalysisError::InvalidArgument(format!(
            "bad bracket [{lo}, {hi}] or tolerance {tol}"
        )));
    }
    let d = |x: f64| activations::derivative(id, x);
    let mut d_lo = d(lo);
    let d_hi = d(hi);
    if !(d_lo * d_hi < 0.0) {
        return Err(AnalysisError::NoSignChange { id, lo, hi });
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        let d_mid = d(mid);
        if d_mid == 0.0 {
            return Ok(mid);
        }
        if (d_mid < 0.0) == (d_lo < 0.0) {
            lo = mid;
            d_lo = d_mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Location and value of `max |f'(x)|` on `range`: a `1e-3` grid search
/// followed by golden-section refinement to `1e-8` in `x`.
pub fn derivative_supremum(id: ActivationId, range: (f64, f64)) -> Result<(f64, f64), AnalysisError> {
    let (lo, hi) = range;
    if !(hi > lo) {
        return Err(AnalysisError::InvalidArgument(format!("empty range [{lo}, {hi}]")));
    }
    let g = |x: f64| activations::derivative(id, x).abs();
    let n = ((hi - lo) / SUPREMUM_GRID_STEP).round() as usize;
    let (mut best_x, mut best) = (lo, g(lo));
    for i in 1..=n {
        let x = (lo + i as f64 * SUPREMUM_GRID_STEP).min(hi);
        let v = g(x);
        if v > best {
            best = v;
            best_x = x;
        }
    }

    let (x, v) = golden_max(
        g,
        (best_x - SUPREMUM_GRID_STEP).max(lo),
        (best_x + SUPREMUM_GRID_STEP).min(hi),
        SUPREMUM_X_TOL,
    );
    Ok(if v > best { (x, v) } else { (best_x, best) })
}

fn golden_max(g: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut gc, mut gd) = (g(c), g(d));
    while b - a > tol {
        if gc > gd {
            b = d;
            d = c;
            gd = gc;
            c = b - inv_phi * (b - a);
            gc = g(c);
        } else {
            a = c;
            c = d;
            gc = gd;
            d = a + inv_phi * (b - a);
            gd = g(d);
        }
    }
    let x = 0.5 * (a + b);
    (x, g(x))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZeroCenteringSample {
    pub sigma: f64,
    pub mean: f64,
    pub relu_mean: f64,
}

/// `E[f(X)]` next to `E[ReLU(X)]` for each `sigma`.
pub fn zero_centering_samples(
    f: impl Fn(f64) -> f64,
    sigmas: &[f64],
    cfg: &QuadratureConfig,
) -> Result<Vec<ZeroCenteringSample>, AnalysisError> {
    sigmas
        .iter()
        .map(|&sigma| {
            Ok(ZeroCenteringSample {
                sigma,
                mean: gaussian_expectation(&f, sigma, cfg)?,
                relu_mean: gaussian_expectation(activations::kernels::relu, sigma, cfg)?,
            })
        })
        .collect()
}

/// True iff `0 < E[TeLU(X)] < E[ReLU(X)]` for every `sigma`.
pub fn zero_centering_check(sigmas: &[f64], cfg: &QuadratureConfig) -> Result<bool, AnalysisError> {
    let samples = zero_centering_samples(activations::kernels::telu, sigmas, cfg)?;
    Ok(samples.iter().all(|s| 0.0 < s.mean && s.mean < s.relu_mean))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GradCheckReport {
    pub id: ActivationId,
    pub points: usize,
    pub max_rel_error: f64,
    pub worst_x: f64,
}

/// Compares the closed-form derivative with a central difference of step
/// `h` on `points` evenly spaced inputs over `[lo, hi]`, in 64-bit.
/// The error is `|closed - fd| / max(1, |closed|)`.
///
/// ReLU, LReLU and ELU return the right-hand derivative at their joint, so a
/// stencil straddling `x = 0` uses the forward difference instead.
pub fn gradient_check(id: ActivationId, lo: f64, hi: f64, points: usize, h: f64) -> GradCheckReport {
    assert!(points >= 2 && hi > lo && h > 0.0);
    let f = |x: f64| activations::eval(id, x, Precision::F64);
    let mut report = GradCheckReport {
        id,
        points,
        max_rel_error: 0.0,
        worst_x: lo,
    };
    for i in 0..points {
        let x = lo + (hi - lo) * i as f64 / (points - 1) as f64;
        let closed = activations::eval_derivative(id, x, Precision::F64);
        let straddles = has_joint_at_origin(id) && x - h < 0.0 && x + h > 0.0;
        let fd = if straddles && x >= 0.0 {
            (f(x + h) - f(x)) / h
        } else if straddles {
            (f(x) - f(x - h)) / h
        } else {
            (f(x + h) - f(x - h)) / (2.0 * h)
        };
        let err = (closed - fd).abs() / closed.abs().max(1.0);
        if err > report.max_rel_error {
            report.max_rel_error = err;
            report.worst_x = x;
        }
    }
    report
}

fn has_joint_at_origin(id: ActivationId) -> bool {
    matches!(id, ActivationId::ReLU | ActivationId::LReLU | ActivationId::ELU)
}
