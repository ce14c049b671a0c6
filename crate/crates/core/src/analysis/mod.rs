//! Analytical tables and numerical theorem checks.
//!
//! * [`near_linearity`]: L1/L2 distance of the active region to its asymptote.
//! * [`relu_proximity`]: L1 distance to ReLU on each half line.
//! * [`output_bias`]: `E[f(X)]` under a centred Gaussian.
//! * [`underflow`]: null domains where the derivative is exactly zero.
//! * [`decay`]: asymptotic decay classes of `f'(-x)`.
//! * [`theorems`]: isolated derivative zero, boundedness, zero-centering,
//!   Lipschitz supremum, gradient consistency.
//! * [`tables`]: CSV/JSON rendering of all of the above.

pub mod decay;
pub mod tables;
pub mod theorems;
pub mod underflow;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::activations::{self, ActivationError, ActivationId, Precision};
use crate::quadrature::{
    gaussian_expectation, integrate_half_line, IntegralResult, IntegralStatus, QuadratureConfig, QuadratureError, Side,
};

pub use decay::{decay_classify, DecayClass, DecayReport, LimitEstimate, DEFAULT_DECAY_POINTS};
pub use tables::{compute_tables, render_tables, TableFormat, TableOptions, TableSet};
pub use theorems::{
    derivative_supremum, find_derivative_root, gradient_check, zero_centering_check, zero_centering_samples,
    GradCheckReport, ZeroCenteringSample,
};
pub use underflow::{underflow_scan, NullDomainReport, Probe, ScanRange};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnalysisError {
    #[error(transparent)]
    Activation(#[from] ActivationError),
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
    #[error("{quantity} integral for {id} diverges")]
    Divergent { id: ActivationId, quantity: &'static str },
    #[error("{id} has no null region in {precision} over the scanned range")]
    NoNullRegion { id: ActivationId, precision: Precision },
    #[error("derivative of {id} does not change sign on [{lo}, {hi}]")]
    NoSignChange { id: ActivationId, lo: f64, hi: f64 },
    #[error("invalid activation filter: {0}")]
    InvalidFilter(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NearLinearityRow {
    pub id: ActivationId,
    pub l1: f64,
    pub l2: f64,
    pub slope: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProximityRow {
    pub id: ActivationId,
    pub neg: IntegralResult,
    pub pos: IntegralResult,
}

fn converged(id: ActivationId, quantity: &'static str, r: IntegralResult) -> Result<f64, AnalysisError> {
    match r.status {
        IntegralStatus::Converged => Ok(r.value),
        IntegralStatus::Divergent => Err(AnalysisError::Divergent { id, quantity }),
        IntegralStatus::MaxSubdivisions => Err(QuadratureError::MaxSubdivisions {
            value: r.value,
            abs_error_estimate: r.abs_error_estimate,
        }
        .into()),
    }
}

/// `L1 = int_0^inf |f(x) - m x| dx` and `L2 = int_0^inf (f(x) - m x)^2 dx`,
/// with `m` the unit's asymptotic slope.
pub fn near_linearity(id: ActivationId, cfg: &QuadratureConfig) -> Result<NearLinearityRow, AnalysisError> {
    let slope = activations::metadata(id)?.asymptotic_slope;
    let gap = move |x: f64| activations::value(id, x) - slope * x;
    let l1 = integrate_half_line(|x| gap(x).abs(), Side::Positive, cfg);
    let l2 = integrate_half_line(|x| gap(x).powi(2), Side::Positive, cfg);
    Ok(NearLinearityRow {
        id,
        l1: converged(id, "L1 near-linearity", l1)?,
        l2: converged(id, "L2 near-linearity", l2)?,
        slope,
    })
}

/// L1 distance to ReLU on `(-inf, 0]` and `[0, inf)`. Divergence is carried
/// in each result's status.
pub fn relu_proximity(id: ActivationId, cfg: &QuadratureConfig) -> ProximityRow {
    let gap = move |x: f64| (activations::kernels::relu(x) - activations::value(id, x)).abs();
    ProximityRow {
        id,
        neg: integrate_half_line(gap, Side::Negative, cfg),
        pos: integrate_half_line(gap, Side::Positive, cfg),
    }
}

/// `E[f(X)]`, `X ~ N(0, sigma^2)`.
pub fn output_bias(id: ActivationId, sigma: f64, cfg: &QuadratureConfig) -> Result<f64, AnalysisError> {
    Ok(gaussian_expectation(|x| activations::value(id, x), sigma, cfg)?)
}
