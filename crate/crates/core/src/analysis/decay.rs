//! Asymptotic decay classes of `f'(-x)` as `x -> inf`, measured against
//! TeLU through the ratio `TeLU'(-x) / f'(-x)`.
//!
//! A ratio that settles to a constant puts `f'` in TeLU's class
//! `Theta(x / e^x)`. A ratio growing like `x` means `Theta(1 / e^x)`. A ratio
//! growing at least exponentially means faster-than-exponential decay, the
//! `O(1/x!)` / `Omega(1/(x^2)!)` bracket.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::AnalysisError;
use crate::activations::{self, ActivationId};

pub const DEFAULT_DECAY_POINTS: [f64; 7] = [10.0, 15.0, 20.0, 25.0, 30.0, 35.0, 40.0];

/// Relative agreement of the last two ratios for a finite limit.
pub const AGREEMENT_REL_TOL: f64 = 1e-3;
/// Minimum step-to-step growth factor of `|ratio|` to call it unbounded.
pub const GROWTH_FACTOR: f64 = 1.1;
/// `d ln|ratio| / d ln x` window accepted as linear growth.
pub const LINEAR_SLOPE_BAND: (f64, f64) = (0.5, 1.5);
/// `d ln|ratio| / dx` at or above which growth counts as exponential or faster.
pub const EXPONENTIAL_RATE: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DecayClass {
    /// `Theta(x / e^x)`, TeLU's own class.
    XOverExp,
    /// `Theta(1 / e^x)`.
    InverseExp,
    /// Upper bound `O(1/x!)`, lower bound `Omega(1/(x^2)!)`.
    FactorialBracket,
    None,
}

impl fmt::Display for DecayClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DecayClass::XOverExp => "Theta(x/e^x)",
            DecayClass::InverseExp => "Theta(1/e^x)",
            DecayClass::FactorialBracket => "O(1/x!) Omega(1/(x^2)!)",
            DecayClass::None => "none",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LimitEstimate {
    Finite(f64),
    Unbounded,
    /// No decay to compare, e.g. a derivative that is identically zero.
    Undefined,
}

impl fmt::Display for LimitEstimate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LimitEstimate::Finite(v) => f.write_str(&crate::format::sig6(*v)),
            LimitEstimate::Unbounded => f.write_str("unbounded"),
            LimitEstimate::Undefined => f.write_str("undefined"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatioSample {
    pub x: f64,
    /// `TeLU'(-x) / f'(-x)`; infinite when `f'(-x)` has underflowed to zero.
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayReport {
    pub id: ActivationId,
    pub ratio_samples: Vec<RatioSample>,
    pub limit_estimate: LimitEstimate,
    pub assigned_class: DecayClass,
}

impl DecayReport {
    /// `ln|ratio|` increments per unit `x` between consecutive finite samples.
    pub fn log_growth_rates(&self) -> Vec<f64> {
        self.ratio_samples
            .windows(2)
            .filter(|w| w[0].ratio.is_finite() && w[1].ratio.is_finite())
            .map(|w| (w[1].ratio.abs().ln() - w[0].ratio.abs().ln()) / (w[1].x - w[0].x))
            .collect()
    }
}

pub fn decay_classify(id: ActivationId, xs: &[f64]) -> Result<DecayReport, AnalysisError> {
    if xs.len() < 2 {
        return Err(AnalysisError::InvalidArgument(
            "decay classification needs at least two sample points".into(),
        ));
    }
    if xs.windows(2).any(|w| !(w[1] > w[0])) || xs[0] <= 0.0 {
        return Err(AnalysisError::InvalidArgument(
            "decay sample points must be positive and increasing".into(),
        ));
    }

    let mut samples = Vec::with_capacity(xs.len());
    let mut any_nonzero = false;
    for &x in xs {
        let reference = activations::derivative(ActivationId::TeLU, -x);
        let d = activations::derivative(id, -x);
        any_nonzero |= d != 0.0;
        let ratio = if d == 0.0 { f64::INFINITY } else { reference / d };
        samples.push(RatioSample { x, ratio });
    }

    let (limit_estimate, assigned_class) = if any_nonzero {
        classify(&samples)
    } else {
        (LimitEstimate::Undefined, DecayClass::None)
    };
    Ok(DecayReport {
        id,
        ratio_samples: samples,
        limit_estimate,
        assigned_class,
    })
}

fn classify(samples: &[RatioSample]) -> (LimitEstimate, DecayClass) {
    let n = samples.len();
    let (prev, last) = (samples[n - 2].ratio, samples[n - 1].ratio);
    if prev.is_finite() && last.is_finite() && last != 0.0 && (last - prev).abs() <= AGREEMENT_REL_TOL * last.abs() {
        return (LimitEstimate::Finite(last), DecayClass::XOverExp);
    }

    let growing = samples.windows(2).all(|w| {
        let (a, b) = (w[0].ratio.abs(), w[1].ratio.abs());
        a.is_finite() && a > 0.0 && (b.is_infinite() || b > GROWTH_FACTOR * a)
    });
    if !growing {
        let vanishing = samples.windows(2).all(|w| {
            let (a, b) = (w[0].ratio.abs(), w[1].ratio.abs());
            a.is_finite() && b.is_finite() && b * GROWTH_FACTOR < a
        });
        // TeLU's derivative decays faster than the unit's
        let limit = if vanishing {
            LimitEstimate::Finite(0.0)
        } else {
            LimitEstimate::Undefined
        };
        return (limit, DecayClass::None);
    }

    let finite: Vec<&RatioSample> = samples.iter().filter(|s| s.ratio.is_finite()).collect();
    if finite.len() < 2 {
        return (LimitEstimate::Unbounded, DecayClass::None);
    }
    let (a, b) = (finite[finite.len() - 2], finite[finite.len() - 1]);
    let dlog = b.ratio.abs().ln() - a.ratio.abs().ln();
    let loglog_slope = dlog / (b.x / a.x).ln();
    let rate = dlog / (b.x - a.x);
    let class = if (LINEAR_SLOPE_BAND.0..=LINEAR_SLOPE_BAND.1).contains(&loglog_slope) {
        DecayClass::InverseExp
    } else if rate >= EXPONENTIAL_RATE {
        DecayClass::FactorialBracket
    } else {
        DecayClass::None
    };
    (LimitEstimate::Unbounded, class)
}
