//! Adaptive quadrature on finite intervals and half lines.
//!
//! The core is a globally adaptive 15-point Gauss-Kronrod / 7-point Gauss
//! pair: the segment with the largest error estimate is bisected until the
//! summed estimate meets the tolerance or the segment budget runs out.
//!
//! Half-line integrals run the core on `[0, T]` and then walk doubling tail
//! windows `[T, 2T]`, `[2T, 4T]`, ... Two consecutive windows below the
//! tolerance close the integral; four consecutive windows that refuse to
//! drop below the growth floor mark it divergent. Divergence is a status,
//! never an IEEE infinity.

use serde::{Deserialize, Serialize};
use thiserror::Error;

const MAX_TAIL_WINDOWS: u32 = 40;
const CONVERGED_RUN: u32 = 2;
const DIVERGENT_RUN: u32 = 4;

/// Half-width of the Gaussian integration window, in standard deviations.
pub const GAUSSIAN_HALF_WIDTH: f64 = 12.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QuadratureError {
    #[error("segment budget exhausted: value {value}, error estimate {abs_error_estimate}")]
    MaxSubdivisions { value: f64, abs_error_estimate: f64 },
    #[error("standard deviation must be positive and finite, got {0}")]
    InvalidSigma(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IntegralStatus {
    Converged,
    Divergent,
    MaxSubdivisions,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegralResult {
    /// Integral value when converged; otherwise the last partial sum, kept
    /// for diagnostics only.
    pub value: f64,
    pub abs_error_estimate: f64,
    pub status: IntegralStatus,
}

impl IntegralResult {
    /// The value, but only if the integral converged.
    pub fn finite_value(&self) -> Option<f64> {
        (self.status == IntegralStatus::Converged).then_some(self.value)
    }

    pub fn is_divergent(&self) -> bool {
        self.status == IntegralStatus::Divergent
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureConfig {
    pub abs_tol: f64,
    pub max_subdivisions: usize,
    pub truncation_point: f64,
    pub divergence_growth_floor: f64,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig {
            abs_tol: 1e-9,
            max_subdivisions: 60,
            truncation_point: 60.0,
            divergence_growth_floor: 1e-6,
        }
    }
}

impl QuadratureConfig {
    pub fn with_abs_tol(mut self, abs_tol: f64) -> Self {
        self.abs_tol = abs_tol;
        self
    }

    fn validate(&self) {
        assert!(self.abs_tol > 0.0, "abs_tol must be positive");
        assert!(self.truncation_point > 0.0, "truncation point must be positive");
        assert!(self.max_subdivisions >= 1, "need at least one segment");
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    /// `[0, inf)`
    Positive,
    /// `(-inf, 0]`
    Negative,
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_838_258_730,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.000_000_000_000_000_000_000_000_000_000_000,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

// Gauss weights for the odd-indexed Kronrod nodes (1, 3, 5) and the centre.
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

fn rescale_error(err: f64, res_abs: f64, res_asc: f64) -> f64 {
    let mut scaled = err.abs();
    if res_asc != 0.0 && scaled != 0.0 {
        let scale = (200.0 * scaled / res_asc).powf(1.5);
        scaled = if scale < 1.0 { res_asc * scale } else { res_asc };
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        scaled = scaled.max(50.0 * f64::EPSILON * res_abs);
    }
    scaled
}

fn gk15<F: Fn(f64) -> f64>(g: &F, a: f64, b: f64) -> Segment {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let f_center = g(center);

    let mut kronrod = f_center * WGK[7];
    let mut gauss = f_center * WG[3];
    let mut res_abs = kronrod.abs();
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];

    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = g(center - dx);
        let f2 = g(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        kronrod += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }

    let mean = 0.5 * kronrod;
    let mut res_asc = WGK[7] * (f_center - mean).abs();
    for j in 0..7 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }

    let err = (kronrod - gauss) * half;
    let abs_half = half.abs();
    let error = rescale_error(err, res_abs * abs_half, res_asc * abs_half);
    Segment {
        a,
        b,
        value: kronrod * half,
        error: if error.is_nan() { f64::INFINITY } else { error },
    }
}

/// Adaptive integral of `g` over the finite interval `[a, b]`.
///
/// Returns `Converged` once the summed error estimate is at most `abs_tol`,
/// `MaxSubdivisions` if `max_subdivisions` segments are not enough or the
/// integrand produced non-finite values.
pub fn integrate_interval<F: Fn(f64) -> f64>(
    g: F,
    a: f64,
    b: f64,
    abs_tol: f64,
    max_subdivisions: usize,
) -> IntegralResult {
    let mut segments = vec![gk15(&g, a, b)];
    loop {
        let value: f64 = segments.iter().map(|s| s.value).sum();
        let error: f64 = segments.iter().map(|s| s.error).sum();
        if !value.is_finite() || !error.is_finite() {
            return IntegralResult {
                value,
                abs_error_estimate: f64::INFINITY,
                status: IntegralStatus::MaxSubdivisions,
            };
        }
        if error <= abs_tol {
            return IntegralResult {
                value,
                abs_error_estimate: error,
                status: IntegralStatus::Converged,
            };
        }
        if segments.len() >= max_subdivisions.max(1) {
            return IntegralResult {
                value,
                abs_error_estimate: error,
                status: IntegralStatus::MaxSubdivisions,
            };
        }
        let worst = segments
            .iter()
            .enumerate()
            .max_by(|(_, l), (_, r)| l.error.total_cmp(&r.error))
            .map(|(i, _)| i)
            .expect("at least one segment");
        let seg = segments[worst];
        let mid = 0.5 * (seg.a + seg.b);
        segments[worst] = gk15(&g, seg.a, mid);
        segments.insert(worst + 1, gk15(&g, mid, seg.b));
    }
}

/// Integral of `g` over `[0, inf)` or `(-inf, 0]`.
pub fn integrate_half_line<F: Fn(f64) -> f64>(g: F, side: Side, cfg: &QuadratureConfig) -> IntegralResult {
    cfg.validate();
    let oriented = |u: f64| match side {
        Side::Positive => g(u),
        Side::Negative => g(-u),
    };

    let core = integrate_interval(
        oriented,
        0.0,
        cfg.truncation_point,
        0.5 * cfg.abs_tol,
        cfg.max_subdivisions,
    );
    let mut value = core.value;
    let mut error = core.abs_error_estimate;
    let mut core_ok = core.status == IntegralStatus::Converged;

    let mut small_run = 0;
    let mut large_run = 0;
    let mut lo = cfg.truncation_point;
    for k in 0..MAX_TAIL_WINDOWS {
        let hi = 2.0 * lo;
        let window_tol = cfg.abs_tol / 2f64.powi(k as i32 + 2);
        let w = integrate_interval(oriented, lo, hi, window_tol, cfg.max_subdivisions);
        lo = hi;

        let contribution = w.value.abs();
        if !contribution.is_finite() || contribution >= cfg.divergence_growth_floor {
            large_run += 1;
            small_run = 0;
        } else {
            large_run = 0;
            if contribution < cfg.abs_tol {
                small_run += 1;
            } else {
                small_run = 0;
            }
        }
        if w.value.is_finite() {
            value += w.value;
        }
        error += w.abs_error_estimate;
        core_ok &= w.status == IntegralStatus::Converged;

        if large_run >= DIVERGENT_RUN {
            return IntegralResult {
                value,
                abs_error_estimate: error,
                status: IntegralStatus::Divergent,
            };
        }
        if small_run >= CONVERGED_RUN {
            let status = if core_ok && error <= cfg.abs_tol {
                IntegralStatus::Converged
            } else {
                IntegralStatus::MaxSubdivisions
            };
            return IntegralResult {
                value,
                abs_error_estimate: error,
                status,
            };
        }
    }

    IntegralResult {
        value,
        abs_error_estimate: error,
        status: IntegralStatus::MaxSubdivisions,
    }
}

/// `E[f(X)]` for `X ~ N(0, sigma^2)`, integrated over `[-12 sigma, 12 sigma]`.
///
/// Outside that window the density is below `1e-31` relative to its peak,
/// so the tail is dropped for integrands of polynomial growth.
pub fn gaussian_expectation<F: Fn(f64) -> f64>(
    f: F,
    sigma: f64,
    cfg: &QuadratureConfig,
) -> Result<f64, QuadratureError> {
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(QuadratureError::InvalidSigma(sigma));
    }
    let norm = 1.0 / (sigma * (2.0 * std::f64::consts::PI).sqrt());
    let inv_two_var = 1.0 / (2.0 * sigma * sigma);
    let weighted = |x: f64| norm * (-(x * x) * inv_two_var).exp() * f(x);
    let half_width = GAUSSIAN_HALF_WIDTH * sigma;
    let r = integrate_interval(weighted, -half_width, half_width, cfg.abs_tol, cfg.max_subdivisions);
    match r.status {
        IntegralStatus::Converged => Ok(r.value),
        _ => Err(QuadratureError::MaxSubdivisions {
            value: r.value,
            abs_error_estimate: r.abs_error_estimate,
        }),
    }
}
