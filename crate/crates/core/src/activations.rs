//! Closed-form activation functions and their first derivatives.
//!
//! Every function is written once, generically over [`Real`], so the 32-bit
//! path composes its subfunctions in `f32` throughout instead of computing in
//! `f64` and rounding at the end. The underflow scans depend on that cascade.
//!
//! | Unit     | Value                              |
//! |----------|------------------------------------|
//! | TeLU     | `x * tanh(exp(x))`                 |
//! | ReLU     | `max(0, x)`                        |
//! | LReLU    | `max(0.01 x, x)`                   |
//! | Softplus | `ln(1 + exp(x))`                   |
//! | ELU      | `exp(x) - 1` for `x < 0`, else `x` |
//! | SiLU     | `x * sigmoid(x)`                   |
//! | GELU     | `x * 0.5 * (1 + erf(x / sqrt 2))`  |
//! | Mish     | `x * tanh(ln(1 + exp(x)))`         |
//! | Logish   | `x * ln(1 + sigmoid(x))`           |
//! | Smish    | `x * tanh(ln(1 + sigmoid(x)))`     |
//!
//! Piecewise units return the right-hand derivative at their joint, so
//! `ReLU'(0) = ELU'(0) = LReLU'(0) = 1`.

use std::fmt;
use std::str::FromStr;

use num_traits::{Float, FloatConst};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Slope of the negative branch of the leaky ReLU.
pub const LEAKY_SLOPE: f64 = 0.01;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ActivationError {
    #[error("no metadata row for {0}: only the ten linear units carry metadata")]
    UnknownMeta(ActivationId),
    #[error("unknown activation name `{0}`")]
    UnknownName(String),
    #[error("unknown precision `{0}` (expected f32 or f64)")]
    UnknownPrecision(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ActivationId {
    TeLU,
    ReLU,
    LReLU,
    Softplus,
    ELU,
    SiLU,
    GELU,
    Mish,
    Logish,
    Smish,
    Tanh,
    Sigmoid,
}

impl ActivationId {
    /// The ten linear units, in table order.
    pub const LINEAR_UNITS: [ActivationId; 10] = [
        ActivationId::TeLU,
        ActivationId::ReLU,
        ActivationId::LReLU,
        ActivationId::Softplus,
        ActivationId::ELU,
        ActivationId::SiLU,
        ActivationId::GELU,
        ActivationId::Mish,
        ActivationId::Logish,
        ActivationId::Smish,
    ];

    pub const ALL: [ActivationId; 12] = [
        ActivationId::TeLU,
        ActivationId::ReLU,
        ActivationId::LReLU,
        ActivationId::Softplus,
        ActivationId::ELU,
        ActivationId::SiLU,
        ActivationId::GELU,
        ActivationId::Mish,
        ActivationId::Logish,
        ActivationId::Smish,
        ActivationId::Tanh,
        ActivationId::Sigmoid,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ActivationId::TeLU => "TeLU",
            ActivationId::ReLU => "ReLU",
            ActivationId::LReLU => "LReLU",
            ActivationId::Softplus => "Softplus",
            ActivationId::ELU => "ELU",
            ActivationId::SiLU => "SiLU",
            ActivationId::GELU => "GELU",
            ActivationId::Mish => "Mish",
            ActivationId::Logish => "Logish",
            ActivationId::Smish => "Smish",
            ActivationId::Tanh => "Tanh",
            ActivationId::Sigmoid => "Sigmoid",
        }
    }

    pub fn is_linear_unit(self) -> bool {
        !matches!(self, ActivationId::Tanh | ActivationId::Sigmoid)
    }
}

impl fmt::Display for ActivationId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ActivationId {
    type Err = ActivationError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let id = match s.trim().to_ascii_lowercase().as_str() {
            "telu" => ActivationId::TeLU,
            "relu" => ActivationId::ReLU,
            "lrelu" | "leaky_relu" | "leakyrelu" => ActivationId::LReLU,
            "softplus" => ActivationId::Softplus,
            "elu" => ActivationId::ELU,
            "silu" | "swish" => ActivationId::SiLU,
            "gelu" => ActivationId::GELU,
            "mish" => ActivationId::Mish,
            "logish" => ActivationId::Logish,
            "smish" => ActivationId::Smish,
            "tanh" => ActivationId::Tanh,
            "sigmoid" => ActivationId::Sigmoid,
            _ => return Err(ActivationError::UnknownName(s.to_string())),
        };
        Ok(id)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Precision {
    F32,
    F64,
}

impl fmt::Display for Precision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Precision::F32 => "f32",
            Precision::F64 => "f64",
        })
    }
}

impl FromStr for Precision {
    type Err = ActivationError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "f32" | "32" | "float32" => Ok(Precision::F32),
            "f64" | "64" | "float64" => Ok(Precision::F64),
            _ => Err(ActivationError::UnknownPrecision(s.to_string())),
        }
    }
}

/// Floating-point type the kernels can run in.
pub trait Real: Float + FloatConst + Send + Sync + 'static {
    fn erf(self) -> Self;
    fn lit(v: f64) -> Self;
}

impl Real for f32 {
    #[inline]
    fn erf(self) -> Self {
        libm::erff(self)
    }
    #[inline]
    fn lit(v: f64) -> Self {
        v as f32
    }
}

impl Real for f64 {
    #[inline]
    fn erf(self) -> Self {
        libm::erf(self)
    }
    #[inline]
    fn lit(v: f64) -> Self {
        v
    }
}

/// Scalar kernels. Each unit has a value and a derivative function.
pub mod kernels {
    use super::Real;

    const FRAC_1_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

    /// Logistic sigmoid, branch-stable so that `sigmoid(x)` decays like
    /// `exp(x)` into the subnormal range instead of flushing once `exp(-x)`
    /// overflows.
    #[inline]
    pub fn sigmoid<T: Real>(x: T) -> T {
        if x >= T::zero() {
            T::one() / (T::one() + (-x).exp())
        } else {
            let e = x.exp();
            e / (T::one() + e)
        }
    }

    #[inline]
    pub fn sigmoid_grad<T: Real>(x: T) -> T {
        let s = sigmoid(x);
        s * (T::one() - s)
    }

    #[inline]
    pub fn tanh<T: Real>(x: T) -> T {
        x.tanh()
    }

    #[inline]
    pub fn tanh_grad<T: Real>(x: T) -> T {
        let t = x.tanh();
        T::one() - t * t
    }

    #[inline]
    pub fn telu<T: Real>(x: T) -> T {
        x * x.exp().tanh()
    }

    #[inline]
    pub fn telu_grad<T: Real>(x: T) -> T {
        let e = x.exp();
        let t = e.tanh();
        let sech2 = T::one() - t * t;
        // once tanh(e^x) has rounded to 1, e^x may be infinite
        if sech2 == T::zero() {
            t
        } else {
            t + x * sech2 * e
        }
    }

    #[inline]
    pub fn relu<T: Real>(x: T) -> T {
        if x > T::zero() {
            x
        } else {
            T::zero()
        }
    }

    #[inline]
    pub fn relu_grad<T: Real>(x: T) -> T {
        if x >= T::zero() {
            T::one()
        } else {
            T::zero()
        }
    }

    #[inline]
    pub fn lrelu<T: Real>(x: T) -> T {
        if x >= T::zero() {
            x
        } else {
            T::lit(super::LEAKY_SLOPE) * x
        }
    }

    #[inline]
    pub fn lrelu_grad<T: Real>(x: T) -> T {
        if x >= T::zero() {
            T::one()
        } else {
            T::lit(super::LEAKY_SLOPE)
        }
    }

    /// `ln(1 + exp(x))` evaluated as `max(x, 0) + ln_1p(exp(-|x|))`.
    #[inline]
    pub fn softplus<T: Real>(x: T) -> T {
        x.max(T::zero()) + (-x.abs()).exp().ln_1p()
    }

    #[inline]
    pub fn softplus_grad<T: Real>(x: T) -> T {
        sigmoid(x)
    }

    #[inline]
    pub fn elu<T: Real>(x: T) -> T {
        if x < T::zero() {
            x.exp_m1()
        } else {
            x
        }
    }

    #[inline]
    pub fn elu_grad<T: Real>(x: T) -> T {
        if x < T::zero() {
            x.exp()
        } else {
            T::one()
        }
    }

    #[inline]
    pub fn silu<T: Real>(x: T) -> T {
        x * sigmoid(x)
    }

    #[inline]
    pub fn silu_grad<T: Real>(x: T) -> T {
        let s = sigmoid(x);
        s + x * s * (T::one() - s)
    }

    #[inline]
    fn normal_cdf<T: Real>(x: T) -> T {
        T::lit(0.5) * (T::one() + (x / T::SQRT_2()).erf())
    }

    #[inline]
    pub fn gelu<T: Real>(x: T) -> T {
        x * normal_cdf(x)
    }

    #[inline]
    pub fn gelu_grad<T: Real>(x: T) -> T {
        let pdf = (-(x * x) / T::lit(2.0)).exp() * T::lit(FRAC_1_SQRT_2PI);
        normal_cdf(x) + x * pdf
    }

    #[inline]
    pub fn mish<T: Real>(x: T) -> T {
        x * softplus(x).tanh()
    }

    #[inline]
    pub fn mish_grad<T: Real>(x: T) -> T {
        let t = softplus(x).tanh();
        t + x * (T::one() - t * t) * sigmoid(x)
    }

    #[inline]
    pub fn logish<T: Real>(x: T) -> T {
        x * sigmoid(x).ln_1p()
    }

    #[inline]
    pub fn logish_grad<T: Real>(x: T) -> T {
        let s = sigmoid(x);
        s.ln_1p() + x * s * (T::one() - s) / (T::one() + s)
    }

    #[inline]
    pub fn smish<T: Real>(x: T) -> T {
        x * sigmoid(x).ln_1p().tanh()
    }

    #[inline]
    pub fn smish_grad<T: Real>(x: T) -> T {
        let s = sigmoid(x);
        let t = s.ln_1p().tanh();
        t + x * (T::one() - t * t) * s * (T::one() - s) / (T::one() + s)
    }
}

/// `f(x)` for `id`, computed in `T`.
#[inline]
pub fn value<T: Real>(id: ActivationId, x: T) -> T {
    use kernels::*;
    match id {
        ActivationId::TeLU => telu(x),
        ActivationId::ReLU => relu(x),
        ActivationId::LReLU => lrelu(x),
        ActivationId::Softplus => softplus(x),
        ActivationId::ELU => elu(x),
        ActivationId::SiLU => silu(x),
        ActivationId::GELU => gelu(x),
        ActivationId::Mish => mish(x),
        ActivationId::Logish => logish(x),
        ActivationId::Smish => smish(x),
        ActivationId::Tanh => tanh(x),
        ActivationId::Sigmoid => sigmoid(x),
    }
}

/// `f'(x)` for `id`, computed in `T`.
#[inline]
pub fn derivative<T: Real>(id: ActivationId, x: T) -> T {
    use kernels::*;
    match id {
        ActivationId::TeLU => telu_grad(x),
        ActivationId::ReLU => relu_grad(x),
        ActivationId::LReLU => lrelu_grad(x),
        ActivationId::Softplus => softplus_grad(x),
        ActivationId::ELU => elu_grad(x),
        ActivationId::SiLU => silu_grad(x),
        ActivationId::GELU => gelu_grad(x),
        ActivationId::Mish => mish_grad(x),
        ActivationId::Logish => logish_grad(x),
        ActivationId::Smish => smish_grad(x),
        ActivationId::Tanh => tanh_grad(x),
        ActivationId::Sigmoid => sigmoid_grad(x),
    }
}

pub fn eval(id: ActivationId, x: f64, precision: Precision) -> f64 {
    match precision {
        Precision::F32 => value(id, x as f32) as f64,
        Precision::F64 => value(id, x),
    }
}

pub fn eval_derivative(id: ActivationId, x: f64, precision: Precision) -> f64 {
    match precision {
        Precision::F32 => derivative(id, x as f32) as f64,
        Precision::F64 => derivative(id, x),
    }
}

pub fn eval_batch(id: ActivationId, xs: &[f64], precision: Precision) -> Vec<f64> {
    xs.iter().map(|&x| eval(id, x, precision)).collect()
}

pub fn derivative_batch(id: ActivationId, xs: &[f64], precision: Precision) -> Vec<f64> {
    xs.iter().map(|&x| eval_derivative(id, x, precision)).collect()
}

#[inline]
fn map_into<T: Real>(input: &[T], out: &mut [T], f: impl Fn(T) -> T) {
    for (o, &x) in out.iter_mut().zip(input) {
        *o = f(x);
    }
}

/// Writes `f(input[i])` into `out[i]`. The unit is resolved once, outside the
/// loop, so each arm compiles to a tight kernel.
pub fn values_into<T: Real>(id: ActivationId, input: &[T], out: &mut [T]) {
    assert_eq!(input.len(), out.len(), "input and output lengths differ");
    use kernels::*;
    match id {
        ActivationId::TeLU => map_into(input, out, telu),
        ActivationId::ReLU => map_into(input, out, relu),
        ActivationId::LReLU => map_into(input, out, lrelu),
        ActivationId::Softplus => map_into(input, out, softplus),
        ActivationId::ELU => map_into(input, out, elu),
        ActivationId::SiLU => map_into(input, out, silu),
        ActivationId::GELU => map_into(input, out, gelu),
        ActivationId::Mish => map_into(input, out, mish),
        ActivationId::Logish => map_into(input, out, logish),
        ActivationId::Smish => map_into(input, out, smish),
        ActivationId::Tanh => map_into(input, out, tanh),
        ActivationId::Sigmoid => map_into(input, out, sigmoid),
    }
}

/// Derivative counterpart of [`values_into`].
pub fn derivatives_into<T: Real>(id: ActivationId, input: &[T], out: &mut [T]) {
    assert_eq!(input.len(), out.len(), "input and output lengths differ");
    use kernels::*;
    match id {
        ActivationId::TeLU => map_into(input, out, telu_grad),
        ActivationId::ReLU => map_into(input, out, relu_grad),
        ActivationId::LReLU => map_into(input, out, lrelu_grad),
        ActivationId::Softplus => map_into(input, out, softplus_grad),
        ActivationId::ELU => map_into(input, out, elu_grad),
        ActivationId::SiLU => map_into(input, out, silu_grad),
        ActivationId::GELU => map_into(input, out, gelu_grad),
        ActivationId::Mish => map_into(input, out, mish_grad),
        ActivationId::Logish => map_into(input, out, logish_grad),
        ActivationId::Smish => map_into(input, out, smish_grad),
        ActivationId::Tanh => map_into(input, out, tanh_grad),
        ActivationId::Sigmoid => map_into(input, out, sigmoid_grad),
    }
}

/// Operation counts of the forward formula.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComplexityCounts {
    pub piecewise: u32,
    pub nonlinearity: u32,
    pub multiplicative: u32,
    pub additive: u32,
    pub constants: u32,
}

/// Operation counts of the first-derivative formula.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DerivativeComplexity {
    pub piecewise: u32,
    pub nonlinearity: u32,
    pub arithmetic: u32,
    pub constants: u32,
}

/// Static description of a linear unit.
///
/// The cost tables only cover eight units; LReLU and Softplus carry `None`
/// rather than invented counts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ActivationMeta {
    /// Slope `m` of the asymptote as `x -> +inf`.
    pub asymptotic_slope: f64,
    pub complexity: Option<ComplexityCounts>,
    pub derivative_complexity: Option<DerivativeComplexity>,
    pub smooth: bool,
    pub saturates_to_zero: bool,
}

const fn cost(p: u32, n: u32, m: u32, a: u32, c: u32) -> Option<ComplexityCounts> {
    Some(ComplexityCounts {
        piecewise: p,
        nonlinearity: n,
        multiplicative: m,
        additive: a,
        constants: c,
    })
}

const fn dcost(p: u32, n: u32, a: u32, c: u32) -> Option<DerivativeComplexity> {
    Some(DerivativeComplexity {
        piecewise: p,
        nonlinearity: n,
        arithmetic: a,
        constants: c,
    })
}

pub fn metadata(id: ActivationId) -> Result<ActivationMeta, ActivationError> {
    let ln2 = std::f64::consts::LN_2;
    let (slope, complexity, derivative_complexity, smooth, saturates_to_zero) = match id {
        ActivationId::TeLU => (1.0, cost(0, 2, 1, 0, 0), dcost(0, 3, 4, 0), true, true),
        ActivationId::ReLU => (1.0, cost(1, 0, 0, 0, 1), dcost(1, 0, 0, 2), false, true),
        ActivationId::LReLU => (1.0, None, None, false, false),
        ActivationId::Softplus => (1.0, None, None, true, true),
        ActivationId::ELU => (1.0, cost(1, 1, 0, 1, 1), dcost(1, 1, 0, 1), false, false),
        ActivationId::SiLU => (1.0, cost(0, 1, 2, 2, 3), dcost(0, 1, 6, 2), true, true),
        ActivationId::GELU => (1.0, cost(0, 1, 2, 1, 3), dcost(0, 2, 8, 7), true, true),
        ActivationId::Mish => (1.0, cost(0, 3, 1, 1, 2), dcost(0, 3, 16, 5), true, true),
        ActivationId::Logish => (ln2, cost(0, 2, 3, 1, 4), dcost(0, 3, 12, 3), true, true),
        ActivationId::Smish => (ln2.tanh(), cost(0, 3, 3, 1, 4), dcost(0, 3, 16, 10), true, true),
        ActivationId::Tanh | ActivationId::Sigmoid => return Err(ActivationError::UnknownMeta(id)),
    };
    Ok(ActivationMeta {
        asymptotic_slope: slope,
        complexity,
        derivative_complexity,
        smooth,
        saturates_to_zero,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn central_difference(id: ActivationId, x: f64, h: f64) -> f64 {
        (eval(id, x + h, Precision::F64) - eval(id, x - h, Precision::F64)) / (2.0 * h)
    }

    #[test]
    fn telu_at_origin_and_one() {
        assert_eq!(eval(ActivationId::TeLU, 0.0, Precision::F64), 0.0);
        // tanh(e), 40 digits: 0.9913289158005998...
        let v = eval(ActivationId::TeLU, 1.0, Precision::F64);
        assert!((v - 0.991_328_915_800_599_8).abs() < 1e-15, "{v}");
    }

    #[test]
    fn gelu_at_one_matches_series_erf() {
        // erf by its Maclaurin series, independent of the libm routine
        let z = std::f64::consts::FRAC_1_SQRT_2;
        let mut term = z;
        let mut sum = z;
        for n in 1..40 {
            term *= -z * z / n as f64;
            sum += term / (2 * n + 1) as f64;
        }
        let erf = sum * 2.0 / std::f64::consts::PI.sqrt();
        let expected = 0.5 * (1.0 + erf);
        let v = eval(ActivationId::GELU, 1.0, Precision::F64);
        assert!((v - expected).abs() < 1e-15, "{v} vs {expected}");
        assert!((v - 0.841_345).abs() < 1e-6);
    }

    #[test]
    fn relu_negative_branch_and_joints() {
        assert_eq!(eval(ActivationId::ReLU, -3.0, Precision::F64), 0.0);
        assert_eq!(eval_derivative(ActivationId::ReLU, 5.0, Precision::F64), 1.0);
        for id in [ActivationId::ReLU, ActivationId::ELU, ActivationId::LReLU] {
            assert_eq!(eval_derivative(id, 0.0, Precision::F64), 1.0, "{id}");
        }
    }

    #[test]
    fn silu_derivative_at_origin() {
        let d = eval_derivative(ActivationId::SiLU, 0.0, Precision::F64);
        assert!((d - 0.5).abs() < 1e-15);
        assert!((central_difference(ActivationId::SiLU, 0.0, 1e-5) - 0.5).abs() < 1e-9);
    }

    #[test]
    fn telu_derivative_vanishes_near_isolated_zero() {
        let d = eval_derivative(ActivationId::TeLU, -1.07886, Precision::F64);
        assert!(d.abs() < 1e-4, "{d}");
    }

    #[test]
    fn batch_examples() {
        assert_eq!(
            eval_batch(ActivationId::ReLU, &[-1.0, 0.0, 2.0], Precision::F64),
            vec![0.0, 0.0, 2.0]
        );
        assert!(eval_batch(ActivationId::TeLU, &[], Precision::F64).is_empty());
        let v = eval_batch(ActivationId::TeLU, &[1.0, 1.0], Precision::F64);
        assert_eq!(v.len(), 2);
        assert!(v.iter().all(|y| (y - 0.991_329).abs() < 1e-6));

        assert_eq!(
            derivative_batch(ActivationId::ReLU, &[-1.0, 2.0], Precision::F64),
            vec![0.0, 1.0]
        );
        let d = derivative_batch(ActivationId::TeLU, &[0.0], Precision::F64);
        assert!((d[0] - 1f64.tanh()).abs() < 1e-15);
        assert!((d[0] - 0.761_594).abs() < 1e-6);
        let d = derivative_batch(ActivationId::ELU, &[-1e6], Precision::F64);
        assert!(d[0].abs() < 1e-300);
    }

    #[test]
    fn slice_kernels_agree_with_scalar_path() {
        let xs: Vec<f32> = (-40..=40).map(|i| i as f32 * 0.37).collect();
        let mut out = vec![0f32; xs.len()];
        for id in ActivationId::ALL {
            values_into(id, &xs, &mut out);
            for (&x, &y) in xs.iter().zip(&out) {
                assert_eq!(y.to_bits(), (value(id, x)).to_bits(), "{id} at {x}");
            }
            derivatives_into(id, &xs, &mut out);
            for (&x, &y) in xs.iter().zip(&out) {
                assert_eq!(y.to_bits(), (derivative(id, x)).to_bits(), "{id}' at {x}");
            }
        }
    }

    #[test]
    fn large_inputs_stay_finite() {
        for id in ActivationId::LINEAR_UNITS {
            let slope = metadata(id).unwrap().asymptotic_slope;
            for x in [100.0, 800.0, 1e6] {
                let d = eval_derivative(id, x, Precision::F64);
                assert!((d - slope).abs() < 1e-12, "{id}'({x}) = {d}");
                assert!(eval(id, x, Precision::F64).is_finite());
                assert!(eval_derivative(id, x, Precision::F32).is_finite(), "{id}");
            }
        }
    }

    #[test]
    fn names_round_trip() {
        for id in ActivationId::ALL {
            assert_eq!(id.name().parse::<ActivationId>().unwrap(), id);
            assert_eq!(id.name().to_lowercase().parse::<ActivationId>().unwrap(), id);
        }
        assert!(matches!(
            "bogus".parse::<ActivationId>(),
            Err(ActivationError::UnknownName(_))
        ));
        assert_eq!("f32".parse::<Precision>().unwrap(), Precision::F32);
    }

    #[test]
    fn metadata_rows() {
        let telu = metadata(ActivationId::TeLU).unwrap().complexity.unwrap();
        assert_eq!(
            (
                telu.piecewise,
                telu.nonlinearity,
                telu.multiplicative,
                telu.additive,
                telu.constants
            ),
            (0, 2, 1, 0, 0)
        );
        let relu = metadata(ActivationId::ReLU).unwrap().complexity.unwrap();
        assert_eq!(
            (
                relu.piecewise,
                relu.nonlinearity,
                relu.multiplicative,
                relu.additive,
                relu.constants
            ),
            (1, 0, 0, 0, 1)
        );
        let smish = metadata(ActivationId::Smish).unwrap();
        let c = smish.complexity.unwrap();
        assert_eq!(
            (c.piecewise, c.nonlinearity, c.multiplicative, c.additive, c.constants),
            (0, 3, 3, 1, 4)
        );
        assert!((smish.asymptotic_slope - 0.6).abs() < 1e-15);
        assert!((metadata(ActivationId::Logish).unwrap().asymptotic_slope - std::f64::consts::LN_2).abs() < 1e-15);
        assert_eq!(
            metadata(ActivationId::Tanh),
            Err(ActivationError::UnknownMeta(ActivationId::Tanh))
        );
        assert!(metadata(ActivationId::Sigmoid).is_err());
    }
}
