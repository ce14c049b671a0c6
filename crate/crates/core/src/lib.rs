//! Numerical laboratory for the TeLU activation, `x * tanh(exp(x))`, and the
//! linear units it is usually compared against.
//!
//! The crate is split by concern:
//!
//! * [`activations`]: closed-form values and first derivatives in 32- and
//!   64-bit precision, plus static cost metadata.
//! * [`quadrature`]: adaptive Gauss-Kronrod integration on half lines with
//!   structural divergence detection, and Gaussian expectations.
//! * [`analysis`]: near-linearity, ReLU proximity, output bias, underflow
//!   null domains, asymptotic decay classes and the theorem checks.
//! * [`nn`]: a small deterministic MLP trainer used for the negative-bias
//!   recovery experiment and noise robustness.
//! * [`bench`]: forward/backward timing harness.

pub mod activations;
pub mod analysis;
pub mod bench;
pub mod format;
pub mod nn;
pub mod quadrature;

pub use activations::{ActivationId, Precision};
