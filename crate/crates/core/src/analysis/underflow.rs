//! Null-domain scans: where does `f'(x)` evaluate to exactly zero?

use serde::{Deserialize, Serialize};

use super::AnalysisError;
use crate::activations::{self, ActivationId, Precision};

/// Inputs at which the derivative is recorded alongside the boundary.
pub const PROBE_POINTS: [f64; 2] = [-10.0, -100.0];

/// Half-open scan grid `start, start + step, ...` up to but excluding `end`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanRange {
    pub start: f64,
    pub end: f64,
    pub step: f64,
}

impl Default for ScanRange {
    fn default() -> Self {
        ScanRange {
            start: -200.0,
            end: 0.0,
            step: 1e-4,
        }
    }
}

impl ScanRange {
    fn points(&self) -> Result<usize, AnalysisError> {
        if !(self.step > 0.0 && self.step.is_finite()) {
            return Err(AnalysisError::InvalidArgument(format!(
                "scan step must be positive, got {}",
                self.step
            )));
        }
        if !(self.end > self.start) {
            return Err(AnalysisError::InvalidArgument(format!(
                "empty scan range [{}, {})",
                self.start, self.end
            )));
        }
        Ok(((self.end - self.start) / self.step).round() as usize)
    }

    fn at(&self, i: usize) -> f64 {
        self.start + i as f64 * self.step
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Probe {
    pub x: f64,
    pub derivative: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NullDomainReport {
    pub id: ActivationId,
    pub precision: Precision,
    /// Most positive scanned input whose derivative is exactly zero, with
    /// every scanned input below it also zero. Equals the range end when the
    /// derivative is zero across the whole scan.
    pub boundary: f64,
    pub probes: Vec<Probe>,
}

/// Walks the grid upward from `range.start` and stops at the first nonzero
/// derivative. Negative zero counts as zero.
pub fn underflow_scan(
    id: ActivationId,
    precision: Precision,
    range: ScanRange,
) -> Result<NullDomainReport, AnalysisError> {
    let n = range.points()?;
    let first_nonzero = (0..n).find(|&i| activations::eval_derivative(id, range.at(i), precision) != 0.0);
    let boundary = match first_nonzero {
        Some(0) => return Err(AnalysisError::NoNullRegion { id, precision }),
        Some(i) => range.at(i - 1),
        None => range.end,
    };
    let probes = PROBE_POINTS
        .iter()
        .map(|&x| Probe {
            x,
            derivative: activations::eval_derivative(id, x, precision),
        })
        .collect();
    Ok(NullDomainReport {
        id,
        precision,
        boundary,
        probes,
    })
}
