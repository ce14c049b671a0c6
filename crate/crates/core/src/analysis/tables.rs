//! The five analytical tables, computed per unit and rendered as CSV or JSON.
//!
//! Every float is printed with six significant digits. Divergent integrals
//! are the literal token `inf` in CSV and carry `"status": "divergent"` in
//! JSON.

use std::fmt::Write as _;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use super::decay::{self, DecayReport};
use super::underflow::{underflow_scan, Probe, ScanRange};
use super::{near_linearity, output_bias, relu_proximity, AnalysisError, NearLinearityRow, ProximityRow};
use crate::activations::{ActivationId, Precision};
use crate::format::{round6, sig6};
use crate::quadrature::{IntegralResult, IntegralStatus, QuadratureConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TableFormat {
    Csv,
    Json,
}

impl FromStr for TableFormat {
    type Err = AnalysisError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(TableFormat::Csv),
            "json" => Ok(TableFormat::Json),
            other => Err(AnalysisError::InvalidArgument(format!(
                "unknown table format {other:?}"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableOptions {
    pub quadrature: QuadratureConfig,
    pub scan: ScanRange,
    pub scan_precision: Precision,
    pub sigma: f64,
    pub decay_points: Vec<f64>,
}

impl Default for TableOptions {
    fn default() -> Self {
        TableOptions {
            quadrature: QuadratureConfig::default(),
            scan: ScanRange::default(),
            scan_precision: Precision::F32,
            sigma: 1.0,
            decay_points: decay::DEFAULT_DECAY_POINTS.to_vec(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OutputBiasRow {
    pub id: ActivationId,
    pub sigma: f64,
    pub output_bias: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NullDomainRow {
    pub id: ActivationId,
    pub precision: Precision,
    /// `None` when the derivative never underflows on the scanned range.
    pub boundary: Option<f64>,
    pub probes: Vec<Probe>,
}

/// All five tables, rows in filter order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableSet {
    pub near_linearity: Vec<NearLinearityRow>,
    pub relu_proximity: Vec<ProximityRow>,
    pub output_bias: Vec<OutputBiasRow>,
    pub null_domain: Vec<NullDomainRow>,
    pub decay: Vec<DecayReport>,
}

struct UnitRows {
    near: NearLinearityRow,
    proximity: ProximityRow,
    bias: OutputBiasRow,
    null: NullDomainRow,
    decay: DecayReport,
}

fn validate_filter(ids: &[ActivationId]) -> Result<(), AnalysisError> {
    if ids.is_empty() {
        return Err(AnalysisError::InvalidFilter("no activations selected".into()));
    }
    if let Some(id) = ids.iter().find(|id| !id.is_linear_unit()) {
        return Err(AnalysisError::InvalidFilter(format!("{id} has no table rows")));
    }
    Ok(())
}

fn unit_rows(id: ActivationId, opts: &TableOptions) -> Result<UnitRows, AnalysisError> {
    let null = match underflow_scan(id, opts.scan_precision, opts.scan) {
        Ok(r) => NullDomainRow {
            id,
            precision: r.precision,
            boundary: Some(r.boundary),
            probes: r.probes,
        },
        Err(AnalysisError::NoNullRegion { .. }) => NullDomainRow {
            id,
            precision: opts.scan_precision,
            boundary: None,
            probes: super::underflow::PROBE_POINTS
                .iter()
                .map(|&x| Probe {
                    x,
                    derivative: crate::activations::eval_derivative(id, x, opts.scan_precision),
                })
                .collect(),
        },
        Err(e) => return Err(e),
    };
    Ok(UnitRows {
        near: near_linearity(id, &opts.quadrature)?,
        proximity: relu_proximity(id, &opts.quadrature),
        bias: OutputBiasRow {
            id,
            sigma: opts.sigma,
            output_bias: output_bias(id, opts.sigma, &opts.quadrature)?,
        },
        null,
        decay: decay::decay_classify(id, &opts.decay_points)?,
    })
}

/// Computes every table for `ids`. Units are processed in parallel; row
/// order follows `ids`.
pub fn compute_tables(ids: &[ActivationId], opts: &TableOptions) -> Result<TableSet, AnalysisError> {
    validate_filter(ids)?;
    let rows: Vec<UnitRows> = ids
        .par_iter()
        .map(|&id| unit_rows(id, opts))
        .collect::<Result<_, _>>()?;
    let mut set = TableSet {
        near_linearity: Vec::with_capacity(rows.len()),
        relu_proximity: Vec::with_capacity(rows.len()),
        output_bias: Vec::with_capacity(rows.len()),
        null_domain: Vec::with_capacity(rows.len()),
        decay: Vec::with_capacity(rows.len()),
    };
    for r in rows {
        set.near_linearity.push(r.near);
        set.relu_proximity.push(r.proximity);
        set.output_bias.push(r.bias);
        set.null_domain.push(r.null);
        set.decay.push(r.decay);
    }
    Ok(set)
}

pub fn render_tables(ids: &[ActivationId], format: TableFormat, opts: &TableOptions) -> Result<String, AnalysisError> {
    let set = compute_tables(ids, opts)?;
    Ok(match format {
        TableFormat::Csv => set.to_csv(),
        TableFormat::Json => set.to_json(opts).to_string(),
    })
}

fn integral_token(r: &IntegralResult) -> String {
    match r.status {
        IntegralStatus::Divergent => "inf".into(),
        IntegralStatus::Converged => sig6(r.value),
        IntegralStatus::MaxSubdivisions => "unconverged".into(),
    }
}

fn num(x: f64) -> Value {
    if x.is_finite() {
        json!(round6(x))
    } else {
        json!(sig6(x))
    }
}

impl TableSet {
    pub fn to_csv(&self) -> String {
        let mut out = String::new();

        out.push_str("# near_linearity\nid,L1,L2,slope\n");
        for r in &self.near_linearity {
            let _ = writeln!(out, "{},{},{},{}", r.id, sig6(r.l1), sig6(r.l2), sig6(r.slope));
        }

        out.push_str("\n# relu_proximity\nid,neg,pos\n");
        for r in &self.relu_proximity {
            let _ = writeln!(out, "{},{},{}", r.id, integral_token(&r.neg), integral_token(&r.pos));
        }

        out.push_str("\n# output_bias\nid,sigma,output_bias\n");
        for r in &self.output_bias {
            let _ = writeln!(out, "{},{},{}", r.id, sig6(r.sigma), sig6(r.output_bias));
        }

        out.push_str("\n# null_domain\nid,precision,boundary");
        for x in super::underflow::PROBE_POINTS {
            let _ = write!(out, ",d_at_{x}");
        }
        out.push('\n');
        for r in &self.null_domain {
            let boundary = r.boundary.map_or_else(|| "none".to_string(), sig6);
            let _ = write!(out, "{},{},{}", r.id, r.precision, boundary);
            for p in &r.probes {
                let _ = write!(out, ",{}", sig6(p.derivative));
            }
            out.push('\n');
        }

        out.push_str("\n# decay\nid,limit,class");
        if let Some(first) = self.decay.first() {
            for s in &first.ratio_samples {
                let _ = write!(out, ",ratio_x{}", sig6(s.x));
            }
        }
        out.push('\n');
        for r in &self.decay {
            let _ = write!(out, "{},{},{}", r.id, r.limit_estimate, r.assigned_class);
            for s in &r.ratio_samples {
                let _ = write!(out, ",{}", sig6(s.ratio));
            }
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self, opts: &TableOptions) -> Value {
        let integral = |r: &IntegralResult| {
            let value = match r.status {
                IntegralStatus::Divergent => json!("inf"),
                _ => num(r.value),
            };
            json!({
                "value": value,
                "abs_error": num(r.abs_error_estimate),
                "status": r.status,
            })
        };
        let near: Vec<Value> = self
            .near_linearity
            .iter()
            .map(|r| json!({"id": r.id, "L1": num(r.l1), "L2": num(r.l2), "slope": num(r.slope)}))
            .collect();
        let proximity: Vec<Value> = self
            .relu_proximity
            .iter()
            .map(|r| json!({"id": r.id, "neg": integral(&r.neg), "pos": integral(&r.pos)}))
            .collect();
        let bias: Vec<Value> = self
            .output_bias
            .iter()
            .map(|r| json!({"id": r.id, "sigma": num(r.sigma), "output_bias": num(r.output_bias)}))
            .collect();
        let null_rows: Vec<Value> = self
            .null_domain
            .iter()
            .map(|r| {
                let probes: Map<String, Value> = r.probes.iter().map(|p| (sig6(p.x), num(p.derivative))).collect();
                json!({
                    "id": r.id,
                    "precision": r.precision,
                    "boundary": r.boundary.map_or(json!("none"), num),
                    "probes": probes,
                })
            })
            .collect();
        let decay: Vec<Value> = self
            .decay
            .iter()
            .map(|r| {
                let limit = match r.limit_estimate {
                    decay::LimitEstimate::Finite(v) => num(v),
                    other => json!(other.to_string()),
                };
                let ratios: Vec<Value> = r
                    .ratio_samples
                    .iter()
                    .map(|s| json!({"x": num(s.x), "ratio": num(s.ratio)}))
                    .collect();
                json!({
                    "id": r.id,
                    "limit": limit,
                    "class": r.assigned_class.to_string(),
                    "ratios": ratios,
                })
            })
            .collect();
        json!({
            "metadata": {
                "quadrature": {
                    "abs_tol": opts.quadrature.abs_tol,
                    "max_subdivisions": opts.quadrature.max_subdivisions,
                    "truncation_point": opts.quadrature.truncation_point,
                    "divergence_growth_floor": opts.quadrature.divergence_growth_floor,
                },
                "scan": {
                    "precision": opts.scan_precision,
                    "start": opts.scan.start,
                    "end": opts.scan.end,
                    "step": opts.scan.step,
                },
                "sigma": opts.sigma,
                "decay": {
                    "agreement_rel_tol": decay::AGREEMENT_REL_TOL,
                    "growth_factor": decay::GROWTH_FACTOR,
                    "linear_slope_band": [decay::LINEAR_SLOPE_BAND.0, decay::LINEAR_SLOPE_BAND.1],
                    "exponential_rate": decay::EXPONENTIAL_RATE,
                },
            },
            "near_linearity": near,
            "relu_proximity": proximity,
            "output_bias": bias,
            "null_domain": null_rows,
            "decay": decay,
        })
    }
}
