//! Acceptance suite. Every criterion runs at its stated tolerance and prints
//! one `PASS`/`FAIL` line; the process exits non-zero if any criterion fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use telu_lab::activations::{self, metadata, ComplexityCounts, DerivativeComplexity};
use telu_lab::analysis::{
    decay_classify, derivative_supremum, find_derivative_root, gradient_check, near_linearity, output_bias,
    relu_proximity, underflow_scan, zero_centering_samples, DecayClass, LimitEstimate, ScanRange, DEFAULT_DECAY_POINTS,
};
use telu_lab::bench::{forward_median, run_bench, BenchConfig};
use telu_lab::nn::experiment::RecoverySetup;
use telu_lab::nn::{init_model, recovery_experiment, Gradients, MlpModel, WeightInit};
use telu_lab::quadrature::{IntegralResult, IntegralStatus, QuadratureConfig};
use telu_lab::{ActivationId, Precision};

use ActivationId::*;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn within_budget(start: Instant, budget: Duration, detail: String) -> Outcome {
    let t = start.elapsed();
    check(
        t < budget,
        format!("{detail}; {:.1}s of {}s", t.as_secs_f64(), budget.as_secs()),
    )
}

fn near_linearity_table() -> Outcome {
    let start = Instant::now();
    let cfg = QuadratureConfig::default();
    let expected = [
        (TeLU, 0.0273, 0.0008),
        (SiLU, 0.8225, 0.1582),
        (GELU, 0.2500, 0.0309),
        (Mish, 0.2407, 0.0238),
        (Logish, 0.4289, 0.0436),
        (Smish, 0.2887, 0.0201),
    ];
    let mut bad = Vec::new();
    for (id, l1, l2) in expected {
        match near_linearity(id, &cfg) {
            Ok(r) if (r.l1 - l1).abs() <= 0.002 && (r.l2 - l2).abs() <= 0.0005 => {}
            Ok(r) => bad.push(format!("{id} ({:.4}, {:.4})", r.l1, r.l2)),
            Err(e) => bad.push(format!("{id} {e}")),
        }
    }
    if !bad.is_empty() {
        return Err(bad.join(", "));
    }
    within_budget(start, Duration::from_secs(10), "six rows within tolerance".into())
}

fn finite_near(r: &IntegralResult, want: f64, tol: f64) -> bool {
    r.status == IntegralStatus::Converged && (r.value - want).abs() <= tol
}

fn relu_proximity_table() -> Outcome {
    let cfg = QuadratureConfig::default();
    let row = |id| relu_proximity(id, &cfg);
    let mut bad = Vec::new();
    let mut expect = |label: String, ok: bool, r: &IntegralResult| {
        if !ok {
            bad.push(format!("{label} = {:.6} ({:?})", r.value, r.status));
        }
    };
    for (id, neg, pos) in [
        (TeLU, 0.967, 0.027),
        (SiLU, 0.822, 0.822),
        (GELU, 0.250, 0.250),
        (Mish, 0.884, 0.241),
    ] {
        let r = row(id);
        expect(format!("{id} neg"), finite_near(&r.neg, neg, 0.005), &r.neg);
        expect(format!("{id} pos"), finite_near(&r.pos, pos, 0.005), &r.pos);
    }
    for (id, neg) in [(Softplus, 0.822), (Logish, 0.767), (Smish, 0.760)] {
        let r = row(id);
        expect(format!("{id} neg"), finite_near(&r.neg, neg, 0.005), &r.neg);
    }
    for id in [LReLU, ELU] {
        let r = row(id);
        expect(format!("{id} neg divergent"), r.neg.is_divergent(), &r.neg);
        expect(format!("{id} pos zero"), finite_near(&r.pos, 0.0, 1e-9), &r.pos);
    }
    for id in [Softplus, Logish, Smish] {
        let r = row(id);
        expect(format!("{id} pos divergent"), r.pos.is_divergent(), &r.pos);
    }
    check(
        bad.is_empty(),
        if bad.is_empty() {
            "all cells match".into()
        } else {
            bad.join(", ")
        },
    )
}

fn output_bias_table() -> Outcome {
    let cfg = QuadratureConfig::default();
    let expected = [
        (TeLU, 0.2621),
        (ReLU, 0.3989),
        (ELU, 0.1605),
        (SiLU, 0.2066),
        (GELU, 0.2821),
        (Mish, 0.2404),
        (Logish, 0.1398),
        (Smish, 0.1201),
    ];
    let mut bad = Vec::new();
    for (id, want) in expected {
        let got = output_bias(id, 1.0, &cfg).map_err(|e| e.to_string())?;
        if (got - want).abs() > 0.002 {
            bad.push(format!("{id} {got:.4}"));
        }
    }
    let relu = output_bias(ReLU, 1.0, &cfg).map_err(|e| e.to_string())?;
    let analytic = 1.0 / (2.0 * std::f64::consts::PI).sqrt();
    if (relu - analytic).abs() > 1e-6 {
        bad.push(format!("ReLU analytic gap {:.2e}", (relu - analytic).abs()));
    }
    check(
        bad.is_empty(),
        if bad.is_empty() {
            "eight rows within 0.002".into()
        } else {
            bad.join(", ")
        },
    )
}

fn underflow_boundaries() -> Outcome {
    let start = Instant::now();
    let range = ScanRange::default();
    let boundary = |id| {
        underflow_scan(id, Precision::F32, range)
            .map(|r| r.boundary)
            .map_err(|e| e.to_string())
    };
    let mut bad = Vec::new();
    for id in [TeLU, ELU, SiLU, Mish, Logish, Smish] {
        let b = boundary(id)?;
        if (b + 103.98).abs() > 0.02 {
            bad.push(format!("{id} {b:.4}"));
        }
    }
    let relu = boundary(ReLU)?;
    if relu != 0.0 {
        bad.push(format!("ReLU {relu}"));
    }
    let gelu = boundary(GELU)?;
    if (gelu + 14.42).abs() > 0.5 {
        bad.push(format!("GELU {gelu:.4}"));
    }
    if !bad.is_empty() {
        return Err(bad.join(", "));
    }
    within_budget(start, Duration::from_secs(60), format!("GELU at {gelu:.4}"))
}

fn decay_classes() -> Outcome {
    let mut bad = Vec::new();
    for id in [TeLU, SiLU, Mish, Logish, Smish] {
        let r = decay_classify(id, &DEFAULT_DECAY_POINTS).map_err(|e| e.to_string())?;
        let ok = matches!(r.limit_estimate, LimitEstimate::Finite(v) if (v - 1.0).abs() <= 1e-3)
            && r.assigned_class == DecayClass::XOverExp;
        if !ok {
            bad.push(format!("{id} {} {}", r.limit_estimate, r.assigned_class));
        }
    }
    let elu = decay_classify(ELU, &DEFAULT_DECAY_POINTS).map_err(|e| e.to_string())?;
    if elu.assigned_class != DecayClass::InverseExp {
        bad.push(format!("ELU {}", elu.assigned_class));
    }
    let gelu = decay_classify(GELU, &DEFAULT_DECAY_POINTS).map_err(|e| e.to_string())?;
    let rates = gelu.log_growth_rates();
    let accelerating = rates.windows(2).all(|w| w[1] > w[0]);
    if gelu.assigned_class != DecayClass::FactorialBracket || !accelerating {
        bad.push(format!("GELU {} rates {rates:?}", gelu.assigned_class));
    }
    check(
        bad.is_empty(),
        if bad.is_empty() {
            "classes match".into()
        } else {
            bad.join(", ")
        },
    )
}

fn isolated_zero() -> Outcome {
    let root = find_derivative_root(TeLU, (-2.0, -0.5), 1e-12).map_err(|e| e.to_string())?;
    if (root + 1.0789).abs() > 1e-3 {
        return Err(format!("root {root}"));
    }
    let n = 100_000;
    let zeros = (0..n)
        .map(|i| -20.0 + 40.0 * i as f64 / (n - 1) as f64)
        .filter(|x| (x - root).abs() > 1e-3)
        .filter(|&x| activations::derivative(TeLU, x) == 0.0)
        .count();
    check(zeros == 0, format!("root {root:.9}, {zeros} zero grid points"))
}

fn theorem_checks() -> Outcome {
    let n = 100_000;
    let violations = (0..n)
        .map(|i| -50.0 + 100.0 * i as f64 / (n - 1) as f64)
        .filter(|&x| activations::value(TeLU, x).abs() > x.abs())
        .count();
    if violations > 0 {
        return Err(format!("{violations} boundedness violations"));
    }
    let samples = zero_centering_samples(
        activations::kernels::telu,
        &[0.5, 1.0, 2.0],
        &QuadratureConfig::default(),
    )
    .map_err(|e| e.to_string())?;
    if let Some(s) = samples.iter().find(|s| !(0.0 < s.mean && s.mean < s.relu_mean)) {
        return Err(format!(
            "zero-centering fails at sigma {}: {} vs {}",
            s.sigma, s.mean, s.relu_mean
        ));
    }
    let (x_sup, sup) = derivative_supremum(TeLU, (-20.0, 20.0)).map_err(|e| e.to_string())?;
    let m = 4_000_001;
    let oracle = (0..m)
        .map(|i| activations::derivative(TeLU, -20.0 + 40.0 * i as f64 / (m - 1) as f64).abs())
        .fold(0.0f64, f64::max);
    check(
        sup.is_finite() && (sup - oracle).abs() <= 1e-6,
        format!("sup |TeLU'| = {sup:.10} at {x_sup:.6}, grid oracle {oracle:.10}"),
    )
}

fn batch_loss(model: &MlpModel, x: &[f64], y: &[usize]) -> f64 {
    let mut g = Gradients::zeros_like(model);
    model.loss_and_gradients(x, y, &mut g).loss
}

fn gradient_consistency() -> Outcome {
    let mut bad = Vec::new();
    for id in ActivationId::ALL {
        let r = gradient_check(id, -20.0, 20.0, 40_001, 1e-5);
        if !(r.max_rel_error < 1e-6) {
            bad.push(format!("{id} {:.2e} at {}", r.max_rel_error, r.worst_x));
        }
    }
    let (dim, k, n) = (4, 3, 8);
    let x: Vec<f64> = (0..n * dim).map(|i| (i as f64 * 0.7311).sin() * 1.5).collect();
    let y: Vec<usize> = (0..n).map(|i| i % k).collect();
    let h = 1e-6;
    let mut worst = 0.0f64;
    for id in ActivationId::LINEAR_UNITS {
        let model = init_model(&[dim, 6, k], id, WeightInit::XavierUniform, 0.1, 11).map_err(|e| e.to_string())?;
        let mut g = Gradients::zeros_like(&model);
        model.loss_and_gradients(&x, &y, &mut g);
        for l in 0..model.layers.len() {
            for j in 0..model.layers[l].weights.len() {
                let (mut p, mut m) = (model.clone(), model.clone());
                p.layers[l].weights[j] += h;
                m.layers[l].weights[j] -= h;
                let fd = (batch_loss(&p, &x, &y) - batch_loss(&m, &x, &y)) / (2.0 * h);
                let a = g.layers[l].weights[j];
                let rel = (a - fd).abs() / a.abs().max(fd.abs()).max(1e-3);
                if rel > 1e-5 {
                    bad.push(format!("{id} backprop layer {l} weight {j}: {rel:.2e}"));
                }
                worst = worst.max(rel);
            }
        }
    }
    check(
        bad.is_empty(),
        if bad.is_empty() {
            format!("worst backprop relative error {worst:.2e}")
        } else {
            bad.join(", ")
        },
    )
}

fn recovery_ordering() -> Outcome {
    let start = Instant::now();
    let ids = [TeLU, Mish, GELU, ReLU];
    let mut bad = Vec::new();
    let mut summary = Vec::new();
    for seed in [1, 2, 3] {
        let setup = RecoverySetup::desk(seed);
        let (tr, va) = setup.datasets().map_err(|e| e.to_string())?;
        let out = recovery_experiment(&ids, &setup, &tr, &va).map_err(|e| e.to_string())?;
        let e: Vec<Option<usize>> = out.iter().map(|o| o.first_recovery_epoch).collect();
        let ok = match (e[0], e[1]) {
            (Some(t), Some(m)) => t <= m && e[2].is_none_or(|g| m <= g) && e[3].is_none(),
            _ => false,
        };
        let fmt = |v: Option<usize>| v.map_or("never".to_string(), |v| v.to_string());
        let line = format!(
            "seed {seed}: TeLU {} Mish {} GELU {} ReLU {}",
            fmt(e[0]),
            fmt(e[1]),
            fmt(e[2]),
            fmt(e[3])
        );
        if !ok {
            bad.push(line.clone());
        }
        summary.push(line);
    }
    if !bad.is_empty() {
        return Err(summary.join("; "));
    }
    within_budget(start, Duration::from_secs(180), summary.join("; "))
}

/// Defaults of one million inputs, reduced to a handful of iterations per
/// batch so the suite stays within minutes.
fn benchmark_ordering() -> Outcome {
    let cfg = BenchConfig {
        iterations: 5,
        repetitions: 5,
        ..BenchConfig::default()
    };
    let ids = [ReLU, TeLU, SiLU, GELU, Mish, Logish, Smish];
    let report = run_bench(&ids, &cfg).map_err(|e| e.to_string())?;
    let t = |id| forward_median(&report.records, id).unwrap_or(f64::NAN);
    let telu = t(TeLU);
    let mut bad = Vec::new();
    if !(t(ReLU) < telu) {
        bad.push(format!("ReLU {:.0} !< TeLU {telu:.0}", t(ReLU)));
    }
    for id in [SiLU, GELU, Mish, Logish, Smish] {
        if !(telu < t(id)) {
            bad.push(format!("TeLU {telu:.0} !< {id} {:.0}", t(id)));
        }
    }
    let ratio = t(Smish) / telu;
    if !(ratio >= 1.3) {
        bad.push(format!("Smish/TeLU {ratio:.2}"));
    }
    let timings = ids
        .iter()
        .map(|&id| format!("{id} {:.2}ms", t(id) / 1e6))
        .collect::<Vec<_>>()
        .join(" ");
    check(
        bad.is_empty(),
        format!("{timings}; Smish/TeLU {ratio:.2}; {}", bad.join(", ")),
    )
}

fn complexity_metadata() -> Outcome {
    let forward = [
        (TeLU, [0, 2, 1, 0, 0]),
        (ReLU, [1, 0, 0, 0, 1]),
        (ELU, [1, 1, 0, 1, 1]),
        (SiLU, [0, 1, 2, 2, 3]),
        (GELU, [0, 1, 2, 1, 3]),
        (Mish, [0, 3, 1, 1, 2]),
        (Logish, [0, 2, 3, 1, 4]),
        (Smish, [0, 3, 3, 1, 4]),
    ];
    let backward = [
        (TeLU, [0, 3, 4, 0]),
        (ReLU, [1, 0, 0, 2]),
        (ELU, [1, 1, 0, 1]),
        (SiLU, [0, 1, 6, 2]),
        (GELU, [0, 2, 8, 7]),
        (Mish, [0, 3, 16, 5]),
        (Logish, [0, 3, 12, 3]),
        (Smish, [0, 3, 16, 10]),
    ];
    let mut bad = Vec::new();
    for ((id, [p, n, m, a, c]), (_, [dp, dn, da, dc])) in forward.into_iter().zip(backward) {
        let meta = metadata(id).map_err(|e| e.to_string())?;
        let want = ComplexityCounts {
            piecewise: p,
            nonlinearity: n,
            multiplicative: m,
            additive: a,
            constants: c,
        };
        let dwant = DerivativeComplexity {
            piecewise: dp,
            nonlinearity: dn,
            arithmetic: da,
            constants: dc,
        };
        if meta.complexity != Some(want) || meta.derivative_complexity != Some(dwant) {
            bad.push(id.to_string());
        }
    }
    check(
        bad.is_empty(),
        if bad.is_empty() {
            "16 rows match".into()
        } else {
            bad.join(", ")
        },
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        ("near-linearity table", near_linearity_table),
        ("ReLU proximity table", relu_proximity_table),
        ("output bias", output_bias_table),
        ("underflow boundaries", underflow_boundaries),
        ("decay classification", decay_classes),
        ("isolated derivative zero", isolated_zero),
        ("theorem checks", theorem_checks),
        ("gradient consistency", gradient_consistency),
        ("recovery ordering", recovery_ordering),
        ("benchmark ordering", benchmark_ordering),
        ("complexity metadata", complexity_metadata),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failures = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let n = i + 1;
        if !filter.is_empty() && !filter.iter().any(|f| name.contains(f.as_str()) || *f == n.to_string()) {
            continue;
        }
        let result = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|_| Err("panicked".into()));
        match result {
            Ok(detail) => println!("criterion {n:>2} PASS {name}: {detail}"),
            Err(detail) => {
                failures += 1;
                println!("criterion {n:>2} FAIL {name}: {detail}");
            }
        }
    }
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failures} criteria failed");
        ExitCode::FAILURE
    }
}
