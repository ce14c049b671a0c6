//! Forward/backward timing harness over a fixed 32-bit input vector.
//!
//! "Backward" evaluates the closed-form derivative over the vector. Timed
//! regions hold a process-wide lock so two benchmarks never overlap.
//! Setting `TELU_BENCH_CPU=<n>` pins the calling thread to CPU `n` on
//! Linux before timing; elsewhere the variable is ignored.

use std::fmt;
use std::hint::black_box;
use std::str::FromStr;
use std::sync::Mutex;
use std::time::Instant;

use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::activations::{derivatives_into, values_into, ActivationId};
use crate::nn::rng_from_seed;

pub const PIN_ENV_VAR: &str = "TELU_BENCH_CPU";
pub const WARMUP_ITERATIONS: usize = 3;

static TIMED_REGION: Mutex<()> = Mutex::new(());

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("invalid benchmark configuration: {0}")]
    InvalidConfig(String),
    #[error("unknown pass {0:?}")]
    UnknownPass(String),
    #[error("JSON: {0}")]
    Json(#[from] serde_json::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Pass {
    Forward,
    Backward,
}

impl fmt::Display for Pass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Pass::Forward => "forward",
            Pass::Backward => "backward",
        })
    }
}

impl FromStr for Pass {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "forward" => Ok(Pass::Forward),
            "backward" => Ok(Pass::Backward),
            other => Err(BenchError::UnknownPass(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BenchConfig {
    pub vector_len: usize,
    /// Applications of the kernel per timed batch.
    pub iterations: usize,
    /// Timed batches; the median is reported.
    pub repetitions: usize,
    pub seed: u64,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            vector_len: 1_000_000,
            iterations: 1000,
            repetitions: 7,
            seed: 0,
        }
    }
}

impl BenchConfig {
    /// One million inputs, one million iterations per batch.
    pub fn full_scale(seed: u64) -> Self {
        BenchConfig {
            vector_len: 1_000_000,
            iterations: 1_000_000,
            repetitions: 7,
            seed,
        }
    }

    fn validate(&self) -> Result<(), BenchError> {
        if self.vector_len == 0 || self.iterations == 0 {
            return Err(BenchError::InvalidConfig(
                "vector length and iterations must be >= 1".into(),
            ));
        }
        if self.repetitions < 5 {
            return Err(BenchError::InvalidConfig(format!(
                "need at least 5 repetitions for a median, got {}",
                self.repetitions
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRecord {
    pub id: ActivationId,
    pub pass: Pass,
    pub vector_len: usize,
    pub iterations: usize,
    /// Sum over all timed batches.
    pub total_ns: u64,
    /// Median batch time divided by `iterations`.
    pub median_per_iter_ns: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub records: Vec<BenchRecord>,
    /// Sum of every output element produced, kept so the work is observable.
    pub checksum: f64,
    pub pinned_cpu: Option<usize>,
}

/// Standard-normal 32-bit inputs drawn from `seed`.
pub fn bench_input(len: usize, seed: u64) -> Vec<f32> {
    let mut rng = rng_from_seed(seed);
    (0..len).map(|_| StandardNormal.sample(&mut rng)).collect()
}

#[cfg(target_os = "linux")]
fn pin_current_thread(cpu: usize) -> bool {
    // SAFETY: cpu_set_t is plain data; CPU_ZERO/CPU_SET only write into it and
    // sched_setaffinity reads it for the calling thread (pid 0).
    unsafe {
        let mut set: libc::cpu_set_t = std::mem::zeroed();
        libc::CPU_ZERO(&mut set);
        if cpu >= libc::CPU_SETSIZE as usize {
            return false;
        }
        libc::CPU_SET(cpu, &mut set);
        libc::sched_setaffinity(0, std::mem::size_of::<libc::cpu_set_t>(), &set) == 0
    }
}

#[cfg(not(target_os = "linux"))]
fn pin_current_thread(_cpu: usize) -> bool {
    false
}

fn pin_from_env() -> Option<usize> {
    let cpu: usize = std::env::var(PIN_ENV_VAR).ok()?.trim().parse().ok()?;
    pin_current_thread(cpu).then_some(cpu)
}

fn median(sorted: &[u64]) -> f64 {
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2] as f64
    } else {
        (sorted[n / 2 - 1] as f64 + sorted[n / 2] as f64) / 2.0
    }
}

fn time_pass(id: ActivationId, pass: Pass, input: &[f32], out: &mut [f32], cfg: &BenchConfig) -> (BenchRecord, f64) {
    let kernel = |out: &mut [f32]| match pass {
        Pass::Forward => values_into(id, black_box(input), out),
        Pass::Backward => derivatives_into(id, black_box(input), out),
    };
    for _ in 0..WARMUP_ITERATIONS {
        kernel(out);
        black_box(&mut *out);
    }
    let mut batches = Vec::with_capacity(cfg.repetitions);
    for _ in 0..cfg.repetitions {
        let start = Instant::now();
        for _ in 0..cfg.iterations {
            kernel(out);
            black_box(&mut *out);
        }
        // at least 1 ns so a batch is never reported as free
        batches.push((start.elapsed().as_nanos() as u64).max(1));
    }
    let checksum: f64 = out.iter().map(|&v| f64::from(v)).sum();
    let total_ns = batches.iter().sum();
    batches.sort_unstable();
    let record = BenchRecord {
        id,
        pass,
        vector_len: cfg.vector_len,
        iterations: cfg.iterations,
        total_ns,
        median_per_iter_ns: median(&batches) / cfg.iterations as f64,
    };
    (record, checksum)
}

/// Times the forward and backward pass of each id over the same input
/// vector. Records come in `ids` order, forward before backward.
pub fn run_bench(ids: &[ActivationId], cfg: &BenchConfig) -> Result<BenchReport, BenchError> {
    cfg.validate()?;
    let input = bench_input(cfg.vector_len, cfg.seed);
    let mut out = vec![0f32; cfg.vector_len];
    let _guard = TIMED_REGION.lock().unwrap_or_else(|poisoned| poisoned.into_inner());
    let pinned_cpu = pin_from_env();
    let mut records = Vec::with_capacity(ids.len() * 2);
    let mut checksum = 0.0;
    for &id in ids {
        for pass in [Pass::Forward, Pass::Backward] {
            let (record, sum) = time_pass(id, pass, &input, &mut out, cfg);
            records.push(record);
            checksum += sum;
        }
    }
    Ok(BenchReport {
        records,
        checksum: black_box(checksum),
        pinned_cpu,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExportFormat {
    Csv,
    Json,
}

/// CSV columns `id,pass,vector_len,iterations,median_per_iter_ns`; JSON is
/// the full record list.
pub fn export_bench(records: &[BenchRecord], format: ExportFormat) -> Result<String, BenchError> {
    match format {
        ExportFormat::Json => Ok(serde_json::to_string_pretty(records)?),
        ExportFormat::Csv => {
            let mut out = String::from("id,pass,vector_len,iterations,median_per_iter_ns\n");
            for r in records {
                out.push_str(&format!(
                    "{},{},{},{},{}\n",
                    r.id,
                    r.pass,
                    r.vector_len,
                    r.iterations,
                    crate::format::sig6(r.median_per_iter_ns)
                ));
            }
            Ok(out)
        }
    }
}

pub fn import_bench_json(doc: &str) -> Result<Vec<BenchRecord>, BenchError> {
    Ok(serde_json::from_str(doc)?)
}

/// Median forward time of `id` in `records`.
pub fn forward_median(records: &[BenchRecord], id: ActivationId) -> Option<f64> {
    records
        .iter()
        .find(|r| r.id == id && r.pass == Pass::Forward)
        .map(|r| r.median_per_iter_ns)
}
