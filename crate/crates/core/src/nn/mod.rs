//! Minimal dense-network trainer: datasets, an MLP with exact backprop,
//! mini-batch SGD with momentum, and the negative-bias recovery and
//! noise-robustness experiments built on top of it.
//!
//! All randomness flows from a caller-supplied `u64` seed through
//! [`rng_from_seed`], a ChaCha8 stream generator whose output is fixed by
//! its published algorithm, so runs are reproducible across platforms.

pub mod dataset;
pub mod experiment;
pub mod model;
pub mod train;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

pub use dataset::{load_idx, synth_blobs, BlobConfig, Dataset, FeatureStats};
pub use experiment::{evaluate_with_noise, recovery_experiment, NoisePoint, RecoveryOutcome, RecoverySetup};
pub use model::{init_model, DenseLayer, Gradients, MlpModel, WeightInit};
pub use train::{accuracy, export_metrics_csv, train, EpochMetrics, TrainConfig, TrainOutcome};

/// Stream generator used for every stochastic step.
pub type Rng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Debug, Error)]
pub enum NnError {
    #[error("bad IDX magic number: expected {expected:#010x}, found {found:#010x}")]
    BadMagic { expected: u32, found: u32 },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("truncated IDX file: expected {expected} bytes, found {found}")]
    TruncatedFile { expected: usize, found: usize },
    #[error("need at least 2 samples per class, got {0}")]
    TooFewSamples(usize),
    #[error("invalid dataset: {0}")]
    InvalidDataset(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("non-finite loss at epoch {epoch}")]
    NonFiniteLoss { epoch: usize },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
