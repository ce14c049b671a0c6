//! Negative-bias recovery and Gaussian-noise robustness.

use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::model::{init_model, MlpModel};
use super::train::{accuracy, train, EpochMetrics, TrainConfig};
use super::{rng_from_seed, synth_blobs, BlobConfig, Dataset, NnError};
use crate::activations::ActivationId;

/// Recovery is declared at the first epoch whose validation accuracy
/// exceeds this multiple of chance.
pub const RECOVERY_CHANCE_MULTIPLE: f64 = 2.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecoverySetup {
    pub hidden: Vec<usize>,
    pub train: TrainConfig,
    pub blobs: BlobConfig,
    pub val_fraction: f64,
    /// Standardize features with training-split statistics before scaling.
    pub standardize: bool,
    /// Multiplier applied to every feature after standardization.
    pub input_scale: f64,
}

impl RecoverySetup {
    /// Desk-scale recipe: two hidden layers of 64, every bias at -10.
    /// Inputs are standardized and scaled by 8 so that some first-layer
    /// pre-activations reach the non-saturated side of the units.
    pub fn desk(seed: u64) -> Self {
        RecoverySetup {
            hidden: vec![64, 64],
            train: TrainConfig {
                seed,
                learning_rate: 0.005,
                momentum: 0.9,
                weight_decay: 0.0005,
                batch_size: 32,
                epochs: 60,
                bias_init: -10.0,
                ..TrainConfig::default()
            },
            blobs: BlobConfig::default(),
            val_fraction: 0.2,
            standardize: true,
            input_scale: 8.0,
        }
    }

    /// Blobs drawn from the training seed, split per class, then prepared.
    pub fn datasets(&self) -> Result<(Dataset, Dataset), NnError> {
        let data = synth_blobs(self.train.seed, self.blobs)?;
        let (train, val) = data.split_stratified(self.val_fraction, self.train.seed)?;
        self.prepare(train, val)
    }

    /// Applies the standardization and scaling of this setup. Statistics
    /// always come from `train`.
    pub fn prepare(&self, train: Dataset, val: Dataset) -> Result<(Dataset, Dataset), NnError> {
        if !(self.input_scale.is_finite() && self.input_scale > 0.0) {
            return Err(NnError::InvalidConfig(format!("input scale {}", self.input_scale)));
        }
        let (train, val) = if self.standardize {
            let stats = train.stats().clone();
            (train.standardized(&stats), val.standardized(&stats))
        } else {
            (train, val)
        };
        if self.input_scale == 1.0 {
            return Ok((train, val));
        }
        let scale = |d: &Dataset| d.with_features(d.features().iter().map(|v| v * self.input_scale).collect());
        Ok((scale(&train)?, scale(&val)?))
    }

    pub fn widths(&self, data: &Dataset) -> Vec<usize> {
        let mut w = Vec::with_capacity(self.hidden.len() + 2);
        w.push(data.n_features());
        w.extend_from_slice(&self.hidden);
        w.push(data.n_classes());
        w
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecoveryOutcome {
    pub id: ActivationId,
    /// `None` means the run never recovered.
    pub first_recovery_epoch: Option<usize>,
    pub final_val_accuracy: f64,
    /// Validation accuracy that counts as recovered.
    pub threshold: f64,
    pub non_finite_loss: Option<usize>,
    pub metrics: Vec<EpochMetrics>,
}

/// Trains one model per activation from the same seeded initialisation.
/// Runs are independent and execute in parallel; each is single-threaded,
/// so results do not depend on scheduling. A run whose loss turns
/// non-finite is reported through its outcome and does not stop the others.
pub fn recovery_experiment(
    ids: &[ActivationId],
    setup: &RecoverySetup,
    train_set: &Dataset,
    val_set: &Dataset,
) -> Result<Vec<RecoveryOutcome>, NnError> {
    setup.train.validate()?;
    let widths = setup.widths(train_set);
    let threshold = RECOVERY_CHANCE_MULTIPLE / train_set.n_classes() as f64;
    ids.par_iter()
        .map(|&id| {
            let mut model = init_model(
                &widths,
                id,
                setup.train.weight_init,
                setup.train.bias_init,
                setup.train.seed,
            )?;
            let outcome = train(&mut model, train_set, val_set, &setup.train)?;
            let first_recovery_epoch = outcome
                .metrics
                .iter()
                .find(|m| m.val_accuracy > threshold)
                .map(|m| m.epoch);
            Ok(RecoveryOutcome {
                id,
                first_recovery_epoch,
                final_val_accuracy: outcome.metrics.last().map_or(0.0, |m| m.val_accuracy),
                threshold,
                non_finite_loss: outcome.non_finite_loss,
                metrics: outcome.metrics,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoisePoint {
    pub sigma: f64,
    pub accuracy: f64,
}

/// Accuracy on `data` with i.i.d. `N(0, sigma^2)` added to every feature.
/// One standard-normal draw per feature is shared by all `sigma`s, so the
/// curve reflects the noise scale rather than resampling.
pub fn evaluate_with_noise(
    model: &MlpModel,
    data: &Dataset,
    sigmas: &[f64],
    seed: u64,
) -> Result<Vec<NoisePoint>, NnError> {
    if let Some(bad) = sigmas.iter().find(|s| !(**s >= 0.0 && s.is_finite())) {
        return Err(NnError::InvalidConfig(format!("noise sigma {bad}")));
    }
    let mut rng = rng_from_seed(seed);
    let noise: Vec<f64> = (0..data.features().len())
        .map(|_| StandardNormal.sample(&mut rng))
        .collect();
    sigmas
        .iter()
        .map(|&sigma| {
            let acc = if sigma == 0.0 {
                accuracy(model, data)
            } else {
                let noisy = data.features().iter().zip(&noise).map(|(x, z)| x + sigma * z).collect();
                accuracy(model, &data.with_features(noisy)?)
            };
            Ok(NoisePoint { sigma, accuracy: acc })
        })
        .collect()
}
