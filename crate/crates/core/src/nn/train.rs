//! Mini-batch SGD with classical momentum and coupled L2 weight decay.

use std::fmt::Write as _;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::model::{Gradients, MlpModel, WeightInit};
use super::{rng_from_seed, Dataset, NnError};
use crate::format::sig6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub seed: u64,
    pub learning_rate: f64,
    pub momentum: f64,
    pub weight_decay: f64,
    pub batch_size: usize,
    pub epochs: usize,
    pub bias_init: f64,
    pub weight_init: WeightInit,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            seed: 1,
            learning_rate: 0.005,
            momentum: 0.9,
            weight_decay: 0.0005,
            batch_size: 32,
            epochs: 60,
            bias_init: 0.0,
            weight_init: WeightInit::XavierUniform,
        }
    }
}

impl TrainConfig {
    /// Zero learning rate is accepted and leaves the model unchanged.
    pub fn validate(&self) -> Result<(), NnError> {
        let bad = |msg: String| Err(NnError::InvalidConfig(msg));
        if !(self.learning_rate >= 0.0 && self.learning_rate.is_finite()) {
            return bad(format!("learning rate {}", self.learning_rate));
        }
        if !(0.0..1.0).contains(&self.momentum) {
            return bad(format!("momentum {} outside [0, 1)", self.momentum));
        }
        if !(self.weight_decay >= 0.0 && self.weight_decay.is_finite()) {
            return bad(format!("weight decay {}", self.weight_decay));
        }
        if self.batch_size == 0 {
            return bad("batch size 0".into());
        }
        if !self.bias_init.is_finite() {
            return bad(format!("bias init {}", self.bias_init));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpochMetrics {
    /// 1-based.
    pub epoch: usize,
    /// Mean of the per-batch losses.
    pub train_loss: f64,
    /// Fraction of training samples classified correctly during the epoch,
    /// before each batch's update.
    pub train_accuracy: f64,
    pub val_accuracy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainOutcome {
    pub metrics: Vec<EpochMetrics>,
    /// Epoch whose loss became non-finite; training stopped there and that
    /// epoch has no metrics row.
    pub non_finite_loss: Option<usize>,
}

impl TrainOutcome {
    pub fn halted(&self) -> bool {
        self.non_finite_loss.is_some()
    }

    pub fn into_result(self) -> Result<Vec<EpochMetrics>, NnError> {
        match self.non_finite_loss {
            Some(epoch) => Err(NnError::NonFiniteLoss { epoch }),
            None => Ok(self.metrics),
        }
    }
}

/// Fraction of `data` classified correctly.
pub fn accuracy(model: &MlpModel, data: &Dataset) -> f64 {
    if data.n_samples() == 0 {
        return 0.0;
    }
    let correct = model
        .predict(data.features())
        .iter()
        .zip(data.labels())
        .filter(|(p, y)| p == y)
        .count();
    correct as f64 / data.n_samples() as f64
}

fn check_shapes(model: &MlpModel, data: &Dataset, what: &str) -> Result<(), NnError> {
    if data.n_features() != model.n_inputs() || data.n_classes() > model.n_outputs() {
        return Err(NnError::DimensionMismatch(format!(
            "{what} set has {} features and {} classes; model maps {} -> {}",
            data.n_features(),
            data.n_classes(),
            model.n_inputs(),
            model.n_outputs()
        )));
    }
    Ok(())
}

/// Trains `model` in place. Single-threaded; bitwise reproducible for a
/// fixed `cfg.seed`. The sample order is reshuffled every epoch.
pub fn train(model: &mut MlpModel, data: &Dataset, val: &Dataset, cfg: &TrainConfig) -> Result<TrainOutcome, NnError> {
    cfg.validate()?;
    check_shapes(model, data, "training")?;
    check_shapes(model, val, "validation")?;
    if data.n_samples() == 0 {
        return Err(NnError::InvalidDataset("empty training set".into()));
    }

    let mut rng = rng_from_seed(cfg.seed);
    let mut grads = Gradients::zeros_like(model);
    let mut velocity = Gradients::zeros_like(model);
    let mut order: Vec<usize> = (0..data.n_samples()).collect();
    let width = data.n_features();
    let mut batch_x = Vec::with_capacity(cfg.batch_size * width);
    let mut batch_y = Vec::with_capacity(cfg.batch_size);
    let mut metrics = Vec::with_capacity(cfg.epochs);

    for epoch in 1..=cfg.epochs {
        order.shuffle(&mut rng);
        let (mut loss_sum, mut batches, mut correct) = (0.0, 0usize, 0usize);
        for chunk in order.chunks(cfg.batch_size) {
            batch_x.clear();
            batch_y.clear();
            for &i in chunk {
                batch_x.extend_from_slice(data.row(i));
                batch_y.push(data.labels()[i]);
            }
            let stats = model.loss_and_gradients(&batch_x, &batch_y, &mut grads);
            if !stats.loss.is_finite() {
                return Ok(TrainOutcome {
                    metrics,
                    non_finite_loss: Some(epoch),
                });
            }
            loss_sum += stats.loss;
            batches += 1;
            correct += stats.correct;
            sgd_step(model, &grads, &mut velocity, cfg);
        }
        metrics.push(EpochMetrics {
            epoch,
            train_loss: loss_sum / batches as f64,
            train_accuracy: correct as f64 / data.n_samples() as f64,
            val_accuracy: accuracy(model, val),
        });
    }
    Ok(TrainOutcome {
        metrics,
        non_finite_loss: None,
    })
}

/// `g += wd * w` (weights only), `v = mu * v + g`, `theta -= lr * v`.
fn sgd_step(model: &mut MlpModel, grads: &Gradients, velocity: &mut Gradients, cfg: &TrainConfig) {
    let (lr, mu, wd) = (cfg.learning_rate, cfg.momentum, cfg.weight_decay);
    for ((layer, g), v) in model.layers.iter_mut().zip(&grads.layers).zip(&mut velocity.layers) {
        for ((w, &gw), vw) in layer.weights.iter_mut().zip(&g.weights).zip(&mut v.weights) {
            *vw = mu * *vw + gw + wd * *w;
            *w -= lr * *vw;
        }
        for ((b, &gb), vb) in layer.biases.iter_mut().zip(&g.biases).zip(&mut v.biases) {
            *vb = mu * *vb + gb;
            *b -= lr * *vb;
        }
    }
}

/// `epoch,train_loss,train_acc,val_acc`, six significant digits.
pub fn export_metrics_csv(metrics: &[EpochMetrics]) -> String {
    let mut out = String::from("epoch,train_loss,train_acc,val_acc\n");
    for m in metrics {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            m.epoch,
            sig6(m.train_loss),
            sig6(m.train_accuracy),
            sig6(m.val_accuracy)
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::activations::ActivationId;
    use crate::nn::{init_model, synth_blobs, BlobConfig};

    fn small_blobs() -> Dataset {
        synth_blobs(
            4,
            BlobConfig {
                n_classes: 3,
                dim: 5,
                per_class: 20,
                spread: 0.3,
            },
        )
        .unwrap()
    }

    #[test]
    fn zero_learning_rate_is_a_no_op() {
        let data = small_blobs();
        let mut m = init_model(&[5, 8, 3], ActivationId::TeLU, WeightInit::XavierUniform, 0.0, 1).unwrap();
        let before = m.clone();
        let cfg = TrainConfig {
            learning_rate: 0.0,
            epochs: 5,
            ..TrainConfig::default()
        };
        let out = train(&mut m, &data, &data, &cfg).unwrap();
        assert_eq!(out.metrics.len(), 5);
        assert_eq!(m, before);
    }

    #[test]
    fn non_finite_loss_halts_with_a_flag() {
        let data = small_blobs();
        let mut m = init_model(&[5, 8, 3], ActivationId::TeLU, WeightInit::HeUniform, 0.0, 1).unwrap();
        let cfg = TrainConfig {
            learning_rate: 1e300,
            momentum: 0.0,
            weight_decay: 0.0,
            epochs: 50,
            ..TrainConfig::default()
        };
        let out = train(&mut m, &data, &data, &cfg).unwrap();
        let epoch = out.non_finite_loss.expect("explodes");
        assert_eq!(out.metrics.len(), epoch - 1);
        assert!(matches!(out.into_result(), Err(NnError::NonFiniteLoss { .. })));

        let mut poisoned = init_model(&[5, 8, 3], ActivationId::TeLU, WeightInit::HeUniform, 0.0, 1).unwrap();
        poisoned.layers[1].weights[0] = f64::NAN;
        let out = train(&mut poisoned, &data, &data, &TrainConfig::default()).unwrap();
        assert_eq!(out.non_finite_loss, Some(1));
        assert!(out.metrics.is_empty());
    }

    #[test]
    fn rejects_bad_configs_and_shapes() {
        let data = small_blobs();
        let mut m = init_model(&[5, 8, 3], ActivationId::TeLU, WeightInit::XavierUniform, 0.0, 1).unwrap();
        for cfg in [
            TrainConfig {
                batch_size: 0,
                ..TrainConfig::default()
            },
            TrainConfig {
                momentum: 1.0,
                ..TrainConfig::default()
            },
            TrainConfig {
                learning_rate: -1.0,
                ..TrainConfig::default()
            },
        ] {
            assert!(matches!(
                train(&mut m, &data, &data, &cfg),
                Err(NnError::InvalidConfig(_))
            ));
        }
        let mut wrong = init_model(&[4, 8, 3], ActivationId::TeLU, WeightInit::XavierUniform, 0.0, 1).unwrap();
        assert!(matches!(
            train(&mut wrong, &data, &data, &TrainConfig::default()),
            Err(NnError::DimensionMismatch(_))
        ));
    }

    #[test]
    fn metrics_csv_layout() {
        let csv = export_metrics_csv(&[EpochMetrics {
            epoch: 1,
            train_loss: std::f64::consts::LN_10,
            train_accuracy: 0.1,
            val_accuracy: 0.125,
        }]);
        assert_eq!(csv, "epoch,train_loss,train_acc,val_acc\n1,2.30259,0.1,0.125\n");
    }
}
