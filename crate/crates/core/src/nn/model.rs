//! Dense network with a linear output layer and softmax cross-entropy.

use rand::Rng as _;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::{rng_from_seed, NnError};
use crate::activations::{self, ActivationId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightInit {
    XavierUniform,
    XavierNormal,
    HeUniform,
    HeNormal,
}

/// `outputs x inputs` weights, row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DenseLayer {
    pub inputs: usize,
    pub outputs: usize,
    pub weights: Vec<f64>,
    pub biases: Vec<f64>,
}

impl DenseLayer {
    fn zeros(inputs: usize, outputs: usize) -> Self {
        DenseLayer {
            inputs,
            outputs,
            weights: vec![0.0; inputs * outputs],
            biases: vec![0.0; outputs],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MlpModel {
    pub widths: Vec<usize>,
    pub layers: Vec<DenseLayer>,
    /// Applied after every layer but the last.
    pub activation: ActivationId,
}

/// Parameter gradients, shaped like the model's layers.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    pub layers: Vec<DenseLayer>,
}

impl Gradients {
    pub fn zeros_like(model: &MlpModel) -> Self {
        Gradients {
            layers: model
                .layers
                .iter()
                .map(|l| DenseLayer::zeros(l.inputs, l.outputs))
                .collect(),
        }
    }

    fn clear(&mut self) {
        for l in &mut self.layers {
            l.weights.fill(0.0);
            l.biases.fill(0.0);
        }
    }
}

/// Draws weights per `init` and sets every bias to `bias_init`.
/// Uniform variants use `U(-a, a)` with `a = sqrt(6 / (fan_in + fan_out))`
/// (Xavier) or `sqrt(6 / fan_in)` (He); normal variants use the matching
/// standard deviation `sqrt(2 / (fan_in + fan_out))` or `sqrt(2 / fan_in)`.
pub fn init_model(
    widths: &[usize],
    activation: ActivationId,
    init: WeightInit,
    bias_init: f64,
    seed: u64,
) -> Result<MlpModel, NnError> {
    if widths.len() < 2 || widths.contains(&0) {
        return Err(NnError::InvalidConfig(format!("bad layer widths {widths:?}")));
    }
    let mut rng = rng_from_seed(seed);
    let layers = widths
        .windows(2)
        .map(|w| {
            let (fan_in, fan_out) = (w[0] as f64, w[1] as f64);
            let mut layer = DenseLayer::zeros(w[0], w[1]);
            for v in &mut layer.weights {
                *v = match init {
                    WeightInit::XavierUniform => {
                        let a = (6.0 / (fan_in + fan_out)).sqrt();
                        rng.random_range(-a..=a)
                    }
                    WeightInit::HeUniform => {
                        let a = (6.0 / fan_in).sqrt();
                        rng.random_range(-a..=a)
                    }
                    WeightInit::XavierNormal => {
                        let z: f64 = StandardNormal.sample(&mut rng);
                        z * (2.0 / (fan_in + fan_out)).sqrt()
                    }
                    WeightInit::HeNormal => {
                        let z: f64 = StandardNormal.sample(&mut rng);
                        z * (2.0 / fan_in).sqrt()
                    }
                };
            }
            layer.biases.fill(bias_init);
            layer
        })
        .collect();
    Ok(MlpModel {
        widths: widths.to_vec(),
        layers,
        activation,
    })
}

/// Summary of one forward/backward pass over a batch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BatchStats {
    /// Mean cross-entropy over the batch.
    pub loss: f64,
    pub correct: usize,
}

fn affine(layer: &DenseLayer, input: &[f64], batch: usize, out: &mut Vec<f64>) {
    out.clear();
    out.reserve(batch * layer.outputs);
    for row in input.chunks_exact(layer.inputs) {
        for (w, &b) in layer.weights.chunks_exact(layer.inputs).zip(&layer.biases) {
            out.push(b + w.iter().zip(row).map(|(a, x)| a * x).sum::<f64>());
        }
    }
}

fn argmax(row: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in row.iter().enumerate() {
        if v > row[best] {
            best = i;
        }
    }
    best
}

impl MlpModel {
    pub fn n_inputs(&self) -> usize {
        self.widths[0]
    }

    pub fn n_outputs(&self) -> usize {
        *self.widths.last().expect("at least two widths")
    }

    /// Logits for a row-major batch.
    pub fn logits(&self, input: &[f64]) -> Vec<f64> {
        let batch = input.len() / self.n_inputs();
        let mut a = input.to_vec();
        let mut z = Vec::new();
        let last = self.layers.len() - 1;
        for (l, layer) in self.layers.iter().enumerate() {
            affine(layer, &a, batch, &mut z);
            if l == last {
                return z;
            }
            a.resize(z.len(), 0.0);
            activations::values_into(self.activation, &z, &mut a);
        }
        unreachable!("model has at least one layer")
    }

    /// Predicted class per row (first maximum wins ties).
    pub fn predict(&self, input: &[f64]) -> Vec<usize> {
        self.logits(input).chunks_exact(self.n_outputs()).map(argmax).collect()
    }

    /// Mean softmax cross-entropy of a batch and its exact gradient,
    /// written into `grads` (previous contents are discarded).
    pub fn loss_and_gradients(&self, input: &[f64], labels: &[usize], grads: &mut Gradients) -> BatchStats {
        let batch = labels.len();
        assert_eq!(input.len(), batch * self.n_inputs(), "input shape");
        let n_layers = self.layers.len();

        // pre[l] / post[l]: pre-activation and output of layer l; post[0] is the input.
        let mut post: Vec<Vec<f64>> = Vec::with_capacity(n_layers + 1);
        let mut pre: Vec<Vec<f64>> = Vec::with_capacity(n_layers);
        post.push(input.to_vec());
        for (l, layer) in self.layers.iter().enumerate() {
            let mut z = Vec::new();
            affine(layer, &post[l], batch, &mut z);
            if l + 1 < n_layers {
                let mut a = vec![0.0; z.len()];
                activations::values_into(self.activation, &z, &mut a);
                post.push(a);
            }
            pre.push(z);
        }

        let k = self.n_outputs();
        let logits = &pre[n_layers - 1];
        let mut delta = vec![0.0; logits.len()];
        let mut loss = 0.0;
        let mut correct = 0;
        let inv_batch = 1.0 / batch as f64;
        for ((row, d), &y) in logits.chunks_exact(k).zip(delta.chunks_exact_mut(k)).zip(labels) {
            let m = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let lse = m + row.iter().map(|v| (v - m).exp()).sum::<f64>().ln();
            loss += lse - row[y];
            if argmax(row) == y {
                correct += 1;
            }
            for (di, &v) in d.iter_mut().zip(row) {
                *di = (v - lse).exp() * inv_batch;
            }
            d[y] -= inv_batch;
        }

        grads.clear();
        for l in (0..n_layers).rev() {
            let layer = &self.layers[l];
            let g = &mut grads.layers[l];
            let input = &post[l];
            for (a_row, d_row) in input.chunks_exact(layer.inputs).zip(delta.chunks_exact(layer.outputs)) {
                for ((gw, gb), &d) in g.weights.chunks_exact_mut(layer.inputs).zip(&mut g.biases).zip(d_row) {
                    *gb += d;
                    if d != 0.0 {
                        gw.iter_mut().zip(a_row).for_each(|(w, &a)| *w += d * a);
                    }
                }
            }
            if l == 0 {
                break;
            }
            let mut prev = vec![0.0; batch * layer.inputs];
            for (p_row, d_row) in prev
                .chunks_exact_mut(layer.inputs)
                .zip(delta.chunks_exact(layer.outputs))
            {
                for (w, &d) in layer.weights.chunks_exact(layer.inputs).zip(d_row) {
                    if d != 0.0 {
                        p_row.iter_mut().zip(w).for_each(|(p, &w)| *p += d * w);
                    }
                }
            }
            let mut slope = vec![0.0; prev.len()];
            activations::derivatives_into(self.activation, &pre[l - 1], &mut slope);
            prev.iter_mut().zip(&slope).for_each(|(p, s)| *p *= s);
            delta = prev;
        }

        BatchStats {
            loss: loss * inv_batch,
            correct,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn xavier_uniform_respects_bounds_and_bias() {
        let m = init_model(&[4, 3, 2], ActivationId::TeLU, WeightInit::XavierUniform, -10.0, 1).unwrap();
        let a = (6.0f64 / 7.0).sqrt();
        assert!(m.layers[0].weights.iter().all(|w| w.abs() <= a));
        assert!(m.layers.iter().flat_map(|l| &l.biases).all(|&b| b == -10.0));
        assert_eq!(
            m,
            init_model(&[4, 3, 2], ActivationId::TeLU, WeightInit::XavierUniform, -10.0, 1).unwrap()
        );
    }

    #[test]
    fn he_normal_has_the_right_scale() {
        let m = init_model(&[400, 300, 2], ActivationId::ReLU, WeightInit::HeNormal, 0.0, 5).unwrap();
        let w = &m.layers[0].weights;
        let var = w.iter().map(|v| v * v).sum::<f64>() / w.len() as f64;
        assert!((var / (2.0 / 400.0) - 1.0).abs() < 0.02, "{var}");
    }

    #[test]
    fn rejects_degenerate_widths() {
        assert!(init_model(&[4], ActivationId::TeLU, WeightInit::HeUniform, 0.0, 1).is_err());
        assert!(init_model(&[4, 0, 2], ActivationId::TeLU, WeightInit::HeUniform, 0.0, 1).is_err());
    }

    #[test]
    fn zero_weights_give_uniform_softmax() {
        let mut m = init_model(&[3, 5, 4], ActivationId::TeLU, WeightInit::XavierUniform, 0.0, 2).unwrap();
        m.layers.iter_mut().for_each(|l| l.weights.fill(0.0));
        let mut g = Gradients::zeros_like(&m);
        let s = m.loss_and_gradients(&[0.1, 0.2, 0.3, -1.0, 0.0, 2.0], &[0, 3], &mut g);
        assert!((s.loss - 4f64.ln()).abs() < 1e-12);
    }
}
