//! Fully-connected network with softmax cross-entropy loss and exact
//! backpropagation.
//!
//! Parameters flatten into a single vector layer by layer: for each layer
//! `l` the weight matrix `W_l` (row-major, `out x in`) is followed by that
//! layer's bias vector `b_l`. Hidden layers apply the configured activation;
//! the output layer is linear and feeds a softmax.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{Dataset, Problem};
use crate::error::{Error, Result};

/// Hidden-layer nonlinearity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Activation {
    Tanh,
    Relu,
}

#[derive(Clone)]
struct Arch {
    layers: Vec<usize>,
    activation: Activation,
}

impl Arch {
    fn param_count(&self) -> usize {
        self.layers
            .windows(2)
            .map(|w| w[0] * w[1] + w[1])
            .sum()
    }

    /// Offset of `W_l` within the flat parameter vector.
    fn weight_offset(&self, layer: usize) -> usize {
        self.layers
            .windows(2)
            .take(layer)
            .map(|w| w[0] * w[1] + w[1])
            .sum()
    }

    fn forward(&self, theta: &[f64], x: &[f64]) -> ForwardPass {
        let n_layers = self.layers.len() - 1;
        let mut activations = Vec::with_capacity(n_layers + 1);
        let mut preacts = Vec::with_capacity(n_layers);
        activations.push(x.to_vec());
        for l in 0..n_layers {
            let (fan_in, fan_out) = (self.layers[l], self.layers[l + 1]);
            let off = self.weight_offset(l);
            let weights = &theta[off..off + fan_out * fan_in];
            let biases = &theta[off + fan_out * fan_in..off + fan_out * fan_in + fan_out];
            let input = activations.last().unwrap().clone();
            let mut z = vec![0.0; fan_out];
            for (o, zo) in z.iter_mut().enumerate() {
                let row = &weights[o * fan_in..(o + 1) * fan_in];
                *zo = row.iter().zip(&input).map(|(w, a)| w * a).sum::<f64>() + biases[o];
            }
            let a = if l + 1 == n_layers {
                z.clone() // linear output layer
            } else {
                match self.activation {
                    Activation::Tanh => z.iter().map(|v| v.tanh()).collect(),
                    Activation::Relu => z.iter().map(|v| v.max(0.0)).collect(),
                }
            };
            preacts.push(z);
            activations.push(a);
        }
        ForwardPass {
            activations,
            preacts,
        }
    }
}

struct ForwardPass {
    /// `activations[0]` is the input; `activations.last()` the logits.
    activations: Vec<Vec<f64>>,
    preacts: Vec<Vec<f64>>,
}

/// Cross-entropy of one sample given logits, with the softmax probabilities.
fn softmax_ce(logits: &[f64], label: usize) -> (f64, Vec<f64>) {
    let max = logits.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b));
    let exps: Vec<f64> = logits.iter().map(|z| (z - max).exp()).collect();
    let sum: f64 = exps.iter().sum();
    let probs: Vec<f64> = exps.iter().map(|e| e / sum).collect();
    let loss = sum.ln() + max - logits[label];
    (loss, probs)
}

/// Multilayer perceptron classifier on `data`.
///
/// `layer_sizes` lists every layer including input and output, so it needs at
/// least three entries (one hidden layer). The first entry must match the
/// data's feature count and the last the number of classes. `seed` fixes the
/// uniform Glorot initialization behind [`Problem::init_point`].
pub fn make_mlp(
    layer_sizes: &[usize],
    activation: Activation,
    data: &Dataset,
    seed: u64,
) -> Result<Problem> {
    if layer_sizes.len() < 3 {
        return Err(Error::domain("mlp requires at least one hidden layer"));
    }
    if layer_sizes.contains(&0) {
        return Err(Error::domain("mlp layer sizes must be positive"));
    }
    if layer_sizes[0] != data.d {
        return Err(Error::DimensionMismatch {
            expected: data.d,
            got: layer_sizes[0],
        });
    }
    let num_classes = data.num_classes().max(2);
    if data
        .labels
        .iter()
        .any(|&y| y < 0.0 || y.fract() != 0.0 || y as usize >= num_classes)
    {
        return Err(Error::domain("mlp requires integer class labels"));
    }
    if *layer_sizes.last().unwrap() != num_classes {
        return Err(Error::DimensionMismatch {
            expected: num_classes,
            got: *layer_sizes.last().unwrap(),
        });
    }

    let arch = Arch {
        layers: layer_sizes.to_vec(),
        activation,
    };
    let dim = arch.param_count();
    let ds = Arc::new(data.clone());

    let batch_eval = {
        let arch = arch.clone();
        let ds = Arc::clone(&ds);
        move |theta: &[f64], idx: &[usize]| -> Result<f64> {
            if idx.is_empty() {
                return Err(Error::domain("empty batch"));
            }
            let mut total = 0.0;
            for &i in idx {
                let pass = arch.forward(theta, ds.row(i));
                let (loss, _) = softmax_ce(pass.activations.last().unwrap(), ds.labels[i] as usize);
                total += loss;
            }
            Ok(total / idx.len() as f64)
        }
    };

    let batch_grad = {
        let arch = arch.clone();
        let ds = Arc::clone(&ds);
        move |theta: &[f64], idx: &[usize]| -> Result<Vec<f64>> {
            if idx.is_empty() {
                return Err(Error::domain("empty batch"));
            }
            let n_layers = arch.layers.len() - 1;
            let mut grad = vec![0.0; theta.len()];
            for &i in idx {
                let pass = arch.forward(theta, ds.row(i));
                let (_, probs) = softmax_ce(pass.activations.last().unwrap(), ds.labels[i] as usize);
                let mut delta: Vec<f64> = probs;
                delta[ds.labels[i] as usize] -= 1.0;
                for l in (0..n_layers).rev() {
                    let (fan_in, fan_out) = (arch.layers[l], arch.layers[l + 1]);
                    let off = arch.weight_offset(l);
                    let input = &pass.activations[l];
                    for o in 0..fan_out {
                        for j in 0..fan_in {
                            grad[off + o * fan_in + j] += delta[o] * input[j];
                        }
                        grad[off + fan_out * fan_in + o] += delta[o];
                    }
                    if l > 0 {
                        let weights = &theta[off..off + fan_out * fan_in];
                        let mut prev = vec![0.0; fan_in];
                        for (j, pj) in prev.iter_mut().enumerate() {
                            *pj = (0..fan_out)
                                .map(|o| weights[o * fan_in + j] * delta[o])
                                .sum();
                        }
                        let z = &pass.preacts[l - 1];
                        for (pj, zj) in prev.iter_mut().zip(z) {
                            *pj *= match arch.activation {
                                Activation::Tanh => {
                                    let a = zj.tanh();
                                    1.0 - a * a
                                }
                                Activation::Relu => {
                                    if *zj > 0.0 {
                                        1.0
                                    } else {
                                        0.0
                                    }
                                }
                            };
                        }
                        delta = prev;
                    }
                }
            }
            let inv = 1.0 / idx.len() as f64;
            for g in &mut grad {
                *g *= inv;
            }
            Ok(grad)
        }
    };

    // Nearest relu kink over all samples and hidden units.
    let kink_margin_fn = match activation {
        Activation::Relu => {
            let arch = arch.clone();
            let ds = Arc::clone(&ds);
            let f: super::MarginFn = Arc::new(move |theta: &[f64]| {
                let n_hidden = arch.layers.len() - 2;
                let mut margin = f64::INFINITY;
                for i in 0..ds.n {
                    let pass = arch.forward(theta, ds.row(i));
                    for z in pass.preacts.iter().take(n_hidden) {
                        for value in z {
                            margin = margin.min(value.abs());
                        }
                    }
                }
                margin
            });
            Some(f)
        }
        Activation::Tanh => None,
    };

    // uniform Glorot initialization, biases zero
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut init_point = vec![0.0; dim];
    for l in 0..arch.layers.len() - 1 {
        let (fan_in, fan_out) = (arch.layers[l], arch.layers[l + 1]);
        let off = arch.weight_offset(l);
        let scale = (6.0 / (fan_in + fan_out) as f64).sqrt();
        for w in &mut init_point[off..off + fan_out * fan_in] {
            *w = rng.gen_range(-scale..scale);
        }
    }

    let be = batch_eval.clone();
    let bg = batch_grad.clone();
    let all: Vec<usize> = (0..data.n).collect();
    let all2 = all.clone();
    Ok(Problem {
        name: "mlp".into(),
        dim,
        eval_fn: Arc::new(move |theta| be(theta, &all)),
        grad_fn: Arc::new(move |theta| bg(theta, &all2)),
        batch_eval_fn: Some(Arc::new(batch_eval)),
        batch_grad_fn: Some(Arc::new(batch_grad)),
        kink_margin_fn,
        optimum_value: None,
        optimum_point: None,
        lipschitz_l: None,
        scale_invariant: false,
        n_samples: Some(data.n),
        init_point,
    })
}

/// Fraction of rows whose argmax logit matches the label.
pub fn mlp_accuracy(problem_theta: &[f64], layer_sizes: &[usize], activation: Activation, data: &Dataset) -> f64 {
    let arch = Arch {
        layers: layer_sizes.to_vec(),
        activation,
    };
    let mut correct = 0usize;
    for i in 0..data.n {
        let pass = arch.forward(problem_theta, data.row(i));
        let logits = pass.activations.last().unwrap();
        let pred = logits
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
            .map(|(k, _)| k)
            .unwrap();
        if pred == data.labels[i] as usize {
            correct += 1;
        }
    }
    correct as f64 / data.n as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::{make_synthetic_data, DataKind};

    fn moons() -> Dataset {
        make_synthetic_data(DataKind::TwoMoons, 40, 2, 0.05, 3).unwrap()
    }

    #[test]
    fn zero_parameters_give_uniform_softmax() {
        let ds = moons();
        let p = make_mlp(&[2, 5, 2], Activation::Tanh, &ds, 0).unwrap();
        let loss = p.eval(&vec![0.0; p.dim()]).unwrap();
        assert!((loss - (2.0f64).ln()).abs() < 1e-15);

        let blobs = make_synthetic_data(DataKind::MulticlassBlobs, 30, 2, 0.1, 1).unwrap();
        let p3 = make_mlp(&[2, 4, 3], Activation::Tanh, &blobs, 0).unwrap();
        let loss3 = p3.eval(&vec![0.0; p3.dim()]).unwrap();
        assert!((loss3 - (3.0f64).ln()).abs() < 1e-15);
    }

    #[test]
    fn hidden_unit_permutation_preserves_loss() {
        let ds = moons();
        let layers = [2usize, 4, 2];
        let p = make_mlp(&layers, Activation::Tanh, &ds, 7).unwrap();
        let theta = p.init_point().to_vec();

        // swap hidden units 0 and 1: rows of W0, entries of b0, columns of W1
        let mut permuted = theta.clone();
        let (fan_in, hidden) = (2usize, 4usize);
        for j in 0..fan_in {
            permuted.swap(j, fan_in + j);
        }
        permuted.swap(hidden * fan_in, hidden * fan_in + 1);
        let w1_off = hidden * fan_in + hidden;
        for o in 0..2 {
            permuted.swap(w1_off + o * hidden, w1_off + o * hidden + 1);
        }
        let a = p.eval(&theta).unwrap();
        let b = p.eval(&permuted).unwrap();
        assert!((a - b).abs() <= 1e-12 * a.abs());
    }

    #[test]
    fn validates_shapes_and_labels() {
        let ds = moons();
        assert!(make_mlp(&[2, 2], Activation::Tanh, &ds, 0).is_err()); // no hidden layer
        assert!(make_mlp(&[3, 4, 2], Activation::Tanh, &ds, 0).is_err()); // input mismatch
        assert!(make_mlp(&[2, 4, 3], Activation::Tanh, &ds, 0).is_err()); // class mismatch
        assert!(make_mlp(&[2, 4, 2], Activation::Tanh, &ds, 0).is_ok());
    }

    #[test]
    fn param_count_and_layout() {
        let ds = moons();
        let p = make_mlp(&[2, 4, 2], Activation::Tanh, &ds, 0).unwrap();
        // W0: 4x2 = 8, b0: 4, W1: 2x4 = 8, b1: 2
        assert_eq!(p.dim(), 22);
        // biases start zeroed
        let theta = p.init_point();
        for i in 8..12 {
            assert_eq!(theta[i], 0.0);
        }
        for i in 20..22 {
            assert_eq!(theta[i], 0.0);
        }
    }

    #[test]
    fn relu_kink_margin_reports_nearest_preactivation() {
        let ds = moons();
        let p = make_mlp(&[2, 3, 2], Activation::Relu, &ds, 5).unwrap();
        let margin = p.kink_margin(p.init_point()).unwrap();
        assert!(margin >= 0.0 && margin.is_finite());
        let tanh = make_mlp(&[2, 3, 2], Activation::Tanh, &ds, 5).unwrap();
        assert!(tanh.kink_margin(tanh.init_point()).is_none());
    }

    #[test]
    fn init_is_seed_deterministic() {
        let ds = moons();
        let a = make_mlp(&[2, 4, 2], Activation::Tanh, &ds, 9).unwrap();
        let b = make_mlp(&[2, 4, 2], Activation::Tanh, &ds, 9).unwrap();
        assert_eq!(a.init_point(), b.init_point());
        let c = make_mlp(&[2, 4, 2], Activation::Tanh, &ds, 10).unwrap();
        assert_ne!(a.init_point(), c.init_point());
    }
}
