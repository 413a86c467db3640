//! Small multilayer perceptron trained by mini-batch gradient descent on a
//! pluggable loss. Two rectified hidden layers, linear output, seeded
//! initialization; everything is deterministic for a fixed seed.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::loss::{loss_gradient, LossSpec};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MlpParams {
    pub hidden: [usize; 2],
    pub epochs: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub seed: u64,
}

impl Default for MlpParams {
    fn default() -> Self {
        MlpParams { hidden: [32, 32], epochs: 200, batch_size: 16, learning_rate: 1e-3, seed: 0 }
    }
}

/// One dense layer: `weights[out][in]` plus a bias per output unit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Layer {
    pub weights: Vec<Vec<f64>>,
    pub biases: Vec<f64>,
}

impl Layer {
    fn forward(&self, input: &[f64], relu: bool) -> Vec<f64> {
        self.weights
            .iter()
            .zip(&self.biases)
            .map(|(row, b)| {
                let z = b + row.iter().zip(input).map(|(w, x)| w * x).sum::<f64>();
                if relu {
                    z.max(0.0)
                } else {
                    z
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MlpModel {
    pub layers: Vec<Layer>,
    pub params: MlpParams,
}

impl MlpModel {
    pub fn predict(&self, x: &[f64]) -> f64 {
        let last = self.layers.len() - 1;
        let mut act = x.to_vec();
        for (i, layer) in self.layers.iter().enumerate() {
            act = layer.forward(&act, i < last);
        }
        act[0]
    }

    /// Layer input/output dimensions chain: in -> hidden -> hidden -> 1.
    pub fn dims_consistent(&self, input_dim: usize) -> bool {
        let mut prev = input_dim;
        for layer in &self.layers {
            if layer.weights.iter().any(|row| row.len() != prev) {
                return false;
            }
            if layer.weights.len() != layer.biases.len() {
                return false;
            }
            prev = layer.weights.len();
        }
        prev == 1
    }
}

fn init_layer(rng: &mut ChaCha8Rng, fan_in: usize, fan_out: usize) -> Layer {
    let scale = (2.0 / fan_in as f64).sqrt();
    Layer {
        weights: (0..fan_out)
            .map(|_| (0..fan_in).map(|_| rng.gen_range(-scale..scale)).collect())
            .collect(),
        biases: vec![0.0; fan_out],
    }
}

struct Gradients {
    weights: Vec<Vec<Vec<f64>>>,
    biases: Vec<Vec<f64>>,
}

/// Forward pass keeping pre-activations, then backpropagation of dL/dy.
/// Returns per-layer gradients for one sample.
fn backprop(model: &MlpModel, x: &[f64], y: f64, spec: &LossSpec) -> Gradients {
    let last = model.layers.len() - 1;
    let mut activations = vec![x.to_vec()];
    let mut pre: Vec<Vec<f64>> = Vec::new();
    for (i, layer) in model.layers.iter().enumerate() {
        let input = activations.last().unwrap();
        let z: Vec<f64> = layer
            .weights
            .iter()
            .zip(&layer.biases)
            .map(|(row, b)| b + row.iter().zip(input).map(|(w, v)| w * v).sum::<f64>())
            .collect();
        let a: Vec<f64> =
            if i < last { z.iter().map(|v| v.max(0.0)).collect() } else { z.clone() };
        pre.push(z);
        activations.push(a);
    }
    let prediction = activations.last().unwrap()[0];
    let mut delta = vec![loss_gradient(prediction - y, spec)];

    let mut weight_grads = vec![Vec::new(); model.layers.len()];
    let mut bias_grads = vec![Vec::new(); model.layers.len()];
    for i in (0..model.layers.len()).rev() {
        let input = &activations[i];
        weight_grads[i] =
            delta.iter().map(|d| input.iter().map(|v| d * v).collect()).collect();
        bias_grads[i] = delta.clone();
        if i > 0 {
            let layer = &model.layers[i];
            delta = (0..input.len())
                .map(|j| {
                    let upstream: f64 =
                        delta.iter().zip(&layer.weights).map(|(d, row)| d * row[j]).sum();
                    if pre[i - 1][j] > 0.0 {
                        upstream
                    } else {
                        0.0
                    }
                })
                .collect();
        }
    }
    Gradients { weights: weight_grads, biases: bias_grads }
}

pub fn fit_mlp(xs: &[Vec<f64>], ys: &[f64], spec: &LossSpec, params: &MlpParams) -> MlpModel {
    let input_dim = xs[0].len();
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let dims = [input_dim, params.hidden[0], params.hidden[1], 1];
    let layers = dims.windows(2).map(|w| init_layer(&mut rng, w[0], w[1])).collect();
    let mut model = MlpModel { layers, params: *params };

    let n = xs.len();
    let mut order: Vec<usize> = (0..n).collect();
    for _ in 0..params.epochs {
        for i in (1..n).rev() {
            order.swap(i, rng.gen_range(0..=i));
        }
        for batch in order.chunks(params.batch_size) {
            let mut acc: Option<Gradients> = None;
            for &i in batch {
                let g = backprop(&model, &xs[i], ys[i], spec);
                acc = Some(match acc {
                    None => g,
                    Some(mut a) => {
                        for l in 0..a.weights.len() {
                            for (row_a, row_g) in a.weights[l].iter_mut().zip(&g.weights[l]) {
                                for (wa, wg) in row_a.iter_mut().zip(row_g) {
                                    *wa += wg;
                                }
                            }
                            for (ba, bg) in a.biases[l].iter_mut().zip(&g.biases[l]) {
                                *ba += bg;
                            }
                        }
                        a
                    }
                });
            }
            let acc = acc.unwrap();
            let step = params.learning_rate / batch.len() as f64;
            for (l, layer) in model.layers.iter_mut().enumerate() {
                for (row, grow) in layer.weights.iter_mut().zip(&acc.weights[l]) {
                    for (w, g) in row.iter_mut().zip(grow) {
                        *w -= step * g;
                    }
                }
                for (b, g) in layer.biases.iter_mut().zip(&acc.biases[l]) {
                    *b -= step * g;
                }
            }
        }
    }
    model
}

#[cfg(test)]
mod tests {
    use super::*;
    use super::super::loss::loss;

    #[test]
    fn dims_chain() {
        let xs = vec![vec![0.0, 1.0], vec![1.0, 0.0], vec![1.0, 1.0]];
        let ys = vec![1.0, 1.0, 2.0];
        let params = MlpParams { hidden: [4, 4], epochs: 5, ..Default::default() };
        let model = fit_mlp(&xs, &ys, &LossSpec::SquaredError, &params);
        assert!(model.dims_consistent(2));
    }

    #[test]
    fn learns_linear_target() {
        let xs: Vec<Vec<f64>> = (0..40).map(|i| vec![i as f64 / 40.0]).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 2.0 * x[0] - 0.5).collect();
        let params = MlpParams { epochs: 800, learning_rate: 1e-2, seed: 1, ..Default::default() };
        let model = fit_mlp(&xs, &ys, &LossSpec::SquaredError, &params);
        let mse: f64 = xs
            .iter()
            .zip(&ys)
            .map(|(x, &y)| (model.predict(x) - y).powi(2))
            .sum::<f64>()
            / ys.len() as f64;
        assert!(mse < 0.02, "mse {mse}");
    }

    #[test]
    fn backprop_matches_finite_differences() {
        // layer-wise check on a 3-sample batch
        let xs = vec![vec![0.3, -0.7], vec![-0.2, 0.4], vec![0.9, 0.1]];
        let ys = vec![0.5, -0.3, 1.2];
        let spec = LossSpec::ShiftedSquaredError { a: -0.8 };
        let params = MlpParams { hidden: [3, 3], epochs: 0, seed: 9, ..Default::default() };
        let mut model = fit_mlp(&xs, &ys, &spec, &params);

        let total = |m: &MlpModel| -> f64 {
            xs.iter().zip(&ys).map(|(x, &y)| loss(m.predict(x) - y, &spec)).sum()
        };
        let mut analytic: Vec<Gradients> = Vec::new();
        for (x, &y) in xs.iter().zip(&ys) {
            analytic.push(backprop(&model, x, y, &spec));
        }
        let h = 1e-6;
        for l in 0..model.layers.len() {
            for r in 0..model.layers[l].weights.len() {
                for c in 0..model.layers[l].weights[r].len() {
                    let orig = model.layers[l].weights[r][c];
                    model.layers[l].weights[r][c] = orig + h;
                    let up = total(&model);
                    model.layers[l].weights[r][c] = orig - h;
                    let down = total(&model);
                    model.layers[l].weights[r][c] = orig;
                    let fd = (up - down) / (2.0 * h);
                    let an: f64 = analytic.iter().map(|g| g.weights[l][r][c]).sum();
                    assert!((fd - an).abs() < 1e-5, "layer {l} w[{r}][{c}]: fd {fd} an {an}");
                }
            }
        }
    }
}
