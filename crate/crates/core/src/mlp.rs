//! Single-hidden-layer ReLU network trained by full-batch backpropagation
//! with adaptive-moment updates. Inputs must be scaled.

use rand::Rng as _;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

const ADAM_STEP: f64 = 1e-3;
const ADAM_BETA1: f64 = 0.9;
const ADAM_BETA2: f64 = 0.999;
const ADAM_EPS: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MlpParams {
    pub hidden_size: usize,
    pub max_iter: usize,
}

/// Network parameters: hidden weights are h x d, output weights length h.
#[derive(Debug, Clone, PartialEq)]
pub struct MlpWeights {
    pub w1: Vec<Vec<f64>>,
    pub b1: Vec<f64>,
    pub w2: Vec<f64>,
    pub b2: f64,
}

impl MlpWeights {
    pub fn input_dim(&self) -> usize {
        self.w1.first().map_or(0, |r| r.len())
    }

    pub fn hidden_size(&self) -> usize {
        self.w1.len()
    }

    fn zeros_like(&self) -> MlpWeights {
        MlpWeights {
            w1: vec![vec![0.0; self.input_dim()]; self.hidden_size()],
            b1: vec![0.0; self.hidden_size()],
            w2: vec![0.0; self.hidden_size()],
            b2: 0.0,
        }
    }
}

/// Trained model; `weights` is the best-training-loss snapshot and is what
/// prediction uses, `final_weights` is the state after the last update.
#[derive(Debug, Clone)]
pub struct MlpModel {
    pub weights: MlpWeights,
    pub final_weights: MlpWeights,
    pub best_loss: f64,
}

impl MlpModel {
    pub fn predict(&self, x: &[Vec<f64>]) -> Result<Vec<f64>> {
        forward(&self.weights, x)
    }
}

/// Uniform +-sqrt(6 / (fan_in + fan_out)) weights, zero biases.
pub fn init_mlp(input_dim: usize, hidden_size: usize, seed: u64) -> MlpWeights {
    assert!(hidden_size >= 1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let bound1 = (6.0 / (input_dim + hidden_size) as f64).sqrt();
    let w1 = (0..hidden_size)
        .map(|_| (0..input_dim).map(|_| rng.random_range(-bound1..bound1)).collect())
        .collect();
    let bound2 = (6.0 / (hidden_size + 1) as f64).sqrt();
    let w2 = (0..hidden_size).map(|_| rng.random_range(-bound2..bound2)).collect();
    MlpWeights { w1, b1: vec![0.0; hidden_size], w2, b2: 0.0 }
}

/// y = w2 . relu(w1 x + b1) + b2
pub fn forward(weights: &MlpWeights, x: &[Vec<f64>]) -> Result<Vec<f64>> {
    let d = weights.input_dim();
    x.iter()
        .map(|row| {
            if row.len() != d {
                return Err(Error::DimensionMismatch { expected: d, actual: row.len() });
            }
            if row.iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFinite("mlp input"));
            }
            let mut out = weights.b2;
            for ((w_row, &b), &v) in weights.w1.iter().zip(&weights.b1).zip(&weights.w2) {
                let pre: f64 = w_row.iter().zip(row).map(|(w, xv)| w * xv).sum::<f64>() + b;
                if pre > 0.0 {
                    out += v * pre;
                }
            }
            Ok(out)
        })
        .collect()
}

/// Mean squared error and its gradients by reverse-mode chain rule.
/// The ReLU subgradient at exactly 0 is taken as 0.
pub fn loss_and_gradients(
    weights: &MlpWeights,
    x: &[Vec<f64>],
    y: &[f64],
) -> Result<(f64, MlpWeights)> {
    if x.is_empty() {
        return Err(Error::EmptyInput("mlp batch"));
    }
    if x.len() != y.len() {
        return Err(Error::LengthMismatch { expected: x.len(), actual: y.len() });
    }
    let n = x.len() as f64;
    let h = weights.hidden_size();
    let mut grads = weights.zeros_like();
    let mut loss = 0.0;
    let mut hidden = vec![0.0; h];
    for (row, &target) in x.iter().zip(y) {
        for (k, (w_row, &b)) in weights.w1.iter().zip(&weights.b1).enumerate() {
            let pre: f64 = w_row.iter().zip(row).map(|(w, xv)| w * xv).sum::<f64>() + b;
            hidden[k] = pre.max(0.0);
        }
        let pred: f64 =
            weights.w2.iter().zip(&hidden).map(|(w, a)| w * a).sum::<f64>() + weights.b2;
        let err = pred - target;
        loss += err * err;
        let dpred = 2.0 * err / n;
        grads.b2 += dpred;
        for k in 0..h {
            grads.w2[k] += dpred * hidden[k];
            if hidden[k] > 0.0 {
                let dpre = dpred * weights.w2[k];
                grads.b1[k] += dpre;
                for (g, &xv) in grads.w1[k].iter_mut().zip(row) {
                    *g += dpre * xv;
                }
            }
        }
    }
    Ok((loss / n, grads))
}

struct Adam {
    m: MlpWeights,
    v: MlpWeights,
    t: usize,
}

impl Adam {
    fn new(template: &MlpWeights) -> Self {
        Adam { m: template.zeros_like(), v: template.zeros_like(), t: 0 }
    }

    fn step(&mut self, weights: &mut MlpWeights, grads: &MlpWeights) {
        self.t += 1;
        let bc1 = 1.0 - ADAM_BETA1.powi(self.t as i32);
        let bc2 = 1.0 - ADAM_BETA2.powi(self.t as i32);
        let update = |w: &mut f64, m: &mut f64, v: &mut f64, g: f64| {
            *m = ADAM_BETA1 * *m + (1.0 - ADAM_BETA1) * g;
            *v = ADAM_BETA2 * *v + (1.0 - ADAM_BETA2) * g * g;
            *w -= ADAM_STEP * (*m / bc1) / ((*v / bc2).sqrt() + ADAM_EPS);
        };
        for k in 0..weights.w1.len() {
            for j in 0..weights.w1[k].len() {
                update(&mut weights.w1[k][j], &mut self.m.w1[k][j], &mut self.v.w1[k][j], grads.w1[k][j]);
            }
            update(&mut weights.b1[k], &mut self.m.b1[k], &mut self.v.b1[k], grads.b1[k]);
            update(&mut weights.w2[k], &mut self.m.w2[k], &mut self.v.w2[k], grads.w2[k]);
        }
        update(&mut weights.b2, &mut self.m.b2, &mut self.v.b2, grads.b2);
    }
}

/// Full-batch training for exactly `max_iter` updates, no early stopping.
pub fn fit_mlp(x: &[Vec<f64>], y: &[f64], params: MlpParams, seed: u64) -> Result<MlpModel> {
    if x.len() < 2 {
        return Err(Error::TooFewRows(x.len()));
    }
    let d = x[0].len();
    let mut weights = init_mlp(d, params.hidden_size, seed);
    let mut adam = Adam::new(&weights);
    let (init_loss, _) = loss_and_gradients(&weights, x, y)?;
    let mut best = weights.clone();
    let mut best_loss = init_loss;
    for _ in 0..params.max_iter {
        let (loss, grads) = loss_and_gradients(&weights, x, y)?;
        if !loss.is_finite() {
            return Err(Error::Diverged);
        }
        if loss < best_loss {
            best_loss = loss;
            best = weights.clone();
        }
        adam.step(&mut weights, &grads);
    }
    // the state after the last update may be the best seen
    let (final_loss, _) = loss_and_gradients(&weights, x, y)?;
    if !final_loss.is_finite() {
        return Err(Error::Diverged);
    }
    if final_loss < best_loss {
        best_loss = final_loss;
        best = weights.clone();
    }
    Ok(MlpModel { weights: best, final_weights: weights, best_loss })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::r2;

    #[test]
    fn init_is_deterministic_with_zero_biases() {
        let a = init_mlp(4, 10, 77);
        let b = init_mlp(4, 10, 77);
        assert_eq!(a, b);
        assert!(a.b1.iter().all(|&v| v == 0.0));
        assert_eq!(a.b2, 0.0);
    }

    #[test]
    fn init_respects_bound() {
        let w = init_mlp(4, 25, 5);
        let bound = (6.0 / 29.0f64).sqrt();
        for row in &w.w1 {
            assert!(row.iter().all(|v| v.abs() <= bound));
        }
    }

    #[test]
    fn dead_network_outputs_output_bias() {
        let mut w = init_mlp(2, 3, 0);
        for row in &mut w.w1 {
            row.fill(0.0);
        }
        w.w2.fill(0.0);
        w.b2 = 0.3;
        let out = forward(&w, &[vec![1.0, -4.0], vec![0.0, 0.0]]).unwrap();
        assert_eq!(out, vec![0.3, 0.3]);
    }

    #[test]
    fn relu_gates_negative_preactivations() {
        let w = MlpWeights {
            w1: vec![vec![1.0], vec![2.0]],
            b1: vec![-10.0, -10.0],
            w2: vec![5.0, 5.0],
            b2: 1.5,
        };
        // inputs small enough that every pre-activation is negative
        let out = forward(&w, &[vec![0.0], vec![1.0]]).unwrap();
        assert_eq!(out, vec![1.5, 1.5]);
    }

    #[test]
    fn forward_hand_computed() {
        let w = MlpWeights {
            w1: vec![vec![1.0, -1.0], vec![0.5, 0.5]],
            b1: vec![0.0, 1.0],
            w2: vec![2.0, -3.0],
            b2: 0.25,
        };
        // x = [2, 1]: hidden = relu([1, 2.5]) = [1, 2.5]
        // y = 2*1 - 3*2.5 + 0.25 = -5.25
        let out = forward(&w, &[vec![2.0, 1.0]]).unwrap();
        assert!((out[0] + 5.25).abs() < 1e-12);
    }

    #[test]
    fn perfect_predictions_have_zero_gradients() {
        let w = MlpWeights { w1: vec![vec![0.0]], b1: vec![0.0], w2: vec![0.0], b2: 4.0 };
        let x = vec![vec![1.0], vec![2.0]];
        let y = vec![4.0, 4.0];
        let (loss, grads) = loss_and_gradients(&w, &x, &y).unwrap();
        assert_eq!(loss, 0.0);
        assert!(grads.w1.iter().flatten().all(|&g| g == 0.0));
        assert_eq!(grads.b2, 0.0);
    }

    #[test]
    fn doubled_residuals_quadruple_loss() {
        let w = init_mlp(2, 4, 9);
        let x: Vec<Vec<f64>> = (0..10).map(|i| vec![i as f64 * 0.1, 1.0 - i as f64 * 0.1]).collect();
        let pred = forward(&w, &x).unwrap();
        let y1: Vec<f64> = pred.iter().map(|p| p + 1.0).collect();
        let y2: Vec<f64> = pred.iter().map(|p| p + 2.0).collect();
        let (l1, _) = loss_and_gradients(&w, &x, &y1).unwrap();
        let (l2, _) = loss_and_gradients(&w, &x, &y2).unwrap();
        assert!((l2 - 4.0 * l1).abs() < 1e-9);
    }

    #[test]
    fn max_iter_zero_keeps_init() {
        let x: Vec<Vec<f64>> = (0..5).map(|i| vec![i as f64]).collect();
        let y: Vec<f64> = (0..5).map(|i| i as f64).collect();
        let model = fit_mlp(&x, &y, MlpParams { hidden_size: 3, max_iter: 0 }, 21).unwrap();
        assert_eq!(model.weights, init_mlp(1, 3, 21));
    }

    #[test]
    fn training_is_deterministic() {
        let x: Vec<Vec<f64>> = (0..20).map(|i| vec![(i as f64 - 10.0) / 5.0]).collect();
        let y: Vec<f64> = x.iter().map(|r| 2.0 * r[0]).collect();
        let p = MlpParams { hidden_size: 5, max_iter: 50 };
        let a = fit_mlp(&x, &y, p, 3).unwrap();
        let b = fit_mlp(&x, &y, p, 3).unwrap();
        assert_eq!(a.weights, b.weights);
        assert_eq!(a.final_weights, b.final_weights);
    }

    #[test]
    fn fits_linear_target() {
        // scaled 1-D input, y = 2x
        let x: Vec<Vec<f64>> = (0..50).map(|i| vec![(i as f64 - 24.5) / 14.43]).collect();
        let y: Vec<f64> = x.iter().map(|r| 2.0 * r[0]).collect();
        let model = fit_mlp(&x, &y, MlpParams { hidden_size: 25, max_iter: 500 }, 1).unwrap();
        let pred = model.predict(&x).unwrap();
        assert!(r2(&y, &pred).unwrap() > 0.99);
    }

    #[test]
    fn best_loss_not_worse_than_initial() {
        let x: Vec<Vec<f64>> = (0..30).map(|i| vec![(i as f64) / 30.0]).collect();
        let y: Vec<f64> = x.iter().map(|r| r[0].sin()).collect();
        let init = init_mlp(1, 5, 8);
        let (init_loss, _) = loss_and_gradients(&init, &x, &y).unwrap();
        let model = fit_mlp(&x, &y, MlpParams { hidden_size: 5, max_iter: 100 }, 8).unwrap();
        assert!(model.best_loss <= init_loss);
    }
}
