//! Epsilon-insensitive support vector regression with an RBF kernel,
//! trained by sequential minimal optimization on the dual.
//!
//! The solver works on the 2n-variable dual (alpha, alpha*) but tracks the
//! net coefficients beta_i = alpha_i - alpha*_i for prediction. A maximal
//! violating pair is selected each step; the two-variable subproblem has a
//! closed form, clipped to the box. The equality constraint sum(beta) = 0
//! is preserved exactly because each update moves +lambda / -lambda.

use rand::Rng as _;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// KKT / stopping tolerance.
pub const SMO_TOL: f64 = 1e-3;
/// Sweep cap; one sweep is n pair updates.
pub const MAX_SWEEPS: usize = 10_000;
/// Coefficients below this are dropped from the support set.
const SUPPORT_EPS: f64 = 1e-12;
/// Full Gram matrix is cached up to this many rows.
const GRAM_CACHE_LIMIT: usize = 9_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SvrParams {
    pub c: f64,
    pub epsilon: f64,
}

/// How the RBF width is chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GammaPolicy {
    /// 1 / (d * population variance of all feature entries); about 1/d on
    /// zero-mean unit-variance input.
    Scale,
    Fixed(f64),
}

#[derive(Debug, Clone)]
pub struct SvrModel {
    pub support_vectors: Vec<Vec<f64>>,
    /// Net dual coefficients of the support vectors, each in [-C, C].
    pub coefficients: Vec<f64>,
    pub bias: f64,
    pub gamma: f64,
    pub c: f64,
    pub epsilon: f64,
    /// False when the sweep cap was hit before the KKT gap closed.
    pub converged: bool,
}

/// exp(-gamma * ||x - z||^2)
pub fn rbf_kernel(x: &[f64], z: &[f64], gamma: f64) -> Result<f64> {
    if x.len() != z.len() {
        return Err(Error::DimensionMismatch { expected: x.len(), actual: z.len() });
    }
    let sq: f64 = x.iter().zip(z).map(|(a, b)| (a - b) * (a - b)).sum();
    Ok((-gamma * sq).exp())
}

pub fn resolve_gamma(x: &[Vec<f64>], policy: GammaPolicy) -> f64 {
    match policy {
        GammaPolicy::Fixed(g) => g,
        GammaPolicy::Scale => {
            let d = x.first().map_or(1, |r| r.len());
            let count = (x.len() * d) as f64;
            let mean: f64 = x.iter().flatten().sum::<f64>() / count;
            let var: f64 = x.iter().flatten().map(|v| (v - mean) * (v - mean)).sum::<f64>() / count;
            if var > 0.0 {
                1.0 / (d as f64 * var)
            } else {
                1.0 / d as f64
            }
        }
    }
}

struct Kernel<'a> {
    x: &'a [Vec<f64>],
    gamma: f64,
    gram: Option<Vec<Vec<f64>>>,
}

impl<'a> Kernel<'a> {
    fn new(x: &'a [Vec<f64>], gamma: f64) -> Self {
        let gram = (x.len() <= GRAM_CACHE_LIMIT).then(|| {
            (0..x.len())
                .map(|i| {
                    (0..x.len())
                        .map(|j| rbf_kernel(&x[i], &x[j], gamma).unwrap())
                        .collect()
                })
                .collect()
        });
        Kernel { x, gamma, gram }
    }

    fn column(&self, i: usize) -> Vec<f64> {
        match &self.gram {
            Some(g) => g[i].clone(),
            None => self
                .x
                .iter()
                .map(|row| rbf_kernel(row, &self.x[i], self.gamma).unwrap())
                .collect(),
        }
    }

    // RBF diagonal is identically 1
    fn diag(&self, _i: usize) -> f64 {
        1.0
    }

    fn entry(&self, i: usize, j: usize) -> f64 {
        match &self.gram {
            Some(g) => g[i][j],
            None => rbf_kernel(&self.x[i], &self.x[j], self.gamma).unwrap(),
        }
    }
}

/// Dual objective in maximization form:
/// -1/2 b'Kb - eps * |b|_1 + y'b.
pub fn dual_objective(x: &[Vec<f64>], y: &[f64], beta: &[f64], gamma: f64, epsilon: f64) -> f64 {
    let n = x.len();
    let mut quad = 0.0;
    for i in 0..n {
        if beta[i] == 0.0 {
            continue;
        }
        for j in 0..n {
            if beta[j] == 0.0 {
                continue;
            }
            quad += beta[i] * beta[j] * rbf_kernel(&x[i], &x[j], gamma).unwrap();
        }
    }
    let l1: f64 = beta.iter().map(|b| b.abs()).sum();
    let lin: f64 = y.iter().zip(beta).map(|(t, b)| t * b).sum();
    -0.5 * quad - epsilon * l1 + lin
}

struct SolveState {
    beta: Vec<f64>,
    /// alpha for the 2n variables: [alpha_up; alpha_down].
    alpha: Vec<f64>,
    /// h = K * beta.
    h: Vec<f64>,
    converged: bool,
}

/// Score -y_s * G_s of dual variable s (s < n: up half, else down half).
fn violation_score(s: usize, n: usize, h: &[f64], y: &[f64], epsilon: f64) -> f64 {
    if s < n {
        y[s] - h[s] - epsilon
    } else {
        y[s - n] - h[s - n] + epsilon
    }
}

fn in_up_set(s: usize, n: usize, alpha: &[f64], c: f64) -> bool {
    if s < n {
        alpha[s] < c
    } else {
        alpha[s] > 0.0
    }
}

fn in_low_set(s: usize, n: usize, alpha: &[f64], c: f64) -> bool {
    if s < n {
        alpha[s] > 0.0
    } else {
        alpha[s] < c
    }
}

fn smo_solve(
    kernel: &Kernel,
    y: &[f64],
    params: SvrParams,
    seed: u64,
    mut trace: Option<&mut Vec<f64>>,
) -> Result<SolveState> {
    let n = y.len();
    let c = params.c;
    let epsilon = params.epsilon;
    let mut state = SolveState {
        beta: vec![0.0; n],
        alpha: vec![0.0; 2 * n],
        h: vec![0.0; n],
        converged: false,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let max_updates = MAX_SWEEPS.saturating_mul(n);

    for _ in 0..max_updates {
        // maximal violating pair
        let mut s_best: Option<(usize, f64)> = None;
        let mut t_best: Option<(usize, f64)> = None;
        for s in 0..2 * n {
            let score = violation_score(s, n, &state.h, y, epsilon);
            if !score.is_finite() {
                return Err(Error::NonFinite("svr gradient"));
            }
            if in_up_set(s, n, &state.alpha, c)
                && s_best.is_none_or(|(_, v)| score > v)
            {
                s_best = Some((s, score));
            }
            if in_low_set(s, n, &state.alpha, c)
                && t_best.is_none_or(|(_, v)| score < v)
            {
                t_best = Some((s, score));
            }
        }
        let (Some((s, m)), Some((t, big_m))) = (s_best, t_best) else {
            state.converged = true;
            break;
        };
        if m - big_m <= SMO_TOL {
            state.converged = true;
            break;
        }
        let updated = update_pair(kernel, &mut state, s, t, n, c, m, big_m);
        if !updated {
            // numeric dead end: try a random partner from the low set
            let candidates: Vec<usize> =
                (0..2 * n).filter(|&u| u != s && in_low_set(u, n, &state.alpha, c)).collect();
            if candidates.is_empty() {
                state.converged = true;
                break;
            }
            let t = candidates[rng.random_range(0..candidates.len())];
            let score = violation_score(t, n, &state.h, y, epsilon);
            update_pair(kernel, &mut state, s, t, n, c, m, score);
        }
        if let Some(tr) = trace.as_mut() {
            let l1: f64 = state.beta.iter().map(|b| b.abs()).sum();
            let quad: f64 = state.beta.iter().zip(&state.h).map(|(b, h)| b * h).sum();
            let lin: f64 = y.iter().zip(&state.beta).map(|(t, b)| t * b).sum();
            tr.push(-0.5 * quad - epsilon * l1 + lin);
        }
    }
    Ok(state)
}

/// One analytic two-variable step. Returns false when the box blocked it.
#[allow(clippy::too_many_arguments)]
fn update_pair(
    kernel: &Kernel,
    state: &mut SolveState,
    s: usize,
    t: usize,
    n: usize,
    c: f64,
    score_s: f64,
    score_t: f64,
) -> bool {
    let i = s % n;
    let j = t % n;
    let eta = kernel.diag(i) + kernel.diag(j) - 2.0 * kernel.entry(i, j);
    // room before a box face stops the move
    let room_s = if s < n { c - state.alpha[s] } else { state.alpha[s] };
    let room_t = if t < n { state.alpha[t] } else { c - state.alpha[t] };
    let lambda_max = room_s.min(room_t);
    let mut lambda = if eta > 1e-12 { (score_s - score_t) / eta } else { lambda_max };
    lambda = lambda.clamp(0.0, lambda_max);
    if lambda <= 0.0 {
        return false;
    }
    if s < n {
        state.alpha[s] += lambda;
    } else {
        state.alpha[s] -= lambda;
    }
    if t < n {
        state.alpha[t] -= lambda;
    } else {
        state.alpha[t] += lambda;
    }
    state.beta[i] += lambda;
    state.beta[j] -= lambda;
    let col_i = kernel.column(i);
    let col_j = kernel.column(j);
    for ((h, ki), kj) in state.h.iter_mut().zip(&col_i).zip(&col_j) {
        *h += lambda * (ki - kj);
    }
    true
}

fn compute_bias(state: &SolveState, y: &[f64], params: SvrParams) -> f64 {
    let n = y.len();
    let c = params.c;
    let epsilon = params.epsilon;
    // average over in-bound support vectors when any exist
    let mut sum = 0.0;
    let mut count = 0usize;
    for i in 0..n {
        let b = state.beta[i];
        if b.abs() > SUPPORT_EPS && b.abs() < c - SUPPORT_EPS {
            sum += y[i] - state.h[i] - epsilon * b.signum();
            count += 1;
        }
    }
    if count > 0 {
        return sum / count as f64;
    }
    // midpoint of the KKT interval
    let mut hi = f64::NEG_INFINITY;
    let mut lo = f64::INFINITY;
    for s in 0..2 * n {
        let score = violation_score(s, n, &state.h, y, epsilon);
        if in_up_set(s, n, &state.alpha, c) {
            hi = hi.max(score);
        }
        if in_low_set(s, n, &state.alpha, c) {
            lo = lo.min(score);
        }
    }
    if hi.is_finite() && lo.is_finite() {
        (hi + lo) / 2.0
    } else {
        y.iter().sum::<f64>() / n as f64
    }
}

/// Train on already-scaled rows.
pub fn fit_svr(
    x: &[Vec<f64>],
    y: &[f64],
    params: SvrParams,
    gamma_policy: GammaPolicy,
    seed: u64,
) -> Result<SvrModel> {
    let (model, _) = fit_svr_inner(x, y, params, gamma_policy, seed, false)?;
    Ok(model)
}

/// As [`fit_svr`], but also returns the dual objective after every update.
pub fn fit_svr_with_trace(
    x: &[Vec<f64>],
    y: &[f64],
    params: SvrParams,
    gamma_policy: GammaPolicy,
    seed: u64,
) -> Result<(SvrModel, Vec<f64>)> {
    fit_svr_inner(x, y, params, gamma_policy, seed, true)
}

fn fit_svr_inner(
    x: &[Vec<f64>],
    y: &[f64],
    params: SvrParams,
    gamma_policy: GammaPolicy,
    seed: u64,
    want_trace: bool,
) -> Result<(SvrModel, Vec<f64>)> {
    if x.len() < 2 {
        return Err(Error::TooFewRows(x.len()));
    }
    if x.len() != y.len() {
        return Err(Error::LengthMismatch { expected: x.len(), actual: y.len() });
    }
    if x.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("svr features (input must be scaled)"));
    }
    let gamma = resolve_gamma(x, gamma_policy);
    let kernel = Kernel::new(x, gamma);
    let mut trace = Vec::new();
    let state = smo_solve(&kernel, y, params, seed, want_trace.then_some(&mut trace))?;
    let bias = compute_bias(&state, y, params);

    let mut support_vectors = Vec::new();
    let mut coefficients = Vec::new();
    for (row, &b) in x.iter().zip(&state.beta) {
        if b.abs() > SUPPORT_EPS {
            support_vectors.push(row.clone());
            coefficients.push(b);
        }
    }
    Ok((
        SvrModel {
            support_vectors,
            coefficients,
            bias,
            gamma,
            c: params.c,
            epsilon: params.epsilon,
            converged: state.converged,
        },
        trace,
    ))
}

pub fn predict_svr(model: &SvrModel, x: &[Vec<f64>]) -> Result<Vec<f64>> {
    x.iter()
        .map(|row| {
            let mut acc = model.bias;
            for (sv, &b) in model.support_vectors.iter().zip(&model.coefficients) {
                acc += b * rbf_kernel(sv, row, model.gamma)?;
            }
            Ok(acc)
        })
        .collect()
}

/// Largest epsilon-insensitive KKT violation over the training points.
/// Zero means exact optimality; the acceptance audit allows 1e-3.
pub fn max_kkt_violation(model: &SvrModel, x: &[Vec<f64>], y: &[f64]) -> Result<f64> {
    let pred = predict_svr(model, x)?;
    // rebuild per-row beta (non-support rows have beta 0)
    let mut beta = vec![0.0; x.len()];
    for (sv, &b) in model.support_vectors.iter().zip(&model.coefficients) {
        if let Some(pos) = x.iter().position(|row| row == sv) {
            beta[pos] += b;
        }
    }
    let c = model.c;
    let eps = model.epsilon;
    let mut worst = 0.0f64;
    for i in 0..x.len() {
        let e = y[i] - pred[i];
        let b = beta[i];
        let v = if b.abs() <= SUPPORT_EPS {
            (e.abs() - eps).max(0.0)
        } else if b >= c - SUPPORT_EPS {
            (eps - e).max(0.0)
        } else if b <= -(c - SUPPORT_EPS) {
            (e + eps).max(0.0)
        } else if b > 0.0 {
            (e - eps).abs()
        } else {
            (e + eps).abs()
        };
        worst = worst.max(v);
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scale_1d(values: &[f64]) -> Vec<Vec<f64>> {
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
        let std = var.sqrt().max(1e-12);
        values.iter().map(|v| vec![(v - mean) / std]).collect()
    }

    #[test]
    fn rbf_identity_and_symmetry() {
        let x = [0.3, -1.2, 5.0];
        let z = [1.0, 0.0, 2.0];
        assert_eq!(rbf_kernel(&x, &x, 0.7).unwrap(), 1.0);
        assert_eq!(rbf_kernel(&x, &z, 0.7).unwrap(), rbf_kernel(&z, &x, 0.7).unwrap());
    }

    #[test]
    fn rbf_hand_value() {
        let v = rbf_kernel(&[0.0], &[1.0], 1.0).unwrap();
        assert!((v - (-1.0f64).exp()).abs() < 1e-12);
        assert!((v - 0.36788).abs() < 1e-4);
    }

    #[test]
    fn rbf_dimension_mismatch() {
        assert!(rbf_kernel(&[1.0], &[1.0, 2.0], 1.0).is_err());
    }

    #[test]
    fn constant_targets_inside_tube() {
        let x = scale_1d(&[1.0, 2.0, 3.0, 4.0, 5.0]);
        let y = vec![7.0; 5];
        let model =
            fit_svr(&x, &y, SvrParams { c: 1.0, epsilon: 0.1 }, GammaPolicy::Scale, 0).unwrap();
        assert!(model.support_vectors.is_empty());
        assert!((model.bias - 7.0).abs() < 1e-12);
        let pred = predict_svr(&model, &x).unwrap();
        assert!(pred.iter().all(|&p| (p - 7.0).abs() < 1e-12));
    }

    #[test]
    fn targets_within_epsilon_of_constant() {
        let x = scale_1d(&[0.0, 1.0, 2.0, 3.0]);
        let y = vec![5.05, 4.95, 5.02, 4.98];
        let model =
            fit_svr(&x, &y, SvrParams { c: 1.0, epsilon: 0.1 }, GammaPolicy::Scale, 0).unwrap();
        let pred = predict_svr(&model, &x).unwrap();
        for p in pred {
            assert!((p - 5.0).abs() <= 0.1 + 1e-6, "prediction {p} outside tube around 5");
        }
    }

    #[test]
    fn dual_feasibility_after_fit() {
        let x = scale_1d(&(0..20).map(|i| i as f64).collect::<Vec<_>>());
        let y: Vec<f64> = (0..20).map(|i| (i as f64 * 0.4).sin() * 2.0).collect();
        let params = SvrParams { c: 3.0, epsilon: 0.1 };
        let model = fit_svr(&x, &y, params, GammaPolicy::Scale, 1).unwrap();
        let sum: f64 = model.coefficients.iter().sum();
        assert!(sum.abs() <= 1e-6, "sum(beta) = {sum}");
        assert!(model.coefficients.iter().all(|b| b.abs() <= params.c + 1e-12));
    }

    #[test]
    fn kkt_audit_after_fit() {
        let x = scale_1d(&(0..25).map(|i| i as f64).collect::<Vec<_>>());
        let y: Vec<f64> = (0..25).map(|i| (i as f64 * 0.3).cos() + i as f64 * 0.05).collect();
        let model =
            fit_svr(&x, &y, SvrParams { c: 1.0, epsilon: 0.1 }, GammaPolicy::Scale, 2).unwrap();
        assert!(model.converged);
        let v = max_kkt_violation(&model, &x, &y).unwrap();
        assert!(v <= 1e-3, "kkt violation {v}");
    }

    #[test]
    fn objective_non_decreasing() {
        let x = scale_1d(&(0..15).map(|i| i as f64).collect::<Vec<_>>());
        let y: Vec<f64> = (0..15).map(|i| (i as f64 * 0.5).sin()).collect();
        let (_, trace) =
            fit_svr_with_trace(&x, &y, SvrParams { c: 1.0, epsilon: 0.1 }, GammaPolicy::Scale, 3)
                .unwrap();
        for w in trace.windows(2) {
            assert!(w[1] >= w[0] - 1e-9, "objective dropped: {} -> {}", w[0], w[1]);
        }
    }

    #[test]
    fn duplicated_rows_leave_predictions_unchanged() {
        // C high enough that no coefficient sits at the box bound; a
        // bound-active solution is genuinely different under duplication
        // (duplicating rows doubles the effective per-point budget)
        let x = scale_1d(&(0..12).map(|i| i as f64).collect::<Vec<_>>());
        let y: Vec<f64> = (0..12).map(|i| (i as f64 * 0.7).sin() * 3.0).collect();
        let params = SvrParams { c: 50.0, epsilon: 0.1 };
        let single = fit_svr(&x, &y, params, GammaPolicy::Fixed(0.5), 4).unwrap();

        let mut x2 = x.clone();
        x2.extend(x.iter().cloned());
        let mut y2 = y.clone();
        y2.extend(y.iter().cloned());
        let doubled = fit_svr(&x2, &y2, params, GammaPolicy::Fixed(0.5), 4).unwrap();

        let probe: Vec<Vec<f64>> = (0..30).map(|i| vec![i as f64 * 0.1 - 1.5]).collect();
        let a = predict_svr(&single, &probe).unwrap();
        let b = predict_svr(&doubled, &probe).unwrap();
        for (u, v) in a.iter().zip(&b) {
            assert!((u - v).abs() <= 1e-6 * u.abs().max(1.0), "{u} vs {v}");
        }
    }

    #[test]
    fn predict_without_support_vectors_is_bias() {
        let model = SvrModel {
            support_vectors: vec![],
            coefficients: vec![],
            bias: 2.5,
            gamma: 1.0,
            c: 1.0,
            epsilon: 0.1,
            converged: true,
        };
        assert_eq!(predict_svr(&model, &[vec![0.0], vec![9.0]]).unwrap(), vec![2.5, 2.5]);
    }

    #[test]
    fn two_point_model_locality() {
        // support vectors far apart: at a support vector the other one's
        // kernel contribution is negligible
        let model = SvrModel {
            support_vectors: vec![vec![0.0], vec![100.0]],
            coefficients: vec![0.8, -0.8],
            bias: 1.0,
            gamma: 1.0,
            c: 1.0,
            epsilon: 0.1,
            converged: true,
        };
        let p = predict_svr(&model, &[vec![0.0]]).unwrap()[0];
        assert!((p - (0.8 + 1.0)).abs() < 1e-10);
    }

    #[test]
    fn unscaled_input_guard() {
        let x = vec![vec![f64::INFINITY], vec![0.0]];
        let y = vec![0.0, 1.0];
        assert!(fit_svr(&x, &y, SvrParams { c: 1.0, epsilon: 0.1 }, GammaPolicy::Scale, 0).is_err());
    }
}
