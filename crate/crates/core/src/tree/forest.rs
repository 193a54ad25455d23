//! Random forest: bagged unlimited-depth CART trees, all features
//! candidates at every split.

use rand::Rng as _;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{check_dims, fit_tree, RegressionTree};
use crate::error::Result;
use crate::seed::mix;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RfParams {
    pub n_estimators: usize,
    pub min_samples_leaf: usize,
}

/// Bagged ensemble; prediction is the arithmetic mean over trees.
#[derive(Debug, Clone)]
pub struct ForestModel {
    pub trees: Vec<RegressionTree>,
    pub seed: u64,
    pub n_features: usize,
}

impl ForestModel {
    pub fn predict_row(&self, row: &[f64]) -> f64 {
        let sum: f64 = self.trees.iter().map(|t| t.predict_row(row)).sum();
        sum / self.trees.len() as f64
    }

    pub fn predict(&self, x: &[Vec<f64>]) -> Result<Vec<f64>> {
        check_dims(x, self.n_features)?;
        Ok(x.iter().map(|row| self.predict_row(row)).collect())
    }
}

/// Fit each tree on its own bootstrap sample (n draws with replacement,
/// per-tree seed derived from the root seed and tree index).
pub fn fit_random_forest(x: &[Vec<f64>], y: &[f64], params: RfParams, seed: u64) -> ForestModel {
    let n = x.len();
    let samples: Vec<Vec<usize>> = (0..params.n_estimators)
        .map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(mix(seed, t as u64));
            (0..n).map(|_| rng.random_range(0..n)).collect()
        })
        .collect();
    fit_forest_from_samples(x, y, samples, params.min_samples_leaf, seed)
}

/// Fit one tree per given row sample. Exposed so tests can pin the
/// bootstrap (e.g. identity sample) explicitly.
pub fn fit_forest_from_samples(
    x: &[Vec<f64>],
    y: &[f64],
    samples: Vec<Vec<usize>>,
    min_samples_leaf: usize,
    seed: u64,
) -> ForestModel {
    let d = x.first().map_or(0, |r| r.len());
    let features: Vec<usize> = (0..d).collect();
    let trees: Vec<RegressionTree> = samples
        .par_iter()
        .map(|rows| fit_tree(x, y, rows, None, min_samples_leaf, &features))
        .collect();
    ForestModel { trees, seed, n_features: d }
}
