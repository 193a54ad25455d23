//! Regression trees and the ensemble learners built on them.

pub mod cart;
pub mod forest;
pub mod gbr;
pub mod hist;
pub mod lgbm;
pub mod oblivious;

pub use cart::{best_split, fit_tree, Node, RegressionTree, Split};
pub use forest::{fit_random_forest, ForestModel, RfParams};
pub use gbr::{fit_gbr, GbrParams};
pub use hist::{build_histogram_bins, HistogramBins};
pub use lgbm::{fit_lgbm_style, LgbmParams};
pub use oblivious::{fit_oblivious_boosting, CbrParams, ObliviousTree};

use crate::error::{Error, Result};

/// A single boosting stage.
#[derive(Debug, Clone)]
pub enum StageTree {
    Axis(RegressionTree),
    Oblivious(ObliviousTree),
}

impl StageTree {
    pub fn predict_row(&self, row: &[f64]) -> f64 {
        match self {
            StageTree::Axis(t) => t.predict_row(row),
            StageTree::Oblivious(t) => t.predict_row(row),
        }
    }
}

/// Which boosting flavor produced a [`BoostedModel`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoostVariant {
    Depthwise,
    Leafwise,
    Oblivious,
}

/// Additive model: f0 plus learning-rate-weighted stage outputs.
#[derive(Debug, Clone)]
pub struct BoostedModel {
    pub f0: f64,
    pub stages: Vec<(StageTree, f64)>,
    pub variant: BoostVariant,
    pub n_features: usize,
}

impl BoostedModel {
    pub fn predict_row(&self, row: &[f64]) -> f64 {
        let mut acc = self.f0;
        for (tree, lr) in &self.stages {
            acc += lr * tree.predict_row(row);
        }
        acc
    }

    pub fn predict(&self, x: &[Vec<f64>]) -> Result<Vec<f64>> {
        check_dims(x, self.n_features)?;
        Ok(x.iter().map(|row| self.predict_row(row)).collect())
    }
}

pub(crate) fn check_dims(x: &[Vec<f64>], expected: usize) -> Result<()> {
    for row in x {
        if row.len() != expected {
            return Err(Error::DimensionMismatch { expected, actual: row.len() });
        }
    }
    Ok(())
}

pub(crate) fn mean(values: impl Iterator<Item = f64>, count: usize) -> f64 {
    if count == 0 {
        0.0
    } else {
        values.sum::<f64>() / count as f64
    }
}
