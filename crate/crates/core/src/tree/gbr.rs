//! Depth-wise gradient boosting for squared loss: each stage fits a
//! depth-capped CART tree to the current residuals.

use super::{fit_tree, BoostVariant, BoostedModel, StageTree};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GbrParams {
    pub n_estimators: usize,
    pub max_depth: usize,
    pub learning_rate: f64,
}

pub fn fit_gbr(x: &[Vec<f64>], y: &[f64], params: GbrParams) -> BoostedModel {
    let n = x.len();
    let d = x.first().map_or(0, |r| r.len());
    let rows: Vec<usize> = (0..n).collect();
    let features: Vec<usize> = (0..d).collect();

    let f0 = y.iter().sum::<f64>() / n as f64;
    let mut pred = vec![f0; n];
    let mut residuals = vec![0.0; n];
    let mut stages = Vec::with_capacity(params.n_estimators);
    for _ in 0..params.n_estimators {
        for i in 0..n {
            residuals[i] = y[i] - pred[i];
        }
        let tree = fit_tree(x, &residuals, &rows, Some(params.max_depth), 1, &features);
        for (p, row) in pred.iter_mut().zip(x) {
            *p += params.learning_rate * tree.predict_row(row);
        }
        stages.push((StageTree::Axis(tree), params.learning_rate));
    }
    BoostedModel { f0, stages, variant: BoostVariant::Depthwise, n_features: d }
}
