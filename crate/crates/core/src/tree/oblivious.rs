//! Oblivious-tree boosting: every node at a given depth shares one split
//! condition, so a depth-d tree is d (feature, threshold) pairs and 2^d
//! indexable leaves. Levels are chosen greedily over bin-edge thresholds.

use super::hist::{build_histogram_bins, HistogramBins};
use super::{BoostVariant, BoostedModel, StageTree};

/// Bin count used for threshold candidates. The grid tunes depth,
/// min-child and learning rate; binning stays fixed.
const OBLIVIOUS_MAX_BIN: usize = 255;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CbrParams {
    pub depth: usize,
    pub min_child_samples: usize,
    pub learning_rate: f64,
    pub iterations: usize,
}

#[derive(Debug, Clone)]
pub struct ObliviousTree {
    /// Shared split per level: bit i of the leaf code is 1 iff
    /// `row[feature] > threshold` at level i.
    pub levels: Vec<(usize, f64)>,
    /// 2^levels leaf values; empty leaves predict 0.
    pub leaf_values: Vec<f64>,
}

impl ObliviousTree {
    pub fn leaf_code(&self, row: &[f64]) -> usize {
        let mut code = 0usize;
        for (bit, &(feature, threshold)) in self.levels.iter().enumerate() {
            if row[feature] > threshold {
                code |= 1 << bit;
            }
        }
        code
    }

    pub fn predict_row(&self, row: &[f64]) -> f64 {
        self.leaf_values[self.leaf_code(row)]
    }
}

/// One greedy level choice: the (feature, threshold) minimizing the total
/// children SSE across all current leaves, subject to the min-child
/// constraint on every non-empty child.
fn best_level(
    x: &[Vec<f64>],
    residuals: &[f64],
    codes: &[usize],
    n_leaves: usize,
    bins: &HistogramBins,
    min_child_samples: usize,
) -> Option<(usize, f64, f64)> {
    let d = x.first().map_or(0, |r| r.len());
    let n = x.len();

    let mut parent_cnt = vec![0usize; n_leaves];
    let mut parent_sum = vec![0.0; n_leaves];
    let mut parent_sq = vec![0.0; n_leaves];
    for i in 0..n {
        parent_cnt[codes[i]] += 1;
        parent_sum[codes[i]] += residuals[i];
        parent_sq[codes[i]] += residuals[i] * residuals[i];
    }
    let parent_total: f64 = (0..n_leaves)
        .filter(|&l| parent_cnt[l] > 0)
        .map(|l| parent_sq[l] - parent_sum[l] * parent_sum[l] / parent_cnt[l] as f64)
        .sum();

    let mut best: Option<(usize, f64, f64)> = None;
    for feature in 0..d {
        let nb = bins.bin_count(feature);
        if nb < 2 {
            continue;
        }
        let mut cnt = vec![0usize; n_leaves * nb];
        let mut sum = vec![0.0; n_leaves * nb];
        let mut sq = vec![0.0; n_leaves * nb];
        for i in 0..n {
            let cell = codes[i] * nb + bins.bin_index(feature, x[i][feature]);
            cnt[cell] += 1;
            sum[cell] += residuals[i];
            sq[cell] += residuals[i] * residuals[i];
        }
        let mut left_cnt = vec![0usize; n_leaves];
        let mut left_sum = vec![0.0; n_leaves];
        let mut left_sq = vec![0.0; n_leaves];
        for (b, &threshold) in bins.thresholds(feature).iter().enumerate() {
            let mut children_total = 0.0;
            let mut valid = true;
            let mut splits_something = false;
            for leaf in 0..n_leaves {
                let cell = leaf * nb + b;
                left_cnt[leaf] += cnt[cell];
                left_sum[leaf] += sum[cell];
                left_sq[leaf] += sq[cell];
                if parent_cnt[leaf] == 0 {
                    continue;
                }
                let ln = left_cnt[leaf];
                let rn = parent_cnt[leaf] - ln;
                if (ln > 0 && ln < min_child_samples) || (rn > 0 && rn < min_child_samples) {
                    valid = false;
                }
                if ln > 0 && rn > 0 {
                    splits_something = true;
                }
                if ln > 0 {
                    children_total += left_sq[leaf] - left_sum[leaf] * left_sum[leaf] / ln as f64;
                }
                if rn > 0 {
                    let rs = parent_sum[leaf] - left_sum[leaf];
                    let rq = parent_sq[leaf] - left_sq[leaf];
                    children_total += rq - rs * rs / rn as f64;
                }
            }
            if !valid || !splits_something {
                continue;
            }
            let gain = parent_total - children_total;
            if gain > 0.0 && best.is_none_or(|(_, _, g)| gain > g) {
                best = Some((feature, threshold, gain));
            }
        }
    }
    best
}

/// Fit one oblivious tree to the residuals. Stops early if a level admits
/// no valid positive-gain split.
pub fn fit_oblivious_tree(
    x: &[Vec<f64>],
    residuals: &[f64],
    bins: &HistogramBins,
    depth: usize,
    min_child_samples: usize,
) -> ObliviousTree {
    let n = x.len();
    let mut codes = vec![0usize; n];
    let mut levels = Vec::with_capacity(depth);
    for level in 0..depth {
        let n_leaves = 1usize << level;
        let Some((feature, threshold, _)) =
            best_level(x, residuals, &codes, n_leaves, bins, min_child_samples)
        else {
            break;
        };
        for (code, row) in codes.iter_mut().zip(x) {
            if row[feature] > threshold {
                *code |= 1 << level;
            }
        }
        levels.push((feature, threshold));
    }
    let n_slots = 1usize << levels.len();
    let mut cnt = vec![0usize; n_slots];
    let mut sum = vec![0.0; n_slots];
    for i in 0..n {
        cnt[codes[i]] += 1;
        sum[codes[i]] += residuals[i];
    }
    let leaf_values = (0..n_slots)
        .map(|l| if cnt[l] > 0 { sum[l] / cnt[l] as f64 } else { 0.0 })
        .collect();
    ObliviousTree { levels, leaf_values }
}

/// Residual boosting with oblivious trees.
pub fn fit_oblivious_boosting(x: &[Vec<f64>], y: &[f64], params: CbrParams) -> BoostedModel {
    let n = x.len();
    let d = x.first().map_or(0, |r| r.len());
    let rows: Vec<usize> = (0..n).collect();
    let bins = build_histogram_bins(x, &rows, OBLIVIOUS_MAX_BIN);

    let f0 = y.iter().sum::<f64>() / n as f64;
    let mut pred = vec![f0; n];
    let mut residuals = vec![0.0; n];
    let mut stages = Vec::with_capacity(params.iterations);
    for _ in 0..params.iterations {
        for i in 0..n {
            residuals[i] = y[i] - pred[i];
        }
        let tree = fit_oblivious_tree(x, &residuals, &bins, params.depth, params.min_child_samples);
        for (p, row) in pred.iter_mut().zip(x) {
            *p += params.learning_rate * tree.predict_row(row);
        }
        stages.push((StageTree::Oblivious(tree), params.learning_rate));
    }
    BoostedModel { f0, stages, variant: BoostVariant::Oblivious, n_features: d }
}
