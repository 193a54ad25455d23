//! Leaf-wise histogram boosting: every stage repeatedly splits the leaf
//! with the highest SSE reduction, evaluating splits only at bin edges.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::hist::{build_histogram_bins, HistogramBins};
use super::{mean, BoostVariant, BoostedModel, Node, RegressionTree, StageTree};
use crate::seed::mix;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LgbmParams {
    pub learning_rate: f64,
    pub n_estimators: usize,
    pub num_leaves: usize,
    pub colsample_bytree: f64,
    pub max_bin: usize,
}

#[derive(Debug, Clone, Copy)]
struct BinSplit {
    feature: usize,
    threshold: f64,
    gain: f64,
}

/// Best bin-edge split for one set of rows, or None when no cut has
/// positive gain. Ties: lower feature, then lower threshold.
fn best_bin_split(
    x: &[Vec<f64>],
    residuals: &[f64],
    rows: &[usize],
    features: &[usize],
    bins: &HistogramBins,
) -> Option<BinSplit> {
    if rows.len() < 2 {
        return None;
    }
    let total_sum: f64 = rows.iter().map(|&i| residuals[i]).sum();
    let total_sq: f64 = rows.iter().map(|&i| residuals[i] * residuals[i]).sum();
    let total_n = rows.len() as f64;
    let parent_sse = total_sq - total_sum * total_sum / total_n;

    let mut best: Option<BinSplit> = None;
    for &feature in features {
        let nb = bins.bin_count(feature);
        if nb < 2 {
            continue;
        }
        let mut cnt = vec![0usize; nb];
        let mut sum = vec![0.0; nb];
        let mut sq = vec![0.0; nb];
        for &i in rows {
            let b = bins.bin_index(feature, x[i][feature]);
            cnt[b] += 1;
            sum[b] += residuals[i];
            sq[b] += residuals[i] * residuals[i];
        }
        let mut left_n = 0usize;
        let mut left_sum = 0.0;
        let mut left_sq = 0.0;
        for (b, &threshold) in bins.thresholds(feature).iter().enumerate() {
            left_n += cnt[b];
            left_sum += sum[b];
            left_sq += sq[b];
            let right_n = rows.len() - left_n;
            if left_n == 0 || right_n == 0 {
                continue;
            }
            let right_sum = total_sum - left_sum;
            let right_sq = total_sq - left_sq;
            let left_sse = left_sq - left_sum * left_sum / left_n as f64;
            let right_sse = right_sq - right_sum * right_sum / right_n as f64;
            let gain = parent_sse - left_sse - right_sse;
            if gain > 0.0 && best.is_none_or(|s| gain > s.gain) {
                best = Some(BinSplit { feature, threshold, gain });
            }
        }
    }
    best
}

struct GrowingLeaf {
    node_id: usize,
    rows: Vec<usize>,
    split: Option<BinSplit>,
}

fn grow_leafwise(
    x: &[Vec<f64>],
    residuals: &[f64],
    rows: Vec<usize>,
    features: &[usize],
    bins: &HistogramBins,
    num_leaves: usize,
) -> RegressionTree {
    let mut nodes = vec![Node::Leaf(mean(rows.iter().map(|&i| residuals[i]), rows.len()))];
    let split = best_bin_split(x, residuals, &rows, features, bins);
    let mut leaves = vec![GrowingLeaf { node_id: 0, rows, split }];

    while leaves.len() < num_leaves {
        // split the leaf with the highest gain
        let mut chosen: Option<usize> = None;
        for (idx, leaf) in leaves.iter().enumerate() {
            if let Some(split) = &leaf.split {
                if chosen.is_none_or(|c| split.gain > leaves[c].split.unwrap().gain) {
                    chosen = Some(idx);
                }
            }
        }
        let Some(idx) = chosen else { break };
        let leaf = leaves.swap_remove(idx);
        let split = leaf.split.unwrap();
        let (left_rows, right_rows): (Vec<usize>, Vec<usize>) =
            leaf.rows.iter().partition(|&&i| x[i][split.feature] <= split.threshold);

        let left_id = nodes.len();
        nodes.push(Node::Leaf(mean(left_rows.iter().map(|&i| residuals[i]), left_rows.len())));
        let right_id = nodes.len();
        nodes.push(Node::Leaf(mean(right_rows.iter().map(|&i| residuals[i]), right_rows.len())));
        nodes[leaf.node_id] = Node::Internal {
            feature: split.feature,
            threshold: split.threshold,
            left: left_id,
            right: right_id,
        };

        let left_split = best_bin_split(x, residuals, &left_rows, features, bins);
        let right_split = best_bin_split(x, residuals, &right_rows, features, bins);
        leaves.push(GrowingLeaf { node_id: left_id, rows: left_rows, split: left_split });
        leaves.push(GrowingLeaf { node_id: right_id, rows: right_rows, split: right_split });
    }
    RegressionTree { nodes }
}

/// Histogram-binned residual boosting with leaf-wise growth and a
/// per-tree feature subset of ceil(colsample * d) features.
pub fn fit_lgbm_style(x: &[Vec<f64>], y: &[f64], params: LgbmParams, seed: u64) -> BoostedModel {
    let n = x.len();
    let d = x.first().map_or(0, |r| r.len());
    let rows: Vec<usize> = (0..n).collect();
    let bins = build_histogram_bins(x, &rows, params.max_bin);
    let n_sampled = ((params.colsample_bytree * d as f64).ceil() as usize).clamp(1, d);

    let f0 = y.iter().sum::<f64>() / n as f64;
    let mut pred = vec![f0; n];
    let mut residuals = vec![0.0; n];
    let mut stages = Vec::with_capacity(params.n_estimators);
    for t in 0..params.n_estimators {
        let mut features: Vec<usize> = (0..d).collect();
        if n_sampled < d {
            let mut rng = ChaCha8Rng::seed_from_u64(mix(seed, t as u64));
            features.shuffle(&mut rng);
            features.truncate(n_sampled);
            features.sort_unstable();
        }
        for i in 0..n {
            residuals[i] = y[i] - pred[i];
        }
        let tree = grow_leafwise(x, &residuals, rows.clone(), &features, &bins, params.num_leaves);
        for (p, row) in pred.iter_mut().zip(x) {
            *p += params.learning_rate * tree.predict_row(row);
        }
        stages.push((StageTree::Axis(tree), params.learning_rate));
    }
    BoostedModel { f0, stages, variant: BoostVariant::Leafwise, n_features: d }
}
