//! CART machinery: exhaustive variance-reduction split search and greedy
//! tree growing. Shared by the random forest and depth-wise boosting.

use super::mean;

/// A chosen split: rows with `feature <= threshold` go left.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Split {
    pub feature: usize,
    pub threshold: f64,
    pub gain: f64,
}

/// Find the split maximizing SSE reduction over all candidate features and
/// all midpoints between consecutive distinct sorted values. Both children
/// must keep at least `min_samples_leaf` rows. Ties go to the lower feature
/// index, then the lower threshold. Returns `None` when no legal split has
/// positive gain.
pub fn best_split(
    x: &[Vec<f64>],
    y: &[f64],
    rows: &[usize],
    candidate_features: &[usize],
    min_samples_leaf: usize,
) -> Option<Split> {
    let n = rows.len();
    if n < 2 * min_samples_leaf.max(1) {
        return None;
    }
    let sum: f64 = rows.iter().map(|&i| y[i]).sum();
    let sum_sq: f64 = rows.iter().map(|&i| y[i] * y[i]).sum();
    let parent_sse = sum_sq - sum * sum / n as f64;

    let mut best: Option<Split> = None;
    let mut pairs: Vec<(f64, f64)> = Vec::with_capacity(n);
    for &feature in candidate_features {
        pairs.clear();
        pairs.extend(rows.iter().map(|&i| (x[i][feature], y[i])));
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));

        let mut left_sum = 0.0;
        let mut left_sq = 0.0;
        for (pos, &(value, target)) in pairs.iter().enumerate().take(n - 1) {
            left_sum += target;
            left_sq += target * target;
            let next = pairs[pos + 1].0;
            if value == next {
                continue;
            }
            let left_n = pos + 1;
            let right_n = n - left_n;
            if left_n < min_samples_leaf || right_n < min_samples_leaf {
                continue;
            }
            let right_sum = sum - left_sum;
            let right_sq = sum_sq - left_sq;
            let left_sse = left_sq - left_sum * left_sum / left_n as f64;
            let right_sse = right_sq - right_sum * right_sum / right_n as f64;
            let gain = parent_sse - left_sse - right_sse;
            if gain > 0.0 && best.as_ref().is_none_or(|b| gain > b.gain) {
                best = Some(Split { feature, threshold: (value + next) / 2.0, gain });
            }
        }
    }
    best
}

#[derive(Debug, Clone)]
pub enum Node {
    Internal { feature: usize, threshold: f64, left: usize, right: usize },
    Leaf(f64),
}

/// Arena-allocated binary regression tree. Routing rule: go left iff
/// `feature <= threshold`.
#[derive(Debug, Clone)]
pub struct RegressionTree {
    pub nodes: Vec<Node>,
}

impl RegressionTree {
    pub fn leaf(value: f64) -> Self {
        RegressionTree { nodes: vec![Node::Leaf(value)] }
    }

    pub fn predict_row(&self, row: &[f64]) -> f64 {
        let mut at = 0;
        loop {
            match &self.nodes[at] {
                Node::Leaf(v) => return *v,
                Node::Internal { feature, threshold, left, right } => {
                    at = if row[*feature] <= *threshold { *left } else { *right };
                }
            }
        }
    }

    pub fn leaf_count(&self) -> usize {
        self.nodes.iter().filter(|n| matches!(n, Node::Leaf(_))).count()
    }
}

/// Grow a tree by recursive greedy splitting. `max_depth = None` means
/// unlimited. Leaves predict the mean target of their rows.
pub fn fit_tree(
    x: &[Vec<f64>],
    y: &[f64],
    rows: &[usize],
    max_depth: Option<usize>,
    min_samples_leaf: usize,
    candidate_features: &[usize],
) -> RegressionTree {
    let mut nodes = Vec::new();
    grow(x, y, rows, 0, max_depth, min_samples_leaf, candidate_features, &mut nodes);
    RegressionTree { nodes }
}

#[allow(clippy::too_many_arguments)]
fn grow(
    x: &[Vec<f64>],
    y: &[f64],
    rows: &[usize],
    depth: usize,
    max_depth: Option<usize>,
    min_samples_leaf: usize,
    candidate_features: &[usize],
    nodes: &mut Vec<Node>,
) -> usize {
    let leaf_value = mean(rows.iter().map(|&i| y[i]), rows.len());
    if max_depth.is_some_and(|d| depth >= d) {
        nodes.push(Node::Leaf(leaf_value));
        return nodes.len() - 1;
    }
    let Some(split) = best_split(x, y, rows, candidate_features, min_samples_leaf) else {
        nodes.push(Node::Leaf(leaf_value));
        return nodes.len() - 1;
    };
    let (left_rows, right_rows): (Vec<usize>, Vec<usize>) =
        rows.iter().partition(|&&i| x[i][split.feature] <= split.threshold);
    let id = nodes.len();
    nodes.push(Node::Leaf(0.0)); // placeholder until children exist
    let left = grow(x, y, &left_rows, depth + 1, max_depth, min_samples_leaf, candidate_features, nodes);
    let right = grow(x, y, &right_rows, depth + 1, max_depth, min_samples_leaf, candidate_features, nodes);
    nodes[id] = Node::Internal { feature: split.feature, threshold: split.threshold, left, right };
    id
}
