//! Seeded K-fold planning, grid enumeration, inner-loop model selection
//! and the nested cross-validation orchestrator.
//!
//! Leakage contract: inner selection and refitting read only the outer
//! training rows; outer test rows are touched for the first time when the
//! refit model is evaluated. The dataset's row spy verifies this.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::{Dataset, Scaler};
use crate::error::{Error, Result};
use crate::metrics::{self, MetricsTriple};
use crate::model::{fit_model, ModelKind, TrainedModel};
use crate::seed::mix;

/// Seed stream separating refits from inner-loop work.
const REFIT_STREAM: u64 = 0x5246_4954;

/// Which metric drives inner-loop selection (lower is better).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SelectionMetric {
    Rmse,
    Mae,
}

impl SelectionMetric {
    fn score(&self, y: &[f64], yhat: &[f64]) -> Result<f64> {
        match self {
            SelectionMetric::Rmse => metrics::rmse(y, yhat),
            SelectionMetric::Mae => metrics::mae(y, yhat),
        }
    }
}

/// Seeded, disjoint, exhaustive partition into K train/test pairs.
#[derive(Debug, Clone)]
pub struct FoldPlan {
    pub k: usize,
    pub folds: Vec<(Vec<usize>, Vec<usize>)>,
    pub seed: u64,
}

/// Shuffle 0..n with the seeded permutation, then cut into k contiguous
/// blocks; the ceil(n/k)-sized blocks come first.
pub fn kfold_split(n: usize, k: usize, seed: u64) -> Result<FoldPlan> {
    if k < 2 || k > n {
        return Err(Error::InvalidFoldCount { n, k });
    }
    let mut order: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    order.shuffle(&mut rng);

    let base = n / k;
    let remainder = n % k;
    let mut folds = Vec::with_capacity(k);
    let mut start = 0;
    for fold in 0..k {
        let size = base + usize::from(fold < remainder);
        let test: Vec<usize> = order[start..start + size].to_vec();
        let train: Vec<usize> =
            order[..start].iter().chain(&order[start + size..]).copied().collect();
        folds.push((train, test));
        start += size;
    }
    Ok(FoldPlan { k, folds, seed })
}

/// One discrete hyperparameter value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ParamValue {
    Int(i64),
    Float(f64),
}

impl std::fmt::Display for ParamValue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ParamValue::Int(v) => write!(f, "{v}"),
            ParamValue::Float(v) => write!(f, "{v}"),
        }
    }
}

/// Named discrete dimensions, in evaluation order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamGrid {
    dimensions: Vec<(String, Vec<ParamValue>)>,
}

impl ParamGrid {
    pub fn new(dimensions: Vec<(String, Vec<ParamValue>)>) -> Result<Self> {
        let mut seen = std::collections::HashSet::new();
        for (name, values) in &dimensions {
            if !seen.insert(name.as_str()) {
                return Err(Error::InvalidParam(format!("duplicate grid dimension: {name}")));
            }
            if values.is_empty() {
                return Err(Error::InvalidParam(format!("empty value list for: {name}")));
            }
        }
        Ok(ParamGrid { dimensions })
    }

    pub fn dimensions(&self) -> &[(String, Vec<ParamValue>)] {
        &self.dimensions
    }

    pub fn len(&self) -> usize {
        self.dimensions.iter().map(|(_, v)| v.len()).product()
    }

    pub fn is_empty(&self) -> bool {
        self.dimensions.is_empty()
    }

    /// Replace one dimension's values, keeping its position.
    pub fn override_dimension(&mut self, name: &str, values: Vec<ParamValue>) -> Result<()> {
        if values.is_empty() {
            return Err(Error::InvalidParam(format!("empty override for: {name}")));
        }
        match self.dimensions.iter_mut().find(|(n, _)| n == name) {
            Some((_, v)) => {
                *v = values;
                Ok(())
            }
            None => Err(Error::InvalidParam(format!("unknown grid dimension: {name}"))),
        }
    }
}

/// One concrete assignment, one value per grid dimension.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamPoint {
    pub values: Vec<(String, ParamValue)>,
}

impl ParamPoint {
    pub fn get(&self, name: &str) -> Option<ParamValue> {
        self.values.iter().find(|(n, _)| n == name).map(|(_, v)| *v)
    }

    pub fn get_usize(&self, name: &str) -> Result<usize> {
        match self.get(name) {
            Some(ParamValue::Int(v)) if v >= 0 => Ok(v as usize),
            Some(other) => Err(Error::InvalidParam(format!("{name}: expected count, got {other}"))),
            None => Err(Error::InvalidParam(format!("missing parameter: {name}"))),
        }
    }

    pub fn get_f64(&self, name: &str) -> Result<f64> {
        match self.get(name) {
            Some(ParamValue::Float(v)) => Ok(v),
            Some(ParamValue::Int(v)) => Ok(v as f64),
            None => Err(Error::InvalidParam(format!("missing parameter: {name}"))),
        }
    }
}

impl std::fmt::Display for ParamPoint {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> =
            self.values.iter().map(|(n, v)| format!("{n}={v}")).collect();
        write!(f, "{}", parts.join(","))
    }
}

/// All grid points in lexicographic order: the first dimension varies
/// slowest.
pub fn enumerate_grid(grid: &ParamGrid) -> Vec<ParamPoint> {
    let dims = grid.dimensions();
    let mut points = vec![ParamPoint { values: Vec::new() }];
    for (name, values) in dims {
        let mut next = Vec::with_capacity(points.len() * values.len());
        for base in &points {
            for value in values {
                let mut point = base.clone();
                point.values.push((name.clone(), *value));
                next.push(point);
            }
        }
        points = next;
    }
    points
}

/// A refit model plus the scaler it was trained under (if any).
pub struct FittedPredictor {
    pub model: TrainedModel,
    pub scaler: Option<Scaler>,
}

impl FittedPredictor {
    pub fn predict_rows(&self, dataset: &Dataset, rows: &[usize]) -> Result<Vec<f64>> {
        let mut x = dataset.gather_features(rows);
        if let Some(scaler) = &self.scaler {
            x = scaler.apply(&x)?;
        }
        self.model.predict(&x)
    }
}

/// Fit one configuration on the given rows. Scaling (where the family
/// requires it) is fitted on exactly these rows.
pub fn fit_on_rows(
    dataset: &Dataset,
    kind: ModelKind,
    point: &ParamPoint,
    rows: &[usize],
    target: &str,
    seed: u64,
) -> Result<FittedPredictor> {
    let mut x = dataset.gather_features(rows);
    let y = dataset.gather_target(target, rows);
    let scaler = if kind.needs_scaling() {
        let scaler = Scaler::fit(&x)?;
        x = scaler.apply(&x)?;
        Some(scaler)
    } else {
        None
    };
    let model = fit_model(kind, &x, &y, point, seed)?;
    Ok(FittedPredictor { model, scaler })
}

/// Inner-loop model selection: k_inner-fold CV restricted to the given
/// training rows, scored by the selection metric on the target; returns
/// the point with the lowest mean score, ties broken by enumeration order.
#[allow(clippy::too_many_arguments)]
pub fn inner_select(
    dataset: &Dataset,
    train_indices: &[usize],
    kind: ModelKind,
    grid: &ParamGrid,
    k_inner: usize,
    selection_metric: SelectionMetric,
    target: &str,
    seed: u64,
) -> Result<(ParamPoint, f64)> {
    let points = enumerate_grid(grid);
    if points.is_empty() {
        return Err(Error::InvalidParam("empty grid".into()));
    }
    let plan = kfold_split(train_indices.len(), k_inner, seed)?;

    let scores: Vec<Result<f64>> = points
        .par_iter()
        .enumerate()
        .map(|(point_idx, point)| {
            let mut total = 0.0;
            for (fold, (train_pos, test_pos)) in plan.folds.iter().enumerate() {
                let train: Vec<usize> = train_pos.iter().map(|&p| train_indices[p]).collect();
                let test: Vec<usize> = test_pos.iter().map(|&p| train_indices[p]).collect();
                let fit_seed = mix(mix(seed, point_idx as u64), fold as u64);
                let predictor = fit_on_rows(dataset, kind, point, &train, target, fit_seed)?;
                let pred = predictor.predict_rows(dataset, &test)?;
                let truth = dataset.gather_target(target, &test);
                total += selection_metric.score(&truth, &pred)?;
            }
            Ok(total / plan.k as f64)
        })
        .collect();

    let mut best: Option<(usize, f64)> = None;
    for (idx, score) in scores.into_iter().enumerate() {
        let score = score?;
        if best.is_none_or(|(_, s)| score < s) {
            best = Some((idx, score));
        }
    }
    let (idx, score) = best.unwrap();
    Ok((points[idx].clone(), score))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FoldOutcome {
    pub fold: usize,
    pub selected: ParamPoint,
    pub metrics: MetricsTriple,
}

/// Per-outer-fold outcomes plus fold-wise mean/std and a pooled
/// computation over the concatenated outer-test predictions.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NestedCvResult {
    pub folds: Vec<FoldOutcome>,
    pub mean: MetricsTriple,
    pub std: MetricsTriple,
    pub pooled: MetricsTriple,
}

fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    (mean, var.sqrt())
}

fn aggregate(folds: &[FoldOutcome]) -> (MetricsTriple, MetricsTriple) {
    let collect = |f: fn(&MetricsTriple) -> f64| -> Vec<f64> {
        folds.iter().map(|o| f(&o.metrics)).collect()
    };
    let (mae_m, mae_s) = mean_std(&collect(|m| m.mae));
    let (rmse_m, rmse_s) = mean_std(&collect(|m| m.rmse));
    let (r2_m, r2_s) = mean_std(&collect(|m| m.r2));
    (
        MetricsTriple { mae: mae_m, rmse: rmse_m, r2: r2_m },
        MetricsTriple { mae: mae_s, rmse: rmse_s, r2: r2_s },
    )
}

/// Evaluate one fixed configuration under plain K-fold CV. Uses the same
/// fold plan and refit seeds as [`nested_cv`], so a one-point grid gives
/// bit-identical per-fold metrics.
pub fn kfold_evaluate(
    dataset: &Dataset,
    kind: ModelKind,
    point: &ParamPoint,
    k: usize,
    target: &str,
    seed: u64,
) -> Result<Vec<MetricsTriple>> {
    let plan = kfold_split(dataset.row_count(), k, seed)?;
    plan.folds
        .iter()
        .enumerate()
        .map(|(fold, (train, test))| {
            let fit_seed = mix(mix(seed, fold as u64), REFIT_STREAM);
            let predictor = fit_on_rows(dataset, kind, point, train, target, fit_seed)?;
            let pred = predictor.predict_rows(dataset, test)?;
            let truth = dataset.gather_target(target, test);
            MetricsTriple::compute(&truth, &pred)
        })
        .collect()
}

/// Nested cross-validation: per outer fold, select hyperparameters by
/// inner CV on the outer-train rows, refit the winner on all outer-train
/// rows, and score on the outer-test rows.
#[allow(clippy::too_many_arguments)]
pub fn nested_cv(
    dataset: &Dataset,
    kind: ModelKind,
    grid: &ParamGrid,
    k_outer: usize,
    k_inner: usize,
    target: &str,
    seed: u64,
    selection_metric: SelectionMetric,
) -> Result<NestedCvResult> {
    let plan = kfold_split(dataset.row_count(), k_outer, seed)?;

    let per_fold: Vec<Result<(FoldOutcome, Vec<f64>, Vec<f64>)>> = plan
        .folds
        .par_iter()
        .enumerate()
        .map(|(fold, (train, test))| {
            let inner_seed = mix(seed, fold as u64);
            let (selected, _) = inner_select(
                dataset,
                train,
                kind,
                grid,
                k_inner,
                selection_metric,
                target,
                inner_seed,
            )?;
            let fit_seed = mix(inner_seed, REFIT_STREAM);
            let predictor = fit_on_rows(dataset, kind, &selected, train, target, fit_seed)?;
            let pred = predictor.predict_rows(dataset, test)?;
            let truth = dataset.gather_target(target, test);
            let metrics = MetricsTriple::compute(&truth, &pred)?;
            Ok((FoldOutcome { fold, selected, metrics }, truth, pred))
        })
        .collect();

    let mut folds = Vec::with_capacity(k_outer);
    let mut all_truth = Vec::new();
    let mut all_pred = Vec::new();
    for item in per_fold {
        let (outcome, truth, pred) = item?;
        folds.push(outcome);
        all_truth.extend(truth);
        all_pred.extend(pred);
    }
    let (mean, std) = aggregate(&folds);
    let pooled = MetricsTriple::compute(&all_truth, &all_pred)?;
    Ok(NestedCvResult { folds, mean, std, pooled })
}
