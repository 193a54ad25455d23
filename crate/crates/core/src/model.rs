//! Model-family dispatch: the six regressors behind one fit/predict
//! surface, plus their hyperparameter grids.

use serde::{Deserialize, Serialize};

use crate::cv::{ParamGrid, ParamPoint, ParamValue};
use crate::error::{Error, Result};
use crate::mlp::{fit_mlp, MlpModel, MlpParams};
use crate::svr::{fit_svr, predict_svr, GammaPolicy, SvrModel, SvrParams};
use crate::tree::{
    fit_gbr, fit_lgbm_style, fit_oblivious_boosting, fit_random_forest, BoostedModel, CbrParams,
    ForestModel, GbrParams, LgbmParams, RfParams,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Cbr,
    Svr,
    Rf,
    Gbr,
    Ann,
    Lgbm,
}

pub const ALL_MODEL_KINDS: [ModelKind; 6] = [
    ModelKind::Cbr,
    ModelKind::Svr,
    ModelKind::Rf,
    ModelKind::Gbr,
    ModelKind::Ann,
    ModelKind::Lgbm,
];

impl ModelKind {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "cbr" => Ok(ModelKind::Cbr),
            "svr" => Ok(ModelKind::Svr),
            "rf" => Ok(ModelKind::Rf),
            "gbr" => Ok(ModelKind::Gbr),
            "ann" => Ok(ModelKind::Ann),
            "lgbm" => Ok(ModelKind::Lgbm),
            other => Err(Error::Config(format!("unknown model kind: {other}"))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            ModelKind::Cbr => "cbr",
            ModelKind::Svr => "svr",
            ModelKind::Rf => "rf",
            ModelKind::Gbr => "gbr",
            ModelKind::Ann => "ann",
            ModelKind::Lgbm => "lgbm",
        }
    }

    /// Only the ANN and SVR require zero-mean normalization.
    pub fn needs_scaling(&self) -> bool {
        matches!(self, ModelKind::Ann | ModelKind::Svr)
    }
}

/// The hyperparameter grid the benchmarking protocol evaluates for each
/// model family.
pub fn protocol_grid(kind: ModelKind) -> ParamGrid {
    let ints = |vals: &[i64]| vals.iter().map(|&v| ParamValue::Int(v)).collect::<Vec<_>>();
    let floats = |vals: &[f64]| vals.iter().map(|&v| ParamValue::Float(v)).collect::<Vec<_>>();
    let dims: Vec<(&str, Vec<ParamValue>)> = match kind {
        ModelKind::Cbr => vec![
            ("depth", ints(&[4, 5, 7, 10])),
            ("min_child_samples", ints(&[1, 4, 8, 16])),
            ("learning_rate", floats(&[0.01, 0.03, 0.09, 0.1, 0.5, 0.9])),
            ("iterations", ints(&[150, 200])),
        ],
        ModelKind::Svr => vec![
            ("c", floats(&[1.0, 3.0])),
            ("epsilon", floats(&[0.1, 0.3])),
        ],
        ModelKind::Rf => vec![
            ("n_estimators", ints(&[50, 100, 200])),
            ("min_samples_leaf", ints(&[2, 3, 4, 6])),
        ],
        ModelKind::Gbr => vec![
            ("n_estimators", ints(&[1, 10, 50, 100, 300, 500, 700])),
            ("max_depth", ints(&[1, 3, 5, 7])),
            ("learning_rate", floats(&[0.01, 0.03, 0.09, 0.3])),
        ],
        ModelKind::Ann => vec![
            ("hidden_size", ints(&[5, 10, 25])),
            ("max_iter", ints(&[500, 1500, 2500])),
        ],
        ModelKind::Lgbm => vec![
            ("learning_rate", floats(&[0.003, 0.006, 0.009, 0.01, 0.03, 0.06, 0.09, 0.3, 0.6])),
            ("n_estimators", ints(&[20, 40, 80, 100])),
            ("num_leaves", ints(&[10, 15, 20, 25])),
            ("colsample_bytree", floats(&[0.7, 0.8, 0.9])),
            ("max_bin", ints(&[75, 150, 255, 510])),
        ],
    };
    ParamGrid::new(dims.into_iter().map(|(n, v)| (n.to_string(), v)).collect()).unwrap()
}

/// A fitted model of any family.
#[derive(Debug, Clone)]
pub enum TrainedModel {
    Forest(ForestModel),
    Boosted(BoostedModel),
    Svr(SvrModel),
    Mlp(MlpModel),
}

impl TrainedModel {
    pub fn predict(&self, x: &[Vec<f64>]) -> Result<Vec<f64>> {
        match self {
            TrainedModel::Forest(m) => m.predict(x),
            TrainedModel::Boosted(m) => m.predict(x),
            TrainedModel::Svr(m) => predict_svr(m, x),
            TrainedModel::Mlp(m) => m.predict(x),
        }
    }
}

/// Fit one model. `x` must already be scaled for the families that need it.
pub fn fit_model(
    kind: ModelKind,
    x: &[Vec<f64>],
    y: &[f64],
    point: &ParamPoint,
    seed: u64,
) -> Result<TrainedModel> {
    match kind {
        ModelKind::Rf => {
            let params = RfParams {
                n_estimators: point.get_usize("n_estimators")?,
                min_samples_leaf: point.get_usize("min_samples_leaf")?,
            };
            Ok(TrainedModel::Forest(fit_random_forest(x, y, params, seed)))
        }
        ModelKind::Gbr => {
            let params = GbrParams {
                n_estimators: point.get_usize("n_estimators")?,
                max_depth: point.get_usize("max_depth")?,
                learning_rate: point.get_f64("learning_rate")?,
            };
            Ok(TrainedModel::Boosted(fit_gbr(x, y, params)))
        }
        ModelKind::Lgbm => {
            let params = LgbmParams {
                learning_rate: point.get_f64("learning_rate")?,
                n_estimators: point.get_usize("n_estimators")?,
                num_leaves: point.get_usize("num_leaves")?,
                colsample_bytree: point.get_f64("colsample_bytree")?,
                max_bin: point.get_usize("max_bin")?,
            };
            Ok(TrainedModel::Boosted(fit_lgbm_style(x, y, params, seed)))
        }
        ModelKind::Cbr => {
            let params = CbrParams {
                depth: point.get_usize("depth")?,
                min_child_samples: point.get_usize("min_child_samples")?,
                learning_rate: point.get_f64("learning_rate")?,
                iterations: point.get_usize("iterations")?,
            };
            Ok(TrainedModel::Boosted(fit_oblivious_boosting(x, y, params)))
        }
        ModelKind::Svr => {
            let params = SvrParams { c: point.get_f64("c")?, epsilon: point.get_f64("epsilon")? };
            Ok(TrainedModel::Svr(fit_svr(x, y, params, GammaPolicy::Scale, seed)?))
        }
        ModelKind::Ann => {
            let params = MlpParams {
                hidden_size: point.get_usize("hidden_size")?,
                max_iter: point.get_usize("max_iter")?,
            };
            Ok(TrainedModel::Mlp(fit_mlp(x, y, params, seed)?))
        }
    }
}
