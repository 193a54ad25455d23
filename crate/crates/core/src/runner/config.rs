//! Experiment configuration: a single TOML file with explicit keys.
//! Unknown keys are rejected so a config hash pins the whole run.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::cv::{ParamValue, SelectionMetric};
use crate::dataset::ColumnMapping;
use crate::error::{Error, Result};
use crate::model::ModelKind;

/// How the aggregate row of the report is computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Aggregation {
    /// Mean of the per-outer-fold metrics (default).
    PerFoldMean,
    /// Metrics over the concatenated outer-test predictions.
    Pooled,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SyntheticSpec {
    pub rows: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DataConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub synthetic: Option<SyntheticSpec>,
    #[serde(default = "ColumnMapping::canonical")]
    pub columns: ColumnMapping,
    /// Optional seeded row subsample after cleaning, for desk-scale runs.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subsample: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CvConfig {
    #[serde(default = "default_outer")]
    pub outer: usize,
    #[serde(default = "default_inner")]
    pub inner: usize,
    #[serde(default = "default_selection_metric")]
    pub selection_metric: SelectionMetric,
    #[serde(default = "default_aggregation")]
    pub aggregation: Aggregation,
}

fn default_outer() -> usize {
    8
}
fn default_inner() -> usize {
    6
}
fn default_selection_metric() -> SelectionMetric {
    SelectionMetric::Rmse
}
fn default_aggregation() -> Aggregation {
    Aggregation::PerFoldMean
}
fn default_seed() -> u64 {
    42
}

impl Default for CvConfig {
    fn default() -> Self {
        CvConfig {
            outer: default_outer(),
            inner: default_inner(),
            selection_metric: default_selection_metric(),
            aggregation: default_aggregation(),
        }
    }
}

pub type Overrides =
    std::collections::BTreeMap<ModelKind, std::collections::BTreeMap<String, Vec<ParamValue>>>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub data: DataConfig,
    pub models: Vec<ModelKind>,
    pub targets: Vec<String>,
    #[serde(default)]
    pub cv: CvConfig,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
    /// Per-model grid overrides: overrides.<model>.<param> = [values].
    #[serde(default, skip_serializing_if = "Overrides::is_empty")]
    pub overrides: Overrides,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.models.is_empty() {
            return Err(Error::Config("models list is empty".into()));
        }
        if self.targets.is_empty() {
            return Err(Error::Config("targets list is empty".into()));
        }
        for t in &self.targets {
            if t != "throughput" && t != "pdr" {
                return Err(Error::Config(format!("unknown target: {t}")));
            }
        }
        if self.cv.outer < 2 || self.cv.inner < 2 {
            return Err(Error::Config(format!(
                "fold counts must be >= 2 (outer={}, inner={})",
                self.cv.outer, self.cv.inner
            )));
        }
        if self.data.path.is_none() && self.data.synthetic.is_none() {
            return Err(Error::Config("data needs either a path or a synthetic spec".into()));
        }
        if self.data.path.is_some() && self.data.synthetic.is_some() {
            return Err(Error::Config("data path and synthetic spec are mutually exclusive".into()));
        }
        self.data.columns.validate()
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes")
    }

    /// Hash of the canonical serialized config; identical runs share it.
    pub fn hash(&self) -> String {
        let digest = Sha256::digest(self.to_toml().as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}

pub fn parse_config_str(text: &str) -> Result<ExperimentConfig> {
    let config: ExperimentConfig =
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
    config.validate()?;
    Ok(config)
}

pub fn parse_config(path: &Path) -> Result<ExperimentConfig> {
    parse_config_str(&fs::read_to_string(path)?)
}
