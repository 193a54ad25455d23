//! Machine-readable experiment reports: a 3-decimal summary table and a
//! full-precision per-fold detail file.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::cv::NestedCvResult;
use crate::error::{Error, Result};
use crate::metrics::MetricsTriple;
use crate::model::ModelKind;

use super::config::Aggregation;

/// Result of one (model, target) run; failures keep their error text so a
/// partial report can still be flushed.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PairReport {
    pub model: ModelKind,
    pub target: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub result: Option<NestedCvResult>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub wall_secs: f64,
    /// How often each parameter assignment won an outer fold.
    pub selected_histogram: BTreeMap<String, usize>,
}

impl PairReport {
    /// The metrics row this pair contributes to the summary, under the
    /// report's aggregation mode.
    pub fn summary_metrics(&self, aggregation: Aggregation) -> Option<MetricsTriple> {
        self.result.as_ref().map(|r| match aggregation {
            Aggregation::PerFoldMean => r.mean,
            Aggregation::Pooled => r.pooled,
        })
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReportDocument {
    pub seed: u64,
    pub config_hash: String,
    pub aggregation: Aggregation,
    /// Serialized config this report was produced from.
    pub config_toml: String,
    pub pairs: Vec<PairReport>,
}

const METRIC_NAMES: [&str; 3] = ["mae", "rmse", "r2"];

/// Format at 3 decimals (round-half-even, the float formatting default).
pub fn format_summary_value(v: f64) -> String {
    format!("{v:.3}")
}

/// Write `summary.csv` (one row per model/target/metric, 3 decimals) and
/// `detail.json` (full precision, per-fold records). Returns the paths.
pub fn emit_report(report: &ReportDocument, directory: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(directory)?;
    let summary_path = directory.join("summary.csv");
    let mut summary = String::from("model,target,metric,value\n");
    for pair in &report.pairs {
        match pair.summary_metrics(report.aggregation) {
            Some(metrics) => {
                for metric in METRIC_NAMES {
                    let value = metrics.get(metric).unwrap();
                    summary.push_str(&format!(
                        "{},{},{},{}\n",
                        pair.model.name(),
                        pair.target,
                        metric,
                        format_summary_value(value)
                    ));
                }
            }
            None => {
                summary.push_str(&format!(
                    "{},{},error,\"{}\"\n",
                    pair.model.name(),
                    pair.target,
                    pair.error.as_deref().unwrap_or("failed")
                ));
            }
        }
    }
    fs::write(&summary_path, summary)?;

    let detail_path = directory.join("detail.json");
    let json = serde_json::to_string_pretty(report)
        .map_err(|e| Error::Config(format!("report serialization: {e}")))?;
    fs::write(&detail_path, json)?;
    Ok(vec![summary_path, detail_path])
}

pub fn load_report(path: &Path) -> Result<ReportDocument> {
    let text = fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| Error::Config(format!("detail file: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn summary_rounding_is_half_even() {
        assert_eq!(format_summary_value(0.6254), "0.625");
        assert_eq!(format_summary_value(0.0625), "0.062"); // exact tie, to even
        assert_eq!(format_summary_value(0.4375), "0.438"); // exact tie, to even
        assert_eq!(format_summary_value(-1.2346), "-1.235");
    }
}
