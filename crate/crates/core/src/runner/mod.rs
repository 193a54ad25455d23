//! Configuration-driven experiment execution.

pub mod charts;
pub mod config;
pub mod report;

pub use charts::emit_charts;
pub use config::{parse_config, parse_config_str, Aggregation, ExperimentConfig};
pub use report::{emit_report, load_report, PairReport, ReportDocument};

use std::collections::BTreeMap;
use std::path::Path;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::cv::{nested_cv, ParamGrid};
use crate::dataset::{clean, generate_synthetic, load_table, Dataset};
use crate::error::Result;
use crate::model::{protocol_grid, ModelKind};
use crate::seed::mix;

/// Load (or generate) and clean the configured dataset.
pub fn load_dataset(config: &ExperimentConfig) -> Result<Dataset> {
    let dataset = match (&config.data.path, &config.data.synthetic) {
        (Some(path), _) => clean(&load_table(Path::new(path), &config.data.columns)?)?,
        (None, Some(spec)) => generate_synthetic(spec.rows, spec.seed)?,
        (None, None) => unreachable!("validated config"),
    };
    match config.data.subsample {
        Some(n) if n < dataset.row_count() => {
            let mut rows: Vec<usize> = (0..dataset.row_count()).collect();
            let mut rng = ChaCha8Rng::seed_from_u64(mix(config.seed, 0x5355_4253));
            rows.shuffle(&mut rng);
            rows.truncate(n);
            rows.sort_unstable();
            let features = dataset.gather_features(&rows);
            let targets = dataset
                .target_names()
                .map(|t| (t.to_string(), dataset.gather_target(t, &rows)))
                .collect();
            Dataset::new(features, targets)
        }
        _ => Ok(dataset),
    }
}

/// The protocol grid for a model with any configured overrides applied.
pub fn build_grid(config: &ExperimentConfig, kind: ModelKind) -> Result<ParamGrid> {
    let mut grid = protocol_grid(kind);
    if let Some(overrides) = config.overrides.get(&kind) {
        for (name, values) in overrides {
            grid.override_dimension(name, values.clone())?;
        }
    }
    Ok(grid)
}

/// Run nested CV for every configured (model, target) pair. A failing
/// pair is recorded with its error; the rest of the report still forms.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ReportDocument> {
    config.validate()?;
    let dataset = load_dataset(config)?;
    let mut pairs = Vec::new();
    for &model in &config.models {
        let grid = build_grid(config, model)?;
        for target in &config.targets {
            let started = Instant::now();
            let outcome = nested_cv(
                &dataset,
                model,
                &grid,
                config.cv.outer,
                config.cv.inner,
                target,
                config.seed,
                config.cv.selection_metric,
            );
            let wall_secs = started.elapsed().as_secs_f64();
            let pair = match outcome {
                Ok(result) => {
                    let mut histogram: BTreeMap<String, usize> = BTreeMap::new();
                    for fold in &result.folds {
                        *histogram.entry(fold.selected.to_string()).or_insert(0) += 1;
                    }
                    PairReport {
                        model,
                        target: target.clone(),
                        result: Some(result),
                        error: None,
                        wall_secs,
                        selected_histogram: histogram,
                    }
                }
                Err(e) => PairReport {
                    model,
                    target: target.clone(),
                    result: None,
                    error: Some(e.to_string()),
                    wall_secs,
                    selected_histogram: BTreeMap::new(),
                },
            };
            pairs.push(pair);
        }
    }
    Ok(ReportDocument {
        seed: config.seed,
        config_hash: config.hash(),
        aggregation: config.cv.aggregation,
        config_toml: config.to_toml(),
        pairs,
    })
}
