//! Leakage-free nested cross-validation for one model family: per outer
//! fold, hyperparameters are chosen by inner CV on the outer-train rows
//! only, then the winner is refit and scored on the outer-test rows.
//!
//! Run with: cargo run --example nested_cv

use qosbench::cv::{nested_cv, ParamGrid, ParamValue, SelectionMetric};
use qosbench::dataset::generate_synthetic;
use qosbench::model::ModelKind;

fn main() -> qosbench::Result<()> {
    let dataset = generate_synthetic(240, 17)?;
    let ints = |v: &[i64]| v.iter().map(|&x| ParamValue::Int(x)).collect::<Vec<_>>();
    let grid = ParamGrid::new(vec![
        ("n_estimators".into(), ints(&[20, 50])),
        ("min_samples_leaf".into(), ints(&[2, 4])),
    ])?;

    let result = nested_cv(
        &dataset,
        ModelKind::Rf,
        &grid,
        4,
        3,
        "throughput",
        42,
        SelectionMetric::Rmse,
    )?;

    for fold in &result.folds {
        println!(
            "fold {}: selected [{}]  mae {:.3}  rmse {:.3}  r2 {:.3}",
            fold.fold, fold.selected, fold.metrics.mae, fold.metrics.rmse, fold.metrics.r2
        );
    }
    println!(
        "\nmean   mae {:.3}  rmse {:.3}  r2 {:.3}",
        result.mean.mae, result.mean.rmse, result.mean.r2
    );
    println!(
        "std    mae {:.3}  rmse {:.3}  r2 {:.3}",
        result.std.mae, result.std.rmse, result.std.r2
    );
    println!(
        "pooled mae {:.3}  rmse {:.3}  r2 {:.3}",
        result.pooled.mae, result.pooled.rmse, result.pooled.r2
    );
    Ok(())
}
