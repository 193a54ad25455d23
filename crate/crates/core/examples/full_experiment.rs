//! A complete configured experiment: synthetic data, two model families,
//! both targets, report CSV/JSON and the five SVG charts.
//!
//! Run with: cargo run --example full_experiment

use qosbench::runner::{emit_charts, emit_report, parse_config_str, run_experiment};

const CONFIG: &str = r#"
    models = ["rf", "gbr", "svr", "ann", "lgbm", "cbr"]
    targets = ["throughput", "pdr"]
    seed = 42

    [data]
    synthetic = { rows = 150, seed = 8 }

    [cv]
    outer = 3
    inner = 2

    # desk-scale grids; drop the overrides to run the full protocol grids
    [overrides.rf]
    n_estimators = [20]
    min_samples_leaf = [2, 4]
    [overrides.gbr]
    n_estimators = [50]
    max_depth = [3]
    learning_rate = [0.09, 0.3]
    [overrides.svr]
    c = [1.0, 3.0]
    epsilon = [0.3]
    [overrides.ann]
    hidden_size = [5]
    max_iter = [100, 200]
    [overrides.lgbm]
    learning_rate = [0.3]
    n_estimators = [20, 40]
    num_leaves = [10]
    colsample_bytree = [0.9]
    max_bin = [75]
    [overrides.cbr]
    depth = [4]
    min_child_samples = [1]
    learning_rate = [0.5]
    iterations = [20, 40]
"#;

fn main() -> qosbench::Result<()> {
    let config = parse_config_str(CONFIG)?;
    let report = run_experiment(&config)?;

    println!("config hash {}", &report.config_hash[..12]);
    for pair in &report.pairs {
        let m = pair.summary_metrics(report.aggregation).expect("pair succeeded");
        println!(
            "{:<5} {:<10} mae {:.3}  rmse {:.3}  r2 {:+.3}  ({:.1}s)",
            pair.model.name(),
            pair.target,
            m.mae,
            m.rmse,
            m.r2,
            pair.wall_secs
        );
    }

    let out = std::env::temp_dir().join("qosbench-full-experiment");
    for path in emit_report(&report, &out)? {
        println!("wrote {}", path.display());
    }
    for path in emit_charts(&report, &out)? {
        println!("wrote {}", path.display());
    }
    Ok(())
}
