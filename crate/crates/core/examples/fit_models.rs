//! Fit each of the six regressor families on the same synthetic split and
//! compare held-out metrics.
//!
//! Run with: cargo run --example fit_models

use qosbench::cv::{enumerate_grid, fit_on_rows};
use qosbench::dataset::generate_synthetic;
use qosbench::metrics::MetricsTriple;
use qosbench::model::{protocol_grid, ALL_MODEL_KINDS};

fn main() -> qosbench::Result<()> {
    let dataset = generate_synthetic(300, 11)?;
    let train: Vec<usize> = (0..240).collect();
    let test: Vec<usize> = (240..300).collect();

    println!("{:<6} {:>8} {:>8} {:>8}", "model", "mae", "rmse", "r2");
    for kind in ALL_MODEL_KINDS {
        // first point of the protocol grid; selection is the runner's job
        let point = enumerate_grid(&protocol_grid(kind)).remove(0);
        let predictor = fit_on_rows(&dataset, kind, &point, &train, "throughput", 5)?;
        let pred = predictor.predict_rows(&dataset, &test)?;
        let truth = dataset.gather_target("throughput", &test);
        let m = MetricsTriple::compute(&truth, &pred)?;
        println!("{:<6} {:>8.3} {:>8.3} {:>8.3}", kind.name(), m.mae, m.rmse, m.r2);
    }
    Ok(())
}
