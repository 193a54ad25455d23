//! Seeded fold planning, grid enumeration, and one inner-loop selection:
//! pick the best random-forest configuration by 3-fold RMSE.
//!
//! Run with: cargo run --example grid_search

use qosbench::cv::{enumerate_grid, inner_select, kfold_split, SelectionMetric};
use qosbench::dataset::generate_synthetic;
use qosbench::model::{protocol_grid, ModelKind};

fn main() -> qosbench::Result<()> {
    let plan = kfold_split(100, 4, 7)?;
    for (i, (train, test)) in plan.folds.iter().enumerate() {
        println!("fold {i}: {} train / {} test, first test rows {:?}", train.len(), test.len(), &test[..4]);
    }

    let grid = protocol_grid(ModelKind::Rf);
    println!("\nrf grid: {} points", grid.len());
    for point in enumerate_grid(&grid).iter().take(5) {
        println!("  {point}");
    }
    println!("  ...");

    let dataset = generate_synthetic(100, 3)?;
    let rows: Vec<usize> = (0..dataset.row_count()).collect();
    let (best, score) = inner_select(
        &dataset,
        &rows,
        ModelKind::Rf,
        &grid,
        3,
        SelectionMetric::Rmse,
        "throughput",
        1,
    )?;
    println!("\nselected {best} with mean inner RMSE {score:.4}");
    Ok(())
}
