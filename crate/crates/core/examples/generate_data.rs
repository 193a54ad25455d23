//! Generate a synthetic QoS table, write it to CSV, reload it through the
//! cleaning path, and show fold-local zero-mean scaling.
//!
//! Run with: cargo run --example generate_data

use qosbench::dataset::{clean, fit_scaler, generate_synthetic, load_table, write_csv, ColumnMapping};

fn main() -> qosbench::Result<()> {
    let dataset = generate_synthetic(200, 42)?;
    println!("generated {} rows x {} features", dataset.row_count(), dataset.feature_count());

    let dir = std::env::temp_dir().join("qosbench-generate-data");
    std::fs::create_dir_all(&dir)?;
    let path = dir.join("synthetic.csv");
    write_csv(&dataset, &path)?;
    println!("wrote {}", path.display());

    // reload through the same path a real export would take
    let raw = load_table(&path, &ColumnMapping::canonical())?;
    let reloaded = clean(&raw)?;
    println!("reloaded {} rows after cleaning (missing + duplicate removal)", reloaded.row_count());

    // scaling is always fitted on a training subset, never the full data
    let train_rows: Vec<usize> = (0..150).collect();
    let scaler = fit_scaler(&reloaded, &train_rows)?;
    let scaled = scaler.apply(&reloaded.gather_features(&train_rows))?;
    let d = scaled[0].len();
    let n = scaled.len() as f64;
    for j in 0..d {
        let mean: f64 = scaled.iter().map(|r| r[j]).sum::<f64>() / n;
        let var: f64 = scaled.iter().map(|r| (r[j] - mean) * (r[j] - mean)).sum::<f64>() / n;
        println!("scaled feature {j}: mean {mean:+.2e}, std {:.6}", var.sqrt());
    }
    Ok(())
}
