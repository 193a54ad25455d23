//! Dataset ingestion, cleaning, scaling and synthetic generation.
//!
//! Input files are comma-separated text with a header line. The four
//! feature columns (MCS index, distance to base station, SINR, UDP packet
//! size) and the two target columns (throughput, PDR) are located by a
//! [`ColumnMapping`], since export column names vary.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fs;
use std::io::Write;
use std::path::Path;
use std::sync::{Arc, Mutex};

use rand::Rng as _;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const FEATURE_ROLES: [&str; 4] = ["mcs", "distance", "sinr", "packet_size"];
pub const TARGET_ROLES: [&str; 2] = ["throughput", "pdr"];

/// Floor for standard deviations so constant features scale to 0.
pub const STD_FLOOR: f64 = 1e-12;

/// Maps feature/target roles to source column names.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ColumnMapping {
    pub mcs: String,
    pub distance: String,
    pub sinr: String,
    pub packet_size: String,
    pub throughput: String,
    pub pdr: String,
}

impl ColumnMapping {
    /// Canonical names, matching what `write_csv` emits.
    pub fn canonical() -> Self {
        ColumnMapping {
            mcs: "mcs".into(),
            distance: "distance".into(),
            sinr: "sinr".into(),
            packet_size: "packet_size".into(),
            throughput: "throughput".into(),
            pdr: "pdr".into(),
        }
    }

    fn names(&self) -> [&str; 6] {
        [
            &self.mcs,
            &self.distance,
            &self.sinr,
            &self.packet_size,
            &self.throughput,
            &self.pdr,
        ]
    }

    pub fn validate(&self) -> Result<()> {
        let names = self.names();
        let distinct: HashSet<&str> = names.iter().copied().collect();
        if distinct.len() != names.len() {
            return Err(Error::Config("column mapping names must be distinct".into()));
        }
        Ok(())
    }
}

/// Parsed table whose cells may still contain missing markers.
/// [`clean`] turns it into a [`Dataset`].
#[derive(Debug, Clone)]
pub struct RawDataset {
    /// One entry per row; 4 feature cells then 2 target cells.
    pub rows: Vec<[Option<f64>; 6]>,
}

impl RawDataset {
    pub fn row_count(&self) -> usize {
        self.rows.len()
    }
}

/// Records which rows were read through a dataset's accessors.
/// Used by leakage tests; fitting code never sees it directly.
#[derive(Debug, Default)]
pub struct RowSpy {
    touched: Mutex<BTreeSet<usize>>,
}

impl RowSpy {
    fn record(&self, row: usize) {
        self.touched.lock().unwrap().insert(row);
    }

    pub fn touched(&self) -> BTreeSet<usize> {
        self.touched.lock().unwrap().clone()
    }

    pub fn reset(&self) {
        self.touched.lock().unwrap().clear();
    }
}

/// Immutable cleaned feature matrix plus one target vector per target name.
#[derive(Debug, Clone)]
pub struct Dataset {
    features: Vec<Vec<f64>>,
    targets: BTreeMap<String, Vec<f64>>,
    spy: Option<Arc<RowSpy>>,
}

impl Dataset {
    pub fn new(features: Vec<Vec<f64>>, targets: BTreeMap<String, Vec<f64>>) -> Result<Self> {
        let n = features.len();
        if n < 2 {
            return Err(Error::TooFewRows(n));
        }
        let d = features[0].len();
        for row in &features {
            if row.len() != d {
                return Err(Error::DimensionMismatch { expected: d, actual: row.len() });
            }
            if row.iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFinite("feature matrix"));
            }
        }
        for values in targets.values() {
            if values.len() != n {
                return Err(Error::LengthMismatch { expected: n, actual: values.len() });
            }
            if values.iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFinite("target vector"));
            }
        }
        Ok(Dataset { features, targets, spy: None })
    }

    pub fn row_count(&self) -> usize {
        self.features.len()
    }

    pub fn feature_count(&self) -> usize {
        self.features.first().map_or(0, |r| r.len())
    }

    pub fn target_names(&self) -> impl Iterator<Item = &str> {
        self.targets.keys().map(|s| s.as_str())
    }

    /// Attach a spy that records every row access from here on.
    pub fn with_spy(mut self, spy: Arc<RowSpy>) -> Self {
        self.spy = Some(spy);
        self
    }

    pub fn feature_row(&self, row: usize) -> &[f64] {
        if let Some(spy) = &self.spy {
            spy.record(row);
        }
        &self.features[row]
    }

    pub fn target_value(&self, target: &str, row: usize) -> f64 {
        if let Some(spy) = &self.spy {
            spy.record(row);
        }
        self.targets[target][row]
    }

    /// Copy the given rows' features out as a dense matrix.
    pub fn gather_features(&self, rows: &[usize]) -> Vec<Vec<f64>> {
        rows.iter().map(|&i| self.feature_row(i).to_vec()).collect()
    }

    /// Copy the given rows' target values out as a vector.
    pub fn gather_target(&self, target: &str, rows: &[usize]) -> Vec<f64> {
        rows.iter().map(|&i| self.target_value(target, i)).collect()
    }
}

/// Per-feature zero-mean scaler, population std convention.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scaler {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
    pub fitted_on: usize,
}

impl Scaler {
    /// Fit on a gathered feature matrix.
    pub fn fit(x: &[Vec<f64>]) -> Result<Self> {
        if x.is_empty() {
            return Err(Error::EmptyInput("scaler fit rows"));
        }
        let n = x.len() as f64;
        let d = x[0].len();
        let mut mean = vec![0.0; d];
        for row in x {
            for (m, v) in mean.iter_mut().zip(row) {
                *m += v;
            }
        }
        for m in &mut mean {
            *m /= n;
        }
        let mut var = vec![0.0; d];
        for row in x {
            for ((s, v), m) in var.iter_mut().zip(row).zip(&mean) {
                *s += (v - m) * (v - m);
            }
        }
        let std = var.iter().map(|s| (s / n).sqrt()).collect();
        Ok(Scaler { mean, std, fitted_on: x.len() })
    }

    pub fn apply(&self, x: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
        let d = self.mean.len();
        x.iter()
            .map(|row| {
                if row.len() != d {
                    return Err(Error::DimensionMismatch { expected: d, actual: row.len() });
                }
                Ok(row
                    .iter()
                    .zip(&self.mean)
                    .zip(&self.std)
                    .map(|((v, m), s)| (v - m) / s.max(STD_FLOOR))
                    .collect())
            })
            .collect()
    }

    pub fn invert(&self, x: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
        let d = self.mean.len();
        x.iter()
            .map(|row| {
                if row.len() != d {
                    return Err(Error::DimensionMismatch { expected: d, actual: row.len() });
                }
                Ok(row
                    .iter()
                    .zip(&self.mean)
                    .zip(&self.std)
                    .map(|((v, m), s)| v * s.max(STD_FLOOR) + m)
                    .collect())
            })
            .collect()
    }
}

/// Fit a scaler on the given rows only. The anti-leakage contract: callers
/// pass training indices, never the full set.
pub fn fit_scaler(dataset: &Dataset, rows: &[usize]) -> Result<Scaler> {
    if rows.is_empty() {
        return Err(Error::EmptyInput("scaler row indices"));
    }
    let n = dataset.row_count();
    if let Some(&bad) = rows.iter().find(|&&i| i >= n) {
        return Err(Error::InvalidParam(format!("row index {bad} out of range (n={n})")));
    }
    Scaler::fit(&dataset.gather_features(rows))
}

fn is_missing(cell: &str) -> bool {
    let t = cell.trim();
    t.is_empty() || t.eq_ignore_ascii_case("nan") || t.eq_ignore_ascii_case("na")
}

/// Load a comma-separated table, locating columns via the mapping.
/// Missing markers (empty, NaN, NA) are kept as holes for [`clean`].
pub fn load_table(path: &Path, mapping: &ColumnMapping) -> Result<RawDataset> {
    mapping.validate()?;
    let text = fs::read_to_string(path)?;
    let mut lines = text.lines();
    let header = lines.next().ok_or(Error::TooFewRows(0))?;
    let header_cols: Vec<&str> = header.split(',').map(str::trim).collect();
    let names = [
        &mapping.mcs,
        &mapping.distance,
        &mapping.sinr,
        &mapping.packet_size,
        &mapping.throughput,
        &mapping.pdr,
    ];
    let mut positions = [0usize; 6];
    for (slot, name) in positions.iter_mut().zip(names) {
        *slot = header_cols
            .iter()
            .position(|c| c == name)
            .ok_or_else(|| Error::MissingColumn(name.clone()))?;
    }

    let mut rows = Vec::new();
    for (line_no, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let cells: Vec<&str> = line.split(',').collect();
        let mut row = [None; 6];
        for (slot, &pos) in row.iter_mut().zip(&positions) {
            let cell = cells.get(pos).copied().unwrap_or("");
            if is_missing(cell) {
                continue;
            }
            let value: f64 = cell.trim().parse().map_err(|_| Error::ParseCell {
                line: line_no + 2,
                column: header_cols[pos].to_string(),
                value: cell.trim().to_string(),
            })?;
            *slot = Some(value);
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::TooFewRows(0));
    }
    Ok(RawDataset { rows })
}

/// Drop rows with missing cells, then deduplicate exact rows keeping the
/// first occurrence. Relative order is preserved.
pub fn clean(raw: &RawDataset) -> Result<Dataset> {
    let mut seen: HashSet<[u64; 6]> = HashSet::new();
    let mut features = Vec::new();
    let mut throughput = Vec::new();
    let mut pdr = Vec::new();
    for row in &raw.rows {
        if row.iter().any(Option::is_none) {
            continue;
        }
        let vals: [f64; 6] = std::array::from_fn(|i| row[i].unwrap());
        let key: [u64; 6] = std::array::from_fn(|i| vals[i].to_bits());
        if !seen.insert(key) {
            continue;
        }
        features.push(vals[..4].to_vec());
        throughput.push(vals[4]);
        pdr.push(vals[5]);
    }
    if features.len() < 2 {
        return Err(Error::TooFewRows(features.len()));
    }
    let mut targets = BTreeMap::new();
    targets.insert("throughput".to_string(), throughput);
    targets.insert("pdr".to_string(), pdr);
    Dataset::new(features, targets)
}

fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// Deterministic synthetic data with a smooth feature-to-target map plus
/// mild noise, so tree ensembles can reach R^2 > 0.8 out of fold.
pub fn generate_synthetic(n: usize, seed: u64) -> Result<Dataset> {
    if n < 2 {
        return Err(Error::TooFewRows(n));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut features = Vec::with_capacity(n);
    let mut throughput = Vec::with_capacity(n);
    let mut pdr = Vec::with_capacity(n);
    for _ in 0..n {
        let mcs = rng.random_range(0..=28) as f64;
        let distance = rng.random_range(10.0..2000.0f64);
        let sinr = rng.random_range(-10.0..40.0f64);
        let packet = rng.random_range(100.0..1500.0f64);

        let link = sigmoid(sinr / 6.0);
        let rate = (mcs + 2.0) / 30.0;
        let size = packet / 1500.0;
        let range = 1.0 / (1.0 + distance / 500.0);
        let thr = 0.5 + 9.0 * link * rate * size * range + rng.random_range(-0.05..0.05);
        let delivered =
            100.0 * sigmoid(0.25 * sinr + 2.0 * rate - distance / 400.0 + rng.random_range(-0.2..0.2));

        features.push(vec![mcs, distance, sinr, packet]);
        throughput.push(thr);
        pdr.push(delivered);
    }
    let mut targets = BTreeMap::new();
    targets.insert("throughput".to_string(), throughput);
    targets.insert("pdr".to_string(), pdr);
    Dataset::new(features, targets)
}

/// Write a dataset as comma-separated text under the canonical column
/// names. Numbers use the shortest representation that round-trips.
pub fn write_csv(dataset: &Dataset, path: &Path) -> Result<()> {
    let mut out = fs::File::create(path)?;
    writeln!(out, "mcs,distance,sinr,packet_size,throughput,pdr")?;
    for i in 0..dataset.row_count() {
        let f = dataset.feature_row(i);
        writeln!(
            out,
            "{:?},{:?},{:?},{:?},{:?},{:?}",
            f[0],
            f[1],
            f[2],
            f[3],
            dataset.target_value("throughput", i),
            dataset.target_value("pdr", i)
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write_temp(content: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(content.as_bytes()).unwrap();
        f
    }

    #[test]
    fn load_simple_table() {
        let f = write_temp(
            "mcs,distance,sinr,packet_size,throughput,pdr\n\
             1,100,5,500,2.5,90\n\
             2,200,10,600,3.5,95\n\
             3,300,15,700,4.5,99\n",
        );
        let raw = load_table(f.path(), &ColumnMapping::canonical()).unwrap();
        assert_eq!(raw.row_count(), 3);
        let ds = clean(&raw).unwrap();
        assert_eq!(ds.row_count(), 3);
        assert_eq!(ds.feature_row(0), &[1.0, 100.0, 5.0, 500.0]);
        assert_eq!(ds.target_value("pdr", 2), 99.0);
    }

    #[test]
    fn missing_mapped_column_errors() {
        let f = write_temp("mcs,distance,packet_size,throughput,pdr\n1,2,3,4,5\n");
        let err = load_table(f.path(), &ColumnMapping::canonical()).unwrap_err();
        assert!(matches!(err, Error::MissingColumn(c) if c == "sinr"));
    }

    #[test]
    fn zero_data_rows_errors() {
        let f = write_temp("mcs,distance,sinr,packet_size,throughput,pdr\n");
        assert!(matches!(
            load_table(f.path(), &ColumnMapping::canonical()),
            Err(Error::TooFewRows(0))
        ));
    }

    #[test]
    fn clean_drops_missing_then_dedups() {
        let raw = RawDataset {
            rows: vec![
                [Some(1.0), Some(2.0), Some(3.0), Some(4.0), Some(5.0), Some(6.0)],
                [Some(1.0), Some(2.0), Some(3.0), Some(4.0), Some(5.0), Some(6.0)],
                [Some(1.0), None, Some(3.0), Some(4.0), Some(5.0), Some(6.0)],
                [Some(9.0), Some(2.0), Some(3.0), Some(4.0), Some(5.0), Some(6.0)],
            ],
        };
        let ds = clean(&raw).unwrap();
        assert_eq!(ds.row_count(), 2);
        assert_eq!(ds.feature_row(0)[0], 1.0);
        assert_eq!(ds.feature_row(1)[0], 9.0);
    }

    #[test]
    fn clean_is_idempotent_in_effect() {
        // a cleaned dataset re-cleaned through raw form is unchanged
        let ds = generate_synthetic(20, 3).unwrap();
        let raw = RawDataset {
            rows: (0..ds.row_count())
                .map(|i| {
                    let f = ds.feature_row(i);
                    [
                        Some(f[0]),
                        Some(f[1]),
                        Some(f[2]),
                        Some(f[3]),
                        Some(ds.target_value("throughput", i)),
                        Some(ds.target_value("pdr", i)),
                    ]
                })
                .collect(),
        };
        let again = clean(&raw).unwrap();
        assert_eq!(again.row_count(), ds.row_count());
    }

    #[test]
    fn clean_too_few_rows_errors() {
        let raw = RawDataset {
            rows: vec![[Some(1.0), Some(2.0), Some(3.0), Some(4.0), Some(5.0), Some(6.0)]],
        };
        assert!(matches!(clean(&raw), Err(Error::TooFewRows(1))));
    }

    #[test]
    fn scaler_hand_arithmetic() {
        let x = vec![vec![2.0], vec![4.0], vec![6.0]];
        let s = Scaler::fit(&x).unwrap();
        assert_eq!(s.mean[0], 4.0);
        assert!((s.std[0] - (8.0f64 / 3.0).sqrt()).abs() < 1e-9);
        let scaled = s.apply(&x).unwrap();
        assert!((scaled[0][0] + 1.2247).abs() < 1e-4);
        assert!(scaled[1][0].abs() < 1e-12);
        assert!((scaled[2][0] - 1.2247).abs() < 1e-4);
    }

    #[test]
    fn scaler_constant_column_maps_to_zero() {
        let x = vec![vec![5.0], vec![5.0], vec![5.0]];
        let s = Scaler::fit(&x).unwrap();
        assert_eq!(s.mean[0], 5.0);
        assert_eq!(s.std[0], 0.0);
        let scaled = s.apply(&x).unwrap();
        assert!(scaled.iter().all(|r| r[0] == 0.0));
    }

    #[test]
    fn scaler_subset_fit() {
        let mut targets = BTreeMap::new();
        targets.insert("throughput".into(), vec![0.0; 3]);
        targets.insert("pdr".into(), vec![0.0; 3]);
        let ds = Dataset::new(
            vec![
                vec![2.0, 0.0, 0.0, 0.0],
                vec![4.0, 0.0, 0.0, 0.0],
                vec![6.0, 0.0, 0.0, 0.0],
            ],
            targets,
        )
        .unwrap();
        let s = fit_scaler(&ds, &[0, 1]).unwrap();
        assert_eq!(s.mean[0], 3.0);
        assert_eq!(s.std[0], 1.0);
        assert_eq!(s.fitted_on, 2);
    }

    #[test]
    fn scaler_empty_rows_errors() {
        let ds = generate_synthetic(5, 1).unwrap();
        assert!(fit_scaler(&ds, &[]).is_err());
    }

    #[test]
    fn scaler_roundtrip_recovers_rows() {
        let ds = generate_synthetic(50, 11).unwrap();
        let x = ds.gather_features(&(0..50).collect::<Vec<_>>());
        let s = Scaler::fit(&x).unwrap();
        let back = s.invert(&s.apply(&x).unwrap()).unwrap();
        for (a, b) in x.iter().zip(&back) {
            for (u, v) in a.iter().zip(b) {
                assert!((u - v).abs() <= 1e-9 * u.abs().max(1.0));
            }
        }
    }

    #[test]
    fn synthetic_is_deterministic() {
        let a = generate_synthetic(100, 7).unwrap();
        let b = generate_synthetic(100, 7).unwrap();
        for i in 0..100 {
            assert_eq!(a.feature_row(i), b.feature_row(i));
            assert_eq!(a.target_value("throughput", i), b.target_value("throughput", i));
            assert_eq!(a.target_value("pdr", i), b.target_value("pdr", i));
        }
    }

    #[test]
    fn synthetic_rejects_n_below_two() {
        assert!(generate_synthetic(1, 7).is_err());
    }

    #[test]
    fn synthetic_ranges() {
        let ds = generate_synthetic(200, 5).unwrap();
        for i in 0..200 {
            let f = ds.feature_row(i);
            assert!((0.0..=28.0).contains(&f[0]) && f[0].fract() == 0.0);
            assert!((10.0..2000.0).contains(&f[1]));
            assert!((-10.0..40.0).contains(&f[2]));
            assert!((100.0..1500.0).contains(&f[3]));
        }
    }

    #[test]
    fn csv_roundtrip_is_bit_exact() {
        let ds = generate_synthetic(30, 9).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("synth.csv");
        write_csv(&ds, &path).unwrap();
        let raw = load_table(&path, &ColumnMapping::canonical()).unwrap();
        let back = clean(&raw).unwrap();
        assert_eq!(back.row_count(), ds.row_count());
        for i in 0..ds.row_count() {
            assert_eq!(back.feature_row(i), ds.feature_row(i));
            assert_eq!(
                back.target_value("throughput", i).to_bits(),
                ds.target_value("throughput", i).to_bits()
            );
        }
    }

    #[test]
    fn spy_records_accesses() {
        let spy = Arc::new(RowSpy::default());
        let ds = generate_synthetic(10, 1).unwrap().with_spy(spy.clone());
        ds.gather_features(&[1, 3]);
        ds.gather_target("pdr", &[5]);
        let touched = spy.touched();
        assert_eq!(touched.into_iter().collect::<Vec<_>>(), vec![1, 3, 5]);
    }
}
