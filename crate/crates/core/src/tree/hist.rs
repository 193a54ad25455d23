//! Quantile histogram binning for the histogram-based boosters.

/// Per-feature sorted bin upper edges. A value `v` belongs to the first
/// bin whose edge is `>= v`; values above the last edge map to the last bin.
#[derive(Debug, Clone)]
pub struct HistogramBins {
    pub edges: Vec<Vec<f64>>,
}

impl HistogramBins {
    pub fn feature_count(&self) -> usize {
        self.edges.len()
    }

    pub fn bin_count(&self, feature: usize) -> usize {
        self.edges[feature].len()
    }

    pub fn bin_index(&self, feature: usize, value: f64) -> usize {
        let edges = &self.edges[feature];
        let idx = edges.partition_point(|&e| e < value);
        idx.min(edges.len() - 1)
    }

    /// Split thresholds: every edge except the last (a cut at the last
    /// edge would leave the right side empty on the training rows).
    pub fn thresholds(&self, feature: usize) -> &[f64] {
        let edges = &self.edges[feature];
        &edges[..edges.len() - 1]
    }
}

/// Build per-feature quantile edges over at most `max_bin` bins. When a
/// feature has no more distinct values than `max_bin`, each distinct value
/// gets its own bin.
pub fn build_histogram_bins(x: &[Vec<f64>], rows: &[usize], max_bin: usize) -> HistogramBins {
    assert!(!rows.is_empty(), "histogram bins need at least one row");
    assert!(max_bin >= 1);
    let d = x[rows[0]].len();
    let mut edges = Vec::with_capacity(d);
    for feature in 0..d {
        let mut values: Vec<f64> = rows.iter().map(|&i| x[i][feature]).collect();
        values.sort_by(f64::total_cmp);
        let mut uniq = values.clone();
        uniq.dedup();
        let feature_edges = if uniq.len() <= max_bin {
            uniq
        } else {
            let n = values.len();
            let mut quantiles: Vec<f64> = (1..=max_bin)
                .map(|b| values[b * n / max_bin - 1])
                .collect();
            quantiles.dedup();
            // last edge must cover the maximum
            if *quantiles.last().unwrap() < *values.last().unwrap() {
                quantiles.push(*values.last().unwrap());
            }
            quantiles
        };
        edges.push(feature_edges);
    }
    HistogramBins { edges }
}
