//! Static SVG bar charts mirroring the report: one chart per
//! (metric, target) pair for MAE and RMSE, plus one grouped R2 chart
//! covering every target.

use std::fs;
use std::path::{Path, PathBuf};

use crate::error::Result;

use super::report::{format_summary_value, ReportDocument};

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 400.0;
const MARGIN_LEFT: f64 = 60.0;
const MARGIN_RIGHT: f64 = 20.0;
const MARGIN_TOP: f64 = 50.0;
const MARGIN_BOTTOM: f64 = 60.0;

const GROUP_COLORS: [&str; 2] = ["#4878a8", "#e49444"];

struct Scale {
    y_min: f64,
    y_max: f64,
}

impl Scale {
    fn from_values(values: &[f64]) -> Self {
        let mut lo = values.iter().copied().fold(0.0f64, f64::min);
        let mut hi = values.iter().copied().fold(0.0f64, f64::max);
        if hi == lo {
            hi = lo + 1.0;
        }
        let pad = (hi - lo) * 0.12;
        if lo < 0.0 {
            lo -= pad;
        }
        hi += pad;
        Scale { y_min: lo, y_max: hi }
    }

    fn y(&self, value: f64) -> f64 {
        let plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
        MARGIN_TOP + plot_h * (self.y_max - value) / (self.y_max - self.y_min)
    }
}

/// One group per model, one bar per series. `series` holds
/// (series label, per-group values); a single series gives a plain chart.
fn bar_chart_svg(title: &str, groups: &[String], series: &[(String, Vec<f64>)]) -> String {
    let all: Vec<f64> = series.iter().flat_map(|(_, v)| v.iter().copied()).collect();
    let scale = Scale::from_values(&all);
    let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let group_w = plot_w / groups.len() as f64;
    let bar_w = (group_w * 0.7) / series.len() as f64;

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" \
         viewBox=\"0 0 {WIDTH} {HEIGHT}\" font-family=\"sans-serif\">\n"
    ));
    svg.push_str(&format!(
        "  <text x=\"{}\" y=\"28\" text-anchor=\"middle\" font-size=\"16\">{}</text>\n",
        WIDTH / 2.0,
        title
    ));
    // axes: y axis line plus zero baseline
    let zero_y = scale.y(0.0);
    svg.push_str(&format!(
        "  <line x1=\"{MARGIN_LEFT}\" y1=\"{MARGIN_TOP}\" x2=\"{MARGIN_LEFT}\" y2=\"{}\" stroke=\"#333\"/>\n",
        HEIGHT - MARGIN_BOTTOM
    ));
    svg.push_str(&format!(
        "  <line x1=\"{MARGIN_LEFT}\" y1=\"{zero_y:.2}\" x2=\"{}\" y2=\"{zero_y:.2}\" stroke=\"#333\"/>\n",
        WIDTH - MARGIN_RIGHT
    ));

    for (g, group) in groups.iter().enumerate() {
        let group_x = MARGIN_LEFT + g as f64 * group_w;
        for (s, (_, values)) in series.iter().enumerate() {
            let value = values[g];
            let x = group_x + group_w * 0.15 + s as f64 * bar_w;
            let y_val = scale.y(value);
            let (bar_y, bar_h) =
                if value >= 0.0 { (y_val, zero_y - y_val) } else { (zero_y, y_val - zero_y) };
            let color = GROUP_COLORS[s % GROUP_COLORS.len()];
            svg.push_str(&format!(
                "  <rect x=\"{x:.2}\" y=\"{bar_y:.2}\" width=\"{:.2}\" height=\"{bar_h:.2}\" fill=\"{color}\"/>\n",
                bar_w * 0.9
            ));
            // value label above positive bars, below negative ones
            let label_y = if value >= 0.0 { y_val - 4.0 } else { y_val + 14.0 };
            svg.push_str(&format!(
                "  <text x=\"{:.2}\" y=\"{label_y:.2}\" text-anchor=\"middle\" font-size=\"11\" class=\"value\">{}</text>\n",
                x + bar_w * 0.45,
                format_summary_value(value)
            ));
        }
        svg.push_str(&format!(
            "  <text x=\"{:.2}\" y=\"{}\" text-anchor=\"middle\" font-size=\"13\">{}</text>\n",
            group_x + group_w / 2.0,
            HEIGHT - MARGIN_BOTTOM + 22.0,
            group
        ));
    }
    if series.len() > 1 {
        for (s, (label, _)) in series.iter().enumerate() {
            let x = MARGIN_LEFT + s as f64 * 140.0;
            let y = HEIGHT - 14.0;
            svg.push_str(&format!(
                "  <rect x=\"{x}\" y=\"{}\" width=\"12\" height=\"12\" fill=\"{}\"/>\n",
                y - 10.0,
                GROUP_COLORS[s % GROUP_COLORS.len()]
            ));
            svg.push_str(&format!(
                "  <text x=\"{}\" y=\"{y}\" font-size=\"12\">{}</text>\n",
                x + 16.0,
                label
            ));
        }
    }
    svg.push_str("</svg>\n");
    svg
}

/// Render the charts for a report. Bar order follows the report's model
/// order; labeled values come from the full-precision data.
pub fn emit_charts(report: &ReportDocument, directory: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(directory)?;
    // preserve configured order of models and targets
    let mut models: Vec<_> = Vec::new();
    let mut targets: Vec<String> = Vec::new();
    for pair in &report.pairs {
        if !models.contains(&pair.model) {
            models.push(pair.model);
        }
        if !targets.contains(&pair.target) {
            targets.push(pair.target.clone());
        }
    }
    let value_of = |model: crate::model::ModelKind, target: &str, metric: &str| -> f64 {
        report
            .pairs
            .iter()
            .find(|p| p.model == model && p.target == target)
            .and_then(|p| p.summary_metrics(report.aggregation))
            .and_then(|m| m.get(metric))
            .unwrap_or(f64::NAN)
    };

    let labels: Vec<String> = models.iter().map(|m| m.name().to_uppercase()).collect();
    let mut written = Vec::new();
    for metric in ["mae", "rmse"] {
        for target in &targets {
            let values: Vec<f64> = models.iter().map(|&m| value_of(m, target, metric)).collect();
            let title = format!("{} results for {} predictions", metric.to_uppercase(), target);
            let svg = bar_chart_svg(&title, &labels, &[(target.clone(), values)]);
            let path = directory.join(format!("{metric}_{target}.svg"));
            fs::write(&path, svg)?;
            written.push(path);
        }
    }
    let r2_series: Vec<(String, Vec<f64>)> = targets
        .iter()
        .map(|t| (t.clone(), models.iter().map(|&m| value_of(m, t, "r2")).collect()))
        .collect();
    let svg = bar_chart_svg("R2 scores for the predictions", &labels, &r2_series);
    let path = directory.join("r2.svg");
    fs::write(&path, svg)?;
    written.push(path);
    Ok(written)
}
