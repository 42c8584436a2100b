//! Cross-seed aggregation into mean±std report rows.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The four metrics of one evaluation run.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct SeedMetrics {
    pub seed: u64,
    pub accuracy: f64,
    pub auc: f64,
    pub precision: f64,
    pub recall: f64,
    /// Degenerate-denominator flags and similar caveats.
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct MetricSummary {
    pub mean: f64,
    /// Sample standard deviation (n − 1 denominator).
    pub std: f64,
    pub per_seed: Vec<f64>,
}

impl MetricSummary {
    pub fn formatted(&self) -> String {
        format!("{:.2}±{:.2}", self.mean, self.std)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct MetricsReport {
    pub model: String,
    pub accuracy: MetricSummary,
    pub auc: MetricSummary,
    pub precision: MetricSummary,
    pub recall: MetricSummary,
    pub notes: Vec<String>,
}

fn summarize(values: &[f64]) -> MetricSummary {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = if values.len() < 2 {
        0.0
    } else {
        values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0)
    };
    MetricSummary { mean, std: var.sqrt(), per_seed: values.to_vec() }
}

/// Aggregates per-seed metric columns. Requires at least two seeds and
/// identical value counts across the four metrics.
pub fn aggregate_runs(
    model: &str,
    accuracy: &[f64],
    auc: &[f64],
    precision: &[f64],
    recall: &[f64],
    notes: Vec<String>,
) -> Result<MetricsReport> {
    if accuracy.len() < 2 {
        return Err(Error::Aggregation(format!("need at least 2 seeds, got {}", accuracy.len())));
    }
    if accuracy.len() != auc.len() || auc.len() != precision.len() || precision.len() != recall.len() {
        return Err(Error::Aggregation(format!(
            "per-seed value counts differ: accuracy {}, auc {}, precision {}, recall {}",
            accuracy.len(),
            auc.len(),
            precision.len(),
            recall.len()
        )));
    }
    Ok(MetricsReport {
        model: model.to_string(),
        accuracy: summarize(accuracy),
        auc: summarize(auc),
        precision: summarize(precision),
        recall: summarize(recall),
        notes,
    })
}

impl MetricsReport {
    pub fn from_seed_metrics(model: &str, runs: &[SeedMetrics]) -> Result<MetricsReport> {
        let col = |f: fn(&SeedMetrics) -> f64| runs.iter().map(f).collect::<Vec<_>>();
        let notes = runs.iter().flat_map(|r| r.notes.iter().cloned()).collect();
        aggregate_runs(
            model,
            &col(|r| r.accuracy),
            &col(|r| r.auc),
            &col(|r| r.precision),
            &col(|r| r.recall),
            notes,
        )
    }
}

/// Aligned-text table with one row per report, mirroring the
/// Model / Accuracy / AUC / Precision / Recall layout.
pub fn render_comparison_table(reports: &[MetricsReport]) -> String {
    let headers = ["Model", "Accuracy (%)", "AUC (%)", "Precision (%)", "Recall (%)"];
    let rows: Vec<[String; 5]> = reports
        .iter()
        .map(|r| {
            [
                r.model.clone(),
                r.accuracy.formatted(),
                r.auc.formatted(),
                r.precision.formatted(),
                r.recall.formatted(),
            ]
        })
        .collect();
    let mut widths: Vec<usize> = headers.iter().map(|h| h.chars().count()).collect();
    for row in &rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let mut out = String::new();
    let fmt_row = |cells: &[String]| -> String {
        cells
            .iter()
            .zip(&widths)
            .map(|(c, w)| format!("{c:<w$}", w = w))
            .collect::<Vec<_>>()
            .join("  ")
            .trim_end()
            .to_string()
    };
    out.push_str(&fmt_row(&headers.iter().map(|h| h.to_string()).collect::<Vec<_>>()));
    out.push('\n');
    out.push_str(&"-".repeat(widths.iter().sum::<usize>() + 2 * (widths.len() - 1)));
    out.push('\n');
    for row in &rows {
        out.push_str(&fmt_row(row));
        out.push('\n');
    }
    for report in reports {
        for note in &report.notes {
            out.push_str(&format!("note [{}]: {note}\n", report.model));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_point_sample_std() {
        let report = aggregate_runs("m", &[60.0, 62.0], &[50.0, 50.0], &[10.0, 20.0], &[5.0, 15.0], vec![]).unwrap();
        assert_eq!(report.accuracy.mean, 61.0);
        assert!((report.accuracy.std - std::f64::consts::SQRT_2).abs() < 1e-12);
        assert_eq!(report.auc.std, 0.0);
    }

    #[test]
    fn formats_with_two_decimals() {
        let report = aggregate_runs("m", &[60.0, 62.0], &[50.0, 50.0], &[1.0, 2.0], &[3.0, 4.0], vec![]).unwrap();
        assert_eq!(report.accuracy.formatted(), "61.00±1.41");
    }

    #[test]
    fn single_seed_rejected() {
        assert!(aggregate_runs("m", &[1.0], &[1.0], &[1.0], &[1.0], vec![]).is_err());
    }

    #[test]
    fn mismatched_counts_rejected() {
        let err = aggregate_runs("m", &[1.0, 2.0], &[1.0, 2.0, 3.0], &[1.0, 2.0], &[1.0, 2.0], vec![]).unwrap_err();
        assert!(err.to_string().contains("counts differ"), "{err}");
    }

    #[test]
    fn mean_within_min_max() {
        let values = [58.2, 61.7, 59.9, 60.1, 62.4];
        let report = aggregate_runs("m", &values, &values, &values, &values, vec![]).unwrap();
        let lo = values.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        assert!(report.accuracy.mean >= lo && report.accuracy.mean <= hi);
    }

    #[test]
    fn table_contains_all_columns() {
        let report = aggregate_runs("DKT", &[58.0, 59.0], &[54.0, 55.0], &[60.0, 61.0], &[86.0, 87.0], vec![]).unwrap();
        let table = render_comparison_table(&[report]);
        for header in ["Model", "Accuracy (%)", "AUC (%)", "Precision (%)", "Recall (%)"] {
            assert!(table.contains(header), "missing {header} in:\n{table}");
        }
        assert!(table.contains("58.50±0.71"));
    }
}
