//! Threshold metrics, rank-based AUC, and multi-seed aggregation.

mod auc;
mod metrics;
mod report;

pub use auc::{auc, auc_brute_force};
pub use metrics::{accuracy, confusion, precision, recall, ConfusionCounts, Ratio};
pub use report::{aggregate_runs, render_comparison_table, MetricSummary, MetricsReport, SeedMetrics};
