//! Datasets, splits, experiment protocols and report output.

pub mod config;
pub mod dataset;
pub mod experiment;
pub mod report;
pub mod split;

pub use dataset::{ingest_csv, ingest_queries, Dataset, QuerySet, TargetColumn};
pub use experiment::{run_benchmark, run_cubic, ExperimentConfig, ExperimentReport, Method, MetricRow, Regime};
pub use report::{aggregate, emit_report, read_rows};
pub use split::{extrapolation_split, subsample_train, Split};
