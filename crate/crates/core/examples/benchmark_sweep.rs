//! Extrapolation-split sweep over the bundled datasets, written to a report
//! directory.

use cii::harness::{emit_report, ingest_csv, run_benchmark, ExperimentConfig, TargetColumn};

fn main() -> cii::Result<()> {
    let data = concat!(env!("CARGO_MANIFEST_DIR"), "/data");
    let datasets = ["diabetes.csv", "friedman1.csv"]
        .iter()
        .map(|f| ingest_csv(format!("{data}/{f}"), &TargetColumn::Last))
        .collect::<cii::Result<Vec<_>>>()?;
    let cfg = ExperimentConfig {
        epsilons: vec![0.3, 0.7],
        repeats: 3,
        ..Default::default()
    };
    let report = run_benchmark(&datasets, &cfg)?;
    let out = std::env::temp_dir().join("cii-example-bench");
    emit_report(&report, &out, cfg.bins)?;
    println!("{} metric rows, {} failed cells, report in {}", report.rows.len(), report.failures.len(), out.display());
    Ok(())
}
