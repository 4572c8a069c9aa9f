//! Run the cubic toy experiment and print its summary table.

use cii::harness::{aggregate, run_cubic, ExperimentConfig};

fn main() -> cii::Result<()> {
    let cfg = ExperimentConfig {
        repeats: 5,
        ..Default::default()
    };
    let report = run_cubic(&cfg)?;
    for s in aggregate(&report.rows) {
        println!(
            "{:>3} {:<9} xi {:.3} gamma_n {:.3} d_p {:.4}",
            s.regime.to_string(),
            format!("{:?}", s.method),
            s.xi_mean,
            s.gamma_n_mean,
            s.d_p_mean
        );
    }
    Ok(())
}
