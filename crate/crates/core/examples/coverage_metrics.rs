//! Evaluate predictive p-boxes: coverage, scaled breadth and u-score pooling.

use cii::metrics::{coverage, quantile_scaled_breadth, response_scale, stratify, u_pool};
use cii::uncertain::{envelope, PBox, StepCdf, UncertainNumber};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

fn main() -> cii::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let noise = Normal::new(0.0, 1.0).unwrap();
    let ys: Vec<f64> = (0..400).map(|_| noise.sample(&mut rng)).collect();
    let rs: Vec<f64> = (0..400).map(|i| i as f64 / 100.0).collect();
    let narrow = PBox::precise(StepCdf::normal(0.0, 1.0, 200)?);
    let wide = envelope(&[StepCdf::normal(-0.5, 1.0, 200)?, StepCdf::normal(0.5, 1.5, 200)?])?;
    let obs: Vec<UncertainNumber> = ys.iter().map(|&y| UncertainNumber::Scalar(y)).collect();
    let (q05, q95) = response_scale(&ys)?;
    for (name, p) in [("precise", &narrow), ("imprecise", &wide)] {
        let preds = vec![p.clone(); ys.len()];
        let covered: Vec<bool> = obs
            .iter()
            .map(|o| cii::metrics::is_covered(p, o))
            .collect::<cii::Result<_>>()?;
        let bins = stratify(&covered, &rs, 4)?;
        let pool = u_pool(&preds, &ys)?;
        println!(
            "{name}: xi {:.3}, gamma_n {:.3}, d_p {:.4}, per-bin xi {:?}",
            coverage(&preds, &obs)?,
            quantile_scaled_breadth(p, q05, q95)?,
            pool.d_p,
            bins.iter().map(|b| b.xi).collect::<Vec<_>>()
        );
    }
    Ok(())
}
