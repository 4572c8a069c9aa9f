//! Score query points by their Mahalanobis distance to a training cloud.

use cii::distance::{fit_distance, MetricKind, Standardizer};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> cii::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    // an elongated cloud: x1 follows x0 closely
    let train: Vec<Vec<f64>> = (0..300)
        .map(|_| {
            let t: f64 = rng.random_range(-1.0..1.0);
            vec![t, t + rng.random_range(-0.1..0.1)]
        })
        .collect();
    let std = Standardizer::fit(&train)?;
    let model = fit_distance(&std.transform_all(&train), MetricKind::Mahalanobis, None)?;
    println!("support radius r0 = {:.3}", model.r0());
    for q in [[0.5, 0.5], [0.5, -0.5], [3.0, 3.0]] {
        let z = std.transform(&q);
        println!(
            "{q:?}: r = {:.3}, extrapolation = {}",
            model.score(&z)?,
            model.is_extrapolation(&z)?
        );
    }
    Ok(())
}
