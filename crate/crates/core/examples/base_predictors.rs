//! Fit the bundled base predictors and round-trip predictions through the
//! external p-box record format.

use cii::basepredict::{fit_bootstrap_envelope, fit_hetero_ls, load_external, BasePredictor, ExternalPredictions};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> cii::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let xs: Vec<Vec<f64>> = (0..150).map(|_| vec![rng.random_range(0.0..1.0)]).collect();
    let ys: Vec<f64> = xs
        .iter()
        .map(|x| 2.0 * x[0] + x[0] * rng.random_range(-1.0..1.0))
        .collect();
    let hetero = fit_hetero_ls(&xs, &ys, 1)?;
    let boot = fit_bootstrap_envelope(&xs, &ys, 10, 1, 7)?;
    for x in [0.1, 0.9] {
        println!(
            "x = {x}: mean {:.3}, sd {:.3}, bootstrap breadth {:.4}",
            hetero.mean_at(&[x])?,
            hetero.variance_at(&[x])?.sqrt(),
            boot.predict(&[x])?.to_pbox().breadth()?
        );
    }

    let rows = (0..5)
        .map(|i| Ok((i, hetero.predict(&[i as f64 / 4.0])?)))
        .collect::<cii::Result<Vec<_>>>()?;
    let dir = std::env::temp_dir().join("cii-example-base.ndjson");
    ExternalPredictions::from_rows(rows).dump(&dir)?;
    let back = load_external(&dir)?;
    println!("reloaded {} predictions from {}", back.len(), dir.display());
    std::fs::remove_file(dir)?;
    Ok(())
}
