//! Fit a minimal-area band that encloses discrepancy against distance.

use cii::ipm::{fit_ipm_with, IpmOptions};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> cii::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let points: Vec<(f64, f64)> = (0..80)
        .map(|_| {
            let r: f64 = rng.random_range(0.0..3.0);
            (r, 0.1 + 0.2 * r * rng.random::<f64>())
        })
        .collect();
    for degree in [0, 1, 2] {
        let m = fit_ipm_with(&points, &IpmOptions { degree, grid_size: 64, monotone_tail: true })?;
        println!(
            "degree {degree}: area {:.4}, band at r=1 {:?}, worst violation {:.1e}",
            m.band_area(),
            m.predict_band(1.0),
            m.max_enclosure_violation(&points)
        );
    }
    Ok(())
}
