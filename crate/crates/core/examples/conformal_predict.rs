//! Calibrate a heteroscedastic regressor and predict p-boxes whose width
//! grows as queries leave the training data.

use cii::basepredict::{fit_hetero_ls, BaseModel};
use cii::conformal::{fit_cii, CiiConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> cii::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let xs: Vec<Vec<f64>> = (0..200).map(|_| vec![rng.random_range(-2.0..2.0)]).collect();
    let ys: Vec<f64> = xs
        .iter()
        .map(|x| x[0].powi(3) + rng.random_range(-0.5..0.5))
        .collect();
    let base = BaseModel::Hetero(fit_hetero_ls(&xs, &ys, 3)?);
    let model = fit_cii(&xs, &ys, base, &CiiConfig::default())?;
    println!("r0 = {:.3}, {} calibration points", model.distance.r0(), model.calibration.len());
    for x in [0.0, 1.5, 2.5, 4.0] {
        let p = model.predict_detailed(0, &[x])?;
        let central = p.pbox.central_interval(0.1)?;
        println!(
            "x = {x}: r = {:.2}, budget = {:.3}, central 90% [{:.2}, {:.2}], truth {:.2}",
            p.r,
            p.budget,
            central.lo,
            central.hi,
            x.powi(3)
        );
    }
    Ok(())
}
