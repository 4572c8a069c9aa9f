//! Build p-boxes from distributions and samples, then measure them.

use cii::uncertain::{area_metric, empirical_cdf, envelope, Interval, PBox, StepCdf, UncertainNumber};

fn main() -> cii::Result<()> {
    let a = StepCdf::normal(0.0, 1.0, 200)?;
    let b = StepCdf::normal(0.5, 1.2, 200)?;
    let band = envelope(&[a.clone(), b])?;
    println!("envelope of two normals: breadth {:.4}", band.breadth()?);
    println!("range interval {:?}", band.range_interval()?);
    println!("central 90% interval {:?}", band.central_interval(0.1)?);

    let sample = empirical_cdf(&[0.3, -1.2, 0.8, 0.1, 2.0, -0.4])?;
    let gap = area_metric(&PBox::precise(a), &PBox::precise(sample));
    println!("area between N(0,1) and a six point sample: {gap:.4}");

    let interval = UncertainNumber::Interval(Interval::new(-1.0, 1.0)?);
    println!("interval as a p-box has breadth {:.1}", interval.to_pbox().breadth()?);
    Ok(())
}
