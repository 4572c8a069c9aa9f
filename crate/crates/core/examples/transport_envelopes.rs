//! Widen a distribution to every CDF within a Wasserstein-1 budget.

use cii::transport::{ascloseas, upper_envelope, BallConstraints};
use cii::uncertain::{PBox, StepCdf};

fn main() -> cii::Result<()> {
    let u = StepCdf::uniform(0.0, 1.0, 1000)?;
    let free = BallConstraints::unconstrained();
    for d in [0.0, 0.02, 0.125] {
        let g = upper_envelope(&u, d, &free, &[0.5])?.evaluate(0.5);
        println!("uniform base, budget {d}: sup F(0.5) = {g:.4}");
    }

    let base = PBox::precise(StepCdf::normal(0.0, 1.0, 200)?);
    let bounded = BallConstraints::with_support(-6.0, 6.0)?;
    for d in [0.05, 0.2, 0.5] {
        let widened = ascloseas(&base, d, &bounded, None)?.pbox;
        let range = widened.range_interval()?;
        println!("normal base, budget {d}: breadth {:.3}, range [{:.2}, {:.2}]", widened.breadth()?, range.lo, range.hi);
    }
    Ok(())
}
