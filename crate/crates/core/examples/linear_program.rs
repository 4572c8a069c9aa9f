//! Solve a small linear program with the bundled simplex solver.

use cii::lp::{solve, LinearProgram};

fn main() -> cii::Result<()> {
    // minimise 3x + 2y subject to x + y >= 4, x + 3y >= 6, x <= 5
    let mut p = LinearProgram::new(vec![3.0, 2.0]);
    p.add_ge(vec![1.0, 1.0], 4.0)
        .add_ge(vec![1.0, 3.0], 6.0)
        .add_le(vec![1.0, 0.0], 5.0);
    let s = solve(&p)?;
    println!("status {:?}, z = {:?}, objective {}", s.status, s.z, s.objective_value);

    let mut bad = LinearProgram::new(vec![1.0]);
    bad.add_ge(vec![1.0], 2.0).add_le(vec![1.0], 1.0);
    println!("contradictory program: {:?}", solve(&bad)?.status);
    Ok(())
}
