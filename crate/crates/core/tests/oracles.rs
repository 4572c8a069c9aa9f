mod common;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use cii::ipm::{fit_ipm_with, IpmOptions};
use cii::lp::{solve, LinearProgram, LpStatus};
use cii::transport::{lower_envelope, upper_envelope, BallConstraints};
use common::*;

#[test]
fn envelopes_match_exact_bisection() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for case in 0..60 {
        let base = random_step_cdf(&mut rng, 10);
        let support = (case % 2 == 0).then_some((-0.5, 1.5));
        let c = match support {
            Some((a, b)) => BallConstraints::with_support(a, b).unwrap(),
            None => BallConstraints::unconstrained(),
        };
        for &d in &[0.0, 0.003, 0.05, 0.4] {
            for _ in 0..6 {
                let x0 = rng.random_range(-0.2..1.2);
                let up = upper_envelope(&base, d, &c, &[x0]).unwrap().evaluate(x0);
                let down = lower_envelope(&base, d, &c, &[x0]).unwrap().evaluate(x0);
                let want_up = brute_upper(&base, d, x0, support);
                let want_down = brute_lower(&base, d, x0, support);
                assert!(
                    (up - want_up).abs() < 1e-9,
                    "case {case} upper at {x0} with d={d}: {up} vs {want_up}"
                );
                assert!(
                    (down - want_down).abs() < 1e-9,
                    "case {case} lower at {x0} with d={d}: {down} vs {want_down}"
                );
            }
        }
    }
}

#[test]
fn ipm_area_matches_vertex_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for case in 0..60 {
        let degree = case % 2;
        let n = rng.random_range(degree + 2..=6);
        let points = random_ipm_points(&mut rng, n);
        for tail in [false, true] {
            let opts = IpmOptions {
                degree,
                grid_size: 8,
                monotone_tail: tail,
            };
            let m = fit_ipm_with(&points, &opts).unwrap();
            let want = ipm_area_oracle(&points, degree, 8, tail).unwrap();
            assert!(
                (m.band_area() - want).abs() < 1e-6,
                "case {case} tail {tail}: {} vs {want}",
                m.band_area()
            );
            assert!(m.max_enclosure_violation(&points) <= 1e-9);
        }
    }
}

#[test]
fn degenerate_calibration_set_is_solved() {
    // 93 calibration points on which phase one once stalled
    let text = include_str!("fixtures/ipm_degenerate_points.json");
    let points: Vec<(f64, f64)> = serde_json::from_str(text).unwrap();
    for degree in 0..=3 {
        for tail in [false, true] {
            let m = fit_ipm_with(
                &points,
                &IpmOptions {
                    degree,
                    grid_size: 64,
                    monotone_tail: tail,
                },
            )
            .unwrap_or_else(|e| panic!("degree {degree} tail {tail}: {e}"));
            assert!(m.max_enclosure_violation(&points) <= 1e-9);
        }
    }
}

#[test]
fn simplex_matches_vertex_enumeration_on_random_programs() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut solved = 0;
    for _ in 0..200 {
        let n = rng.random_range(2..=3);
        let m = rng.random_range(n..=7);
        let c: Vec<f64> = (0..n).map(|_| rng.random_range(0.1..2.0)).collect();
        let mut p = LinearProgram::new(c.clone());
        let mut rows = Vec::new();
        for _ in 0..m {
            let a: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..2.0)).collect();
            let b = rng.random_range(-1.0..3.0);
            p.add_ge(a.clone(), b);
            rows.push(Row { a, b });
        }
        // bounds as explicit rows for the oracle
        for j in 0..n {
            let mut a = vec![0.0; n];
            a[j] = 1.0;
            rows.push(Row { a, b: 0.0 });
        }
        let s = solve(&p).unwrap();
        match vertex_enumeration(&c, &rows) {
            // positive costs over the nonnegative orthant: bounded whenever feasible
            Some((want, _)) => {
                assert_eq!(s.status, LpStatus::Optimal);
                assert!((s.objective_value - want).abs() < 1e-7, "{} vs {want}", s.objective_value);
                assert!(p.max_violation(&s.z) < 1e-9);
                solved += 1;
            }
            None => assert_eq!(s.status, LpStatus::Infeasible),
        }
    }
    assert!(solved > 50);
}
