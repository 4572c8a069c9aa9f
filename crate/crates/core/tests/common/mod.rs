//! Independent reference computations shared by the integration tests.
#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use cii::uncertain::StepCdf;

pub const DATA_DIR: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/data");

pub fn data_path(name: &str) -> String {
    format!("{DATA_DIR}/{name}")
}

/// Random proper step CDF with `1..=max_steps` breakpoints in `[0, 1]`.
pub fn random_step_cdf(rng: &mut ChaCha8Rng, max_steps: usize) -> StepCdf {
    let k = rng.random_range(1..=max_steps);
    let mut xs: Vec<f64> = (0..k).map(|_| rng.random_range(0.0..1.0)).collect();
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    let mut ws: Vec<f64> = xs.iter().map(|_| rng.random_range(0.05..1.0)).collect();
    let total: f64 = ws.iter().sum();
    let mut acc = 0.0;
    for w in ws.iter_mut() {
        acc += *w / total;
        *w = acc;
    }
    *ws.last_mut().unwrap() = 1.0;
    StepCdf::new(xs, ws).unwrap()
}

/// `∫_lo^hi g(F(t)) dt` for a step CDF, exact because `F` is piecewise
/// constant. `F` is forced to 1 at and above `cap` when given.
fn integrate_step(f: &StepCdf, lo: f64, hi: f64, cap: Option<f64>, g: impl Fn(f64) -> f64) -> f64 {
    if hi <= lo {
        return 0.0;
    }
    let mut cuts: Vec<f64> = f
        .breakpoints()
        .iter()
        .copied()
        .chain(cap)
        .filter(|&x| x > lo && x < hi)
        .collect();
    cuts.push(hi);
    let value = |t: f64| match cap {
        Some(c) if t >= c => 1.0,
        _ => f.evaluate(t),
    };
    let mut total = 0.0;
    let mut left = lo;
    for c in cuts {
        total += g(value(left)) * (c - left);
        left = c;
    }
    total
}

/// Largest `v` whose cost of moving mass from right of `x0` onto `x0`,
/// `∫_{x0}^{hi} (v − F)⁺`, stays within `d`. Bisection on the cost.
pub fn brute_upper(f: &StepCdf, d: f64, x0: f64, support: Option<(f64, f64)>) -> f64 {
    let start = f.evaluate(x0);
    if let Some((a, b)) = support {
        if x0 < a {
            return start;
        }
        if x0 >= b {
            return 1.0;
        }
    }
    let (cap, hi) = match support {
        Some((_, b)) => (Some(b), b),
        None => (None, f.last_breakpoint()),
    };
    let cost = |v: f64| integrate_step(f, x0, hi, cap, |fv| (v - fv).max(0.0));
    if cost(1.0) <= d {
        return 1.0;
    }
    let (mut lo, mut up) = (start, 1.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + up);
        if cost(mid) <= d {
            lo = mid;
        } else {
            up = mid;
        }
    }
    lo
}

/// Smallest `v` whose cost of pushing mass at or left of `x0` just past it,
/// `∫_{lo}^{x0} (F − v)⁺`, stays within `d`.
pub fn brute_lower(f: &StepCdf, d: f64, x0: f64, support: Option<(f64, f64)>) -> f64 {
    let start = f.evaluate(x0);
    if let Some((a, b)) = support {
        if x0 < a {
            return 0.0;
        }
        if x0 >= b {
            return 1.0;
        }
    }
    let lo = match support {
        Some((a, _)) => a,
        None => f.first_breakpoint(),
    };
    let cost = |v: f64| integrate_step(f, lo, x0, None, |fv| (fv - v).max(0.0));
    if cost(0.0) <= d {
        return 0.0;
    }
    let (mut down, mut hi) = (0.0, start);
    for _ in 0..200 {
        let mid = 0.5 * (down + hi);
        if cost(mid) <= d {
            hi = mid;
        } else {
            down = mid;
        }
    }
    hi
}

/// One linear constraint `a·z ≥ b`.
pub struct Row {
    pub a: Vec<f64>,
    pub b: f64,
}

/// Minimise `c·z` over `{z : rows}` by enumerating every vertex: each choice
/// of `n` rows solved as equalities, kept when it satisfies all rows.
/// Returns `None` when no vertex is feasible.
pub fn vertex_enumeration(c: &[f64], rows: &[Row]) -> Option<(f64, Vec<f64>)> {
    let n = c.len();
    let mut best: Option<(f64, Vec<f64>)> = None;
    let mut pick: Vec<usize> = (0..n).collect();
    if rows.len() < n {
        return None;
    }
    loop {
        let m = DMatrix::from_fn(n, n, |i, j| rows[pick[i]].a[j]);
        let rhs = DVector::from_fn(n, |i, _| rows[pick[i]].b);
        if let Some(z) = m.clone().lu().solve(&rhs) {
            let residual = (&m * &z - &rhs).amax();
            let feasible = residual < 1e-9
                && rows.iter().all(|r| {
                    let lhs: f64 = r.a.iter().zip(z.iter()).map(|(a, v)| a * v).sum();
                    lhs >= r.b - 1e-9
                });
            if feasible {
                let obj: f64 = c.iter().zip(z.iter()).map(|(a, v)| a * v).sum();
                if best.as_ref().is_none_or(|(b, _)| obj < *b) {
                    best = Some((obj, z.iter().copied().collect()));
                }
            }
        }
        // next n-combination of rows in lexicographic order
        let mut i = n;
        loop {
            if i == 0 {
                return best;
            }
            i -= 1;
            if pick[i] < rows.len() - n + i {
                pick[i] += 1;
                for j in i + 1..n {
                    pick[j] = pick[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Minimal band area of a degree ≤ 1 interval predictor, rebuilt from
/// scratch in the monomial basis `f(s) = a + b·s` on the unit domain and
/// solved by vertex enumeration.
pub fn ipm_area_oracle(points: &[(f64, f64)], degree: usize, grid_size: usize, monotone_tail: bool) -> Option<f64> {
    assert!(degree <= 1, "oracle covers constant and linear bands");
    let r_min = points.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
    let r_max = points.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
    let to_s = |r: f64| 2.0 * (r - r_min) / (r_max - r_min) - 1.0;
    let k = degree + 1;
    let basis = |s: f64| -> Vec<f64> { (0..k).map(|j| s.powi(j as i32)).collect() };
    // z = [u_0, (u_1), l_0, (l_1)]
    let upper = |s: f64, sign: f64| -> Vec<f64> {
        basis(s).into_iter().map(|v| sign * v).chain(std::iter::repeat_n(0.0, k)).collect()
    };
    let lower = |s: f64, sign: f64| -> Vec<f64> {
        std::iter::repeat_n(0.0, k).chain(basis(s).into_iter().map(|v| sign * v)).collect()
    };
    let mut rows = Vec::new();
    for &(r, d) in points {
        let s = to_s(r);
        rows.push(Row { a: upper(s, 1.0), b: d });
        rows.push(Row { a: lower(s, -1.0), b: -d });
    }
    for g in 0..grid_size {
        let s = -1.0 + 2.0 * g as f64 / (grid_size - 1) as f64;
        let gap: Vec<f64> = upper(s, 1.0).iter().zip(lower(s, -1.0)).map(|(a, b)| a + b).collect();
        rows.push(Row { a: gap, b: 0.0 });
        rows.push(Row { a: lower(s, 1.0), b: 0.0 });
    }
    if monotone_tail && degree == 1 {
        rows.push(Row {
            a: vec![0.0, 1.0, 0.0, 0.0],
            b: 0.0,
        });
    }
    // ∫ over [r_min, r_max] of a + b·s is (r_max − r_min)·a
    let width = r_max - r_min;
    let mut c = vec![0.0; 2 * k];
    c[0] = width;
    c[k] = -width;
    vertex_enumeration(&c, &rows).map(|(obj, _)| obj)
}

/// Random calibration points for an interval predictor: `n` points with
/// distinct distances in `[0, 5]` and discrepancies in `[0, 3]`.
pub fn random_ipm_points(rng: &mut ChaCha8Rng, n: usize) -> Vec<(f64, f64)> {
    loop {
        let pts: Vec<(f64, f64)> = (0..n)
            .map(|_| (rng.random_range(0.0..5.0), rng.random_range(0.0..3.0)))
            .collect();
        let mut rs: Vec<f64> = pts.iter().map(|p| p.0).collect();
        rs.sort_by(f64::total_cmp);
        if rs.windows(2).all(|w| w[1] - w[0] > 1e-3) {
            return pts;
        }
    }
}

/// Linearly interpolated quantile of a sample (type 7).
pub fn quantile(sample: &[f64], p: f64) -> f64 {
    let mut s = sample.to_vec();
    s.sort_by(f64::total_cmp);
    let h = p * (s.len() - 1) as f64;
    let i = h.floor() as usize;
    let j = (i + 1).min(s.len() - 1);
    s[i] + (h - i as f64) * (s[j] - s[i])
}
