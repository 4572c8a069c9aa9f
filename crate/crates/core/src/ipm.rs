//! Interval predictor model: polynomial lower and upper envelopes of the
//! conformal score as a function of distance, fitted by a scenario LP that
//! encloses every calibration point with minimal integrated spread.

use serde::{Deserialize, Serialize};

use crate::distance::DistanceModel;
use crate::error::{CiiError, Result};
use crate::lp::{self, LinearProgram, LpStatus};
use crate::uncertain::Interval;

pub const DEFAULT_DEGREE: usize = 2;
pub const DEFAULT_GRID_SIZE: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum BasisKind {
    /// Chebyshev polynomials of the first kind on the domain mapped to `[-1, 1]`.
    #[default]
    ChebyshevOnDomain,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntervalPredictor {
    pub degree_upper: usize,
    pub degree_lower: usize,
    pub coeffs_upper: Vec<f64>,
    pub coeffs_lower: Vec<f64>,
    /// `[r_min, r_max]` of the fitting points.
    pub domain: (f64, f64),
    pub basis_kind: BasisKind,
}

/// `T_0(s) ..= T_degree(s)`.
fn chebyshev(s: f64, degree: usize) -> Vec<f64> {
    let mut t = Vec::with_capacity(degree + 1);
    t.push(1.0);
    if degree >= 1 {
        t.push(s);
    }
    for j in 2..=degree {
        t.push(2.0 * s * t[j - 1] - t[j - 2]);
    }
    t
}

/// `T_j^{(k)}(1) = Π_{i<k} (j² − i²) / (2i + 1)`.
fn chebyshev_derivative_at_one(j: usize, k: usize) -> f64 {
    (0..k)
        .map(|i| ((j * j) as f64 - (i * i) as f64) / (2 * i + 1) as f64)
        .product()
}

/// `∫_{-1}^{1} T_j(s) ds`.
fn chebyshev_integral(j: usize) -> f64 {
    if j % 2 == 1 {
        0.0
    } else {
        2.0 / (1.0 - (j * j) as f64)
    }
}

fn to_unit(r: f64, (lo, hi): (f64, f64)) -> f64 {
    (2.0 * r - (lo + hi)) / (hi - lo)
}

impl IntervalPredictor {
    fn eval(coeffs: &[f64], s: f64) -> f64 {
        chebyshev(s, coeffs.len() - 1)
            .iter()
            .zip(coeffs)
            .map(|(t, c)| t * c)
            .sum()
    }

    /// Raw upper edge `f_u(r)`.
    pub fn upper(&self, r: f64) -> f64 {
        Self::eval(&self.coeffs_upper, to_unit(r, self.domain))
    }

    /// Raw lower edge `f_l(r)`.
    pub fn lower(&self, r: f64) -> f64 {
        Self::eval(&self.coeffs_lower, to_unit(r, self.domain))
    }

    /// `[max(0, f_l), max(f_u, max(0, f_l))]`; evaluates the polynomials
    /// directly outside the fitted domain.
    pub fn predict_band(&self, r: f64) -> Interval {
        let lo = self.lower(r).max(0.0);
        let hi = self.upper(r).max(lo);
        Interval { lo, hi }
    }

    /// Band area `∫ (f_u − f_l) dr` over the fitted domain.
    pub fn band_area(&self) -> f64 {
        let half_width = 0.5 * (self.domain.1 - self.domain.0);
        let integral = |c: &[f64]| -> f64 {
            c.iter()
                .enumerate()
                .map(|(j, v)| v * chebyshev_integral(j))
                .sum::<f64>()
                * half_width
        };
        integral(&self.coeffs_upper) - integral(&self.coeffs_lower)
    }

    /// Largest amount by which any point escapes the raw band.
    pub fn max_enclosure_violation(&self, points: &[(f64, f64)]) -> f64 {
        points
            .iter()
            .map(|&(r, d)| (d - self.upper(r)).max(self.lower(r) - d))
            .fold(0.0, f64::max)
    }

    /// Discrepancy budget at distance `r`: band midpoint inside the training
    /// support (`r <= r0`), upper edge beyond it.
    pub fn adjusted_for_score(&self, r: f64, r0: f64) -> f64 {
        let band = self.predict_band(r);
        if r <= r0 {
            band.midpoint()
        } else {
            band.hi
        }
    }
}

pub fn predict_band(m: &IntervalPredictor, r: f64) -> Interval {
    m.predict_band(r)
}

pub fn adjusted_discrepancy(m: &IntervalPredictor, dm: &DistanceModel, x: &[f64]) -> Result<f64> {
    let r = dm.score(x)?;
    Ok(m.adjusted_for_score(r, dm.r0()))
}

/// Options of the band fit beyond degree and grid size.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct IpmOptions {
    pub degree: usize,
    pub grid_size: usize,
    /// Require every derivative of the upper edge to be nonnegative at the
    /// right end of the domain, which makes the edge nondecreasing for all
    /// larger distances.
    pub monotone_tail: bool,
}

impl Default for IpmOptions {
    fn default() -> Self {
        Self {
            degree: DEFAULT_DEGREE,
            grid_size: DEFAULT_GRID_SIZE,
            monotone_tail: true,
        }
    }
}

/// Fit the minimal-spread enclosing band through `(r, d)` points, with a
/// nondecreasing upper edge beyond the fitted domain.
pub fn fit_ipm(points: &[(f64, f64)], degree: usize, grid_size: usize) -> Result<IntervalPredictor> {
    fit_ipm_with(
        points,
        &IpmOptions {
            degree,
            grid_size,
            monotone_tail: true,
        },
    )
}

pub fn fit_ipm_with(points: &[(f64, f64)], opts: &IpmOptions) -> Result<IntervalPredictor> {
    let (degree, grid_size) = (opts.degree, opts.grid_size);
    if points.len() < degree + 2 {
        return Err(CiiError::InsufficientData(format!(
            "degree {degree} band needs at least {} points, got {}",
            degree + 2,
            points.len()
        )));
    }
    if grid_size < 2 * degree + 2 {
        return Err(CiiError::InvalidArgument(format!(
            "grid of {grid_size} points is too coarse for degree {degree}"
        )));
    }
    if points.iter().any(|&(r, d)| !r.is_finite() || !d.is_finite()) {
        return Err(CiiError::NonFinite("calibration points".into()));
    }
    if let Some(&(_, d)) = points.iter().find(|p| p.1 < 0.0) {
        return Err(CiiError::InvalidArgument(format!("negative discrepancy {d}")));
    }
    let r_min = points.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
    let r_max = points.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
    if !(r_max > r_min) {
        return Err(CiiError::DegenerateDistanceRange);
    }
    let domain = (r_min, r_max);
    let k = degree + 1;
    let half_width = 0.5 * (r_max - r_min);

    // variables: [u_0..u_deg, l_0..l_deg], all free
    let mut objective = vec![0.0; 2 * k];
    for j in 0..k {
        let w = chebyshev_integral(j) * half_width;
        objective[j] = w;
        objective[k + j] = -w;
    }
    let mut prog = LinearProgram::new(objective);
    for v in 0..2 * k {
        prog.set_free(v);
    }
    let upper_row = |t: &[f64]| -> Vec<f64> { t.iter().copied().chain(std::iter::repeat_n(0.0, k)).collect() };
    let lower_row = |t: &[f64]| -> Vec<f64> { std::iter::repeat_n(0.0, k).chain(t.iter().copied()).collect() };
    for &(r, d) in points {
        let t = chebyshev(to_unit(r, domain), degree);
        prog.add_ge(upper_row(&t), d);
        prog.add_le(lower_row(&t), d);
    }
    for g in 0..grid_size {
        let s = -1.0 + 2.0 * g as f64 / (grid_size - 1) as f64;
        let t = chebyshev(s, degree);
        let order: Vec<f64> = t.iter().copied().chain(t.iter().map(|v| -v)).collect();
        prog.add_ge(order, 0.0);
        prog.add_ge(lower_row(&t), 0.0);
    }

    if opts.monotone_tail {
        for order in 1..=degree {
            let row: Vec<f64> = (0..k)
                .map(|j| chebyshev_derivative_at_one(j, order))
                .chain(std::iter::repeat_n(0.0, k))
                .collect();
            prog.add_ge(row, 0.0);
        }
    }

    let sol = lp::solve(&prog)?;
    match sol.status {
        LpStatus::Optimal => {}
        other => return Err(CiiError::Lp(format!("interval predictor LP is {other:?}"))),
    }
    let mut m = IntervalPredictor {
        degree_upper: degree,
        degree_lower: degree,
        coeffs_upper: sol.z[..k].to_vec(),
        coeffs_lower: sol.z[k..].to_vec(),
        domain,
        basis_kind: BasisKind::ChebyshevOnDomain,
    };
    // absorb simplex round-off into the constant terms so enclosure is exact
    let up_gap = points
        .iter()
        .map(|&(r, d)| d - m.upper(r))
        .fold(0.0, f64::max);
    let lo_gap = points
        .iter()
        .map(|&(r, d)| m.lower(r) - d)
        .fold(0.0, f64::max);
    m.coeffs_upper[0] += up_gap;
    m.coeffs_lower[0] -= lo_gap;
    Ok(m)
}
