use serde::{Deserialize, Serialize};

use super::cdf::{merged_grid, StepCdf, LEVEL_TOL};
use crate::error::{CiiError, Result};

/// Closed real interval `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !lo.is_finite() || !hi.is_finite() {
            return Err(CiiError::NonFinite("interval".into()));
        }
        if lo > hi {
            return Err(CiiError::InvalidArgument(format!("interval [{lo}, {hi}]")));
        }
        Ok(Self { lo, hi })
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn contains_interval(&self, other: &Interval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    /// Smallest interval containing both.
    pub fn hull(&self, other: &Interval) -> Interval {
        Interval {
            lo: self.lo.min(other.lo),
            hi: self.hi.max(other.hi),
        }
    }
}

/// Pair of CDFs bounding a set of distributions: `lower <= F <= upper`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PBox {
    lower: StepCdf,
    upper: StepCdf,
}

impl PBox {
    pub fn new(lower: StepCdf, upper: StepCdf) -> Result<Self> {
        let grid = merged_grid(&[lower.breakpoints(), upper.breakpoints()], &[]);
        for &x in &grid {
            let (lo, up) = (lower.evaluate(x), upper.evaluate(x));
            if up < lo - LEVEL_TOL {
                return Err(CiiError::InvalidPBox(format!(
                    "upper bound {up} below lower bound {lo} at x = {x}"
                )));
            }
        }
        Ok(Self { lower, upper })
    }

    pub fn precise(cdf: StepCdf) -> Self {
        Self {
            lower: cdf.clone(),
            upper: cdf,
        }
    }

    /// Lower probability bound (the pointwise smaller CDF).
    pub fn lower(&self) -> &StepCdf {
        &self.lower
    }

    /// Upper probability bound (the pointwise larger CDF).
    pub fn upper(&self) -> &StepCdf {
        &self.upper
    }

    pub fn is_precise(&self) -> bool {
        self.lower == self.upper
    }

    /// Union of both bounds' breakpoints.
    pub fn grid(&self) -> Vec<f64> {
        merged_grid(&[self.lower.breakpoints(), self.upper.breakpoints()], &[])
    }

    /// `[leftmost support of upper, rightmost support of lower]`.
    pub fn range_interval(&self) -> Result<Interval> {
        let lo_idx = self
            .upper
            .levels()
            .iter()
            .position(|&l| l > 0.0)
            .ok_or_else(|| CiiError::ImproperCdf("upper bound is identically zero".into()))?;
        let hi_idx = self
            .lower
            .levels()
            .iter()
            .position(|&l| l >= 1.0 - LEVEL_TOL)
            .ok_or_else(|| CiiError::ImproperCdf("lower bound never reaches 1".into()))?;
        let a = self.upper.breakpoints()[lo_idx];
        let b = self.lower.breakpoints()[hi_idx];
        Interval::new(a, b)
    }

    /// Area between the bounds, `∫ (upper - lower) dx`.
    pub fn breadth(&self) -> Result<f64> {
        let grid = self.grid();
        let tail = self.upper.final_level() - self.lower.final_level();
        if tail > LEVEL_TOL {
            return Err(CiiError::ImproperCdf(
                "bounds never meet, breadth is unbounded".into(),
            ));
        }
        Ok(integrate_steps(&grid, |x| {
            self.upper.evaluate(x) - self.lower.evaluate(x)
        }))
    }

    /// Central interval `[upper⁻¹(α/2), lower⁻¹(1 − α/2)]`.
    pub fn central_interval(&self, alpha: f64) -> Result<Interval> {
        let a = self
            .upper
            .quantile(0.5 * alpha)
            .ok_or_else(|| CiiError::ImproperCdf("upper bound quantile".into()))?;
        let b = self
            .lower
            .quantile(1.0 - 0.5 * alpha)
            .ok_or_else(|| CiiError::ImproperCdf("lower bound quantile".into()))?;
        Interval::new(a, b.max(a))
    }

    /// True if `other` lies inside this p-box at every breakpoint of either.
    pub fn contains(&self, other: &PBox, tol: f64) -> bool {
        let grid = merged_grid(&[&self.grid(), &other.grid()], &[]);
        grid.iter().all(|&x| {
            self.lower.evaluate(x) <= other.lower.evaluate(x) + tol
                && other.upper.evaluate(x) <= self.upper.evaluate(x) + tol
        })
    }
}

/// Scalar, interval, distribution or p-box.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum UncertainNumber {
    Scalar(f64),
    Interval(Interval),
    Distribution(StepCdf),
    Box(PBox),
}

impl UncertainNumber {
    pub fn to_pbox(&self) -> PBox {
        match self {
            UncertainNumber::Scalar(v) => PBox::precise(StepCdf::step(*v)),
            UncertainNumber::Interval(iv) => PBox {
                lower: StepCdf::step(iv.hi),
                upper: StepCdf::step(iv.lo),
            },
            UncertainNumber::Distribution(f) => PBox::precise(f.clone()),
            UncertainNumber::Box(p) => p.clone(),
        }
    }

    /// Most specific variant representing `p` exactly.
    pub fn from_pbox(p: PBox) -> Self {
        let unit_step = |f: &StepCdf| f.len() == 1 && f.final_level() == 1.0;
        if p.is_precise() {
            if unit_step(p.lower()) {
                UncertainNumber::Scalar(p.lower().first_breakpoint())
            } else {
                UncertainNumber::Distribution(p.lower)
            }
        } else if unit_step(p.lower()) && unit_step(p.upper()) {
            UncertainNumber::Interval(Interval {
                lo: p.upper().first_breakpoint(),
                hi: p.lower().first_breakpoint(),
            })
        } else {
            UncertainNumber::Box(p)
        }
    }

    /// Interval hull of the support, when it exists.
    pub fn support(&self) -> Result<Interval> {
        match self {
            UncertainNumber::Scalar(v) => Interval::new(*v, *v),
            UncertainNumber::Interval(iv) => Ok(*iv),
            _ => self.to_pbox().range_interval(),
        }
    }
}

pub fn to_pbox(u: &UncertainNumber) -> PBox {
    u.to_pbox()
}

/// Pointwise infimum and supremum of a family of CDFs.
pub fn envelope(cdfs: &[StepCdf]) -> Result<PBox> {
    if cdfs.is_empty() {
        return Err(CiiError::InvalidArgument("envelope of an empty family".into()));
    }
    if cdfs.len() == 1 {
        return Ok(PBox::precise(cdfs[0].clone()));
    }
    let lists: Vec<&[f64]> = cdfs.iter().map(|c| c.breakpoints()).collect();
    let grid = merged_grid(&lists, &[]);
    let mut lo = vec![f64::INFINITY; grid.len()];
    let mut hi = vec![f64::NEG_INFINITY; grid.len()];
    for cdf in cdfs {
        // linear sweep: both the grid and the breakpoints are sorted
        let (bps, lvls) = (cdf.breakpoints(), cdf.levels());
        let mut k = 0;
        let mut value = 0.0;
        for (i, &x) in grid.iter().enumerate() {
            while k < bps.len() && bps[k] <= x {
                value = lvls[k];
                k += 1;
            }
            lo[i] = lo[i].min(value);
            hi[i] = hi[i].max(value);
        }
    }
    Ok(PBox {
        lower: StepCdf::from_grid_values(&grid, &lo)?,
        upper: StepCdf::from_grid_values(&grid, &hi)?,
    })
}

/// Area metric between two p-boxes: the integral of the vertical gap
/// `max(0, S̲ − F̄, F̲ − S̄)` separating the two bands.
///
/// For precise arguments this is `∫ |F − S| dx`, the 1-Wasserstein distance.
/// Returns `f64::INFINITY` when the bands stay apart on an unbounded tail.
pub fn area_metric(p: &PBox, s: &PBox) -> f64 {
    let gap = |x: f64| {
        let a = s.lower.evaluate(x) - p.upper.evaluate(x);
        let b = p.lower.evaluate(x) - s.upper.evaluate(x);
        a.max(b).max(0.0)
    };
    let grid = merged_grid(&[&p.grid(), &s.grid()], &[]);
    let tail = {
        let a = s.lower.final_level() - p.upper.final_level();
        let b = p.lower.final_level() - s.upper.final_level();
        a.max(b)
    };
    if tail > LEVEL_TOL {
        return f64::INFINITY;
    }
    integrate_steps(&grid, gap)
}

pub fn breadth(p: &PBox) -> Result<f64> {
    p.breadth()
}

pub fn range_interval(p: &PBox) -> Result<Interval> {
    p.range_interval()
}

/// Exact integral of a right-continuous step function with jumps only on
/// `grid`, between the first and last grid points.
pub(crate) fn integrate_steps(grid: &[f64], f: impl Fn(f64) -> f64) -> f64 {
    grid.windows(2).map(|w| f(w[0]) * (w[1] - w[0])).sum()
}
