use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{CiiError, Result};

/// Levels within this distance of 1 count as having reached 1.
pub const LEVEL_TOL: f64 = 1e-12;

/// Default number of quantile points used to discretise a parametric CDF.
pub const DEFAULT_DISCRETISATION: usize = 512;

/// Right-continuous, nondecreasing step function.
///
/// The value is 0 before the first breakpoint, `levels[k]` on
/// `[breakpoints[k], breakpoints[k + 1])` and the final level from the last
/// breakpoint onwards.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepCdf {
    breakpoints: Vec<f64>,
    levels: Vec<f64>,
}

impl StepCdf {
    pub fn new(breakpoints: Vec<f64>, levels: Vec<f64>) -> Result<Self> {
        if breakpoints.is_empty() {
            return Err(CiiError::InvalidCdf("no breakpoints".into()));
        }
        if breakpoints.len() != levels.len() {
            return Err(CiiError::InvalidCdf(format!(
                "{} breakpoints but {} levels",
                breakpoints.len(),
                levels.len()
            )));
        }
        if let Some(x) = breakpoints.iter().find(|x| !x.is_finite()) {
            return Err(CiiError::InvalidCdf(format!("non-finite breakpoint {x}")));
        }
        if let Some(w) = breakpoints.windows(2).find(|w| w[1] <= w[0]) {
            return Err(CiiError::InvalidCdf(format!(
                "breakpoints not strictly increasing at {} -> {}",
                w[0], w[1]
            )));
        }
        if let Some(l) = levels.iter().find(|l| !(0.0..=1.0).contains(*l)) {
            return Err(CiiError::InvalidCdf(format!("level {l} outside [0, 1]")));
        }
        if let Some(w) = levels.windows(2).find(|w| w[1] < w[0]) {
            return Err(CiiError::InvalidCdf(format!(
                "levels decrease from {} to {}",
                w[0], w[1]
            )));
        }
        Ok(Self { breakpoints, levels })
    }

    /// Unit step at `at`: the CDF of a point mass.
    pub fn step(at: f64) -> Self {
        Self {
            breakpoints: vec![at],
            levels: vec![1.0],
        }
    }

    /// Build from values sampled on a strictly increasing grid, dropping
    /// breakpoints that do not change the function.
    pub(crate) fn from_grid_values(grid: &[f64], values: &[f64]) -> Result<Self> {
        debug_assert_eq!(grid.len(), values.len());
        let mut bps = Vec::with_capacity(grid.len());
        let mut lvls = Vec::with_capacity(grid.len());
        let mut prev = 0.0;
        for (&x, &v) in grid.iter().zip(values) {
            if v != prev {
                bps.push(x);
                lvls.push(v);
                prev = v;
            }
        }
        if bps.is_empty() {
            bps.push(grid[0]);
            lvls.push(0.0);
        }
        Self::new(bps, lvls)
    }

    /// Build from sorted `(x, level)` pairs where equal `x` values may repeat;
    /// ties keep the last (largest) level.
    fn from_sorted_pairs(pairs: impl IntoIterator<Item = (f64, f64)>) -> Result<Self> {
        let mut bps: Vec<f64> = Vec::new();
        let mut lvls: Vec<f64> = Vec::new();
        for (x, l) in pairs {
            match bps.last() {
                Some(&last) if last == x => *lvls.last_mut().unwrap() = l,
                _ => {
                    bps.push(x);
                    lvls.push(l);
                }
            }
        }
        Self::new(bps, lvls)
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn levels(&self) -> &[f64] {
        &self.levels
    }

    pub fn len(&self) -> usize {
        self.breakpoints.len()
    }

    pub fn is_empty(&self) -> bool {
        self.breakpoints.is_empty()
    }

    pub fn first_breakpoint(&self) -> f64 {
        self.breakpoints[0]
    }

    pub fn last_breakpoint(&self) -> f64 {
        *self.breakpoints.last().unwrap()
    }

    pub fn final_level(&self) -> f64 {
        *self.levels.last().unwrap()
    }

    pub fn is_proper(&self) -> bool {
        self.final_level() >= 1.0 - LEVEL_TOL
    }

    pub fn evaluate(&self, x: f64) -> f64 {
        let k = self.breakpoints.partition_point(|&b| b <= x);
        if k == 0 {
            0.0
        } else {
            self.levels[k - 1]
        }
    }

    /// Left limit `F(x-)`.
    pub fn evaluate_left(&self, x: f64) -> f64 {
        let k = self.breakpoints.partition_point(|&b| b < x);
        if k == 0 {
            0.0
        } else {
            self.levels[k - 1]
        }
    }

    /// Generalised inverse `inf { x : F(x) >= p }`; `None` if never reached.
    pub fn quantile(&self, p: f64) -> Option<f64> {
        let k = self.levels.partition_point(|&l| l < p);
        self.breakpoints.get(k).copied()
    }

    /// Normal distribution discretised on `n` midpoint quantiles, truncated
    /// at eight standard deviations.
    pub fn normal(mean: f64, sd: f64, n: usize) -> Result<Self> {
        if !mean.is_finite() || !sd.is_finite() || sd < 0.0 {
            return Err(CiiError::InvalidArgument(format!(
                "normal({mean}, {sd}) is not a valid distribution"
            )));
        }
        if sd == 0.0 || n <= 1 {
            return Ok(Self::step(mean));
        }
        let std_normal = Normal::new(0.0, 1.0).expect("standard normal");
        let pairs = (1..=n).map(|k| {
            let p = (k as f64 - 0.5) / n as f64;
            let z = std_normal.inverse_cdf(p).clamp(-8.0, 8.0);
            let level = if k == n { 1.0 } else { k as f64 / n as f64 };
            (mean + sd * z, level)
        });
        Self::from_sorted_pairs(pairs)
    }

    /// Uniform distribution on `[lo, hi]` discretised on `n` midpoint quantiles.
    pub fn uniform(lo: f64, hi: f64, n: usize) -> Result<Self> {
        if !(lo < hi) || n == 0 {
            return Err(CiiError::InvalidArgument(format!(
                "uniform({lo}, {hi}) with {n} points"
            )));
        }
        let pairs = (1..=n).map(|k| {
            let p = (k as f64 - 0.5) / n as f64;
            let level = if k == n { 1.0 } else { k as f64 / n as f64 };
            (lo + p * (hi - lo), level)
        });
        Self::from_sorted_pairs(pairs)
    }

    /// Copy of this CDF with redundant breakpoints inserted at `extra`.
    pub fn refined(&self, extra: &[f64]) -> Self {
        let grid = merged_grid(&[self.breakpoints()], extra);
        let values: Vec<f64> = grid.iter().map(|&x| self.evaluate(x)).collect();
        // keep every grid point, unlike `from_grid_values`
        Self {
            breakpoints: grid,
            levels: values,
        }
    }
}

/// Empirical CDF jumping `1/n` at each sorted sample; ties merge.
pub fn empirical_cdf(samples: &[f64]) -> Result<StepCdf> {
    if samples.is_empty() {
        return Err(CiiError::EmptySamples);
    }
    if samples.iter().any(|x| !x.is_finite()) {
        return Err(CiiError::NonFinite("samples".into()));
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    StepCdf::from_sorted_pairs(sorted.into_iter().enumerate().map(|(i, x)| {
        let level = if i + 1 == n { 1.0 } else { (i + 1) as f64 / n as f64 };
        (x, level)
    }))
}

/// Sorted, deduplicated union of breakpoint lists and extra points.
pub(crate) fn merged_grid(lists: &[&[f64]], extra: &[f64]) -> Vec<f64> {
    let mut grid: Vec<f64> = lists
        .iter()
        .flat_map(|l| l.iter().copied())
        .chain(extra.iter().copied())
        .collect();
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    grid
}
