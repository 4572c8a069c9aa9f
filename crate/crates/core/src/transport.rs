//! CDF envelopes of a 1-Wasserstein ball around a base distribution.
//!
//! For a query point `x0` the upper envelope is the largest probability
//! `Q((-∞, x0])` reachable by moving at most `d` units of transport cost.
//! The cheapest way to raise the CDF to `v` at `x0` moves the mass lying
//! closest to the right of `x0` onto `x0`, so
//!
//! ```text
//! cost(v) = ∫_{x0}^{t_v} (v − F(t)) dt,    t_v = inf { t : F(t) ≥ v }
//! ```
//!
//! and the lower envelope mirrors this to the left. Because `F` is a step
//! function, `cost` is piecewise linear in `v` and is inverted exactly.

use serde::{Deserialize, Serialize};

use crate::error::{CiiError, Result};
use crate::lp::{self, LinearProgram, LpStatus};
use crate::uncertain::{merged_grid, Interval, PBox, StepCdf};

/// Uniform points added to the base breakpoints in the default query grid.
pub const DEFAULT_UNIFORM_POINTS: usize = 128;

/// Extra knowledge restricting admissible distributions in the ball.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct BallConstraints {
    /// Every admissible distribution lives on `[lo, hi]`.
    pub support: Option<Interval>,
}

impl BallConstraints {
    pub fn unconstrained() -> Self {
        Self { support: None }
    }

    pub fn with_support(lo: f64, hi: f64) -> Result<Self> {
        if !(lo < hi) {
            return Err(CiiError::InvalidArgument(format!(
                "support [{lo}, {hi}] must have lo < hi"
            )));
        }
        Ok(Self {
            support: Some(Interval::new(lo, hi)?),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeResult {
    pub pbox: PBox,
    /// Ball radius in response units.
    pub budget: f64,
}

/// Step CDF with prefix integrals for O(log n) partial integrals.
struct Prepared<'a> {
    x: &'a [f64],
    level: &'a [f64],
    /// `prefix[j] = ∫_{x[0]}^{x[j]} F`
    prefix: Vec<f64>,
}

impl<'a> Prepared<'a> {
    fn new(x: &'a [f64], level: &'a [f64]) -> Self {
        let mut prefix = Vec::with_capacity(x.len());
        let mut acc = 0.0;
        prefix.push(0.0);
        for j in 1..x.len() {
            acc += level[j - 1] * (x[j] - x[j - 1]);
            prefix.push(acc);
        }
        Self { x, level, prefix }
    }

    /// Number of breakpoints `<= t`.
    fn count_le(&self, t: f64) -> usize {
        self.x.partition_point(|&b| b <= t)
    }

    fn value(&self, t: f64) -> f64 {
        match self.count_le(t) {
            0 => 0.0,
            k => self.level[k - 1],
        }
    }

    /// `∫_{x[0]}^{t} F`, zero for `t` left of the first breakpoint.
    fn integral_to(&self, t: f64) -> f64 {
        match self.count_le(t) {
            0 => 0.0,
            k => self.prefix[k - 1] + self.level[k - 1] * (t - self.x[k - 1]),
        }
    }

    /// Largest `v` with `∫_{x0}^{t_v} (v − F) ≤ d`.
    fn raise(&self, x0: f64, d: f64) -> f64 {
        let f0 = self.value(x0);
        let n = self.x.len();
        let start = self.count_le(x0);
        if d <= 0.0 || start == n {
            return f0;
        }
        let base = self.integral_to(x0);
        // cost of reaching level[j] (which first occurs at x[j])
        let cost = |j: usize| self.level[j] * (self.x[j] - x0) - (self.prefix[j] - base);
        // first j in [start, n) whose level costs more than d
        let (mut lo, mut hi) = (start, n);
        while lo < hi {
            let mid = lo + (hi - lo) / 2;
            if cost(mid) > d {
                hi = mid;
            } else {
                lo = mid + 1;
            }
        }
        if lo == n {
            return self.level[n - 1];
        }
        let j = lo;
        let below = if j == start { f0 } else { self.level[j - 1] };
        let v = (d + self.prefix[j] - base) / (self.x[j] - x0);
        v.clamp(below, self.level[j])
    }

    /// Smallest `v` with `∫_{s_v}^{x0} (F − v) ≤ d`.
    fn lower(&self, x0: f64, d: f64) -> f64 {
        let f0 = self.value(x0);
        let k = self.count_le(x0);
        if d <= 0.0 || k == 0 {
            return f0;
        }
        let top = self.integral_to(x0);
        let level_before = |j: usize| if j == 0 { 0.0 } else { self.level[j - 1] };
        // cost of pushing the CDF down to the level just left of x[j]
        let cost = |j: usize| (top - self.prefix[j]) - level_before(j) * (x0 - self.x[j]);
        // last j in [0, k) whose bottom level costs more than d
        let (mut lo, mut hi) = (0, k);
        while lo < hi {
            let mid = lo + (hi - lo) / 2;
            if cost(mid) > d {
                lo = mid + 1;
            } else {
                hi = mid;
            }
        }
        if lo == 0 {
            return 0.0;
        }
        let j = lo - 1;
        let above = if j + 1 == k { f0 } else { self.level[j] };
        let v = (top - self.prefix[j] - d) / (x0 - self.x[j]);
        v.clamp(level_before(j), above)
    }
}

fn check_budget(d: f64) -> Result<()> {
    if !(d >= 0.0) || !d.is_finite() {
        return Err(CiiError::InvalidArgument(format!(
            "transport budget must be finite and nonnegative, got {d}"
        )));
    }
    Ok(())
}

fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(CiiError::InvalidArgument("empty query grid".into()));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) || grid.iter().any(|x| !x.is_finite()) {
        return Err(CiiError::InvalidArgument(
            "query grid must be finite and strictly increasing".into(),
        ));
    }
    Ok(())
}

/// Base CDF forced to 1 from `hi` onwards.
fn truncate_above(base: &StepCdf, hi: f64) -> (Vec<f64>, Vec<f64>) {
    let keep = base.breakpoints().partition_point(|&b| b < hi);
    let mut x = base.breakpoints()[..keep].to_vec();
    let mut l = base.levels()[..keep].to_vec();
    x.push(hi);
    l.push(1.0);
    (x, l)
}

/// Base CDF forced to 0 below `lo`.
fn truncate_below(base: &StepCdf, lo: f64) -> (Vec<f64>, Vec<f64>) {
    let at = base.evaluate(lo);
    let first = base.breakpoints().partition_point(|&b| b <= lo);
    let mut x = Vec::with_capacity(base.len() - first + 1);
    let mut l = Vec::with_capacity(x.capacity());
    if at > 0.0 {
        x.push(lo);
        l.push(at);
    }
    x.extend_from_slice(&base.breakpoints()[first..]);
    l.extend_from_slice(&base.levels()[first..]);
    (x, l)
}

/// Sup of `Q((-∞, x])` over the ball, evaluated on `query_grid`.
pub fn upper_envelope(
    base: &StepCdf,
    d: f64,
    c: &BallConstraints,
    query_grid: &[f64],
) -> Result<StepCdf> {
    check_budget(d)?;
    check_grid(query_grid)?;
    let (x, l) = match c.support {
        Some(s) => truncate_above(base, s.hi),
        None => (base.breakpoints().to_vec(), base.levels().to_vec()),
    };
    let prep = Prepared::new(&x, &l);
    let mut values = Vec::with_capacity(query_grid.len());
    let mut running: f64 = 0.0;
    for &x0 in query_grid {
        let v = match c.support {
            Some(s) if x0 < s.lo => base.evaluate(x0),
            Some(s) if x0 >= s.hi => 1.0,
            _ => prep.raise(x0, d),
        };
        running = running.max(v.max(base.evaluate(x0)).clamp(0.0, 1.0));
        values.push(running);
    }
    StepCdf::from_grid_values(query_grid, &values)
}

/// Inf of `Q((-∞, x])` over the ball, evaluated on `query_grid`.
pub fn lower_envelope(
    base: &StepCdf,
    d: f64,
    c: &BallConstraints,
    query_grid: &[f64],
) -> Result<StepCdf> {
    check_budget(d)?;
    check_grid(query_grid)?;
    let (x, l) = match c.support {
        Some(s) => truncate_below(base, s.lo),
        None => (base.breakpoints().to_vec(), base.levels().to_vec()),
    };
    let prep = Prepared::new(&x, &l);
    let mut values = Vec::with_capacity(query_grid.len());
    for &x0 in query_grid {
        let v = match c.support {
            Some(s) if x0 < s.lo => 0.0,
            Some(s) if x0 >= s.hi => 1.0,
            _ if prep.x.is_empty() => 0.0,
            _ => prep.lower(x0, d),
        };
        values.push(v.min(base.evaluate(x0)).clamp(0.0, 1.0));
    }
    // suffix minimum keeps the output monotone under round-off
    for i in (0..values.len().saturating_sub(1)).rev() {
        values[i] = values[i].min(values[i + 1]);
    }
    StepCdf::from_grid_values(query_grid, &values)
}

/// Base breakpoints plus uniform points over the base range, widened to the
/// support constraint when one is given.
pub fn default_query_grid(base: &PBox, c: &BallConstraints) -> Vec<f64> {
    let bps = base.grid();
    let mut lo = bps[0];
    let mut hi = *bps.last().unwrap();
    if let Some(s) = c.support {
        lo = lo.min(s.lo);
        hi = hi.max(s.hi);
    }
    let n = DEFAULT_UNIFORM_POINTS;
    let uniform: Vec<f64> = if hi > lo {
        // the last point lands exactly on `hi` so the support edge is on the grid
        (0..n)
            .map(|i| if i == n - 1 { hi } else { lo + (hi - lo) * i as f64 / (n - 1) as f64 })
            .collect()
    } else {
        vec![lo]
    };
    merged_grid(&[&bps], &uniform)
}

/// Bound-wise ball envelope of a p-box: the upper envelope of its upper
/// bound and the lower envelope of its lower bound.
pub fn ascloseas(
    base: &PBox,
    d: f64,
    c: &BallConstraints,
    query_grid: Option<&[f64]>,
) -> Result<EnvelopeResult> {
    check_budget(d)?;
    if d == 0.0 {
        return Ok(EnvelopeResult {
            pbox: base.clone(),
            budget: 0.0,
        });
    }
    let owned;
    let grid = match query_grid {
        Some(g) => g,
        None => {
            owned = default_query_grid(base, c);
            &owned
        }
    };
    let upper = upper_envelope(base.upper(), d, c, grid)?;
    let lower = lower_envelope(base.lower(), d, c, grid)?;
    Ok(EnvelopeResult {
        pbox: PBox::new(lower, upper)?,
        budget: d,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sense {
    Sup,
    Inf,
}

/// Brute-force envelope value at `x0` from a discretised linear program.
///
/// The support (or the base range padded by one cell) is cut into
/// `grid_size` cells; the candidate CDF `G_i = F_i + p_i − n_i` is constant
/// on each cell, with `F_i` the base value at the cell's left edge.
/// Constraints: `G` nondecreasing, `0 ≤ G ≤ 1`, `G = 1` at the right end and
/// `Σ (p_i + n_i) Δx ≤ d`, the W₁ distance between lattice CDFs. The
/// objective is `±G_k` on the cell containing `x0`.
pub fn envelope_oracle(
    base: &StepCdf,
    d: f64,
    c: &BallConstraints,
    x0: f64,
    sense: Sense,
    grid_size: usize,
) -> Result<f64> {
    check_budget(d)?;
    if grid_size < 16 {
        return Err(CiiError::InvalidArgument(format!(
            "oracle grid of {grid_size} cells; need at least 16"
        )));
    }
    let (lo, hi) = match c.support {
        Some(s) => {
            if x0 < s.lo {
                return Ok(0.0);
            }
            if x0 >= s.hi {
                return Ok(1.0);
            }
            (s.lo, s.hi)
        }
        None => {
            let lo = x0.min(base.first_breakpoint());
            let hi = x0.max(base.last_breakpoint());
            let pad = if hi > lo { (hi - lo) / grid_size as f64 } else { 1.0 };
            (lo - pad, hi + pad)
        }
    };
    let n = grid_size;
    let dx = (hi - lo) / n as f64;
    let f: Vec<f64> = (0..n).map(|i| base.evaluate(lo + i as f64 * dx)).collect();
    let k = (((x0 - lo) / dx).floor() as usize).min(n - 1);

    // columns: p_0..p_{n-1}, n_0..n_{n-1}
    let idx_p = |i: usize| i;
    let idx_n = |i: usize| n + i;
    let mut objective = vec![0.0; 2 * n];
    let sign = match sense {
        Sense::Sup => -1.0,
        Sense::Inf => 1.0,
    };
    objective[idx_p(k)] = sign;
    objective[idx_n(k)] = -sign;
    let mut prog = LinearProgram::new(objective);
    for i in 0..n - 1 {
        let mut row = vec![0.0; 2 * n];
        row[idx_p(i)] = 1.0;
        row[idx_n(i)] = -1.0;
        row[idx_p(i + 1)] = -1.0;
        row[idx_n(i + 1)] = 1.0;
        prog.add_le(row, f[i + 1] - f[i]);
    }
    let mut first = vec![0.0; 2 * n];
    first[idx_p(0)] = -1.0;
    first[idx_n(0)] = 1.0;
    prog.add_le(first, f[0]);
    let mut last = vec![0.0; 2 * n];
    last[idx_p(n - 1)] = 1.0;
    last[idx_n(n - 1)] = -1.0;
    prog.add_le(last, 1.0 - f[n - 1]);
    prog.add_le(vec![dx; 2 * n], d);

    let sol = lp::solve(&prog)?;
    if sol.status != LpStatus::Optimal {
        return Err(CiiError::Lp(format!("transport oracle is {:?}", sol.status)));
    }
    Ok((f[k] + sol.z[idx_p(k)] - sol.z[idx_n(k)]).clamp(0.0, 1.0))
}
