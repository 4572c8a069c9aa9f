//! Dense two-phase primal simplex with Bland's rule.
//!
//! Sized for the small programs in this crate: interval-predictor fits with a
//! dozen columns and a few hundred rows, and the discretised transport
//! oracle with a few hundred columns.

use serde::{Deserialize, Serialize};

use crate::error::{CiiError, Result};

/// Feasibility tolerance on constraint residuals.
pub const FEAS_TOL: f64 = 1e-9;
/// Tolerance for comparing optimal objective values.
pub const OPT_TOL: f64 = 1e-8;

const PIVOT_TOL: f64 = 1e-10;
const COST_TOL: f64 = 1e-10;
const MAX_PIVOTS: usize = 200_000;
const REPRICE_EVERY: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Constraint {
    pub coeffs: Vec<f64>,
    pub relation: Relation,
    pub rhs: f64,
}

/// `minimize cᵀz` subject to row constraints and per-variable bounds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearProgram {
    pub objective: Vec<f64>,
    pub constraints: Vec<Constraint>,
    /// `(lo, hi)` per variable; infinities allowed.
    pub bounds: Vec<(f64, f64)>,
}

impl LinearProgram {
    /// New program with every variable bounded to `[0, ∞)`.
    pub fn new(objective: Vec<f64>) -> Self {
        let n = objective.len();
        Self {
            objective,
            constraints: Vec::new(),
            bounds: vec![(0.0, f64::INFINITY); n],
        }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn set_bounds(&mut self, var: usize, lo: f64, hi: f64) -> &mut Self {
        self.bounds[var] = (lo, hi);
        self
    }

    pub fn set_free(&mut self, var: usize) -> &mut Self {
        self.set_bounds(var, f64::NEG_INFINITY, f64::INFINITY)
    }

    pub fn add(&mut self, coeffs: Vec<f64>, relation: Relation, rhs: f64) -> &mut Self {
        self.constraints.push(Constraint {
            coeffs,
            relation,
            rhs,
        });
        self
    }

    pub fn add_le(&mut self, coeffs: Vec<f64>, rhs: f64) -> &mut Self {
        self.add(coeffs, Relation::Le, rhs)
    }

    pub fn add_ge(&mut self, coeffs: Vec<f64>, rhs: f64) -> &mut Self {
        self.add(coeffs, Relation::Ge, rhs)
    }

    pub fn add_eq(&mut self, coeffs: Vec<f64>, rhs: f64) -> &mut Self {
        self.add(coeffs, Relation::Eq, rhs)
    }

    fn validate(&self) -> Result<()> {
        let n = self.num_vars();
        if n == 0 {
            return Err(CiiError::Lp("program has no variables".into()));
        }
        if self.bounds.len() != n {
            return Err(CiiError::Lp(format!(
                "{} bounds for {n} variables",
                self.bounds.len()
            )));
        }
        if self.objective.iter().any(|c| !c.is_finite()) {
            return Err(CiiError::Lp("non-finite objective coefficient".into()));
        }
        for (i, c) in self.constraints.iter().enumerate() {
            if c.coeffs.len() != n {
                return Err(CiiError::Lp(format!(
                    "row {i} has width {} but there are {n} variables",
                    c.coeffs.len()
                )));
            }
            if !c.rhs.is_finite() || c.coeffs.iter().any(|a| !a.is_finite()) {
                return Err(CiiError::Lp(format!("row {i} has non-finite entries")));
            }
        }
        for (j, &(lo, hi)) in self.bounds.iter().enumerate() {
            if lo.is_nan() || hi.is_nan() || lo > hi || lo == f64::INFINITY || hi == f64::NEG_INFINITY {
                return Err(CiiError::Lp(format!("variable {j} has bounds [{lo}, {hi}]")));
            }
        }
        Ok(())
    }

    /// Largest violation of any row or bound at `z` (0 when feasible).
    pub fn max_violation(&self, z: &[f64]) -> f64 {
        let mut worst: f64 = 0.0;
        for c in &self.constraints {
            let lhs: f64 = c.coeffs.iter().zip(z).map(|(a, v)| a * v).sum();
            let v = match c.relation {
                Relation::Le => lhs - c.rhs,
                Relation::Ge => c.rhs - lhs,
                Relation::Eq => (lhs - c.rhs).abs(),
            };
            worst = worst.max(v);
        }
        for (&(lo, hi), &v) in self.bounds.iter().zip(z) {
            worst = worst.max(lo - v).max(v - hi);
        }
        worst
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LpSolution {
    pub status: LpStatus,
    pub z: Vec<f64>,
    pub objective_value: f64,
}

/// How an original variable maps onto nonnegative tableau columns.
#[derive(Debug, Clone, Copy)]
enum VarMap {
    /// `z = lo + y`
    Shift { col: usize, lo: f64 },
    /// `z = hi - y`
    Mirror { col: usize, hi: f64 },
    /// `z = y⁺ - y⁻`
    Split { pos: usize, neg: usize },
}

struct StdRow {
    coeffs: Vec<f64>,
    relation: Relation,
    rhs: f64,
}

pub fn solve(p: &LinearProgram) -> Result<LpSolution> {
    p.validate()?;

    // nonnegative reformulation
    let mut maps = Vec::with_capacity(p.num_vars());
    let mut ncols = 0;
    let mut bound_rows: Vec<(usize, f64)> = Vec::new();
    for &(lo, hi) in &p.bounds {
        let m = if lo.is_finite() {
            if hi.is_finite() {
                bound_rows.push((ncols, hi - lo));
            }
            VarMap::Shift { col: ncols, lo }
        } else if hi.is_finite() {
            VarMap::Mirror { col: ncols, hi }
        } else {
            ncols += 1;
            VarMap::Split {
                pos: ncols - 1,
                neg: ncols,
            }
        };
        ncols += 1;
        maps.push(m);
    }
    let nstruct = ncols;

    let mut cost = vec![0.0; nstruct];
    for (c, m) in p.objective.iter().zip(&maps) {
        match *m {
            VarMap::Shift { col, .. } => cost[col] += c,
            VarMap::Mirror { col, .. } => cost[col] -= c,
            VarMap::Split { pos, neg } => {
                cost[pos] += c;
                cost[neg] -= c;
            }
        }
    }

    let mut rows: Vec<StdRow> = Vec::with_capacity(p.constraints.len() + bound_rows.len());
    for c in &p.constraints {
        let mut coeffs = vec![0.0; nstruct];
        let mut rhs = c.rhs;
        for (a, m) in c.coeffs.iter().zip(&maps) {
            if *a == 0.0 {
                continue;
            }
            match *m {
                VarMap::Shift { col, lo } => {
                    coeffs[col] += a;
                    rhs -= a * lo;
                }
                VarMap::Mirror { col, hi } => {
                    coeffs[col] -= a;
                    rhs -= a * hi;
                }
                VarMap::Split { pos, neg } => {
                    coeffs[pos] += a;
                    coeffs[neg] -= a;
                }
            }
        }
        rows.push(StdRow {
            coeffs,
            relation: c.relation,
            rhs,
        });
    }
    for &(col, width) in &bound_rows {
        let mut coeffs = vec![0.0; nstruct];
        coeffs[col] = 1.0;
        rows.push(StdRow {
            coeffs,
            relation: Relation::Le,
            rhs: width,
        });
    }

    let y = match Tableau::build(&rows, nstruct).run(&cost) {
        Outcome::Optimal(y) => y,
        Outcome::Infeasible => {
            return Ok(LpSolution {
                status: LpStatus::Infeasible,
                z: vec![f64::NAN; p.num_vars()],
                objective_value: f64::NAN,
            })
        }
        Outcome::Unbounded => {
            return Ok(LpSolution {
                status: LpStatus::Unbounded,
                z: vec![f64::NAN; p.num_vars()],
                objective_value: f64::NEG_INFINITY,
            })
        }
        Outcome::PivotLimit => {
            return Err(CiiError::Lp(format!("no convergence within {MAX_PIVOTS} pivots")))
        }
    };

    let z: Vec<f64> = maps
        .iter()
        .map(|m| match *m {
            VarMap::Shift { col, lo } => lo + y[col],
            VarMap::Mirror { col, hi } => hi - y[col],
            VarMap::Split { pos, neg } => y[pos] - y[neg],
        })
        .collect();
    let objective_value = p.objective.iter().zip(&z).map(|(c, v)| c * v).sum();
    Ok(LpSolution {
        status: LpStatus::Optimal,
        z,
        objective_value,
    })
}

enum Outcome {
    Optimal(Vec<f64>),
    Infeasible,
    Unbounded,
    PivotLimit,
}

/// Row-major tableau `[A | b]` over structural, slack and artificial
/// columns, plus a reduced-cost row.
struct Tableau {
    m: usize,
    width: usize,
    nstruct: usize,
    /// first artificial column; columns `art_start..width - 1` are artificial
    art_start: usize,
    data: Vec<f64>,
    basis: Vec<usize>,
    reduced: Vec<f64>,
    pivots: usize,
}

impl Tableau {
    fn build(rows: &[StdRow], nstruct: usize) -> Self {
        let m = rows.len();
        let nslack = rows.iter().filter(|r| r.relation != Relation::Eq).count();
        // a row needs an artificial unless its slack can start in the basis
        let needs_art = |r: &StdRow| match r.relation {
            Relation::Le => r.rhs < 0.0,
            Relation::Ge => r.rhs > 0.0,
            Relation::Eq => true,
        };
        let nart = rows.iter().filter(|r| needs_art(r)).count();
        let art_start = nstruct + nslack;
        let width = art_start + nart + 1;
        let mut data = vec![0.0; m * width];
        let mut basis = vec![0; m];
        let (mut slack, mut art) = (nstruct, art_start);
        for (i, r) in rows.iter().enumerate() {
            // flip so that rhs >= 0, preferring a +1 slack when rhs == 0
            let flip = match r.relation {
                Relation::Ge => r.rhs <= 0.0,
                _ => r.rhs < 0.0,
            };
            let sign = if flip { -1.0 } else { 1.0 };
            let row = &mut data[i * width..(i + 1) * width];
            for (dst, a) in row.iter_mut().zip(&r.coeffs) {
                *dst = sign * a;
            }
            row[width - 1] = sign * r.rhs;
            match r.relation {
                Relation::Le => {
                    row[slack] = sign;
                    if sign > 0.0 {
                        basis[i] = slack;
                    }
                    slack += 1;
                }
                Relation::Ge => {
                    row[slack] = -sign;
                    if sign < 0.0 {
                        basis[i] = slack;
                    }
                    slack += 1;
                }
                Relation::Eq => {}
            }
            if needs_art(r) {
                row[art] = 1.0;
                basis[i] = art;
                art += 1;
            }
        }
        Self {
            m,
            width,
            nstruct,
            art_start,
            data,
            basis,
            reduced: vec![0.0; width],
            pivots: 0,
        }
    }

    fn rhs_col(&self) -> usize {
        self.width - 1
    }

    fn at(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.width + j]
    }

    /// Reduced costs `c_j - c_Bᵀ B⁻¹ A_j`; the last entry holds `-c_Bᵀ b`.
    fn price(&mut self, cost: &[f64]) {
        let w = self.width;
        self.reduced.iter_mut().for_each(|r| *r = 0.0);
        self.reduced[..cost.len()].copy_from_slice(cost);
        for i in 0..self.m {
            let cb = cost.get(self.basis[i]).copied().unwrap_or(0.0);
            if cb != 0.0 {
                let row = &self.data[i * w..(i + 1) * w];
                for (r, a) in self.reduced.iter_mut().zip(row) {
                    *r -= cb * a;
                }
            }
        }
    }

    fn pivot(&mut self, pr: usize, pc: usize) {
        let w = self.width;
        let piv = self.data[pr * w + pc];
        {
            let row = &mut self.data[pr * w..(pr + 1) * w];
            row.iter_mut().for_each(|a| *a /= piv);
            row[pc] = 1.0;
        }
        let prow: Vec<f64> = self.data[pr * w..(pr + 1) * w].to_vec();
        for i in 0..self.m {
            if i == pr {
                continue;
            }
            let f = self.data[i * w + pc];
            if f != 0.0 {
                let row = &mut self.data[i * w..(i + 1) * w];
                for (a, p) in row.iter_mut().zip(&prow) {
                    *a -= f * p;
                }
                row[pc] = 0.0;
            }
        }
        let f = self.reduced[pc];
        if f != 0.0 {
            for (r, p) in self.reduced.iter_mut().zip(&prow) {
                *r -= f * p;
            }
            self.reduced[pc] = 0.0;
        }
        self.basis[pr] = pc;
        self.pivots += 1;
    }

    /// Bland's rule iterations over columns `< limit`.
    ///
    /// Reduced costs are updated in place by each pivot and drift; they are
    /// recomputed from `cost` periodically and before any terminal verdict.
    fn iterate(&mut self, cost: &[f64], limit: usize) -> std::result::Result<(), Outcome> {
        let rhs = self.rhs_col();
        self.price(cost);
        let mut fresh = true;
        loop {
            if self.pivots >= MAX_PIVOTS {
                return Err(Outcome::PivotLimit);
            }
            if !fresh && self.pivots.is_multiple_of(REPRICE_EVERY) {
                self.price(cost);
                fresh = true;
            }
            let Some(pc) = (0..limit).find(|&j| self.reduced[j] < -COST_TOL) else {
                if fresh {
                    return Ok(());
                }
                self.price(cost);
                fresh = true;
                continue;
            };
            let mut best: Option<(usize, f64)> = None;
            for i in 0..self.m {
                let a = self.at(i, pc);
                if a > PIVOT_TOL {
                    let ratio = self.at(i, rhs).max(0.0) / a;
                    best = match best {
                        None => Some((i, ratio)),
                        Some((bi, br)) => {
                            if ratio < br - 1e-14 * br.abs().max(1.0)
                                || (ratio <= br + 1e-14 * br.abs().max(1.0)
                                    && self.basis[i] < self.basis[bi])
                            {
                                Some((i, ratio))
                            } else {
                                Some((bi, br))
                            }
                        }
                    };
                }
            }
            match best {
                Some((pr, _)) => {
                    self.pivot(pr, pc);
                    fresh = false;
                }
                None if fresh => return Err(Outcome::Unbounded),
                None => {
                    self.price(cost);
                    fresh = true;
                }
            }
        }
    }

    fn run(mut self, cost: &[f64]) -> Outcome {
        let rhs = self.rhs_col();
        if self.art_start < rhs {
            let mut phase1 = vec![0.0; rhs];
            phase1[self.art_start..].iter_mut().for_each(|c| *c = 1.0);
            if let Err(o) = self.iterate(&phase1, rhs) {
                return match o {
                    // phase one is bounded below by zero
                    Outcome::Unbounded => Outcome::Infeasible,
                    other => other,
                };
            }
            let infeas: f64 = (0..self.m)
                .filter(|&i| self.basis[i] >= self.art_start)
                .map(|i| self.at(i, rhs))
                .sum();
            if infeas > FEAS_TOL {
                return Outcome::Infeasible;
            }
            // drive zero-level artificials out of the basis where possible
            for i in 0..self.m {
                if self.basis[i] >= self.art_start {
                    if let Some(j) = (0..self.art_start).find(|&j| self.at(i, j).abs() > PIVOT_TOL) {
                        self.pivot(i, j);
                    }
                }
            }
        }
        if let Err(o) = self.iterate(cost, self.art_start) {
            return o;
        }
        let mut y = vec![0.0; self.nstruct];
        for i in 0..self.m {
            if self.basis[i] < self.nstruct {
                y[self.basis[i]] = self.at(i, rhs).max(0.0);
            }
        }
        Outcome::Optimal(y)
    }
}
