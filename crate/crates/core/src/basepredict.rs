//! Base hypotheses whose predictions the CII layer enriches with imprecision.
//!
//! Two in-repo models are provided, a heteroscedastic polynomial regressor
//! (mean and log-variance by least squares) and a bootstrap ensemble of those
//! whose member CDFs are enveloped into a p-box. Predictions made elsewhere can
//! be read from the NDJSON p-box format and served by row index.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufReader, BufWriter};
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::distance::Standardizer;
use crate::error::{CiiError, Result};
use crate::uncertain::record::{read_records, write_records};
use crate::uncertain::{envelope, PBoxRecord, StepCdf, UncertainNumber, DEFAULT_DISCRETISATION};

pub const DEFAULT_MEMBERS: usize = 10;

const DESIGN_RIDGE: f64 = 1e-8;
/// Variance bounds as multiples of the training response variance.
const VARIANCE_FLOOR: f64 = 1e-6;
const VARIANCE_CEILING: f64 = 1e2;

pub trait BasePredictor: Send + Sync {
    fn predict(&self, x: &[f64]) -> Result<UncertainNumber>;

    /// Prediction for row `row` of the query set. Feature-based models ignore
    /// the index; file-backed predictions are keyed by it.
    fn predict_row(&self, _row: usize, x: &[f64]) -> Result<UncertainNumber> {
        self.predict(x)
    }
}

/// Standardised per-feature powers `[1, z_j, z_j², …, z_j^degree]`, no
/// interaction terms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct PolyFeatures {
    degree: usize,
    dim: usize,
    standardizer: Standardizer,
}

impl PolyFeatures {
    fn fit(xs: &[Vec<f64>], degree: usize) -> Result<Self> {
        Ok(Self {
            degree,
            dim: xs[0].len(),
            standardizer: Standardizer::fit(xs)?,
        })
    }

    fn width(&self) -> usize {
        1 + self.dim * self.degree
    }

    fn row(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.dim {
            return Err(CiiError::DimensionMismatch {
                expected: self.dim,
                got: x.len(),
            });
        }
        let z = self.standardizer.transform(x);
        let mut out = Vec::with_capacity(self.width());
        out.push(1.0);
        for v in z {
            let mut p = 1.0;
            for _ in 0..self.degree {
                p *= v;
                out.push(p);
            }
        }
        Ok(out)
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Ridge-stabilised normal equations.
fn least_squares(design: &[Vec<f64>], y: &[f64]) -> Result<Vec<f64>> {
    let p = design[0].len();
    let mut gram = DMatrix::<f64>::zeros(p, p);
    let mut rhs = DVector::<f64>::zeros(p);
    for (row, &t) in design.iter().zip(y) {
        for i in 0..p {
            rhs[i] += row[i] * t;
            for j in 0..=i {
                gram[(i, j)] += row[i] * row[j];
            }
        }
    }
    for i in 0..p {
        for j in 0..i {
            gram[(j, i)] = gram[(i, j)];
        }
        gram[(i, i)] += DESIGN_RIDGE;
    }
    let chol = gram.cholesky().ok_or(CiiError::RankDeficient)?;
    let beta = chol.solve(&rhs);
    if beta.iter().any(|b| !b.is_finite()) {
        return Err(CiiError::RankDeficient);
    }
    Ok(beta.as_slice().to_vec())
}

fn check_training(xs: &[Vec<f64>], ys: &[f64]) -> Result<()> {
    if xs.len() != ys.len() {
        return Err(CiiError::DimensionMismatch {
            expected: xs.len(),
            got: ys.len(),
        });
    }
    if ys.iter().any(|y| !y.is_finite()) || xs.iter().flatten().any(|v| !v.is_finite()) {
        return Err(CiiError::NonFinite("training data".into()));
    }
    Ok(())
}

/// Gaussian predictive distribution with polynomial mean and log-variance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeteroscedasticLeastSquares {
    features: PolyFeatures,
    mean_coeffs: Vec<f64>,
    logvar_coeffs: Vec<f64>,
    /// Additive log-scale correction so that mean standardised squared
    /// residual on the training set is one.
    logvar_offset: f64,
    variance_floor: f64,
    variance_ceiling: f64,
    discretisation: usize,
}

pub fn fit_hetero_ls(
    xs: &[Vec<f64>],
    ys: &[f64],
    feature_degree: usize,
) -> Result<HeteroscedasticLeastSquares> {
    check_training(xs, ys)?;
    let n = xs.len();
    let need = 2 * (feature_degree + 1);
    if n < need {
        return Err(CiiError::InsufficientData(format!(
            "degree {feature_degree} regression needs at least {need} points, got {n}"
        )));
    }
    let features = PolyFeatures::fit(xs, feature_degree)?;
    let design = xs
        .iter()
        .map(|x| features.row(x))
        .collect::<Result<Vec<_>>>()?;

    let y_mean = ys.iter().sum::<f64>() / n as f64;
    let var_y = ys.iter().map(|y| (y - y_mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    let variance_floor = (VARIANCE_FLOOR * var_y).max(1e-12);
    let variance_ceiling = (VARIANCE_CEILING * var_y).max(variance_floor);

    let mean_coeffs = least_squares(&design, ys)?;
    let sq_res: Vec<f64> = design
        .iter()
        .zip(ys)
        .map(|(row, y)| (y - dot(row, &mean_coeffs)).powi(2))
        .collect();
    let log_targets: Vec<f64> = sq_res.iter().map(|r| r.max(variance_floor).ln()).collect();
    let logvar_coeffs = least_squares(&design, &log_targets)?;
    let ratio = design
        .iter()
        .zip(&sq_res)
        .map(|(row, r)| r / dot(row, &logvar_coeffs).exp())
        .sum::<f64>()
        / n as f64;
    let logvar_offset = if ratio > 0.0 && ratio.is_finite() {
        ratio.ln()
    } else {
        0.0
    };
    Ok(HeteroscedasticLeastSquares {
        features,
        mean_coeffs,
        logvar_coeffs,
        logvar_offset,
        variance_floor,
        variance_ceiling,
        discretisation: DEFAULT_DISCRETISATION,
    })
}

impl HeteroscedasticLeastSquares {
    pub fn mean_at(&self, x: &[f64]) -> Result<f64> {
        Ok(dot(&self.features.row(x)?, &self.mean_coeffs))
    }

    pub fn variance_at(&self, x: &[f64]) -> Result<f64> {
        let h = dot(&self.features.row(x)?, &self.logvar_coeffs) + self.logvar_offset;
        Ok(h.exp().clamp(self.variance_floor, self.variance_ceiling))
    }

    pub fn variance_floor(&self) -> f64 {
        self.variance_floor
    }

    pub fn predictive_cdf(&self, x: &[f64]) -> Result<StepCdf> {
        let row = self.features.row(x)?;
        let mu = dot(&row, &self.mean_coeffs);
        let h = dot(&row, &self.logvar_coeffs) + self.logvar_offset;
        let var = h.exp().clamp(self.variance_floor, self.variance_ceiling);
        StepCdf::normal(mu, var.sqrt(), self.discretisation)
    }
}

impl BasePredictor for HeteroscedasticLeastSquares {
    fn predict(&self, x: &[f64]) -> Result<UncertainNumber> {
        Ok(UncertainNumber::Distribution(self.predictive_cdf(x)?))
    }
}

/// Envelope of heteroscedastic members fitted on bootstrap resamples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BootstrapEnsembleEnvelope {
    members: Vec<HeteroscedasticLeastSquares>,
}

pub fn fit_bootstrap_envelope(
    xs: &[Vec<f64>],
    ys: &[f64],
    n_members: usize,
    feature_degree: usize,
    seed: u64,
) -> Result<BootstrapEnsembleEnvelope> {
    if n_members < 2 {
        return Err(CiiError::InvalidArgument(format!(
            "an ensemble needs at least 2 members, got {n_members}"
        )));
    }
    check_training(xs, ys)?;
    let mut master = ChaCha8Rng::seed_from_u64(seed);
    let seeds: Vec<u64> = (0..n_members).map(|_| master.random()).collect();
    let n = xs.len();
    let members = seeds
        .par_iter()
        .map(|&s| {
            let mut rng = ChaCha8Rng::seed_from_u64(s);
            let idx: Vec<usize> = (0..n).map(|_| rng.random_range(0..n)).collect();
            let bx: Vec<Vec<f64>> = idx.iter().map(|&i| xs[i].clone()).collect();
            let by: Vec<f64> = idx.iter().map(|&i| ys[i]).collect();
            fit_hetero_ls(&bx, &by, feature_degree)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(BootstrapEnsembleEnvelope { members })
}

impl BootstrapEnsembleEnvelope {
    pub fn from_members(members: Vec<HeteroscedasticLeastSquares>) -> Result<Self> {
        if members.len() < 2 {
            return Err(CiiError::InvalidArgument(format!(
                "an ensemble needs at least 2 members, got {}",
                members.len()
            )));
        }
        Ok(Self { members })
    }

    pub fn members(&self) -> &[HeteroscedasticLeastSquares] {
        &self.members
    }
}

impl BasePredictor for BootstrapEnsembleEnvelope {
    fn predict(&self, x: &[f64]) -> Result<UncertainNumber> {
        let cdfs = self
            .members
            .iter()
            .map(|m| m.predictive_cdf(x))
            .collect::<Result<Vec<_>>>()?;
        Ok(UncertainNumber::Box(envelope(&cdfs)?))
    }
}

/// Predictions produced outside this crate, keyed by query row index.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ExternalPredictions {
    by_row: BTreeMap<usize, UncertainNumber>,
}

pub fn load_external(path: impl AsRef<Path>) -> Result<ExternalPredictions> {
    let file = File::open(path)?;
    let by_row = read_records(BufReader::new(file))?
        .into_iter()
        .map(|(row, p)| (row, UncertainNumber::from_pbox(p)))
        .collect();
    Ok(ExternalPredictions { by_row })
}

impl ExternalPredictions {
    pub fn from_rows(rows: impl IntoIterator<Item = (usize, UncertainNumber)>) -> Self {
        Self {
            by_row: rows.into_iter().collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.by_row.len()
    }

    pub fn is_empty(&self) -> bool {
        self.by_row.is_empty()
    }

    pub fn rows(&self) -> impl Iterator<Item = (usize, &UncertainNumber)> {
        self.by_row.iter().map(|(r, u)| (*r, u))
    }

    pub fn get(&self, row: usize) -> Result<&UncertainNumber> {
        self.by_row.get(&row).ok_or(CiiError::MissingPrediction(row))
    }

    pub fn dump(&self, path: impl AsRef<Path>) -> Result<()> {
        let records: Vec<PBoxRecord> = self
            .by_row
            .iter()
            .map(|(row, u)| PBoxRecord::from_pbox(&u.to_pbox(), Some(*row)))
            .collect();
        write_records(BufWriter::new(File::create(path)?), &records)
    }
}

impl BasePredictor for ExternalPredictions {
    fn predict(&self, _x: &[f64]) -> Result<UncertainNumber> {
        Err(CiiError::InvalidArgument(
            "external predictions are looked up by row index".into(),
        ))
    }

    fn predict_row(&self, row: usize, _x: &[f64]) -> Result<UncertainNumber> {
        self.get(row).cloned()
    }
}

/// Any of the base predictors, in a form that serialises with a fitted model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BaseModel {
    Hetero(HeteroscedasticLeastSquares),
    Bootstrap(BootstrapEnsembleEnvelope),
    External(ExternalPredictions),
}

impl BasePredictor for BaseModel {
    fn predict(&self, x: &[f64]) -> Result<UncertainNumber> {
        match self {
            BaseModel::Hetero(m) => m.predict(x),
            BaseModel::Bootstrap(m) => m.predict(x),
            BaseModel::External(m) => m.predict(x),
        }
    }

    fn predict_row(&self, row: usize, x: &[f64]) -> Result<UncertainNumber> {
        match self {
            BaseModel::Hetero(m) => m.predict_row(row, x),
            BaseModel::Bootstrap(m) => m.predict_row(row, x),
            BaseModel::External(m) => m.predict_row(row, x),
        }
    }
}
