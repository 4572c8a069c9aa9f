//! Scalar distance scores measuring how far an input sits from the
//! training-data manifold.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{CiiError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum MetricKind {
    #[default]
    Mahalanobis,
    Euclidean,
}

/// Training mean, Cholesky factor of the (regularised) covariance and the
/// support radius `r0` (largest training score).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistanceModel {
    mean: Vec<f64>,
    /// Row-major lower-triangular factor `L` with `L Lᵀ = Σ`.
    covariance_factor: Vec<f64>,
    r0: f64,
    kind: MetricKind,
    ridge: f64,
}

/// Ridge used when none is given: `1e-6 · trace(Σ) / dim`.
pub fn default_ridge(trace: f64, dim: usize) -> f64 {
    1e-6 * trace / dim as f64
}

pub fn fit_distance(
    train_inputs: &[Vec<f64>],
    kind: MetricKind,
    ridge: Option<f64>,
) -> Result<DistanceModel> {
    let n = train_inputs.len();
    if n < 2 {
        return Err(CiiError::InsufficientData(format!(
            "distance model needs at least 2 points, got {n}"
        )));
    }
    let dim = train_inputs[0].len();
    if dim == 0 {
        return Err(CiiError::InvalidArgument("zero-dimensional inputs".into()));
    }
    for x in train_inputs {
        if x.len() != dim {
            return Err(CiiError::DimensionMismatch {
                expected: dim,
                got: x.len(),
            });
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(CiiError::NonFinite("training features".into()));
        }
    }
    if let Some(r) = ridge {
        if !(r >= 0.0 && r.is_finite()) {
            return Err(CiiError::InvalidArgument(format!("ridge {r}")));
        }
    }

    let mut mean = vec![0.0; dim];
    for x in train_inputs {
        for (m, v) in mean.iter_mut().zip(x) {
            *m += v;
        }
    }
    mean.iter_mut().for_each(|m| *m /= n as f64);

    let (factor, ridge_used) = match kind {
        MetricKind::Euclidean => (DMatrix::<f64>::identity(dim, dim), 0.0),
        MetricKind::Mahalanobis => {
            let mut cov = DMatrix::<f64>::zeros(dim, dim);
            for x in train_inputs {
                let c = DVector::from_iterator(dim, x.iter().zip(&mean).map(|(v, m)| v - m));
                cov += &c * c.transpose();
            }
            cov /= (n - 1) as f64;
            let ridge = ridge.unwrap_or_else(|| default_ridge(cov.trace(), dim));
            for i in 0..dim {
                cov[(i, i)] += ridge;
            }
            let chol = cov.cholesky().ok_or_else(|| {
                CiiError::InvalidArgument(
                    "covariance is not positive definite; use a positive ridge".into(),
                )
            })?;
            (chol.l(), ridge)
        }
    };

    let mut model = DistanceModel {
        mean,
        covariance_factor: factor.transpose().as_slice().to_vec(),
        r0: 0.0,
        kind,
        ridge: ridge_used,
    };
    let r0 = train_inputs
        .iter()
        .map(|x| model.score(x))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    model.r0 = r0;
    Ok(model)
}

impl DistanceModel {
    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn mean(&self) -> &[f64] {
        &self.mean
    }

    pub fn r0(&self) -> f64 {
        self.r0
    }

    pub fn kind(&self) -> MetricKind {
        self.kind
    }

    pub fn ridge(&self) -> f64 {
        self.ridge
    }

    /// Distance of `x` from the training mean, via forward substitution
    /// against the covariance factor.
    pub fn score(&self, x: &[f64]) -> Result<f64> {
        let dim = self.dim();
        if x.len() != dim {
            return Err(CiiError::DimensionMismatch {
                expected: dim,
                got: x.len(),
            });
        }
        if self.kind == MetricKind::Euclidean {
            return Ok(x
                .iter()
                .zip(&self.mean)
                .map(|(v, m)| (v - m) * (v - m))
                .sum::<f64>()
                .sqrt());
        }
        let l = &self.covariance_factor;
        let mut z = vec![0.0; dim];
        for i in 0..dim {
            let mut acc = x[i] - self.mean[i];
            for j in 0..i {
                acc -= l[i * dim + j] * z[j];
            }
            z[i] = acc / l[i * dim + i];
        }
        Ok(z.iter().map(|v| v * v).sum::<f64>().sqrt())
    }

    /// True strictly beyond the training support (`score > r0`).
    pub fn is_extrapolation(&self, x: &[f64]) -> Result<bool> {
        Ok(self.score(x)? > self.r0)
    }
}

/// Per-column z-score transform fitted on training rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Standardizer {
    mean: Vec<f64>,
    scale: Vec<f64>,
}

impl Standardizer {
    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn fit(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if n < 2 {
            return Err(CiiError::InsufficientData(format!(
                "standardisation needs at least 2 rows, got {n}"
            )));
        }
        let dim = rows[0].len();
        let mut mean = vec![0.0; dim];
        for r in rows {
            if r.len() != dim {
                return Err(CiiError::DimensionMismatch {
                    expected: dim,
                    got: r.len(),
                });
            }
            for (m, v) in mean.iter_mut().zip(r) {
                *m += v;
            }
        }
        mean.iter_mut().for_each(|m| *m /= n as f64);
        let mut scale = vec![0.0; dim];
        for r in rows {
            for ((s, v), m) in scale.iter_mut().zip(r).zip(&mean) {
                *s += (v - m) * (v - m);
            }
        }
        for s in &mut scale {
            *s = (*s / (n - 1) as f64).sqrt();
            // constant column: leave it centred but unscaled
            if *s == 0.0 || !s.is_finite() {
                *s = 1.0;
            }
        }
        Ok(Self { mean, scale })
    }

    pub fn transform(&self, x: &[f64]) -> Vec<f64> {
        x.iter()
            .zip(self.mean.iter().zip(&self.scale))
            .map(|(v, (m, s))| (v - m) / s)
            .collect()
    }

    pub fn transform_all(&self, rows: &[Vec<f64>]) -> Vec<Vec<f64>> {
        rows.iter().map(|r| self.transform(r)).collect()
    }
}
