//! Distance-based extrapolation split and training-set subsampling.

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::dataset::Dataset;
use crate::distance::{fit_distance, DistanceModel, MetricKind, Standardizer};
use crate::error::{CiiError, Result};

pub const MIN_TRAIN_ROWS: usize = 10;

/// Distance model on standardised inputs, the form every harness stage uses.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaledDistance {
    pub standardizer: Standardizer,
    pub model: DistanceModel,
}

impl ScaledDistance {
    pub fn fit(rows: &[Vec<f64>]) -> Result<Self> {
        let standardizer = Standardizer::fit(rows)?;
        let model = fit_distance(&standardizer.transform_all(rows), MetricKind::Mahalanobis, None)?;
        Ok(Self { standardizer, model })
    }

    pub fn score(&self, x: &[f64]) -> Result<f64> {
        self.model.score(&self.standardizer.transform(x))
    }

    pub fn r0(&self) -> f64 {
        self.model.r0()
    }
}

#[derive(Debug, Clone)]
pub struct Split {
    pub train: Dataset,
    pub holdout: Dataset,
    /// Source-row indices of each part.
    pub train_rows: Vec<usize>,
    pub holdout_rows: Vec<usize>,
    /// `true` where a holdout row scores within `r0` of the refitted model.
    pub id_mask: Vec<bool>,
    /// Holdout scores under the refitted model.
    pub holdout_scores: Vec<f64>,
    /// Provisional score of the last training row.
    pub threshold: f64,
    pub distance: ScaledDistance,
}

/// Rank rows by a provisional full-data distance score, send the closest
/// `train/(train+holdout)` fraction to training, then refit the distance
/// model on training rows to label holdout rows in- or out-of-distribution.
pub fn extrapolation_split(d: &Dataset, ratio: (f64, f64)) -> Result<Split> {
    let (a, b) = ratio;
    if !(a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite()) {
        return Err(CiiError::InvalidArgument(format!(
            "split ratio {a}:{b} needs two positive parts"
        )));
    }
    let n = d.len();
    if n < MIN_TRAIN_ROWS {
        return Err(CiiError::InsufficientData(format!(
            "splitting needs at least {MIN_TRAIN_ROWS} rows, got {n}"
        )));
    }
    let provisional = ScaledDistance::fit(&d.features)?;
    let scores = d
        .features
        .iter()
        .map(|x| provisional.score(x))
        .collect::<Result<Vec<_>>>()?;
    let lo = scores.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !(hi > lo) {
        return Err(CiiError::InvalidArgument(
            "all provisional distance scores are equal; cannot rank rows".into(),
        ));
    }
    let k = ((n as f64 * a / (a + b)).round() as usize).clamp(1, n - 1);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| scores[i].total_cmp(&scores[j]).then(i.cmp(&j)));
    let mut train_rows = order[..k].to_vec();
    let mut holdout_rows = order[k..].to_vec();
    train_rows.sort_unstable();
    holdout_rows.sort_unstable();
    let threshold = scores[order[k - 1]];

    let train = d.subset(&train_rows);
    let holdout = d.subset(&holdout_rows);
    let distance = ScaledDistance::fit(&train.features)?;
    let holdout_scores = holdout
        .features
        .iter()
        .map(|x| distance.score(x))
        .collect::<Result<Vec<_>>>()?;
    let id_mask = holdout_scores.iter().map(|&r| r <= distance.r0()).collect();
    Ok(Split {
        train,
        holdout,
        train_rows,
        holdout_rows,
        id_mask,
        holdout_scores,
        threshold,
        distance,
    })
}

/// Uniform subset of `round(ε·n)` rows without replacement, kept in source
/// order.
pub fn subsample_train(train: &Dataset, epsilon: f64, seed: u64) -> Result<Dataset> {
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return Err(CiiError::InvalidArgument(format!(
            "data proportion {epsilon} outside (0, 1]"
        )));
    }
    let n = train.len();
    let m = (epsilon * n as f64).round() as usize;
    if m < MIN_TRAIN_ROWS {
        return Err(CiiError::InsufficientData(format!(
            "insufficient training data: {m} rows after subsampling, need {MIN_TRAIN_ROWS}"
        )));
    }
    if m == n {
        return Ok(train.clone());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut idx = sample(&mut rng, n, m).into_vec();
    idx.sort_unstable();
    Ok(train.subset(&idx))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn radial(n: usize) -> Dataset {
        // points on rings of growing radius
        let features: Vec<Vec<f64>> = (0..n)
            .map(|i| {
                let t = i as f64 * 2.399963;
                let rad = 0.1 + i as f64 / n as f64;
                vec![rad * t.cos(), rad * t.sin()]
            })
            .collect();
        let responses = (0..n).map(|i| i as f64).collect();
        Dataset::from_parts("radial", features, responses).unwrap()
    }

    #[test]
    fn three_to_seven() {
        let s = extrapolation_split(&radial(100), (3.0, 7.0)).unwrap();
        assert_eq!(s.train.len(), 30);
        assert_eq!(s.holdout.len(), 70);
        let mut all: Vec<usize> = s.train_rows.iter().chain(&s.holdout_rows).copied().collect();
        all.sort_unstable();
        assert_eq!(all, (0..100).collect::<Vec<_>>());
    }

    #[test]
    fn regime_labels_follow_r0() {
        let s = extrapolation_split(&radial(80), (3.0, 7.0)).unwrap();
        for (&r, &id) in s.holdout_scores.iter().zip(&s.id_mask) {
            assert_eq!(id, r <= s.distance.r0());
        }
    }

    #[test]
    fn guards() {
        let d = radial(50);
        assert!(extrapolation_split(&d, (1.0, 0.0)).is_err());
        assert!(extrapolation_split(&d.subset(&[0, 1, 2]), (3.0, 7.0)).is_err());
        assert!(subsample_train(&d, 0.0, 1).is_err());
        assert!(subsample_train(&d, 0.1, 1).is_err());
    }

    #[test]
    fn subsampling() {
        let d = radial(60);
        assert_eq!(subsample_train(&d, 1.0, 3).unwrap(), d);
        let a = subsample_train(&d, 0.5, 3).unwrap();
        assert_eq!(a.len(), 30);
        assert_eq!(a, subsample_train(&d, 0.5, 3).unwrap());
    }
}
