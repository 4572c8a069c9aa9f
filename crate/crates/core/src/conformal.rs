//! Conformal interval imprecision: calibrate a distance-dependent discrepancy
//! budget on a subset of the training data and widen base predictions into
//! the Wasserstein-ball p-box of that radius.

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::basepredict::{BaseModel, BasePredictor};
use crate::distance::{fit_distance, DistanceModel, MetricKind, Standardizer};
use crate::error::{CiiError, Result};
use crate::ipm::{fit_ipm_with, IntervalPredictor, IpmOptions, DEFAULT_DEGREE, DEFAULT_GRID_SIZE};
use crate::transport::{ascloseas, BallConstraints};
use crate::uncertain::{area_metric, Interval, PBox, UncertainNumber};

pub const DEFAULT_BOUNDARY_FRACTION: f64 = 0.3;
pub const CALIBRATION_STRATA: usize = 10;
/// Support margin, in multiples of the training response range.
pub const DEFAULT_SUPPORT_MARGIN: f64 = 3.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CalibrationRecord {
    pub index: usize,
    pub r: f64,
    pub d: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CiiConfig {
    pub degree: usize,
    pub grid_size: usize,
    /// Keep the band's upper edge nondecreasing beyond the calibration range.
    pub monotone_tail: bool,
    /// Calibration subset size; `None` uses every training point.
    pub n_cal: Option<usize>,
    pub boundary_fraction: f64,
    pub ridge: Option<f64>,
    pub metric: MetricKind,
    pub support_margin: f64,
    pub seed: u64,
}

impl Default for CiiConfig {
    fn default() -> Self {
        Self {
            degree: DEFAULT_DEGREE,
            grid_size: DEFAULT_GRID_SIZE,
            monotone_tail: true,
            n_cal: None,
            boundary_fraction: DEFAULT_BOUNDARY_FRACTION,
            ridge: None,
            metric: MetricKind::Mahalanobis,
            support_margin: DEFAULT_SUPPORT_MARGIN,
            seed: 0,
        }
    }
}

/// Stratified-plus-boundary subset of `scores`: `floor(n_cal·(1−f))` points
/// spread over equal-width score bins, then the `ceil(n_cal·f)` largest
/// remaining scores. Returns sorted unique indices.
pub fn select_by_scores(
    scores: &[f64],
    n_cal: usize,
    boundary_fraction: f64,
    seed: u64,
) -> Result<Vec<usize>> {
    let n = scores.len();
    if n_cal > n {
        return Err(CiiError::InsufficientData(format!(
            "calibration size {n_cal} exceeds the {n} available points"
        )));
    }
    if !(0.0..=1.0).contains(&boundary_fraction) {
        return Err(CiiError::InvalidArgument(format!(
            "boundary fraction {boundary_fraction} outside [0, 1]"
        )));
    }
    let n_boundary = (n_cal as f64 * boundary_fraction).ceil() as usize;
    let n_strat = n_cal - n_boundary.min(n_cal);

    let lo = scores.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let width = (hi - lo) / CALIBRATION_STRATA as f64;
    let mut bins: Vec<Vec<usize>> = vec![Vec::new(); CALIBRATION_STRATA];
    for (i, &r) in scores.iter().enumerate() {
        bins[crate::metrics::bin_index(r, lo, width, CALIBRATION_STRATA)].push(i);
    }

    // largest-remainder proportional allocation, ties to the lower bin
    let quotas: Vec<f64> = bins
        .iter()
        .map(|b| n_strat as f64 * b.len() as f64 / n.max(1) as f64)
        .collect();
    let mut alloc: Vec<usize> = quotas.iter().map(|q| q.floor() as usize).collect();
    let mut order: Vec<usize> = (0..CALIBRATION_STRATA).collect();
    order.sort_by(|&a, &b| {
        let (ra, rb) = (quotas[a] - alloc[a] as f64, quotas[b] - alloc[b] as f64);
        rb.total_cmp(&ra).then(a.cmp(&b))
    });
    let mut short = n_strat - alloc.iter().sum::<usize>();
    for &b in order.iter().cycle().take(CALIBRATION_STRATA * 2) {
        if short == 0 {
            break;
        }
        if alloc[b] < bins[b].len() {
            alloc[b] += 1;
            short -= 1;
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut chosen = vec![false; n];
    for (members, &k) in bins.iter().zip(&alloc) {
        for j in sample(&mut rng, members.len(), k) {
            chosen[members[j]] = true;
        }
    }
    let mut rest: Vec<usize> = (0..n).filter(|&i| !chosen[i]).collect();
    rest.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
    for &i in rest.iter().take(n_cal - n_strat) {
        chosen[i] = true;
    }
    Ok((0..n).filter(|&i| chosen[i]).collect())
}

pub fn select_calibration(
    inputs: &[Vec<f64>],
    dm: &DistanceModel,
    n_cal: usize,
    boundary_fraction: f64,
    seed: u64,
) -> Result<Vec<usize>> {
    let scores = inputs
        .iter()
        .map(|x| dm.score(x))
        .collect::<Result<Vec<_>>>()?;
    select_by_scores(&scores, n_cal, boundary_fraction, seed)
}

/// `(r, d)` for each calibration point, where `d` is the area metric between
/// the base prediction and the observation.
pub fn conformal_scores(
    rows: &[usize],
    inputs: &[Vec<f64>],
    observations: &[UncertainNumber],
    base: &dyn BasePredictor,
    dm: &DistanceModel,
) -> Result<Vec<CalibrationRecord>> {
    score_rows(rows, inputs, inputs, observations, base, dm)
}

/// Base predictions use `inputs`, distances use `distance_inputs`.
fn score_rows(
    rows: &[usize],
    inputs: &[Vec<f64>],
    distance_inputs: &[Vec<f64>],
    observations: &[UncertainNumber],
    base: &dyn BasePredictor,
    dm: &DistanceModel,
) -> Result<Vec<CalibrationRecord>> {
    rows.iter()
        .map(|&i| {
            let pred = base.predict_row(i, &inputs[i])?.to_pbox();
            let d = area_metric(&pred, &observations[i].to_pbox());
            if !d.is_finite() {
                return Err(CiiError::NonFinite(format!("conformal score of row {i}")));
            }
            Ok(CalibrationRecord {
                index: i,
                r: dm.score(&distance_inputs[i])?,
                d,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CiiModel {
    pub standardizer: Standardizer,
    pub distance: DistanceModel,
    pub ipm: IntervalPredictor,
    pub constraints: BallConstraints,
    /// Margin (response units) kept around the base range at prediction time.
    pub support_pad: f64,
    pub base: BaseModel,
    pub calibration: Vec<CalibrationRecord>,
}

/// Training responses widened by `margin` times their range on each side.
pub fn data_support(responses: &[f64], margin: f64) -> Result<Interval> {
    let (lo, hi) = response_range(responses)?;
    let pad = margin * (hi - lo);
    Interval::new(lo - pad, hi + pad)
}

fn response_range(responses: &[f64]) -> Result<(f64, f64)> {
    let lo = responses.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = responses.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !(hi > lo) {
        return Err(CiiError::DegenerateResponseScale);
    }
    Ok((lo, hi))
}

/// Fit the calibration layer on top of an already fitted base predictor.
pub fn fit_cii(
    inputs: &[Vec<f64>],
    responses: &[f64],
    base: BaseModel,
    config: &CiiConfig,
) -> Result<CiiModel> {
    if inputs.len() != responses.len() {
        return Err(CiiError::DimensionMismatch {
            expected: inputs.len(),
            got: responses.len(),
        });
    }
    let standardizer = Standardizer::fit(inputs)?;
    let z = standardizer.transform_all(inputs);
    let distance = fit_distance(&z, config.metric, config.ridge)?;
    let n_cal = config.n_cal.unwrap_or(inputs.len());
    let rows = select_calibration(&z, &distance, n_cal, config.boundary_fraction, config.seed)?;
    let observations: Vec<UncertainNumber> =
        responses.iter().map(|&y| UncertainNumber::Scalar(y)).collect();
    let calibration = score_rows(&rows, inputs, &z, &observations, &base, &distance)?;
    let points: Vec<(f64, f64)> = calibration.iter().map(|c| (c.r, c.d)).collect();
    let ipm = fit_ipm_with(
        &points,
        &IpmOptions {
            degree: config.degree,
            grid_size: config.grid_size,
            monotone_tail: config.monotone_tail,
        },
    )?;
    let support = data_support(responses, config.support_margin)?;
    let (lo, hi) = response_range(responses)?;
    Ok(CiiModel {
        standardizer,
        distance,
        ipm,
        constraints: BallConstraints {
            support: Some(support),
        },
        support_pad: config.support_margin * (hi - lo),
        base,
        calibration,
    })
}

/// CII prediction together with the quantities that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct CiiPrediction {
    pub r: f64,
    pub budget: f64,
    pub base: PBox,
    pub pbox: PBox,
}

impl CiiModel {
    pub fn score(&self, x: &[f64]) -> Result<f64> {
        self.distance.score(&self.standardizer.transform(x))
    }

    /// Largest amount by which the fitted band misses a calibration point.
    pub fn enclosure_violation(&self) -> f64 {
        let points: Vec<(f64, f64)> = self.calibration.iter().map(|c| (c.r, c.d)).collect();
        self.ipm.max_enclosure_violation(&points)
    }

    pub fn budget(&self, x: &[f64]) -> Result<f64> {
        let r = self.score(x)?;
        Ok(self.ipm.adjusted_for_score(r, self.distance.r0()))
    }

    /// Support used for a particular base prediction: the data-driven support
    /// hulled with the base range widened by `support_pad`. Without the
    /// widening a base that extrapolates past the data support would pin the
    /// range of the ball to its own, possibly very narrow, range.
    fn constraints_for(&self, base: &PBox) -> BallConstraints {
        match (self.constraints.support, base.range_interval()) {
            (Some(s), Ok(range)) => BallConstraints {
                support: Some(s.hull(&Interval {
                    lo: range.lo - self.support_pad,
                    hi: range.hi + self.support_pad,
                })),
            },
            _ => self.constraints,
        }
    }

    pub fn predict_detailed(&self, row: usize, x: &[f64]) -> Result<CiiPrediction> {
        let r = self.score(x)?;
        let budget = self.ipm.adjusted_for_score(r, self.distance.r0());
        let base = self.base.predict_row(row, x)?.to_pbox();
        let c = self.constraints_for(&base);
        let pbox = ascloseas(&base, budget, &c, None)?.pbox;
        Ok(CiiPrediction { r, budget, base, pbox })
    }
}

pub fn predict_cii(m: &CiiModel, x: &[f64]) -> Result<PBox> {
    Ok(m.predict_detailed(0, x)?.pbox)
}

/// Prediction for a row of an externally keyed query set.
pub fn predict_cii_row(m: &CiiModel, row: usize, x: &[f64]) -> Result<PBox> {
    Ok(m.predict_detailed(row, x)?.pbox)
}
