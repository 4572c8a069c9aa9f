//! Evaluation metrics for predictive p-boxes: coverage, distance-stratified
//! coverage, quantile-scaled breadth and u-pooling against the uniform.

use serde::{Deserialize, Serialize};

use crate::error::{CiiError, Result};
use crate::uncertain::{empirical_cdf, PBox, StepCdf, UncertainNumber};

pub const DEFAULT_BINS: usize = 10;

/// Per-observation evaluation outcome.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvalRecord {
    pub r: f64,
    pub covered: bool,
    pub gamma: f64,
    pub gamma_n: f64,
    pub u_lo: f64,
    pub u_hi: f64,
}

/// Coverage inside one distance bin; `xi` is `None` for an empty bin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BinCoverage {
    pub lo: f64,
    pub hi: f64,
    pub xi: Option<f64>,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub n: usize,
    pub xi: f64,
    pub xi_by_bin: Vec<BinCoverage>,
    pub gamma_n_mean: f64,
    pub gamma_n_sd: f64,
    /// Area between the pooled u-score p-box and the uniform CDF.
    pub d_p: f64,
    /// Width of the pooled u-score band, `∫ (upper − lower)` on `[0, 1]`.
    pub d_p_band: f64,
}

fn check_lengths(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(CiiError::DimensionMismatch { expected: a, got: b });
    }
    if a == 0 {
        return Err(CiiError::EmptySamples);
    }
    Ok(())
}

/// Observation fully inside the p-box range interval.
pub fn is_covered(pred: &PBox, obs: &UncertainNumber) -> Result<bool> {
    let range = pred.range_interval()?;
    Ok(range.contains_interval(&obs.support()?))
}

pub fn coverage(preds: &[PBox], obs: &[UncertainNumber]) -> Result<f64> {
    check_lengths(preds.len(), obs.len())?;
    let mut hits = 0usize;
    for (p, o) in preds.iter().zip(obs) {
        hits += is_covered(p, o)? as usize;
    }
    Ok(hits as f64 / preds.len() as f64)
}

/// Equal-width bins over `[min r, max r]`; the last bin is closed.
pub fn stratify(covered: &[bool], rs: &[f64], n_bins: usize) -> Result<Vec<BinCoverage>> {
    check_lengths(covered.len(), rs.len())?;
    if n_bins == 0 {
        return Err(CiiError::InvalidArgument("need at least one bin".into()));
    }
    let lo = rs.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = rs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let width = (hi - lo) / n_bins as f64;
    let mut hits = vec![0usize; n_bins];
    let mut counts = vec![0usize; n_bins];
    for (&c, &r) in covered.iter().zip(rs) {
        let b = bin_index(r, lo, width, n_bins);
        counts[b] += 1;
        hits[b] += c as usize;
    }
    Ok((0..n_bins)
        .map(|b| BinCoverage {
            lo: lo + width * b as f64,
            hi: if b + 1 == n_bins { hi } else { lo + width * (b + 1) as f64 },
            xi: (counts[b] > 0).then(|| hits[b] as f64 / counts[b] as f64),
            count: counts[b],
        })
        .collect())
}

pub(crate) fn bin_index(r: f64, lo: f64, width: f64, n_bins: usize) -> usize {
    if width > 0.0 {
        (((r - lo) / width).floor() as usize).min(n_bins - 1)
    } else {
        0
    }
}

pub fn stratified_coverage(
    preds: &[PBox],
    obs: &[UncertainNumber],
    rs: &[f64],
    n_bins: usize,
) -> Result<Vec<BinCoverage>> {
    check_lengths(preds.len(), obs.len())?;
    let covered = preds
        .iter()
        .zip(obs)
        .map(|(p, o)| is_covered(p, o))
        .collect::<Result<Vec<_>>>()?;
    stratify(&covered, rs, n_bins)
}

/// Sample quantile with linear interpolation between order statistics.
pub fn empirical_quantile(sample: &[f64], p: f64) -> Result<f64> {
    if sample.is_empty() {
        return Err(CiiError::EmptySamples);
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(CiiError::InvalidArgument(format!("quantile level {p}")));
    }
    let mut s = sample.to_vec();
    s.sort_by(f64::total_cmp);
    let h = p * (s.len() - 1) as f64;
    let i = h.floor() as usize;
    let frac = h - i as f64;
    Ok(if i + 1 < s.len() {
        s[i] + frac * (s[i + 1] - s[i])
    } else {
        s[i]
    })
}

/// Response scale `Q(0.95) − Q(0.05)` used to normalise breadth.
pub fn response_scale(responses: &[f64]) -> Result<(f64, f64)> {
    Ok((
        empirical_quantile(responses, 0.05)?,
        empirical_quantile(responses, 0.95)?,
    ))
}

pub fn quantile_scaled_breadth(p: &PBox, q05: f64, q95: f64) -> Result<f64> {
    if !(q95 > q05) {
        return Err(CiiError::DegenerateResponseScale);
    }
    Ok(p.breadth()? / (q95 - q05))
}

/// Pooled u-scores and their distance from uniformity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UPool {
    pub pooled: PBox,
    pub d_p: f64,
    pub d_p_band: f64,
}

/// Interval-valued probability integral transform `[F̲(y), F̄(y)]`.
pub fn u_score(pred: &PBox, y: f64) -> (f64, f64) {
    (pred.lower().evaluate(y), pred.upper().evaluate(y))
}

pub fn u_pool(preds: &[PBox], obs: &[f64]) -> Result<UPool> {
    check_lengths(preds.len(), obs.len())?;
    let (lo, hi): (Vec<f64>, Vec<f64>) = preds.iter().zip(obs).map(|(p, &y)| u_score(p, y)).unzip();
    u_pool_scores(&lo, &hi)
}

/// Pool precomputed u-intervals. The pooled lower CDF counts upper
/// u-scores, the pooled upper CDF counts lower ones.
pub fn u_pool_scores(u_lo: &[f64], u_hi: &[f64]) -> Result<UPool> {
    check_lengths(u_lo.len(), u_hi.len())?;
    let upper = empirical_cdf(u_lo)?;
    let lower = empirical_cdf(u_hi)?;
    let pooled = PBox::new(lower, upper)?;
    let (d_p, d_p_band) = area_against_uniform(pooled.lower(), pooled.upper());
    Ok(UPool {
        pooled,
        d_p,
        d_p_band,
    })
}

/// Exact `∫₀¹ max(0, u − Ḡ(u), G̲(u) − u) du` and `∫₀¹ (Ḡ − G̲) du` for
/// step bounds against the continuous uniform CDF.
fn area_against_uniform(lower: &StepCdf, upper: &StepCdf) -> (f64, f64) {
    let mut cuts: Vec<f64> = [0.0, 1.0]
        .into_iter()
        .chain(lower.breakpoints().iter().copied())
        .chain(upper.breakpoints().iter().copied())
        .filter(|u| (0.0..=1.0).contains(u))
        .collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    // ∫_s^t (u − c)₊ du
    let ramp = |s: f64, t: f64, c: f64| {
        let a = s.max(c);
        if t > a {
            0.5 * ((t - c).powi(2) - (a - c).powi(2))
        } else {
            0.0
        }
    };
    let mut area = 0.0;
    let mut band = 0.0;
    for w in cuts.windows(2) {
        let (s, t) = (w[0], w[1]);
        let g_hi = upper.evaluate(s);
        let g_lo = lower.evaluate(s);
        area += ramp(s, t, g_hi) + ramp(1.0 - t, 1.0 - s, 1.0 - g_lo);
        band += (g_hi - g_lo) * (t - s);
    }
    (area, band)
}

/// Spearman rank correlation with average ranks for ties.
pub fn spearman(a: &[f64], b: &[f64]) -> Result<f64> {
    check_lengths(a.len(), b.len())?;
    let (ra, rb) = (ranks(a), ranks(b));
    let n = a.len() as f64;
    let ma = ra.iter().sum::<f64>() / n;
    let mb = rb.iter().sum::<f64>() / n;
    let cov: f64 = ra.iter().zip(&rb).map(|(x, y)| (x - ma) * (y - mb)).sum();
    let va: f64 = ra.iter().map(|x| (x - ma).powi(2)).sum();
    let vb: f64 = rb.iter().map(|y| (y - mb).powi(2)).sum();
    if va == 0.0 || vb == 0.0 {
        return Err(CiiError::InvalidArgument("constant sample has no rank correlation".into()));
    }
    Ok(cov / (va * vb).sqrt())
}

fn ranks(v: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..v.len()).collect();
    order.sort_by(|&i, &j| v[i].total_cmp(&v[j]));
    let mut out = vec![0.0; v.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && v[order[j + 1]] == v[order[i]] {
            j += 1;
        }
        let avg = 0.5 * (i + j) as f64 + 1.0;
        for &k in &order[i..=j] {
            out[k] = avg;
        }
        i = j + 1;
    }
    out
}

fn mean_sd(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let sd = if v.len() > 1 {
        (v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
    } else {
        0.0
    };
    (mean, sd)
}

/// Aggregate per-observation records into a report.
pub fn summarize(records: &[EvalRecord], n_bins: usize) -> Result<MetricsReport> {
    if records.is_empty() {
        return Err(CiiError::EmptySamples);
    }
    let covered: Vec<bool> = records.iter().map(|e| e.covered).collect();
    let rs: Vec<f64> = records.iter().map(|e| e.r).collect();
    let gn: Vec<f64> = records.iter().map(|e| e.gamma_n).collect();
    let lo: Vec<f64> = records.iter().map(|e| e.u_lo).collect();
    let hi: Vec<f64> = records.iter().map(|e| e.u_hi).collect();
    let pool = u_pool_scores(&lo, &hi)?;
    let (gamma_n_mean, gamma_n_sd) = mean_sd(&gn);
    Ok(MetricsReport {
        n: records.len(),
        xi: covered.iter().filter(|&&c| c).count() as f64 / records.len() as f64,
        xi_by_bin: stratify(&covered, &rs, n_bins)?,
        gamma_n_mean,
        gamma_n_sd,
        d_p: pool.d_p,
        d_p_band: pool.d_p_band,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::uncertain::Interval;

    fn point_box(lo: f64, hi: f64) -> PBox {
        UncertainNumber::Interval(Interval::new(lo, hi).unwrap()).to_pbox()
    }

    #[test]
    fn coverage_counts_enclosed_observations() {
        let preds = vec![point_box(0.0, 1.0), point_box(0.0, 1.0)];
        let inside = [UncertainNumber::Scalar(0.5), UncertainNumber::Scalar(1.0)];
        assert_eq!(coverage(&preds, &inside).unwrap(), 1.0);
        let half = [
            UncertainNumber::Scalar(0.5),
            UncertainNumber::Interval(Interval::new(0.5, 1.5).unwrap()),
        ];
        assert_eq!(coverage(&preds, &half).unwrap(), 0.5);
        assert!(coverage(&preds, &half[..1]).is_err());
    }

    #[test]
    fn single_bin_is_plain_coverage() {
        let c = [true, false, true, true];
        let r = [0.1, 0.5, 0.2, 0.9];
        let bins = stratify(&c, &r, 1).unwrap();
        assert_eq!(bins.len(), 1);
        assert_eq!(bins[0].xi, Some(0.75));
        assert_eq!(bins[0].count, 4);
    }

    #[test]
    fn empty_bins_are_marked() {
        let bins = stratify(&[true, true], &[0.0, 1.0], 3).unwrap();
        assert_eq!(bins[1].count, 0);
        assert_eq!(bins[1].xi, None);
        assert_eq!(bins[2].xi, Some(1.0));
    }

    #[test]
    fn breadth_scaling() {
        let p = point_box(0.0, 2.0);
        assert_eq!(quantile_scaled_breadth(&p, 1.0, 5.0).unwrap(), 0.5);
        let precise = PBox::precise(StepCdf::normal(0.0, 1.0, 32).unwrap());
        assert_eq!(quantile_scaled_breadth(&precise, 0.0, 1.0).unwrap(), 0.0);
        assert!(matches!(
            quantile_scaled_breadth(&p, 1.0, 1.0),
            Err(CiiError::DegenerateResponseScale)
        ));
    }

    #[test]
    fn quantile_interpolates() {
        let s = [4.0, 1.0, 3.0, 2.0];
        assert_eq!(empirical_quantile(&s, 0.0).unwrap(), 1.0);
        assert_eq!(empirical_quantile(&s, 1.0).unwrap(), 4.0);
        assert_eq!(empirical_quantile(&s, 0.5).unwrap(), 2.5);
        assert!((empirical_quantile(&s, 0.05).unwrap() - 1.15).abs() < 1e-15);
    }

    #[test]
    fn u_pool_reference_cases() {
        let n = 50;
        let u: Vec<f64> = (0..n).map(|i| (i as f64 + 0.5) / n as f64).collect();
        let pool = u_pool_scores(&u, &u).unwrap();
        assert!(pool.d_p <= 0.5 / n as f64 + 1e-15, "{}", pool.d_p);
        assert_eq!(pool.d_p_band, 0.0);

        let zeros = vec![0.0; 7];
        let pool = u_pool_scores(&zeros, &zeros).unwrap();
        assert!((pool.d_p - 0.5).abs() < 1e-12);

        let pool = u_pool_scores(&[0.0; 5], &[1.0; 5]).unwrap();
        assert_eq!(pool.d_p, 0.0);
        assert_eq!(pool.d_p_band, 1.0);
    }

    #[test]
    fn u_pool_from_predictions() {
        let preds = vec![PBox::precise(StepCdf::uniform(0.0, 1.0, 200).unwrap()); 3];
        let pool = u_pool(&preds, &[0.1, 0.5, 0.9]).unwrap();
        assert!(pool.d_p >= 0.0 && pool.d_p <= 1.0);
        assert!(u_pool(&[], &[]).is_err());
    }

    #[test]
    fn spearman_basics() {
        assert!((spearman(&[1.0, 2.0, 3.0], &[10.0, 20.0, 30.0]).unwrap() - 1.0).abs() < 1e-15);
        assert!((spearman(&[1.0, 2.0, 3.0], &[3.0, 2.0, 1.0]).unwrap() + 1.0).abs() < 1e-15);
        assert_eq!(ranks(&[5.0, 1.0, 5.0]), vec![2.5, 1.0, 2.5]);
    }
}
