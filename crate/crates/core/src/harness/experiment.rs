//! Experiment protocols: the cubic toy and the extrapolation benchmark sweep.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::dataset::Dataset;
use super::split::{extrapolation_split, subsample_train, Split};
use crate::basepredict::{fit_bootstrap_envelope, fit_hetero_ls, BaseModel, BasePredictor, DEFAULT_MEMBERS};
use crate::conformal::{fit_cii, CiiConfig, CiiModel, CiiPrediction, DEFAULT_BOUNDARY_FRACTION, DEFAULT_SUPPORT_MARGIN};
use crate::error::{CiiError, Result};
use crate::ipm::DEFAULT_DEGREE;
use crate::metrics::{response_scale, summarize, u_score, EvalRecord, DEFAULT_BINS};
use crate::uncertain::PBox;

pub const DEFAULT_EPSILONS: [f64; 5] = [0.1, 0.3, 0.5, 0.7, 0.9];
pub const DEFAULT_REPEATS: usize = 20;
/// Central interval used to score coverage of precise predictions.
pub const PRECISE_ALPHA: f64 = 0.05;
/// Highest base feature degree the automatic benchmark choice will use.
pub const AUTO_MAX_FEATURE_DEGREE: usize = 2;
/// Training rows required per mean-model coefficient by the automatic choice.
pub const AUTO_ROWS_PER_COEFFICIENT: usize = 5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub seed: u64,
    pub epsilons: Vec<f64>,
    pub repeats: usize,
    /// `(train, holdout)` parts of the extrapolation split.
    pub ratio: (f64, f64),
    pub ipm_degree: usize,
    pub n_cal: Option<usize>,
    pub boundary_fraction: f64,
    pub bins: usize,
    /// Polynomial degree of the base regressors; `None` picks 3 for the toy
    /// and [`auto_feature_degree`] of the subsampled training set for
    /// benchmark data.
    pub feature_degree: Option<usize>,
    pub members: usize,
    /// Fit and report the heteroscedastic and bootstrap baselines.
    pub baselines: bool,
    pub support_margin: f64,
    pub noise_sd: f64,
    pub toy_train: usize,
    pub toy_test: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            epsilons: DEFAULT_EPSILONS.to_vec(),
            repeats: DEFAULT_REPEATS,
            ratio: (3.0, 7.0),
            ipm_degree: DEFAULT_DEGREE,
            n_cal: None,
            boundary_fraction: DEFAULT_BOUNDARY_FRACTION,
            bins: DEFAULT_BINS,
            feature_degree: None,
            members: DEFAULT_MEMBERS,
            baselines: true,
            support_margin: DEFAULT_SUPPORT_MARGIN,
            noise_sd: 3.0,
            toy_train: 40,
            toy_test: 200,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.epsilons.is_empty() || self.epsilons.iter().any(|&e| !(e > 0.0 && e <= 1.0)) {
            return Err(CiiError::InvalidArgument(format!(
                "data proportions must lie in (0, 1], got {:?}",
                self.epsilons
            )));
        }
        if !(self.ratio.0 > 0.0 && self.ratio.1 > 0.0) {
            return Err(CiiError::InvalidArgument(format!(
                "split ratio {}:{} needs two positive parts",
                self.ratio.0, self.ratio.1
            )));
        }
        if self.repeats == 0 || self.bins == 0 {
            return Err(CiiError::InvalidArgument("repeats and bins must be positive".into()));
        }
        Ok(())
    }

    fn cii(&self, seed: u64, n_train: usize) -> CiiConfig {
        CiiConfig {
            degree: self.ipm_degree,
            n_cal: self.n_cal.map(|n| n.min(n_train)),
            boundary_fraction: self.boundary_fraction,
            support_margin: self.support_margin,
            seed,
            ..CiiConfig::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Regime {
    Id,
    Ood,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Method {
    Cii,
    Hetero,
    Bootstrap,
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Regime::Id => "ID",
            Regime::Ood => "OOD",
        })
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Cii => "cii",
            Method::Hetero => "hetero",
            Method::Bootstrap => "bootstrap",
        })
    }
}

impl FromStr for Regime {
    type Err = CiiError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ID" => Ok(Regime::Id),
            "OOD" => Ok(Regime::Ood),
            _ => Err(CiiError::Malformed(format!("unknown regime {s:?}"))),
        }
    }
}

impl FromStr for Method {
    type Err = CiiError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cii" => Ok(Method::Cii),
            "hetero" => Ok(Method::Hetero),
            "bootstrap" => Ok(Method::Bootstrap),
            _ => Err(CiiError::Malformed(format!("unknown method {s:?}"))),
        }
    }
}

/// One metric row per (dataset, ε, repeat, regime, method).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricRow {
    pub dataset: String,
    pub epsilon: f64,
    pub repeat: usize,
    pub regime: Regime,
    pub method: Method,
    pub n: usize,
    pub xi: f64,
    pub gamma_n_mean: f64,
    pub gamma_n_sd: f64,
    pub d_p: f64,
    pub d_p_band: f64,
}

/// Per-observation outcome kept for stratified and distributional tables.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointRow {
    pub dataset: String,
    pub epsilon: f64,
    pub repeat: usize,
    pub regime: Regime,
    pub method: Method,
    pub r: f64,
    pub covered: bool,
    pub gamma_n: f64,
}

/// Plot data for the cubic toy: range intervals along the test grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BandRow {
    pub repeat: usize,
    pub x: f64,
    pub y: f64,
    pub cii_lo: f64,
    pub cii_hi: f64,
    pub base_lo: f64,
    pub base_hi: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub rows: Vec<MetricRow>,
    pub points: Vec<PointRow>,
    pub bands: Vec<BandRow>,
    /// `(unit, message)` for every dataset or cell that failed.
    pub failures: Vec<(String, String)>,
    /// Number of CII models fitted across all cells.
    pub models_fitted: usize,
    /// Worst calibration-point enclosure violation over those models.
    pub max_enclosure_violation: f64,
    pub manifest: BTreeMap<String, String>,
}

impl ExperimentReport {
    fn record_model(&mut self, violation: f64) {
        self.models_fitted += 1;
        self.max_enclosure_violation = self.max_enclosure_violation.max(violation);
    }

    fn sort(&mut self) {
        let key = |d: &str, e: f64, rep: usize, reg: Regime, m: Method| {
            (d.to_string(), e.to_bits(), rep, reg, m)
        };
        self.rows
            .sort_by_key(|r| key(&r.dataset, r.epsilon, r.repeat, r.regime, r.method));
        // stable sort keeps within-cell evaluation order
        self.points
            .sort_by_key(|p| key(&p.dataset, p.epsilon, p.repeat, p.regime, p.method));
        self.bands
            .sort_by(|a, b| a.repeat.cmp(&b.repeat).then(a.x.total_cmp(&b.x)));
        self.failures.sort();
    }
}

/// Cell seed from the master seed and the cell coordinates.
pub fn derive_seed(master: u64, dataset: &str, epsilon: f64, repeat: usize) -> u64 {
    let mut h = Sha256::new();
    h.update(master.to_le_bytes());
    h.update(dataset.as_bytes());
    h.update(epsilon.to_bits().to_le_bytes());
    h.update((repeat as u64).to_le_bytes());
    let out = h.finalize();
    u64::from_le_bytes(out[..8].try_into().expect("digest has 32 bytes"))
}

fn evaluate(pred: &PBox, precise: bool, y: f64, r: f64, scale: (f64, f64)) -> Result<EvalRecord> {
    let covered = if precise {
        pred.central_interval(PRECISE_ALPHA)?.contains(y)
    } else {
        pred.range_interval()?.contains(y)
    };
    let gamma = if precise { 0.0 } else { pred.breadth()? };
    let (u_lo, u_hi) = u_score(pred, y);
    Ok(EvalRecord {
        r,
        covered,
        gamma,
        gamma_n: gamma / (scale.1 - scale.0),
        u_lo,
        u_hi,
    })
}

/// Largest per-feature polynomial degree (at most
/// [`AUTO_MAX_FEATURE_DEGREE`]) that leaves [`AUTO_ROWS_PER_COEFFICIENT`]
/// training rows per mean-model coefficient, falling back to 1.
pub fn auto_feature_degree(rows: usize, dim: usize) -> usize {
    (2..=AUTO_MAX_FEATURE_DEGREE)
        .rev()
        .find(|&p| rows >= AUTO_ROWS_PER_COEFFICIENT * (1 + dim * p))
        .unwrap_or(1)
}

/// Fitted predictors of one experiment cell.
struct Fitted {
    cii: CiiModel,
    bootstrap: Option<BaseModel>,
}

fn fit_cell(train: &Dataset, cfg: &ExperimentConfig, feature_degree: usize, seed: u64) -> Result<Fitted> {
    let hetero = fit_hetero_ls(&train.features, &train.responses, feature_degree)?;
    let cii = fit_cii(
        &train.features,
        &train.responses,
        BaseModel::Hetero(hetero),
        &cfg.cii(seed, train.len()),
    )?;
    let bootstrap = if cfg.baselines {
        Some(BaseModel::Bootstrap(fit_bootstrap_envelope(
            &train.features,
            &train.responses,
            cfg.members,
            feature_degree,
            seed ^ 0x9e37_79b9_7f4a_7c15,
        )?))
    } else {
        None
    };
    Ok(Fitted { cii, bootstrap })
}

/// Fit a standalone CII model on a whole dataset with the heteroscedastic
/// base, as the benchmark does for a single cell.
pub fn fit_model(train: &Dataset, cfg: &ExperimentConfig) -> Result<CiiModel> {
    let degree = cfg
        .feature_degree
        .unwrap_or_else(|| auto_feature_degree(train.len(), train.dim()));
    let hetero = fit_hetero_ls(&train.features, &train.responses, degree)?;
    fit_cii(
        &train.features,
        &train.responses,
        BaseModel::Hetero(hetero),
        &cfg.cii(cfg.seed, train.len()),
    )
}

type Tagged = (Regime, Method, EvalRecord);

/// Evaluate every method at one query point.
fn evaluate_point(
    f: &Fitted,
    row: usize,
    x: &[f64],
    y: f64,
    r: f64,
    regime: Regime,
    scale: (f64, f64),
    baselines: bool,
) -> Result<(Vec<Tagged>, CiiPrediction)> {
    let p = f.cii.predict_detailed(row, x)?;
    let mut out = vec![(regime, Method::Cii, evaluate(&p.pbox, false, y, r, scale)?)];
    if baselines {
        out.push((regime, Method::Hetero, evaluate(&p.base, true, y, r, scale)?));
        if let Some(b) = &f.bootstrap {
            let bp = b.predict_row(row, x)?.to_pbox();
            out.push((regime, Method::Bootstrap, evaluate(&bp, false, y, r, scale)?));
        }
    }
    Ok((out, p))
}

fn collect_rows(
    dataset: &str,
    epsilon: f64,
    repeat: usize,
    tagged: Vec<Tagged>,
    bins: usize,
) -> Result<(Vec<MetricRow>, Vec<PointRow>)> {
    let mut groups: BTreeMap<(Regime, Method), Vec<EvalRecord>> = BTreeMap::new();
    for (reg, m, e) in tagged {
        groups.entry((reg, m)).or_default().push(e);
    }
    let mut rows = Vec::new();
    let mut points = Vec::new();
    for ((regime, method), recs) in groups {
        let s = summarize(&recs, bins)?;
        rows.push(MetricRow {
            dataset: dataset.to_string(),
            epsilon,
            repeat,
            regime,
            method,
            n: s.n,
            xi: s.xi,
            gamma_n_mean: s.gamma_n_mean,
            gamma_n_sd: s.gamma_n_sd,
            d_p: s.d_p,
            d_p_band: s.d_p_band,
        });
        points.extend(recs.iter().map(|e| PointRow {
            dataset: dataset.to_string(),
            epsilon,
            repeat,
            regime,
            method,
            r: e.r,
            covered: e.covered,
            gamma_n: e.gamma_n,
        }));
    }
    Ok((rows, points))
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![0.5 * (lo + hi)],
        _ => (0..n)
            .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
            .collect(),
    }
}

/// Draw cubic-toy data: `x ~ U(−4, 4)` for training and a uniform grid on
/// `[−8, 8]` for testing, `y = x³ + N(0, noise_sd²)`.
pub fn cubic_data(cfg: &ExperimentConfig, seed: u64) -> Result<(Dataset, Dataset)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise = Normal::new(0.0, cfg.noise_sd)
        .map_err(|e| CiiError::InvalidArgument(format!("noise sd: {e}")))?;
    let draw = |x: f64, rng: &mut ChaCha8Rng| x.powi(3) + noise.sample(rng);
    let xs: Vec<f64> = (0..cfg.toy_train).map(|_| rng.random_range(-4.0..4.0)).collect();
    let ys: Vec<f64> = xs.iter().map(|&x| draw(x, &mut rng)).collect();
    let tx = linspace(-8.0, 8.0, cfg.toy_test);
    let ty: Vec<f64> = tx.iter().map(|&x| draw(x, &mut rng)).collect();
    let wrap = |v: Vec<f64>| v.into_iter().map(|x| vec![x]).collect();
    Ok((
        Dataset::from_parts("cubic_train", wrap(xs), ys)?,
        Dataset::from_parts("cubic_test", wrap(tx), ty)?,
    ))
}

type ToyOutput = (Vec<MetricRow>, Vec<PointRow>, Vec<BandRow>, f64);

fn toy_repeat(cfg: &ExperimentConfig, repeat: usize) -> Result<ToyOutput> {
    let seed = derive_seed(cfg.seed, "cubic", 1.0, repeat);
    let (train, test) = cubic_data(cfg, seed)?;
    let fitted = fit_cell(&train, cfg, cfg.feature_degree.unwrap_or(3), seed)?;
    let scale = response_scale(&train.responses)?;
    let mut tagged = Vec::new();
    let mut bands = Vec::new();
    for (i, (x, &y)) in test.features.iter().zip(&test.responses).enumerate() {
        let r = fitted.cii.score(x)?;
        let regime = if r <= fitted.cii.distance.r0() { Regime::Id } else { Regime::Ood };
        let (t, p) = evaluate_point(&fitted, i, x, y, r, regime, scale, cfg.baselines)?;
        tagged.extend(t);
        let range = p.pbox.range_interval()?;
        let base = p.base.central_interval(PRECISE_ALPHA)?;
        bands.push(BandRow {
            repeat,
            x: x[0],
            y,
            cii_lo: range.lo,
            cii_hi: range.hi,
            base_lo: base.lo,
            base_hi: base.hi,
        });
    }
    let (rows, points) = collect_rows("cubic", 1.0, repeat, tagged, cfg.bins)?;
    Ok((rows, points, bands, fitted.cii.enclosure_violation()))
}

/// Repeated cubic-toy runs.
pub fn run_cubic(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    cfg.validate()?;
    let results: Vec<_> = (0..cfg.repeats)
        .into_par_iter()
        .map(|rep| toy_repeat(cfg, rep))
        .collect::<Result<_>>()?;
    let mut report = ExperimentReport::default();
    for (rows, points, bands, violation) in results {
        report.rows.extend(rows);
        report.points.extend(points);
        report.bands.extend(bands);
        report.record_model(violation);
    }
    report.sort();
    report.manifest = base_manifest(cfg, "toy");
    Ok(report)
}

fn bench_cell(
    d: &Dataset,
    split: &Split,
    scale: (f64, f64),
    epsilon: f64,
    repeat: usize,
    cfg: &ExperimentConfig,
) -> Result<(Vec<MetricRow>, Vec<PointRow>, f64)> {
    let seed = derive_seed(cfg.seed, &d.name, epsilon, repeat);
    let train = subsample_train(&split.train, epsilon, seed)?;
    let degree = cfg
        .feature_degree
        .unwrap_or_else(|| auto_feature_degree(train.len(), train.dim()));
    let fitted = fit_cell(&train, cfg, degree, seed)?;
    let mut tagged = Vec::new();
    for (i, (x, &y)) in split.holdout.features.iter().zip(&split.holdout.responses).enumerate() {
        let regime = if split.id_mask[i] { Regime::Id } else { Regime::Ood };
        let r = split.holdout_scores[i];
        tagged.extend(evaluate_point(&fitted, i, x, y, r, regime, scale, cfg.baselines)?.0);
    }
    let (rows, points) = collect_rows(&d.name, epsilon, repeat, tagged, cfg.bins)?;
    Ok((rows, points, fitted.cii.enclosure_violation()))
}

/// Full sweep: for each dataset, ε and repeat, subsample the extrapolation
/// split's training part, fit all methods and score the holdout by regime.
pub fn run_benchmark(datasets: &[Dataset], cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    cfg.validate()?;
    let mut report = ExperimentReport {
        manifest: base_manifest(cfg, "bench"),
        ..ExperimentReport::default()
    };
    let mut prepared = Vec::new();
    for d in datasets {
        let prep = extrapolation_split(d, cfg.ratio)
            .and_then(|s| Ok((s, response_scale(&d.responses)?)));
        match prep {
            Ok((split, scale)) => {
                let n_id = split.id_mask.iter().filter(|&&b| b).count();
                let m = &mut report.manifest;
                m.insert(format!("dataset.{}.digest", d.name), d.digest.clone());
                m.insert(format!("dataset.{}.rows", d.name), d.len().to_string());
                m.insert(format!("dataset.{}.dropped", d.name), d.dropped.to_string());
                m.insert(format!("dataset.{}.train", d.name), split.train.len().to_string());
                m.insert(format!("dataset.{}.holdout_id", d.name), n_id.to_string());
                m.insert(
                    format!("dataset.{}.holdout_ood", d.name),
                    (split.holdout.len() - n_id).to_string(),
                );
                m.insert(format!("dataset.{}.split_threshold", d.name), split.threshold.to_string());
                m.insert(format!("dataset.{}.r0", d.name), split.distance.r0().to_string());
                prepared.push((d, split, scale));
            }
            Err(e) => report.failures.push((d.name.clone(), e.to_string())),
        }
    }
    let cells: Vec<(usize, f64, usize)> = (0..prepared.len())
        .flat_map(|di| {
            cfg.epsilons
                .iter()
                .flat_map(move |&e| (0..cfg.repeats).map(move |rep| (di, e, rep)))
        })
        .collect();
    let results: Vec<_> = cells
        .par_iter()
        .map(|&(di, e, rep)| {
            let (d, split, scale) = &prepared[di];
            (di, e, rep, bench_cell(d, split, *scale, e, rep, cfg))
        })
        .collect();
    for (di, e, rep, res) in results {
        match res {
            Ok((rows, points, violation)) => {
                report.rows.extend(rows);
                report.points.extend(points);
                report.record_model(violation);
            }
            Err(err) => report.failures.push((
                format!("{} eps={e} repeat={rep}", prepared[di].0.name),
                err.to_string(),
            )),
        }
    }
    report.sort();
    Ok(report)
}

fn base_manifest(cfg: &ExperimentConfig, protocol: &str) -> BTreeMap<String, String> {
    let mut m = BTreeMap::new();
    let mut put = |k: &str, v: String| {
        m.insert(k.to_string(), v);
    };
    put("protocol", protocol.into());
    put("version", env!("CARGO_PKG_VERSION").into());
    put("seed", cfg.seed.to_string());
    put(
        "epsilon",
        cfg.epsilons.iter().map(f64::to_string).collect::<Vec<_>>().join(","),
    );
    put("repeats", cfg.repeats.to_string());
    put("ratio", format!("{}:{}", cfg.ratio.0, cfg.ratio.1));
    put("degree", cfg.ipm_degree.to_string());
    put("n_cal", cfg.n_cal.map_or("all".into(), |n| n.to_string()));
    put("boundary_fraction", cfg.boundary_fraction.to_string());
    put("bins", cfg.bins.to_string());
    put(
        "feature_degree",
        cfg.feature_degree.map_or("auto".into(), |d| d.to_string()),
    );
    put("members", cfg.members.to_string());
    put("baselines", cfg.baselines.to_string());
    put("support_margin", cfg.support_margin.to_string());
    put(
        "support_rule",
        "training response range widened by support_margin times the range, hulled with the base range widened by the same amount".into(),
    );
    put("ipm_tail", "upper edge nondecreasing beyond the calibration range".into());
    put("split_distance", "provisional full-data fit for ranking, refit on train for labels".into());
    put("calibration", "drawn from the training set".into());
    put("spread", "standard error over repeats".into());
    put("coverage_precise", format!("central {} interval", 1.0 - PRECISE_ALPHA));
    put("coverage_pbox", "range interval".into());
    put("seed_derivation", "sha256(seed, dataset, epsilon bits, repeat)".into());
    if protocol == "toy" {
        put("noise_sd", cfg.noise_sd.to_string());
        put("toy_train", cfg.toy_train.to_string());
        put("toy_test", cfg.toy_test.to_string());
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick() -> ExperimentConfig {
        ExperimentConfig {
            repeats: 2,
            members: 3,
            ..ExperimentConfig::default()
        }
    }

    #[test]
    fn seeds_differ_by_coordinate() {
        let a = derive_seed(1, "x", 0.5, 0);
        assert_ne!(a, derive_seed(1, "x", 0.5, 1));
        assert_ne!(a, derive_seed(1, "y", 0.5, 0));
        assert_ne!(a, derive_seed(2, "x", 0.5, 0));
        assert_eq!(a, derive_seed(1, "x", 0.5, 0));
    }

    #[test]
    fn auto_degree_tracks_rows_per_coefficient() {
        // five features: degree 2 has 11 coefficients
        assert_eq!(auto_feature_degree(55, 5), 2);
        assert_eq!(auto_feature_degree(54, 5), 1);
        assert_eq!(auto_feature_degree(3, 5), 1);
    }

    #[test]
    fn cubic_is_deterministic() {
        let cfg = quick();
        let a = run_cubic(&cfg).unwrap();
        let b = run_cubic(&cfg).unwrap();
        assert_eq!(a, b);
        assert!(a.rows.iter().any(|r| r.method == Method::Cii));
    }

    #[test]
    fn noiseless_cubic_is_enclosed_in_range() {
        let cfg = ExperimentConfig {
            noise_sd: 0.0,
            repeats: 1,
            baselines: false,
            ..ExperimentConfig::default()
        };
        let rep = run_cubic(&cfg).unwrap();
        for b in rep.bands.iter().filter(|b| b.x.abs() <= 4.0) {
            let truth = b.x.powi(3);
            assert!(b.cii_lo <= truth && truth <= b.cii_hi, "{b:?}");
        }
    }

    #[test]
    fn config_validation() {
        let bad = ExperimentConfig {
            epsilons: vec![0.0],
            ..ExperimentConfig::default()
        };
        assert!(bad.validate().is_err());
        let bad = ExperimentConfig {
            ratio: (1.0, 0.0),
            ..ExperimentConfig::default()
        };
        assert!(bad.validate().is_err());
    }
}
