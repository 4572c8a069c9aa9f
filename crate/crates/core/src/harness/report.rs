//! Flat CSV outputs and the run manifest.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::experiment::{ExperimentReport, Method, MetricRow, PointRow, Regime};
use crate::error::{CiiError, Result};
use crate::metrics::stratify;

/// Marker written where a value is undefined (empty bin, single repeat).
pub const NA: &str = "NA";

/// Mean and standard error over repeats of one (dataset, ε, regime, method).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub dataset: String,
    pub epsilon: f64,
    pub regime: Regime,
    pub method: Method,
    pub repeats: usize,
    pub xi_mean: f64,
    pub xi_se: Option<f64>,
    pub gamma_n_mean: f64,
    pub gamma_n_se: Option<f64>,
    pub d_p_mean: f64,
    pub d_p_se: Option<f64>,
}

fn mean_se(v: &[f64]) -> (f64, Option<f64>) {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let se = (v.len() > 1).then(|| {
        let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
        (var / n).sqrt()
    });
    (mean, se)
}

pub fn aggregate(rows: &[MetricRow]) -> Vec<SummaryRow> {
    let mut groups: BTreeMap<(String, u64, Regime, Method), Vec<&MetricRow>> = BTreeMap::new();
    for r in rows {
        groups
            .entry((r.dataset.clone(), r.epsilon.to_bits(), r.regime, r.method))
            .or_default()
            .push(r);
    }
    groups
        .into_iter()
        .map(|((dataset, eps, regime, method), g)| {
            let col = |f: fn(&MetricRow) -> f64| mean_se(&g.iter().map(|r| f(r)).collect::<Vec<_>>());
            let (xi_mean, xi_se) = col(|r| r.xi);
            let (gamma_n_mean, gamma_n_se) = col(|r| r.gamma_n_mean);
            let (d_p_mean, d_p_se) = col(|r| r.d_p);
            SummaryRow {
                dataset,
                epsilon: f64::from_bits(eps),
                regime,
                method,
                repeats: g.len(),
                xi_mean,
                xi_se,
                gamma_n_mean,
                gamma_n_se,
                d_p_mean,
                d_p_se,
            }
        })
        .collect()
}

/// Coverage and mean breadth per distance bin, pooled over repeats and
/// regimes, for one (dataset, ε, method).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StratifiedRow {
    pub dataset: String,
    pub epsilon: f64,
    pub method: Method,
    pub bin: usize,
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
    pub xi_b: Option<f64>,
    pub gamma_n_mean: Option<f64>,
}

pub fn stratified_table(points: &[PointRow], n_bins: usize) -> Result<Vec<StratifiedRow>> {
    let mut groups: BTreeMap<(String, u64, Method), Vec<&PointRow>> = BTreeMap::new();
    for p in points {
        groups
            .entry((p.dataset.clone(), p.epsilon.to_bits(), p.method))
            .or_default()
            .push(p);
    }
    let mut out = Vec::new();
    for ((dataset, eps, method), g) in groups {
        let covered: Vec<bool> = g.iter().map(|p| p.covered).collect();
        let rs: Vec<f64> = g.iter().map(|p| p.r).collect();
        let bins = stratify(&covered, &rs, n_bins)?;
        let width = (bins[n_bins - 1].hi - bins[0].lo) / n_bins as f64;
        let mut gsum = vec![0.0; n_bins];
        for p in &g {
            gsum[crate::metrics::bin_index(p.r, bins[0].lo, width, n_bins)] += p.gamma_n;
        }
        for (b, bc) in bins.iter().enumerate() {
            out.push(StratifiedRow {
                dataset: dataset.clone(),
                epsilon: f64::from_bits(eps),
                method,
                bin: b,
                lo: bc.lo,
                hi: bc.hi,
                count: bc.count,
                xi_b: bc.xi,
                gamma_n_mean: (bc.count > 0).then(|| gsum[b] / bc.count as f64),
            });
        }
    }
    Ok(out)
}

fn opt(v: Option<f64>) -> String {
    v.map_or(NA.to_string(), |x| x.to_string())
}

fn csv_writer(path: &Path) -> Result<csv::Writer<fs::File>> {
    Ok(csv::WriterBuilder::new().from_path(path)?)
}

pub const ROW_HEADER: [&str; 11] = [
    "dataset", "epsilon", "repeat", "regime", "method", "n", "xi", "gamma_n_mean", "gamma_n_sd", "d_p",
    "d_p_band",
];

fn write_rows(path: &Path, rows: &[MetricRow]) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(ROW_HEADER)?;
    for r in rows {
        w.write_record([
            r.dataset.clone(),
            r.epsilon.to_string(),
            r.repeat.to_string(),
            r.regime.to_string(),
            r.method.to_string(),
            r.n.to_string(),
            r.xi.to_string(),
            r.gamma_n_mean.to_string(),
            r.gamma_n_sd.to_string(),
            r.d_p.to_string(),
            r.d_p_band.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Read back a `rows.csv` written by [`emit_report`].
pub fn read_rows(path: impl AsRef<Path>) -> Result<Vec<MetricRow>> {
    let mut rdr = csv::Reader::from_path(path)?;
    let num = |s: &str| -> Result<f64> {
        s.parse()
            .map_err(|_| CiiError::Malformed(format!("not a number: {s:?}")))
    };
    let int = |s: &str| -> Result<usize> {
        s.parse()
            .map_err(|_| CiiError::Malformed(format!("not an integer: {s:?}")))
    };
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        if rec.len() != ROW_HEADER.len() {
            return Err(CiiError::Malformed(format!("row with {} fields", rec.len())));
        }
        out.push(MetricRow {
            dataset: rec[0].to_string(),
            epsilon: num(&rec[1])?,
            repeat: int(&rec[2])?,
            regime: rec[3].parse()?,
            method: rec[4].parse()?,
            n: int(&rec[5])?,
            xi: num(&rec[6])?,
            gamma_n_mean: num(&rec[7])?,
            gamma_n_sd: num(&rec[8])?,
            d_p: num(&rec[9])?,
            d_p_band: num(&rec[10])?,
        });
    }
    Ok(out)
}

fn write_summary(path: &Path, rows: &[SummaryRow]) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record([
        "dataset", "epsilon", "regime", "method", "repeats", "xi_mean", "xi_se", "gamma_n_mean",
        "gamma_n_se", "d_p_mean", "d_p_se",
    ])?;
    for s in rows {
        w.write_record([
            s.dataset.clone(),
            s.epsilon.to_string(),
            s.regime.to_string(),
            s.method.to_string(),
            s.repeats.to_string(),
            s.xi_mean.to_string(),
            opt(s.xi_se),
            s.gamma_n_mean.to_string(),
            opt(s.gamma_n_se),
            s.d_p_mean.to_string(),
            opt(s.d_p_se),
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn write_stratified(path: &Path, rows: &[StratifiedRow]) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(["epsilon", "method", "bin", "lo", "hi", "count", "xi_b", "gamma_n_mean"])?;
    for s in rows {
        w.write_record([
            s.epsilon.to_string(),
            s.method.to_string(),
            s.bin.to_string(),
            s.lo.to_string(),
            s.hi.to_string(),
            s.count.to_string(),
            opt(s.xi_b),
            opt(s.gamma_n_mean),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Empirical CDF of γ_n per (ε, method, regime) for one dataset.
fn write_gamma_cdf(path: &Path, points: &[&PointRow]) -> Result<()> {
    let mut groups: BTreeMap<(u64, Method, Regime), Vec<f64>> = BTreeMap::new();
    for p in points {
        groups
            .entry((p.epsilon.to_bits(), p.method, p.regime))
            .or_default()
            .push(p.gamma_n);
    }
    let mut w = csv_writer(path)?;
    w.write_record(["epsilon", "method", "regime", "gamma_n", "level"])?;
    for ((eps, method, regime), mut g) in groups {
        g.sort_by(f64::total_cmp);
        let n = g.len() as f64;
        for (i, v) in g.iter().enumerate() {
            w.write_record([
                f64::from_bits(eps).to_string(),
                method.to_string(),
                regime.to_string(),
                v.to_string(),
                ((i + 1) as f64 / n).to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Write `rows.csv`, `summary.csv`, `bands/*.csv` and `manifest.txt` under
/// `out_dir`. Output depends only on the report contents.
pub fn emit_report(r: &ExperimentReport, out_dir: impl AsRef<Path>, n_bins: usize) -> Result<()> {
    let out = out_dir.as_ref();
    let bands_dir = out.join("bands");
    fs::create_dir_all(&bands_dir)?;
    write_rows(&out.join("rows.csv"), &r.rows)?;
    write_summary(&out.join("summary.csv"), &aggregate(&r.rows))?;

    let datasets: Vec<&str> = {
        let mut d: Vec<&str> = r.points.iter().map(|p| p.dataset.as_str()).collect();
        d.dedup();
        d
    };
    let strat = stratified_table(&r.points, n_bins)?;
    for name in datasets {
        let rows: Vec<StratifiedRow> = strat.iter().filter(|s| s.dataset == name).cloned().collect();
        write_stratified(&bands_dir.join(format!("{name}_stratified.csv")), &rows)?;
        let pts: Vec<&PointRow> = r.points.iter().filter(|p| p.dataset == name).collect();
        write_gamma_cdf(&bands_dir.join(format!("{name}_gamma_cdf.csv")), &pts)?;
    }
    if !r.bands.is_empty() {
        let mut w = csv_writer(&bands_dir.join("cubic_bands.csv"))?;
        w.write_record(["repeat", "x", "y", "cii_lo", "cii_hi", "base_lo", "base_hi"])?;
        for b in &r.bands {
            w.write_record([
                b.repeat.to_string(),
                b.x.to_string(),
                b.y.to_string(),
                b.cii_lo.to_string(),
                b.cii_hi.to_string(),
                b.base_lo.to_string(),
                b.base_hi.to_string(),
            ])?;
        }
        w.flush()?;
    }

    let mut m = fs::File::create(out.join("manifest.txt"))?;
    for (k, v) in &r.manifest {
        writeln!(m, "{k} = {v}")?;
    }
    writeln!(m, "models_fitted = {}", r.models_fitted)?;
    writeln!(m, "max_enclosure_violation = {}", r.max_enclosure_violation)?;
    for (i, (unit, msg)) in r.failures.iter().enumerate() {
        writeln!(m, "failure.{i} = {unit}: {msg}")?;
    }
    Ok(())
}
