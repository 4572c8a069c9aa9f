//! Acceptance suite. Runs without the libtest harness so every criterion
//! prints one PASS/FAIL line; exits nonzero if any criterion fails.

mod common;

use std::collections::BTreeMap;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use cii::harness::report::stratified_table;
use cii::harness::{aggregate, ingest_csv, run_benchmark, run_cubic, Dataset, ExperimentConfig, ExperimentReport, Method, Regime, TargetColumn};
use cii::ipm::{fit_ipm_with, IpmOptions};
use cii::metrics::{quantile_scaled_breadth, spearman, stratify, u_pool_scores};
use cii::transport::{envelope_oracle, lower_envelope, upper_envelope, BallConstraints, Sense};
use cii::uncertain::{PBox, StepCdf};
use common::*;

const ENCLOSURE_TOL: f64 = 1e-9;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn datasets() -> Vec<Dataset> {
    ["diabetes.csv", "friedman1.csv"]
        .iter()
        .map(|f| ingest_csv(data_path(f), &TargetColumn::Last).expect("bundled dataset"))
        .collect()
}

/// Mean CII coverage over a repeat's whole test grid, by repeat.
fn per_run_coverage(r: &ExperimentReport) -> BTreeMap<usize, f64> {
    let mut acc: BTreeMap<usize, (usize, usize)> = BTreeMap::new();
    for p in r.points.iter().filter(|p| p.method == Method::Cii) {
        let e = acc.entry(p.repeat).or_default();
        e.0 += p.covered as usize;
        e.1 += 1;
    }
    acc.into_iter().map(|(k, (c, n))| (k, c as f64 / n as f64)).collect()
}

fn criterion_1(toy: &ExperimentReport, elapsed: Duration) -> Outcome {
    let runs = per_run_coverage(toy);
    let mean = runs.values().sum::<f64>() / runs.len() as f64;
    let full = runs.values().filter(|&&x| x == 1.0).count();
    outcome(
        runs.len() == 20 && mean >= 0.99 && full >= 18 && elapsed < Duration::from_secs(30),
        format!(
            "{} runs, mean xi {mean:.4}, {full}/20 runs with xi = 1, {:.1}s",
            runs.len(),
            elapsed.as_secs_f64()
        ),
    )
}

fn criterion_2() -> Outcome {
    const GRID: usize = 256;
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let (a, b) = (-0.5, 1.5);
    let c = BallConstraints::with_support(a, b).unwrap();
    let cell = (b - a) / GRID as f64;
    let mut worst: f64 = 0.0;
    let mut checks = 0;
    for _ in 0..50 {
        let base = random_step_cdf(&mut rng, 10);
        for &d in &[0.0, 0.01, 0.1, 0.5] {
            for _ in 0..5 {
                let x0 = rng.random_range(a..b);
                // the oracle resolves x0 only to its lattice cell and the base
                // to the cell's left edge, so it is bracketed by the exact
                // envelope evaluated two cells left and one cell right
                let grid = [x0 - 2.0 * cell, x0 + cell];
                let up = upper_envelope(&base, d, &c, &grid).unwrap();
                let down = lower_envelope(&base, d, &c, &grid).unwrap();
                for (sense, env) in [(Sense::Sup, &up), (Sense::Inf, &down)] {
                    let o = envelope_oracle(&base, d, &c, x0, sense, GRID).unwrap();
                    let (lo, hi) = (env.evaluate(grid[0]), env.evaluate(grid[1]));
                    let miss = (lo - o).max(o - hi).max(0.0);
                    worst = worst.max(miss);
                    checks += 1;
                }
            }
        }
    }
    let u = StepCdf::uniform(0.0, 1.0, 4096).unwrap();
    let unconstrained = BallConstraints::unconstrained();
    let g1 = upper_envelope(&u, 0.02, &unconstrained, &[0.5]).unwrap().evaluate(0.5);
    let g2 = upper_envelope(&u, 0.125, &unconstrained, &[0.5]).unwrap().evaluate(0.5);
    let analytic = (g1 - 0.7).abs() <= 1e-3 && (g2 - 1.0).abs() <= 1e-3;
    outcome(
        worst <= 1e-9 && analytic,
        format!("{checks} oracle checks, worst bracket miss {worst:.2e}; uniform base G(0.5) = {g1:.5} at d=0.02, {g2:.5} at d=0.125"),
    )
}

fn criterion_3(reports: &[&ExperimentReport]) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst: f64 = 0.0;
    let mut enclosure: f64 = 0.0;
    for case in 0..100 {
        let degree = case % 2;
        let n = rng.random_range(degree + 2..=6);
        let points = random_ipm_points(&mut rng, n);
        let tail = case % 4 >= 2;
        let opts = IpmOptions {
            degree,
            grid_size: 8,
            monotone_tail: tail,
        };
        let m = fit_ipm_with(&points, &opts).expect("feasible instance");
        let want = ipm_area_oracle(&points, degree, 8, tail).expect("oracle vertex");
        worst = worst.max((m.band_area() - want).abs());
        enclosure = enclosure.max(m.max_enclosure_violation(&points));
    }
    let models: usize = reports.iter().map(|r| r.models_fitted).sum();
    let failures: usize = reports.iter().map(|r| r.failures.len()).sum();
    let exp_worst = reports.iter().map(|r| r.max_enclosure_violation).fold(0.0, f64::max);
    outcome(
        worst <= 1e-6 && enclosure <= ENCLOSURE_TOL && exp_worst <= ENCLOSURE_TOL && failures == 0,
        format!(
            "100 instances, worst area gap {worst:.2e}; {models} experiment models, worst enclosure violation {:.2e}, {failures} failed cells",
            exp_worst.max(enclosure)
        ),
    )
}

fn criterion_4(sweep: &ExperimentReport) -> Outcome {
    let summary = aggregate(&sweep.rows);
    let mut ok = sweep.failures.is_empty();
    let mut lines = Vec::new();
    let mut boot_below = false;
    let mut names: Vec<&str> = summary.iter().map(|s| s.dataset.as_str()).collect();
    names.dedup();
    for name in &names {
        let get = |reg: Regime, m: Method| {
            summary
                .iter()
                .find(|s| s.dataset == *name && s.epsilon == 0.5 && s.regime == reg && s.method == m)
        };
        for reg in [Regime::Id, Regime::Ood] {
            match get(reg, Method::Cii) {
                Some(s) => {
                    ok &= s.repeats == 20 && s.xi_mean >= 0.99 && s.d_p_mean <= 0.05;
                    lines.push(format!("{name} {reg} xi {:.3} d_p {:.4}", s.xi_mean, s.d_p_mean));
                }
                None => ok = false,
            }
        }
        if let (Some(c), Some(b)) = (get(Regime::Ood, Method::Cii), get(Regime::Ood, Method::Bootstrap)) {
            boot_below |= b.xi_mean < c.xi_mean;
            lines.push(format!("{name} OOD bootstrap xi {:.3}", b.xi_mean));
        }
    }
    outcome(ok && boot_below && names.len() >= 2, lines.join("; "))
}

fn criterion_5(sweep: &ExperimentReport) -> Outcome {
    let mut groups: BTreeMap<(String, u64, Regime), Vec<f64>> = BTreeMap::new();
    for p in sweep.points.iter().filter(|p| p.method == Method::Cii) {
        groups
            .entry((p.dataset.clone(), p.epsilon.to_bits(), p.regime))
            .or_default()
            .push(p.gamma_n);
    }
    let mut ok = !groups.is_empty();
    let mut cells = 0;
    let mut smallest_gap = f64::INFINITY;
    for ((name, eps, reg), ood) in &groups {
        if *reg != Regime::Ood {
            continue;
        }
        let Some(id) = groups.get(&(name.clone(), *eps, Regime::Id)) else {
            ok = false;
            continue;
        };
        cells += 1;
        let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
        ok &= mean(ood) > mean(id);
        smallest_gap = smallest_gap.min(mean(ood) - mean(id));
        for q in [0.25, 0.5, 0.75] {
            ok &= quantile(ood, q) >= quantile(id, q);
        }
    }
    let expected = 2 * sweep_config().epsilons.len();
    outcome(
        ok && cells == expected,
        format!("{cells} dataset x epsilon cells, smallest mean gamma_n gap (OOD - ID) {smallest_gap:.3}, quartiles checked"),
    )
}

fn criterion_6(full: &ExperimentReport) -> Outcome {
    let table = stratified_table(&full.points, 10).expect("stratified table");
    let mut ok = full.failures.is_empty();
    let mut lines = Vec::new();
    let mut names: Vec<&str> = table.iter().map(|s| s.dataset.as_str()).collect();
    names.dedup();
    for name in &names {
        let rows: Vec<_> = table
            .iter()
            .filter(|s| s.dataset == *name && s.method == Method::Cii && s.count > 0)
            .collect();
        let idx: Vec<f64> = rows.iter().map(|s| s.bin as f64).collect();
        let gamma: Vec<f64> = rows.iter().map(|s| s.gamma_n_mean.unwrap_or(f64::NAN)).collect();
        let rho = spearman(&idx, &gamma).unwrap_or(f64::NAN);
        let min_xi = rows.iter().filter_map(|s| s.xi_b).fold(1.0, f64::min);
        ok &= rho > 0.5 && min_xi >= 0.95;
        lines.push(format!("{name} spearman {rho:.3}, min xi_b {min_xi:.3} over {} bins", rows.len()));
    }
    outcome(ok && names.len() >= 2, lines.join("; "))
}

fn criterion_7(toy: &ExperimentReport) -> Outcome {
    // coverage against the count-weighted bin mean, on the precise baseline's
    // toy points so that the bins contain misses
    let pts: Vec<_> = toy.points.iter().filter(|p| p.method == Method::Hetero).collect();
    let covered: Vec<bool> = pts.iter().map(|p| p.covered).collect();
    let rs: Vec<f64> = pts.iter().map(|p| p.r).collect();
    let bins = stratify(&covered, &rs, 10).expect("bins");
    let hits = covered.iter().filter(|&&c| c).count();
    let recount: usize = bins
        .iter()
        .filter_map(|b| b.xi.map(|x| (x * b.count as f64).round() as usize))
        .sum();
    let xi = hits as f64 / covered.len() as f64;
    let weighted: f64 = bins
        .iter()
        .filter_map(|b| b.xi.map(|x| x * b.count as f64))
        .sum::<f64>()
        / covered.len() as f64;
    let identity = recount == hits && (xi - weighted).abs() <= 4.0 * f64::EPSILON;

    let zeros = vec![0.0; 50];
    let d_p = u_pool_scores(&zeros, &zeros).expect("pool").d_p;

    let lo = StepCdf::new(vec![0.0, 1.0, 2.5], vec![0.2, 0.7, 1.0]).unwrap();
    let hi = StepCdf::new(vec![-1.0, 0.5, 2.0], vec![0.4, 0.9, 1.0]).unwrap();
    let p = PBox::new(lo.clone(), hi.clone()).unwrap();
    let (a, b) = (37.5, -12.25);
    let map = |c: &StepCdf| StepCdf::new(c.breakpoints().iter().map(|x| a * x + b).collect(), c.levels().to_vec()).unwrap();
    let q = PBox::new(map(&lo), map(&hi)).unwrap();
    let g1 = quantile_scaled_breadth(&p, -0.8, 2.2).unwrap();
    let g2 = quantile_scaled_breadth(&q, a * -0.8 + b, a * 2.2 + b).unwrap();

    outcome(
        identity && (d_p - 0.5).abs() <= 1e-12 && (g1 - g2).abs() <= 1e-10,
        format!(
            "xi {xi:.6} vs bin-weighted {weighted:.6} ({hits} hits recounted as {recount}); d_p(all u = 0) = {d_p}; gamma_n {g1:.12} vs affine image {g2:.12}"
        ),
    )
}

fn criterion_8() -> Outcome {
    let dir = tempfile::tempdir().expect("temp dir");
    let run = |sub: &str| {
        let out = dir.path().join(sub);
        let status = Command::new(env!("CARGO_BIN_EXE_cii"))
            .args(["bench", &data_path("diabetes.csv"), &data_path("friedman1.csv")])
            .args(["--epsilon", "0.3,0.7", "--repeats", "3", "--seed", "17", "--out"])
            .arg(&out)
            .output()
            .expect("run binary");
        (status.status.success(), std::fs::read(out.join("rows.csv")).unwrap_or_default())
    };
    let (ok_a, a) = run("a");
    let (ok_b, b) = run("b");
    outcome(
        ok_a && ok_b && !a.is_empty() && a == b,
        format!("two bench runs, rows.csv {} and {} bytes, identical: {}", a.len(), b.len(), a == b),
    )
}

fn sweep_config() -> ExperimentConfig {
    ExperimentConfig::default()
}

fn main() -> ExitCode {
    let start = Instant::now();
    let toy = run_cubic(&ExperimentConfig::default()).expect("toy experiment");
    let toy_time = start.elapsed();
    let data = datasets();
    let sweep = run_benchmark(&data, &sweep_config()).expect("benchmark sweep");
    let full = run_benchmark(
        &data,
        &ExperimentConfig {
            epsilons: vec![1.0],
            repeats: 1,
            ..ExperimentConfig::default()
        },
    )
    .expect("full-data run");

    let results = [
        ("1 cubic toy coverage", criterion_1(&toy, toy_time)),
        ("2 transport envelope oracle", criterion_2()),
        ("3 interval predictor optimality and enclosure", criterion_3(&[&toy, &sweep, &full])),
        ("4 benchmark coverage at epsilon 0.5", criterion_4(&sweep)),
        ("5 imprecision grows under shift", criterion_5(&sweep)),
        ("6 distance adaptivity", criterion_6(&full)),
        ("7 metric identities", criterion_7(&toy)),
        ("8 determinism", criterion_8()),
    ];
    let mut failed = 0;
    for (name, o) in &results {
        println!("{} criterion {name}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        failed += !o.pass as usize;
    }
    println!(
        "acceptance: {}/{} criteria passed in {:.1}s",
        results.len() - failed,
        results.len(),
        start.elapsed().as_secs_f64()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
