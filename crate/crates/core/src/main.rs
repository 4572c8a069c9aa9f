use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use cii::basepredict::{fit_hetero_ls, load_external, BasePredictor, ExternalPredictions};
use cii::conformal::CiiModel;
use cii::harness::experiment::{auto_feature_degree, fit_model};
use cii::harness::{emit_report, ingest_csv, ingest_queries, run_benchmark, run_cubic, ExperimentConfig, TargetColumn};
use cii::{CiiError, Result};

#[derive(Parser)]
#[command(name = "cii", version, about = "Distance-aware conformal p-box regression")]
struct Cli {
    #[command(flatten)]
    settings: Settings,
    #[command(subcommand)]
    command: Command,
}

/// Experiment settings. A `--config` file is read first and flags override it.
#[derive(Args)]
struct Settings {
    /// Flat `key = value` configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<String>,
    /// Comma separated training fractions, e.g. `0.1,0.5,0.9`.
    #[arg(long, global = true)]
    epsilon: Option<String>,
    #[arg(long, global = true)]
    repeats: Option<String>,
    /// Train:holdout ratio of the extrapolation split, e.g. `3:7`.
    #[arg(long, global = true)]
    ratio: Option<String>,
    /// Polynomial degree of the interval predictor.
    #[arg(long, global = true)]
    degree: Option<String>,
    /// Calibration set size, or `all`.
    #[arg(long, global = true)]
    n_cal: Option<String>,
    #[arg(long, global = true)]
    boundary_fraction: Option<String>,
    #[arg(long, global = true)]
    bins: Option<String>,
    /// Output directory for `toy`/`bench`, output file otherwise.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Cubic toy experiment.
    Toy,
    /// Extrapolation-split sweep over one or more CSV datasets.
    Bench {
        #[arg(required = true)]
        csv: Vec<PathBuf>,
        /// Response column: a name or a zero-based index (default: last).
        #[arg(long)]
        target: Option<String>,
    },
    /// Apply a CII model to a CSV of query points.
    ///
    /// The model is read from `--model`, or fitted on `--train` (and then
    /// optionally written to `--save-model`). Query files have one column per
    /// feature, plus optionally the response column, which adds coverage.
    Predict {
        #[arg(long, conflicts_with = "train", required_unless_present = "train")]
        model: Option<PathBuf>,
        #[arg(long)]
        train: Option<PathBuf>,
        #[arg(long, requires = "train")]
        save_model: Option<PathBuf>,
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        target: Option<String>,
    },
    /// Fit the heteroscedastic base on `--train` and write its predictions
    /// for `--input` as newline-delimited p-box records keyed by the
    /// zero-based data row of `--input`.
    DumpBase {
        #[arg(long)]
        train: PathBuf,
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        target: Option<String>,
    },
    /// Read a p-box record file keyed by row index, report it, and write it
    /// back out to `--out` when given.
    LoadBase { predictions: PathBuf },
}

impl Settings {
    fn experiment(&self) -> Result<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(p) => ExperimentConfig::from_file(p)?,
            None => ExperimentConfig::default(),
        };
        let flags = [
            ("seed", &self.seed),
            ("epsilon", &self.epsilon),
            ("repeats", &self.repeats),
            ("ratio", &self.ratio),
            ("degree", &self.degree),
            ("n_cal", &self.n_cal),
            ("boundary_fraction", &self.boundary_fraction),
            ("bins", &self.bins),
        ];
        for (key, value) in flags {
            if let Some(v) = value {
                cfg.apply(key, v)?;
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn out_dir(&self) -> PathBuf {
        self.out.clone().unwrap_or_else(|| PathBuf::from("out"))
    }

    fn out_file(&self) -> Result<&Path> {
        self.out
            .as_deref()
            .ok_or_else(|| CiiError::InvalidArgument("--out is required".into()))
    }
}

fn target(t: &Option<String>) -> TargetColumn {
    t.as_deref().map(TargetColumn::parse).unwrap_or_default()
}

fn run(cli: Cli) -> Result<()> {
    let s = &cli.settings;
    match &cli.command {
        Command::Toy => {
            let cfg = s.experiment()?;
            let report = run_cubic(&cfg)?;
            emit_report(&report, s.out_dir(), cfg.bins)?;
            println!("toy: {} metric rows written to {}", report.rows.len(), s.out_dir().display());
        }
        Command::Bench { csv, target: t } => {
            let cfg = s.experiment()?;
            let datasets = csv
                .iter()
                .map(|p| ingest_csv(p, &target(t)))
                .collect::<Result<Vec<_>>>()?;
            let report = run_benchmark(&datasets, &cfg)?;
            emit_report(&report, s.out_dir(), cfg.bins)?;
            for (cell, err) in &report.failures {
                eprintln!("cell {cell} failed: {err}");
            }
            println!(
                "bench: {} metric rows, {} failed cells, written to {}",
                report.rows.len(),
                report.failures.len(),
                s.out_dir().display()
            );
        }
        Command::Predict {
            model,
            train,
            save_model,
            input,
            target: t,
        } => {
            let model: CiiModel = match (model, train) {
                (Some(path), _) => serde_json::from_reader(File::open(path)?)?,
                (None, Some(path)) => fit_model(&ingest_csv(path, &target(t))?, &s.experiment()?)?,
                (None, None) => unreachable!("clap requires one of --model and --train"),
            };
            if let Some(path) = save_model {
                serde_json::to_writer(BufWriter::new(File::create(path)?), &model)?;
            }
            let queries = ingest_queries(input, model.standardizer.dim(), &target(t))?;
            write_predictions(&model, &queries, s.out_file()?)?;
        }
        Command::DumpBase { train, input, target: t } => {
            let cfg = s.experiment()?;
            let train = ingest_csv(train, &target(t))?;
            let degree = cfg
                .feature_degree
                .unwrap_or_else(|| auto_feature_degree(train.len(), train.dim()));
            let base = fit_hetero_ls(&train.features, &train.responses, degree)?;
            let queries = ingest_queries(input, train.dim(), &target(t))?;
            let preds = queries
                .features
                .iter()
                .enumerate()
                .map(|(row, x)| Ok((row, base.predict(x)?)))
                .collect::<Result<Vec<_>>>()?;
            let preds = ExternalPredictions::from_rows(preds);
            preds.dump(s.out_file()?)?;
            println!("dump-base: {} predictions", preds.len());
        }
        Command::LoadBase { predictions } => {
            let preds = load_external(predictions)?;
            let mut breadth = 0.0;
            for (_, u) in preds.rows() {
                breadth += u.to_pbox().breadth()?;
            }
            println!(
                "load-base: {} predictions, mean breadth {}",
                preds.len(),
                breadth / preds.len().max(1) as f64
            );
            if let Some(out) = &s.out {
                preds.dump(out)?;
            }
        }
    }
    Ok(())
}

fn write_predictions(model: &CiiModel, q: &cii::harness::QuerySet, out: &Path) -> Result<()> {
    let mut w = BufWriter::new(File::create(out)?);
    write!(w, "row,r,budget,regime,range_lo,range_hi,breadth")?;
    writeln!(w, "{}", if q.responses.is_some() { ",y,covered" } else { "" })?;
    for (row, x) in q.features.iter().enumerate() {
        let p = model.predict_detailed(row, x)?;
        let range = p.pbox.range_interval()?;
        let regime = if p.r <= model.distance.r0() { "ID" } else { "OOD" };
        write!(
            w,
            "{row},{},{},{regime},{},{},{}",
            p.r,
            p.budget,
            range.lo,
            range.hi,
            p.pbox.breadth()?
        )?;
        match &q.responses {
            Some(ys) => writeln!(w, ",{},{}", ys[row], range.contains(ys[row]))?,
            None => writeln!(w)?,
        }
    }
    w.flush()?;
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
