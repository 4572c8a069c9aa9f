use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{CiiError, Result};

/// Which CSV column holds the response.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum TargetColumn {
    Name(String),
    Index(usize),
    #[default]
    Last,
}

impl TargetColumn {
    /// A bare integer is read as a column index, anything else as a name.
    pub fn parse(spec: &str) -> Self {
        match spec.trim().parse::<usize>() {
            Ok(i) => TargetColumn::Index(i),
            Err(_) => TargetColumn::Name(spec.trim().to_string()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    pub name: String,
    pub feature_names: Vec<String>,
    pub target_name: String,
    pub features: Vec<Vec<f64>>,
    pub responses: Vec<f64>,
    /// Rows skipped at ingestion because a cell was missing or unparseable.
    pub dropped: usize,
    /// SHA-256 of the source bytes, hex encoded.
    pub digest: String,
}

impl Dataset {
    pub fn from_parts(name: &str, features: Vec<Vec<f64>>, responses: Vec<f64>) -> Result<Self> {
        if features.len() != responses.len() {
            return Err(CiiError::DimensionMismatch {
                expected: features.len(),
                got: responses.len(),
            });
        }
        let dim = features.first().map_or(0, Vec::len);
        let mut hasher = Sha256::new();
        for (x, y) in features.iter().zip(&responses) {
            for v in x.iter().chain(std::iter::once(y)) {
                hasher.update(v.to_le_bytes());
            }
        }
        Ok(Self {
            name: name.to_string(),
            feature_names: (0..dim).map(|j| format!("x{j}")).collect(),
            target_name: "y".into(),
            features,
            responses,
            dropped: 0,
            digest: hex(&hasher.finalize()),
        })
    }

    pub fn len(&self) -> usize {
        self.responses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.responses.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.feature_names.len()
    }

    /// Rows at `idx`, in that order.
    pub fn subset(&self, idx: &[usize]) -> Self {
        Self {
            features: idx.iter().map(|&i| self.features[i].clone()).collect(),
            responses: idx.iter().map(|&i| self.responses[i]).collect(),
            dropped: 0,
            ..self.clone()
        }
    }
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

/// Read a headed CSV. Rows with a missing, non-numeric or non-finite cell
/// are dropped and counted.
pub fn ingest_csv(path: impl AsRef<Path>, target: &TargetColumn) -> Result<Dataset> {
    let path = path.as_ref();
    let bytes = std::fs::read(path)?;
    let mut reader = csv::ReaderBuilder::new()
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(bytes.as_slice());
    let header: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
    let t = match target {
        TargetColumn::Name(n) => header
            .iter()
            .position(|h| h == n)
            .ok_or_else(|| CiiError::Malformed(format!("no column named {n:?}")))?,
        TargetColumn::Index(i) if *i < header.len() => *i,
        TargetColumn::Index(i) => {
            return Err(CiiError::Malformed(format!(
                "target index {i} but only {} columns",
                header.len()
            )))
        }
        TargetColumn::Last => header
            .len()
            .checked_sub(1)
            .ok_or_else(|| CiiError::Malformed("empty header".into()))?,
    };
    let mut features = Vec::new();
    let mut responses = Vec::new();
    let mut dropped = 0;
    for rec in reader.records() {
        let rec = rec?;
        let parsed: Option<Vec<f64>> = if rec.len() == header.len() {
            rec.iter()
                .map(|c| c.parse::<f64>().ok().filter(|v| v.is_finite()))
                .collect()
        } else {
            None
        };
        match parsed {
            Some(mut row) => {
                responses.push(row.remove(t));
                features.push(row);
            }
            None => dropped += 1,
        }
    }
    if responses.is_empty() {
        return Err(CiiError::InsufficientData(format!(
            "{} has no usable rows",
            path.display()
        )));
    }
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "dataset".into());
    let mut feature_names = header.clone();
    let target_name = feature_names.remove(t);
    Ok(Dataset {
        name,
        feature_names,
        target_name,
        features,
        responses,
        dropped,
        digest: hex(&Sha256::digest(&bytes)),
    })
}

/// Query rows for a fitted model, with responses when the file has them.
#[derive(Debug, Clone, PartialEq)]
pub struct QuerySet {
    pub features: Vec<Vec<f64>>,
    pub responses: Option<Vec<f64>>,
}

/// Read a headed CSV of query points for a model with `dim` inputs. A file
/// with exactly `dim` columns is all features; one with `dim + 1` columns
/// carries a response in the `target` column. Unlike [`ingest_csv`] a bad
/// cell is an error, because dropping a row would shift every later row
/// index.
pub fn ingest_queries(path: impl AsRef<Path>, dim: usize, target: &TargetColumn) -> Result<QuerySet> {
    let path = path.as_ref();
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)?;
    let header: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
    let t = if header.len() == dim {
        None
    } else if header.len() == dim + 1 {
        Some(match target {
            TargetColumn::Name(n) => header
                .iter()
                .position(|h| h == n)
                .ok_or_else(|| CiiError::Malformed(format!("no column named {n:?}")))?,
            TargetColumn::Index(i) if *i <= dim => *i,
            TargetColumn::Index(i) => return Err(CiiError::Malformed(format!("target index {i} out of range"))),
            TargetColumn::Last => dim,
        })
    } else {
        return Err(CiiError::DimensionMismatch {
            expected: dim,
            got: header.len(),
        });
    };
    let mut features = Vec::new();
    let mut responses = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let mut row: Vec<f64> = rec?
            .iter()
            .map(|c| c.parse::<f64>().ok().filter(|v| v.is_finite()))
            .collect::<Option<_>>()
            .ok_or_else(|| CiiError::Malformed(format!("{} row {i}: non-numeric cell", path.display())))?;
        if let Some(t) = t {
            responses.push(row.remove(t));
        }
        features.push(row);
    }
    Ok(QuerySet {
        features,
        responses: t.map(|_| responses),
    })
}
