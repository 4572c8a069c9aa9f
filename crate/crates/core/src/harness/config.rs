//! Flat `key = value` configuration files.

use std::path::Path;

use super::experiment::ExperimentConfig;
use crate::error::{CiiError, Result};

/// Parse `key = value` lines; blank lines and `#` comments are skipped.
pub fn parse_pairs(text: &str) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (no, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| CiiError::Malformed(format!("config line {}: expected key = value", no + 1)))?;
        out.push((k.trim().to_string(), v.trim().to_string()));
    }
    Ok(out)
}

fn num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T> {
    v.parse()
        .map_err(|_| CiiError::Malformed(format!("config {key}: cannot parse {v:?}")))
}

/// `"3:7"` or `"3,7"`.
pub fn parse_ratio(v: &str) -> Result<(f64, f64)> {
    let (a, b) = v
        .split_once([':', ','])
        .ok_or_else(|| CiiError::Malformed(format!("ratio {v:?}: expected a:b")))?;
    Ok((num("ratio", a.trim())?, num("ratio", b.trim())?))
}

pub fn parse_list(key: &str, v: &str) -> Result<Vec<f64>> {
    v.split(',').map(|s| num(key, s.trim())).collect()
}

impl ExperimentConfig {
    /// Apply one setting. Unknown keys are rejected so typos surface.
    pub fn apply(&mut self, key: &str, v: &str) -> Result<()> {
        match key {
            "seed" => self.seed = num(key, v)?,
            "epsilon" => self.epsilons = parse_list(key, v)?,
            "repeats" => self.repeats = num(key, v)?,
            "ratio" => self.ratio = parse_ratio(v)?,
            "degree" => self.ipm_degree = num(key, v)?,
            "n_cal" => {
                self.n_cal = match v {
                    "all" => None,
                    _ => Some(num(key, v)?),
                }
            }
            "boundary_fraction" => self.boundary_fraction = num(key, v)?,
            "bins" => self.bins = num(key, v)?,
            "feature_degree" => {
                self.feature_degree = match v {
                    "auto" => None,
                    _ => Some(num(key, v)?),
                }
            }
            "members" => self.members = num(key, v)?,
            "baselines" => self.baselines = num(key, v)?,
            "support_margin" => self.support_margin = num(key, v)?,
            "noise_sd" => self.noise_sd = num(key, v)?,
            "toy_train" => self.toy_train = num(key, v)?,
            "toy_test" => self.toy_test = num(key, v)?,
            _ => return Err(CiiError::Malformed(format!("unknown config key {key:?}"))),
        }
        Ok(())
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let mut cfg = Self::default();
        for (k, v) in parse_pairs(&std::fs::read_to_string(path)?)? {
            cfg.apply(&k, &v)?;
        }
        Ok(cfg)
    }
}
