//! Newline-delimited JSON p-box records.
//!
//! One object per line:
//!
//! ```text
//! {"row":0,"lower_breakpoints":[..],"lower_levels":[..],"upper_breakpoints":[..],"upper_levels":[..]}
//! ```
//!
//! `row` is optional; when absent the zero-based line number is the row key.

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use super::{PBox, StepCdf};
use crate::error::{CiiError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PBoxRecord {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub row: Option<usize>,
    pub lower_breakpoints: Vec<f64>,
    pub lower_levels: Vec<f64>,
    pub upper_breakpoints: Vec<f64>,
    pub upper_levels: Vec<f64>,
}

impl PBoxRecord {
    pub fn from_pbox(p: &PBox, row: Option<usize>) -> Self {
        Self {
            row,
            lower_breakpoints: p.lower().breakpoints().to_vec(),
            lower_levels: p.lower().levels().to_vec(),
            upper_breakpoints: p.upper().breakpoints().to_vec(),
            upper_levels: p.upper().levels().to_vec(),
        }
    }

    pub fn to_pbox(&self) -> Result<PBox> {
        let lower = StepCdf::new(self.lower_breakpoints.clone(), self.lower_levels.clone())
            .map_err(|e| CiiError::Malformed(format!("lower bound: {e}")))?;
        let upper = StepCdf::new(self.upper_breakpoints.clone(), self.upper_levels.clone())
            .map_err(|e| CiiError::Malformed(format!("upper bound: {e}")))?;
        PBox::new(lower, upper)
    }
}

pub fn write_records<W: Write>(mut out: W, records: &[PBoxRecord]) -> Result<()> {
    for r in records {
        serde_json::to_writer(&mut out, r)?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}

/// Read records, keyed by explicit `row` or by line number. Blank lines are
/// skipped but still advance the line counter.
pub fn read_records<R: BufRead>(input: R) -> Result<Vec<(usize, PBox)>> {
    let mut out = Vec::new();
    for (line_no, line) in input.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let rec: PBoxRecord = serde_json::from_str(&line)
            .map_err(|e| CiiError::Malformed(format!("line {}: {e}", line_no + 1)))?;
        let pbox = rec
            .to_pbox()
            .map_err(|e| CiiError::Malformed(format!("line {}: {e}", line_no + 1)))?;
        out.push((rec.row.unwrap_or(line_no), pbox));
    }
    Ok(out)
}
