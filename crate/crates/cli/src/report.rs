//! Run reports and CSV tables.

use std::path::Path;

use gaudinlab::C64;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    /// `None` when the measured value is not finite.
    pub value: Option<f64>,
    pub threshold: f64,
    pub pass: bool,
}

impl Check {
    /// Passes when `value < threshold`.
    pub fn below(name: impl Into<String>, value: f64, threshold: f64) -> Self {
        Self { name: name.into(), value: value.is_finite().then_some(value), threshold, pass: value < threshold }
    }

    /// Passes when `value > threshold`.
    pub fn above(name: impl Into<String>, value: f64, threshold: f64) -> Self {
        Self { name: name.into(), value: value.is_finite().then_some(value), threshold, pass: value > threshold }
    }

    pub fn flag(name: impl Into<String>, ok: bool) -> Self {
        Self { name: name.into(), value: Some(if ok { 1.0 } else { 0.0 }), threshold: 1.0, pass: ok }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Ok,
    VerificationFailed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub wall_seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub tool: String,
    pub version: String,
    pub command: String,
    /// SHA-256 over the command line and the contents of every input file.
    pub input_digest: String,
    pub seed: Option<u64>,
    pub status: Status,
    pub checks: Vec<Check>,
    pub result: Value,
    pub timing: Timing,
}

/// One row per value: `index,re,im,residual`.
#[derive(Debug, Clone)]
pub struct Table {
    pub name: String,
    pub rows: Vec<(usize, C64, f64)>,
}

impl Table {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("index,re,im,residual\n");
        for (i, v, r) in &self.rows {
            out.push_str(&format!("{i},{},{},{r}\n", v.re, v.im));
        }
        out
    }
}

pub fn digest(command: &str, inputs: &[(String, String)]) -> String {
    let mut h = Sha256::new();
    h.update(command.as_bytes());
    for (name, text) in inputs {
        h.update(b"\0");
        h.update(name.as_bytes());
        h.update(b"\0");
        h.update(text.as_bytes());
    }
    hex::encode(h.finalize())
}

pub fn write_outputs(dir: &Path, report: &RunReport, tables: &[Table]) -> Result<(), CliError> {
    let io = |e: std::io::Error| CliError::Input(format!("{}: {e}", dir.display()));
    std::fs::create_dir_all(dir).map_err(io)?;
    let json = serde_json::to_string_pretty(report).expect("reports serialize");
    std::fs::write(dir.join("report.json"), json + "\n").map_err(io)?;
    for t in tables {
        std::fs::write(dir.join(format!("{}.csv", t.name)), t.to_csv()).map_err(io)?;
    }
    Ok(())
}
