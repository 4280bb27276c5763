//! CSV and JSON emission. Floats are rendered with the shortest
//! round-trip formatter, so identical inputs give byte-identical files.

use serde::Serialize;
use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum OutFormat {
    Csv,
    Json,
}

impl std::str::FromStr for OutFormat {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "csv" => Ok(OutFormat::Csv),
            "json" => Ok(OutFormat::Json),
            other => Err(format!("format must be csv or json, got `{other}`")),
        }
    }
}

pub fn fmt(v: f64) -> String {
    format!("{v}")
}

pub struct DataTable {
    pub name: String,
    pub headers: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl DataTable {
    pub fn new(name: impl Into<String>, headers: Vec<&'static str>) -> Self {
        DataTable {
            name: name.into(),
            headers,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.headers.len());
        self.rows.push(row);
    }

    pub fn write(&self, dir: &Path, format: OutFormat) -> std::io::Result<PathBuf> {
        match format {
            OutFormat::Csv => {
                let path = dir.join(format!("{}.csv", self.name));
                let mut f = std::io::BufWriter::new(std::fs::File::create(&path)?);
                writeln!(f, "{}", self.headers.join(","))?;
                for row in &self.rows {
                    writeln!(f, "{}", row.join(","))?;
                }
                f.flush()?;
                Ok(path)
            }
            OutFormat::Json => {
                let path = dir.join(format!("{}.json", self.name));
                let rows: Vec<BTreeMap<&str, &str>> = self
                    .rows
                    .iter()
                    .map(|row| {
                        self.headers
                            .iter()
                            .copied()
                            .zip(row.iter().map(|s| s.as_str()))
                            .collect()
                    })
                    .collect();
                std::fs::write(&path, serde_json::to_string_pretty(&rows)? + "\n")?;
                Ok(path)
            }
        }
    }
}

/// Calibration constants echoed in every summary.
#[derive(Serialize)]
pub struct CalibrationInfo {
    pub l_hat: f64,
    pub x0: u64,
    pub gamma: f64,
    pub gamma_cutoff: u64,
}

impl From<shiftsieve_core::shiftsums::Calibration> for CalibrationInfo {
    fn from(c: shiftsieve_core::shiftsums::Calibration) -> Self {
        CalibrationInfo {
            l_hat: c.l_hat,
            x0: c.x0,
            gamma: c.gamma,
            gamma_cutoff: c.gamma_cutoff,
        }
    }
}

/// The default exponents every report is parameterized by.
#[derive(Serialize)]
pub struct Exponents {
    pub cutoff: f64,
    pub sieve_level: f64,
    pub decay_norm: f64,
    pub m_saving: f64,
    pub sym_bound_root: f64,
}

impl Default for Exponents {
    fn default() -> Self {
        Exponents {
            cutoff: 1.0 / 16.0,
            sieve_level: 1.0 / 64.0,
            decay_norm: 1.0 / 7.0,
            m_saving: 1.0 / 6.0,
            sym_bound_root: 1.0 / 18.0,
        }
    }
}

#[derive(Serialize)]
pub struct Summary<T: Serialize> {
    pub command: String,
    pub source: String,
    pub table_limit: u64,
    pub calibration: CalibrationInfo,
    pub exponents: Exponents,
    /// Semantic inputs only; never thread counts or timings.
    pub inputs: BTreeMap<String, String>,
    pub results: T,
}

pub fn write_summary<T: Serialize>(
    dir: &Path,
    name: &str,
    summary: &Summary<T>,
) -> std::io::Result<PathBuf> {
    let path = dir.join(format!("{name}_summary.json"));
    std::fs::write(&path, serde_json::to_string_pretty(summary)? + "\n")?;
    Ok(path)
}
