//! CSV and run-manifest emission.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::sir::SirStudy;
use super::sweep::{FailedTrial, Method, SweepResult};
use crate::error::{Error, Result};

pub const SWEEP_HEADER: [&str; 5] = ["sweep_var", "method", "mean_rate_norm", "ci_half_width", "n_trials"];
pub const SIR_HEADER: [&str; 2] = ["inv_sir_db", "cdf"];

/// One parsed row of a sweep CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub sweep_var: f64,
    pub method: String,
    pub mean_rate_norm: f64,
    pub ci_half_width: f64,
    pub n_trials: usize,
}

pub fn sweep_rows(result: &SweepResult) -> Vec<SweepRow> {
    result
        .points
        .iter()
        .flat_map(|p| {
            p.stats.iter().map(move |s| SweepRow {
                sweep_var: p.value,
                method: s.method.name().to_owned(),
                mean_rate_norm: s.mean_rate_norm,
                ci_half_width: s.ci_half_width,
                n_trials: s.n_trials,
            })
        })
        .collect()
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path).map(BufWriter::new).map_err(|e| Error::io(path, e))
}

fn csv_error(path: &Path, e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        other => Error::io(path, std::io::Error::other(format!("{other:?}"))),
    }
}

/// Write a table with a header row. Floats are written with `Display`,
/// which is the shortest representation that parses back to the same value.
fn write_table<W: Write>(out: W, header: &[&str], rows: impl Iterator<Item = Vec<String>>) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header)?;
    for row in rows {
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// CSV bytes for a sweep: one row per (grid point, method).
pub fn sweep_csv(result: &SweepResult) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    let rows = sweep_rows(result).into_iter().map(|r| {
        vec![
            r.sweep_var.to_string(),
            r.method,
            r.mean_rate_norm.to_string(),
            r.ci_half_width.to_string(),
            r.n_trials.to_string(),
        ]
    });
    write_table(&mut buf, &SWEEP_HEADER, rows).map_err(|e| csv_error(Path::new("<memory>"), e))?;
    Ok(buf)
}

pub fn emit_csv(result: &SweepResult, path: &Path) -> Result<()> {
    write_bytes(&sweep_csv(result)?, path)
}

pub fn read_sweep_csv(path: &Path) -> Result<Vec<SweepRow>> {
    let mut r = csv::Reader::from_path(path).map_err(|e| csv_error(path, e))?;
    r.deserialize().map(|row| row.map_err(|e| csv_error(path, e))).collect()
}

/// CSV bytes for a SIR study: sorted samples and their empirical CDF.
pub fn sir_csv(study: &SirStudy) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    let rows = study.curve().map(|(s, c)| vec![s.to_string(), c.to_string()]);
    write_table(&mut buf, &SIR_HEADER, rows).map_err(|e| csv_error(Path::new("<memory>"), e))?;
    Ok(buf)
}

pub fn emit_sir_csv(study: &SirStudy, path: &Path) -> Result<()> {
    write_bytes(&sir_csv(study)?, path)
}

fn write_bytes(bytes: &[u8], path: &Path) -> Result<()> {
    let mut f = create(path)?;
    f.write_all(bytes).and_then(|_| f.flush()).map_err(|e| Error::io(path, e))
}

/// Provenance record written next to every CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest<C> {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub seed: u64,
    pub config: C,
    pub failed_trials: Vec<FailedTrial>,
    pub methods: Vec<String>,
}

impl<C> Manifest<C> {
    pub fn new(command: &str, seed: u64, config: C) -> Self {
        Self {
            tool: env!("CARGO_PKG_NAME").to_owned(),
            version: env!("CARGO_PKG_VERSION").to_owned(),
            command: command.to_owned(),
            seed,
            config,
            failed_trials: Vec::new(),
            methods: Vec::new(),
        }
    }

    pub fn with_sweep(mut self, result: &SweepResult) -> Self {
        self.failed_trials = result.points.iter().flat_map(|p| p.failed.iter().cloned()).collect();
        let methods: Vec<Method> = result.points.first().map(|p| p.stats.iter().map(|s| s.method).collect()).unwrap_or_default();
        self.methods = methods.into_iter().map(|m| m.name().to_owned()).collect();
        self
    }
}

/// `out.csv` -> `out.manifest.json`.
pub fn manifest_path(csv_path: &Path) -> PathBuf {
    csv_path.with_extension("manifest.json")
}

pub fn write_json<T: Serialize>(value: &T, path: &Path) -> Result<()> {
    let mut f = create(path)?;
    serde_json::to_writer_pretty(&mut f, value)
        .map_err(|e| Error::io(path, e.into()))
        .and_then(|_| f.write_all(b"\n").and_then(|_| f.flush()).map_err(|e| Error::io(path, e)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::sweep::{SweepPoint, SweepVariable};

    fn empty() -> SweepResult {
        SweepResult {
            variable: SweepVariable::Side,
            trials: 1,
            points: Vec::new(),
        }
    }

    #[test]
    fn empty_result_is_header_only() {
        let bytes = sweep_csv(&empty()).unwrap();
        assert_eq!(String::from_utf8(bytes).unwrap(), "sweep_var,method,mean_rate_norm,ci_half_width,n_trials\n");
    }

    #[test]
    fn awkward_floats_round_trip() {
        use crate::experiments::sweep::MethodStats;
        let vals = [0.1 + 0.2, 1e-300, 123456.789e10, f64::MIN_POSITIVE, -0.0];
        let point = SweepPoint {
            value: 1.0 / 3.0,
            normalization: 1.0,
            stats: vals
                .iter()
                .map(|&v| MethodStats {
                    method: Method::Lsap,
                    mean_rate_norm: v,
                    ci_half_width: v / 7.0,
                    n_trials: 3,
                })
                .collect(),
            reports: Vec::new(),
            failed: Vec::new(),
        };
        let res = SweepResult {
            variable: SweepVariable::Side,
            trials: 3,
            points: vec![point],
        };
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("r.csv");
        emit_csv(&res, &path).unwrap();
        let back = read_sweep_csv(&path).unwrap();
        assert_eq!(back, sweep_rows(&res));
        for (row, v) in back.iter().zip(vals) {
            assert_eq!(row.mean_rate_norm.to_bits(), v.to_bits());
        }
    }

    #[test]
    fn io_errors_carry_the_path() {
        let path = Path::new("/nonexistent-dir/x.csv");
        let err = emit_csv(&empty(), path).unwrap_err();
        assert!(err.to_string().contains("/nonexistent-dir/x.csv"));
    }

    #[test]
    fn manifest_sits_next_to_the_csv() {
        assert_eq!(manifest_path(Path::new("a/b.csv")), Path::new("a/b.manifest.json"));
    }
}
