//! File formats: JSON for spectral data and problems, CSV for sampled functions.

use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::problem::{ProblemInput, SpectralInput, TwoSpectraInput};

fn schema(context: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Schema { context: context.into(), message: message.into() }
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| schema(path.display().to_string(), e.to_string()))
}

/// serde_json errors already carry line and column.
fn parse_json<T: for<'de> Deserialize<'de>>(path: &Path, text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| schema(path.display().to_string(), e.to_string()))
}

pub fn read_spectral_data(path: &Path) -> Result<SpectralInput> {
    parse_json(path, &read_text(path)?)
}

pub fn read_two_spectra(path: &Path) -> Result<TwoSpectraInput> {
    parse_json(path, &read_text(path)?)
}

/// Problem file: boundary constants plus `q` inline or as a CSV path
/// (relative to the JSON file).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub h: f64,
    #[serde(rename = "H")]
    pub big_h: f64,
    #[serde(rename = "H1")]
    pub h1: f64,
    #[serde(rename = "H2")]
    pub h2: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q_csv: Option<PathBuf>,
}

pub fn read_problem(path: &Path) -> Result<ProblemInput> {
    let f: ProblemFile = parse_json(path, &read_text(path)?)?;
    let q = match (f.q, f.q_csv) {
        (Some(q), None) => q,
        (None, Some(csv)) => {
            let csv = if csv.is_relative() { path.parent().unwrap_or(Path::new(".")).join(csv) } else { csv };
            read_q_csv(&csv)?
        }
        _ => return Err(schema(path.display().to_string(), "exactly one of `q` and `q_csv` is required")),
    };
    Ok(ProblemInput { q, h: f.h, big_h: f.big_h, h1: f.h1, h2: f.h2 })
}

/// Two columns `x, q(x)` with a header row; `x` must be the uniform grid on `[0, pi]`.
pub fn read_q_csv(path: &Path) -> Result<Vec<f64>> {
    let ctx = path.display().to_string();
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| schema(&ctx, e.to_string()))?;
    let mut xs = Vec::new();
    let mut qs = Vec::new();
    for (row, rec) in rdr.records().enumerate() {
        let line = row + 2;
        let rec = rec.map_err(|e| schema(&ctx, e.to_string()))?;
        if rec.len() != 2 {
            return Err(schema(&ctx, format!("line {line}: expected 2 columns, found {}", rec.len())));
        }
        let parse = |i: usize, name: &str| {
            rec[i].parse::<f64>().map_err(|e| schema(&ctx, format!("line {line}, column {name}: {e}")))
        };
        xs.push(parse(0, "x")?);
        qs.push(parse(1, "q")?);
    }
    if xs.len() < 3 {
        return Err(schema(&ctx, format!("need at least 3 rows, found {}", xs.len())));
    }
    let grid = Grid::new(xs.len() - 1)?;
    for (i, &x) in xs.iter().enumerate() {
        if (x - grid.x(i)).abs() > 1e-9 * PI {
            return Err(schema(
                &ctx,
                format!("line {}: x = {x} is not node {i} of the uniform grid on [0, pi]", i + 2),
            ));
        }
    }
    Ok(qs)
}

/// Fixed-width scientific notation, 17 significant digits.
pub fn fmt_num(v: f64) -> String {
    format!("{v:.16e}")
}

/// CSV with a header and equal-length columns.
pub fn write_columns(path: &Path, header: &[&str], columns: &[&[f64]]) -> Result<()> {
    let ctx = path.display().to_string();
    let rows = columns.first().map_or(0, |c| c.len());
    if header.len() != columns.len() || columns.iter().any(|c| c.len() != rows) {
        return Err(Error::InvalidInput(format!("{ctx}: ragged CSV columns")));
    }
    let mut w = csv::Writer::from_path(path).map_err(|e| schema(&ctx, e.to_string()))?;
    w.write_record(header).map_err(|e| schema(&ctx, e.to_string()))?;
    for r in 0..rows {
        w.write_record(columns.iter().map(|c| fmt_num(c[r]))).map_err(|e| schema(&ctx, e.to_string()))?;
    }
    w.flush().map_err(|e| schema(&ctx, e.to_string()))
}

pub fn write_q_csv(path: &Path, grid: Grid, q: &[f64]) -> Result<()> {
    write_columns(path, &["x", "q"], &[&grid.points(), q])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tmp(name: &str) -> PathBuf {
        let dir = std::env::temp_dir().join(format!("slinv-io-{}", std::process::id()));
        fs::create_dir_all(&dir).unwrap();
        dir.join(name)
    }

    #[test]
    fn q_csv_round_trips_exactly() {
        let g = Grid::new(16).unwrap();
        let q: Vec<f64> = g.points().iter().map(|x| (3.0 * x).sin() / 7.0).collect();
        let p = tmp("q.csv");
        write_q_csv(&p, g, &q).unwrap();
        assert_eq!(read_q_csv(&p).unwrap(), q);
    }

    #[test]
    fn bad_grid_is_reported_with_line() {
        let p = tmp("bad.csv");
        fs::write(&p, "x,q\n0,1\n1,1\n3.14159265358979,1\n").unwrap();
        let e = read_q_csv(&p).unwrap_err().to_string();
        assert!(e.contains("line 3"), "{e}");
    }

    #[test]
    fn malformed_json_names_position() {
        let p = tmp("bad.json");
        fs::write(&p, "{\"lambdas\": [0, 1],\n \"gammas\": [1, }").unwrap();
        let e = read_spectral_data(&p).unwrap_err().to_string();
        assert!(e.contains("line 2"), "{e}");
    }

    #[test]
    fn problem_with_csv_reference() {
        let g = Grid::new(8).unwrap();
        write_q_csv(&tmp("pq.csv"), g, &[0.5; 9]).unwrap();
        let p = tmp("p.json");
        fs::write(&p, r#"{"h": 0, "H": 1, "H1": 2, "H2": 1, "q_csv": "pq.csv"}"#).unwrap();
        let prob = read_problem(&p).unwrap();
        assert_eq!(prob.q, vec![0.5; 9]);
        assert_eq!(prob.h1, 2.0);
    }
}
