//! Bit-stable serialization: CSV with shortest round-trip floats and
//! pretty JSON with a trailing newline.

use std::fs;
use std::path::{Path, PathBuf};

use rwl_core::experiments::{ExperimentOutput, Series};
use serde::Serialize;

use crate::error::CliError;

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io { path: path.to_owned(), source }
}

/// Shortest decimal that parses back to the same `f64`.
pub fn format_float(x: f64) -> String {
    format!("{x:?}")
}

/// CSV with a header row; every row must match the header width.
pub fn write_csv(path: &Path, columns: &[String], rows: &[Vec<f64>]) -> Result<(), CliError> {
    if let Some(bad) = rows.iter().position(|r| r.len() != columns.len()) {
        return Err(CliError::Numerical(format!(
            "{}: row {bad} has {} fields for {} columns",
            path.display(),
            rows[bad].len(),
            columns.len()
        )));
    }
    let mut wtr = csv::Writer::from_path(path).map_err(|e| CliError::Io { path: path.to_owned(), source: e.into() })?;
    let csv_err = |e: csv::Error| CliError::Io { path: path.to_owned(), source: e.into() };
    wtr.write_record(columns).map_err(csv_err)?;
    for row in rows {
        wtr.write_record(row.iter().map(|x| format_float(*x))).map_err(csv_err)?;
    }
    wtr.flush().map_err(io_err(path))
}

pub fn write_series(dir: &Path, series: &Series) -> Result<PathBuf, CliError> {
    let path = dir.join(format!("{}.csv", series.name));
    write_csv(&path, &series.columns, &series.rows)?;
    Ok(path)
}

pub fn write_json(path: &Path, value: &impl Serialize) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Numerical(e.to_string()))?;
    text.push('\n');
    fs::write(path, text).map_err(io_err(path))
}

pub fn ensure_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(io_err(dir))
}

/// `<dir>/report.json` plus one CSV per series.
pub fn write_experiment(dir: &Path, out: &ExperimentOutput) -> Result<(), CliError> {
    ensure_dir(dir)?;
    write_json(&dir.join("report.json"), &out.report)?;
    for s in &out.series {
        write_series(dir, s)?;
    }
    Ok(())
}
