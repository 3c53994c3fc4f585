//! File writers. Floats use Rust's shortest round-trip formatting and every
//! file ends lines with `\n`.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::CliError;
use crate::evolve::Row;

fn io_error(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::config(format!("{}: {e}", path.display()))
}

pub fn ensure_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| io_error(dir, e))
}

pub fn write_csv(path: &Path, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<(), CliError> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_path(path)
        .map_err(|e| io_error(path, e))?;
    w.write_record(header).map_err(|e| io_error(path, e))?;
    for row in rows {
        w.write_record(&row).map_err(|e| io_error(path, e))?;
    }
    w.flush().map_err(|e| io_error(path, e))
}

pub fn write_json(path: &Path, value: &impl Serialize) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| io_error(path, e))?;
    text.push('\n');
    fs::write(path, text).map_err(|e| io_error(path, e))
}

pub fn num(x: f64) -> String {
    format!("{x}")
}

pub const TRAJECTORY_HEADER: [&str; 8] = ["t", "nx", "ny", "nz", "ex", "ey", "ez", "deviation"];

pub fn write_trajectory(path: &Path, rows: &[Row]) -> Result<(), CliError> {
    write_csv(
        path,
        &TRAJECTORY_HEADER,
        rows.iter().map(|r| {
            let (n, e) = (r.classical.0, r.quantum.0);
            vec![num(r.t), num(n[0]), num(n[1]), num(n[2]), num(e[0]), num(e[1]), num(e[2]), num(r.deviation)]
        }),
    )
}

pub fn artifact(dir: &Path, name: &str) -> PathBuf {
    dir.join(name)
}
