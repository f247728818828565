//! Headerless CSV in, shortest round-trip decimals out.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use crate::Failure;

fn reader(path: &Path) -> Result<csv::Reader<File>, Failure> {
    csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| Failure::io(format!("{}: {e}", path.display())))
}

fn parse(path: &Path, line: u64, field: &str) -> Result<f64, Failure> {
    field.parse::<f64>().map_err(|_| {
        Failure::io(format!(
            "{}:{line}: cannot parse '{field}' as a number",
            path.display()
        ))
    })
}

/// Reads a row-major matrix; every row must have the same width.
pub fn read_matrix(path: &Path) -> Result<(usize, usize, Vec<f64>), Failure> {
    let mut data = Vec::new();
    let mut width = None;
    let mut rows = 0;
    for record in reader(path)?.records() {
        let record = record.map_err(|e| Failure::io(format!("{}: {e}", path.display())))?;
        let line = record.position().map_or(0, |p| p.line());
        match width {
            None => width = Some(record.len()),
            Some(w) if w != record.len() => {
                return Err(Failure::validation(format!(
                    "{}:{line}: expected {w} columns, found {}",
                    path.display(),
                    record.len()
                )))
            }
            _ => {}
        }
        for field in record.iter() {
            data.push(parse(path, line, field)?);
        }
        rows += 1;
    }
    match width {
        Some(w) if rows > 0 && w > 0 => Ok((rows, w, data)),
        _ => Err(Failure::validation(format!("{}: no data", path.display()))),
    }
}

/// Reads a vector written one value per line (a single row is accepted too).
pub fn read_vector(path: &Path) -> Result<Vec<f64>, Failure> {
    let mut out = Vec::new();
    for record in reader(path)?.records() {
        let record = record.map_err(|e| Failure::io(format!("{}: {e}", path.display())))?;
        let line = record.position().map_or(0, |p| p.line());
        for field in record.iter() {
            out.push(parse(path, line, field)?);
        }
    }
    Ok(out)
}

pub fn write_matrix(
    path: &Path,
    rows: usize,
    cols: usize,
    at: impl Fn(usize, usize) -> f64,
) -> Result<(), Failure> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_path(path)
        .map_err(|e| Failure::io(format!("{}: {e}", path.display())))?;
    let mut row = Vec::with_capacity(cols);
    for i in 0..rows {
        row.clear();
        row.extend((0..cols).map(|j| at(i, j).to_string()));
        w.write_record(&row)
            .map_err(|e| Failure::io(format!("{}: {e}", path.display())))?;
    }
    w.flush()
        .map_err(|e| Failure::io(format!("{}: {e}", path.display())))
}

pub fn write_vector(path: &Path, v: &[f64]) -> Result<(), Failure> {
    write_matrix(path, v.len(), 1, |i, _| v[i])
}

/// Opens `path`, or standard output when absent.
pub fn sink(path: Option<&Path>) -> Result<Box<dyn Write>, Failure> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).map_err(|e| Failure::io(format!("{}: {e}", p.display())))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

pub fn write_json_file(path: &Path, value: &serde_json::Value) -> Result<(), Failure> {
    let mut w = sink(Some(path))?;
    writeln!(w, "{}", serde_json::to_string_pretty(value).expect("json value"))
        .and_then(|_| w.flush())
        .map_err(|e| Failure::io(format!("{}: {e}", path.display())))
}

pub fn read_json(path: &Path) -> Result<serde_json::Value, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::io(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::io(format!("{}: {e}", path.display())))
}
