//! CSV input and output with a header row.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::dataset::{is_dataset_file, Dataset};
use crate::error::{CliError, CliResult};

/// Header and columns of a rectangular numeric CSV.
pub fn read_columns(path: &Path) -> CliResult<(Vec<String>, Vec<Vec<f64>>)> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| csv_error(path, e))?;
    let header: Vec<String> = reader
        .headers()
        .map_err(|e| csv_error(path, e))?
        .iter()
        .map(str::to_string)
        .collect();
    let mut cols = vec![Vec::new(); header.len()];
    for (r, record) in reader.records().enumerate() {
        let record = record.map_err(|e| csv_error(path, e))?;
        for (c, field) in record.iter().enumerate() {
            let v: f64 = field.parse().map_err(|_| {
                CliError::Data(format!("{}: row {}, column {}: '{field}' is not a number", path.display(), r + 1, c + 1))
            })?;
            if !v.is_finite() {
                return Err(CliError::Data(format!("{}: row {}, column {}: non-finite value", path.display(), r + 1, c + 1)));
            }
            cols[c].push(v);
        }
    }
    if cols.is_empty() || cols[0].is_empty() {
        return Err(CliError::Data(format!("{}: no data rows", path.display())));
    }
    Ok((header, cols))
}

fn csv_error(path: &Path, e: csv::Error) -> CliError {
    match e.kind() {
        csv::ErrorKind::UnequalLengths { pos, expected_len, len } => CliError::Data(format!(
            "{}: ragged row {}: expected {expected_len} fields, found {len}",
            path.display(),
            pos.as_ref().map_or(0, |p| p.line()),
        )),
        csv::ErrorKind::Io(_) => CliError::Data(format!("{}: {e}", path.display())),
        _ => CliError::Data(format!("{}: {e}", path.display())),
    }
}

/// A response vector from a one-column CSV or a one-column dataset file.
pub fn read_response(path: &Path) -> CliResult<Vec<f64>> {
    if is_dataset_file(path)? {
        let d = Dataset::read(path)?;
        if d.n_cols() != 1 {
            return Err(CliError::Data(format!(
                "{}: response dataset has {} columns, expected 1",
                path.display(),
                d.n_cols()
            )));
        }
        return Ok(d.column_values(0));
    }
    let (header, mut cols) = read_columns(path)?;
    if cols.len() != 1 {
        return Err(CliError::Data(format!(
            "{}: response CSV has {} columns ({}), expected 1",
            path.display(),
            cols.len(),
            header.join(", ")
        )));
    }
    Ok(cols.remove(0))
}

/// Buffered writer to a file, or to stdout when `path` is `None`.
pub fn sink(path: Option<&PathBuf>) -> CliResult<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).map_err(|e| CliError::io(p, e))?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

pub fn write_err(path: Option<&PathBuf>, e: io::Error) -> CliError {
    match path {
        Some(p) => CliError::io(p, e),
        None => CliError::io(Path::new("<stdout>"), e),
    }
}

/// Shortest text that parses back to the same `f64`.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:?}")
}
