//! CSV ingestion and JSON-lines trace files.
//!
//! Datasets are headerless CSV: label (`-1` or `+1`) first, then features.
//! Kernel matrices are headerless `n x n` CSV. LF and CRLF are both accepted.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use smoothperc_core::{Dataset, GramMatrix, IterationRecord, KernelMatrix};

use crate::error::{CliError, Result};

fn reader(path: &Path) -> Result<csv::Reader<File>> {
    let file = File::open(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(file))
}

fn parse_error(path: &Path, line: u64, message: impl Into<String>) -> CliError {
    CliError::Parse {
        path: path.to_path_buf(),
        line,
        message: message.into(),
    }
}

/// Reads every record as `(line, fields)`.
fn records(path: &Path) -> Result<Vec<(u64, Vec<String>)>> {
    let mut rows = Vec::new();
    for record in reader(path)?.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            parse_error(path, line, e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line());
        rows.push((line, record.iter().map(str::to_owned).collect()));
    }
    Ok(rows)
}

fn parse_label(path: &Path, line: u64, field: &str) -> Result<f64> {
    match field.parse::<f64>() {
        Ok(v) if v == 1.0 || v == -1.0 => Ok(v),
        _ => Err(parse_error(path, line, "label must be -1 or +1")),
    }
}

fn parse_number(path: &Path, line: u64, column: usize, field: &str) -> Result<f64> {
    match field.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        Ok(_) => Err(parse_error(
            path,
            line,
            format!("non-finite value '{field}' in column {column}"),
        )),
        Err(_) => Err(parse_error(
            path,
            line,
            format!("non-numeric field '{field}' in column {column}"),
        )),
    }
}

pub fn load_dataset(path: &Path) -> Result<Dataset> {
    let mut dim = None;
    let mut points = Vec::new();
    let mut labels = Vec::new();
    for (line, fields) in records(path)? {
        labels.push(parse_label(path, line, &fields[0])?);
        let d = fields.len() - 1;
        match dim {
            None if d == 0 => {
                return Err(parse_error(path, line, "expected at least one feature"));
            }
            None => dim = Some(d),
            Some(expected) if expected != d => {
                return Err(parse_error(
                    path,
                    line,
                    format!("expected {expected} features, found {d}"),
                ));
            }
            Some(_) => {}
        }
        let x = fields[1..]
            .iter()
            .enumerate()
            .map(|(c, f)| parse_number(path, line, c + 2, f))
            .collect::<Result<Vec<f64>>>()?;
        points.push(x);
    }
    Ok(Dataset::new(points, labels)?)
}

/// Reads only the label column; used with precomputed kernel matrices.
pub fn load_labels(path: &Path) -> Result<Vec<f64>> {
    let labels = records(path)?
        .into_iter()
        .map(|(line, fields)| parse_label(path, line, &fields[0]))
        .collect::<Result<Vec<f64>>>()?;
    if labels.is_empty() {
        return Err(smoothperc_core::Error::EmptyDataset.into());
    }
    Ok(labels)
}

/// Reads a raw kernel matrix and returns its normalized, label-signed form.
pub fn load_gram(path: &Path, labels: &[f64]) -> Result<GramMatrix> {
    let n = labels.len();
    let mut rows = Vec::with_capacity(n);
    for (line, fields) in records(path)? {
        if fields.len() != n {
            return Err(parse_error(
                path,
                line,
                format!("expected {n} values, found {}", fields.len()),
            ));
        }
        let row = fields
            .iter()
            .enumerate()
            .map(|(c, f)| parse_number(path, line, c + 1, f))
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    if rows.len() != n {
        return Err(smoothperc_core::Error::DimensionMismatch {
            expected: n,
            found: rows.len(),
        }
        .into());
    }
    let k = KernelMatrix::from_rows(&rows)?;
    Ok(GramMatrix::from_kernel_matrix(&k, labels)?)
}

fn json_float(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        "null".to_owned()
    }
}

/// One flat JSON object; floats carry 17 significant digits.
pub fn format_record(r: &IterationRecord) -> String {
    format!(
        "{{\"k\":{},\"mu\":{},\"loss\":{},\"smoothed_loss\":{},\"p_gnorm\":{},\"min_decision\":{}}}",
        r.k,
        json_float(r.mu),
        json_float(r.loss),
        json_float(r.smoothed_loss),
        json_float(r.p_gnorm),
        json_float(r.min_decision)
    )
}

pub fn write_trace(path: &Path, records: &[IterationRecord]) -> Result<()> {
    let io_err = |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    };
    let mut out = BufWriter::new(File::create(path).map_err(io_err)?);
    for r in records {
        writeln!(out, "{}", format_record(r)).map_err(io_err)?;
    }
    out.flush().map_err(io_err)
}

/// Parses a trace file; `null` fields read back as NaN.
pub fn read_trace(path: &Path) -> Result<Vec<IterationRecord>> {
    let file = File::open(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut records = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line_no = i as u64 + 1;
        let line = line.map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let value: serde_json::Value =
            serde_json::from_str(&line).map_err(|e| parse_error(path, line_no, e.to_string()))?;
        let float = |key: &str| -> Result<f64> {
            match value.get(key) {
                Some(serde_json::Value::Null) => Ok(f64::NAN),
                Some(v) => v
                    .as_f64()
                    .ok_or_else(|| parse_error(path, line_no, format!("'{key}' is not a number"))),
                None => Err(parse_error(path, line_no, format!("missing '{key}'"))),
            }
        };
        let k = value
            .get("k")
            .and_then(serde_json::Value::as_u64)
            .ok_or_else(|| parse_error(path, line_no, "missing or invalid 'k'"))?;
        records.push(IterationRecord {
            k: k as usize,
            mu: float("mu")?,
            loss: float("loss")?,
            smoothed_loss: float("smoothed_loss")?,
            p_gnorm: float("p_gnorm")?,
            min_decision: float("min_decision")?,
        });
    }
    Ok(records)
}
