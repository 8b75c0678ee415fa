//! Matrix files.
//!
//! * CSV: one datum per row, comma separated, optionally followed by an
//!   integer label column.
//! * MatrixMarket: dense `array real general`, column-major values.
//! * Raw binary: magic `SKSC`, `u64` D, `u64` N (little endian), then `D·N`
//!   little-endian `f64`s in column-major order.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::DataMatrix;
use crate::error::{invalid, mismatch, Error, Result};

const RAW_MAGIC: &[u8; 4] = b"SKSC";
const MM_BANNER: &str = "%%MatrixMarket matrix array real general";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum MatrixFormat {
    Csv {
        #[serde(default)]
        labels: bool,
    },
    MatrixMarket,
    RawBinary,
}

impl MatrixFormat {
    /// Guesses the format from a file extension (`csv`, `mtx`/`mm`, `bin`/`sksc`).
    pub fn from_path(path: &Path, csv_labels: bool) -> Option<Self> {
        let ext = path.extension()?.to_str()?.to_ascii_lowercase();
        match ext.as_str() {
            "csv" | "txt" => Some(Self::Csv { labels: csv_labels }),
            "mtx" | "mm" => Some(Self::MatrixMarket),
            "bin" | "sksc" => Some(Self::RawBinary),
            _ => None,
        }
    }
}

pub fn load_matrix(path: impl AsRef<Path>, format: MatrixFormat) -> Result<DataMatrix> {
    let file = File::open(path.as_ref())?;
    let reader = BufReader::new(file);
    match format {
        MatrixFormat::Csv { labels } => read_csv(reader, labels),
        MatrixFormat::MatrixMarket => read_matrix_market(reader),
        MatrixFormat::RawBinary => read_raw(reader),
    }
}

pub fn save_matrix(data: &DataMatrix, path: impl AsRef<Path>, format: MatrixFormat) -> Result<()> {
    let mut out = BufWriter::new(File::create(path.as_ref())?);
    match format {
        MatrixFormat::Csv { labels } => write_csv(data, labels, &mut out)?,
        MatrixFormat::MatrixMarket => write_matrix_market(data.values(), &mut out)?,
        MatrixFormat::RawBinary => write_raw(data.values(), &mut out)?,
    }
    out.flush()?;
    Ok(())
}

pub(crate) fn read_csv(reader: impl Read, with_labels: bool) -> Result<DataMatrix> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(reader);
    let mut columns: Vec<f64> = Vec::new();
    let mut labels = Vec::new();
    let mut dim = None;
    let mut record = csv::StringRecord::new();
    loop {
        match rdr.read_record(&mut record) {
            Ok(false) => break,
            Ok(true) => {}
            Err(e) => return Err(csv_error(e)),
        }
        let line = record.position().map_or(0, |p| p.line());
        let n_values = if with_labels {
            record.len().checked_sub(1).filter(|&n| n > 0).ok_or_else(|| Error::Parse {
                line,
                column: 1,
                message: "row needs at least one value and a label".into(),
            })?
        } else {
            record.len()
        };
        match dim {
            None => dim = Some(n_values),
            Some(d) if d != n_values => {
                return Err(Error::Parse {
                    line,
                    column: record.len(),
                    message: format!("expected {d} values, found {n_values}"),
                })
            }
            _ => {}
        }
        for (i, field) in record.iter().take(n_values).enumerate() {
            let v: f64 = field.parse().map_err(|_| Error::Parse {
                line,
                column: i + 1,
                message: format!("not a number: {field:?}"),
            })?;
            columns.push(v);
        }
        if with_labels {
            let field = &record[n_values];
            let label: usize = field.parse().map_err(|_| Error::Parse {
                line,
                column: n_values + 1,
                message: format!("not a non-negative integer label: {field:?}"),
            })?;
            labels.push(label);
        }
    }
    let dim = dim.ok_or_else(|| invalid("CSV file has no data rows"))?;
    let n = columns.len() / dim;
    let values = DMatrix::from_vec(dim, n, columns);
    DataMatrix::new(values, with_labels.then_some(labels))
}

fn csv_error(e: csv::Error) -> Error {
    let line = e.position().map_or(0, |p| p.line());
    match e.kind() {
        csv::ErrorKind::UnequalLengths { expected_len, len, .. } => Error::Parse {
            line,
            column: *len as usize,
            message: format!("ragged row: expected {expected_len} fields, found {len}"),
        },
        _ => Error::Parse {
            line,
            column: 0,
            message: e.to_string(),
        },
    }
}

fn write_csv(data: &DataMatrix, with_labels: bool, out: &mut impl Write) -> Result<()> {
    let labels = match (with_labels, data.labels()) {
        (true, Some(l)) => Some(l),
        (true, None) => return Err(invalid("CSV label column requested but data has no labels")),
        (false, _) => None,
    };
    for (j, col) in data.values().column_iter().enumerate() {
        let mut first = true;
        for v in col.iter() {
            if !first {
                out.write_all(b",")?;
            }
            first = false;
            // `{}` on f64 prints the shortest representation that parses back exactly.
            write!(out, "{v}")?;
        }
        if let Some(l) = labels {
            write!(out, ",{}", l[j])?;
        }
        out.write_all(b"\n")?;
    }
    Ok(())
}

pub(crate) fn read_matrix_market(reader: impl BufRead) -> Result<DataMatrix> {
    let mut lines = reader.lines().enumerate().map(|(i, l)| (i as u64 + 1, l));
    let (_, banner) = lines
        .next()
        .ok_or_else(|| Error::Parse { line: 1, column: 1, message: "empty file".into() })?;
    let banner = banner?;
    let tokens: Vec<String> = banner.split_whitespace().map(str::to_ascii_lowercase).collect();
    if tokens.len() != 5
        || tokens[0] != "%%matrixmarket"
        || tokens[1] != "matrix"
        || tokens[2] != "array"
        || tokens[3] != "real"
        || tokens[4] != "general"
    {
        return Err(Error::Parse {
            line: 1,
            column: 1,
            message: format!("unsupported header {banner:?}; expected {MM_BANNER:?}"),
        });
    }
    let mut shape = None;
    let mut values = Vec::new();
    for (line_no, line) in lines {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('%') {
            continue;
        }
        match shape {
            None => {
                let dims: Vec<&str> = trimmed.split_whitespace().collect();
                let parse = |s: &str, column| {
                    s.parse::<usize>().map_err(|_| Error::Parse {
                        line: line_no,
                        column,
                        message: format!("bad dimension {s:?}"),
                    })
                };
                if dims.len() != 2 {
                    return Err(Error::Parse {
                        line: line_no,
                        column: 1,
                        message: "size line must be `rows cols`".into(),
                    });
                }
                let (m, n) = (parse(dims[0], 1)?, parse(dims[1], 2)?);
                shape = Some((m, n));
                values.reserve(m * n);
            }
            Some(_) => {
                for (i, tok) in trimmed.split_whitespace().enumerate() {
                    let v: f64 = tok.parse().map_err(|_| Error::Parse {
                        line: line_no,
                        column: i + 1,
                        message: format!("not a number: {tok:?}"),
                    })?;
                    values.push(v);
                }
            }
        }
    }
    let (m, n) = shape.ok_or_else(|| Error::Parse {
        line: 2,
        column: 1,
        message: "missing size line".into(),
    })?;
    if values.len() != m * n {
        return Err(mismatch(format!(
            "header declares {m}×{n} = {} values, file has {}",
            m * n,
            values.len()
        )));
    }
    DataMatrix::new(DMatrix::from_vec(m, n, values), None)
}

pub(crate) fn write_matrix_market(values: &DMatrix<f64>, out: &mut impl Write) -> Result<()> {
    writeln!(out, "{MM_BANNER}")?;
    writeln!(out, "{} {}", values.nrows(), values.ncols())?;
    for v in values.iter() {
        writeln!(out, "{v}")?;
    }
    Ok(())
}

pub(crate) fn read_raw(mut reader: impl Read) -> Result<DataMatrix> {
    let mut header = [0u8; 20];
    reader.read_exact(&mut header).map_err(|_| Error::Parse {
        line: 0,
        column: 0,
        message: "raw file shorter than its 20-byte header".into(),
    })?;
    if &header[..4] != RAW_MAGIC {
        return Err(Error::Parse {
            line: 0,
            column: 0,
            message: "bad magic; expected SKSC".into(),
        });
    }
    let rows = u64::from_le_bytes(header[4..12].try_into().unwrap()) as usize;
    let cols = u64::from_le_bytes(header[12..20].try_into().unwrap()) as usize;
    let mut body = Vec::new();
    reader.read_to_end(&mut body)?;
    let expected = rows
        .checked_mul(cols)
        .and_then(|c| c.checked_mul(8))
        .ok_or_else(|| mismatch("header dimensions overflow"))?;
    if body.len() != expected {
        return Err(mismatch(format!(
            "header declares {rows}×{cols} ({expected} bytes), body has {} bytes",
            body.len()
        )));
    }
    let values: Vec<f64> = body
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    DataMatrix::new(DMatrix::from_vec(rows, cols, values), None)
}

pub(crate) fn write_raw(values: &DMatrix<f64>, out: &mut impl Write) -> Result<()> {
    out.write_all(RAW_MAGIC)?;
    out.write_all(&(values.nrows() as u64).to_le_bytes())?;
    out.write_all(&(values.ncols() as u64).to_le_bytes())?;
    for v in values.iter() {
        out.write_all(&v.to_le_bytes())?;
    }
    Ok(())
}
