use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use byteorder::{LittleEndian, ReadBytesExt, WriteBytesExt};
use serde::{Deserialize, Serialize};

use crate::error::{CssError, Result};
use crate::numerics::ColumnMatrix;

/// On-disk matrix layouts.
///
/// `Csv` stores one matrix column per line, comma separated. `Binary` is
/// `u64 d, u64 n` followed by `d·n` `f64` values in column-major order, all
/// little-endian.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MatrixFormat {
    Csv,
    Binary,
}

impl std::str::FromStr for MatrixFormat {
    type Err = CssError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(MatrixFormat::Csv),
            "binary" | "bin" => Ok(MatrixFormat::Binary),
            other => Err(CssError::Config(format!("unknown matrix format '{other}'"))),
        }
    }
}

fn parse_err(location: impl Into<String>, message: impl Into<String>) -> CssError {
    CssError::Parse {
        location: location.into(),
        message: message.into(),
    }
}

pub fn load_matrix(path: &Path, format: MatrixFormat, header: bool) -> Result<ColumnMatrix<f64>> {
    let file = File::open(path)?;
    match format {
        MatrixFormat::Csv => read_csv(BufReader::new(file), header),
        MatrixFormat::Binary => read_binary(BufReader::new(file)),
    }
}

pub fn save_matrix(path: &Path, a: &ColumnMatrix<f64>, format: MatrixFormat) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    match format {
        MatrixFormat::Csv => write_csv(&mut w, a)?,
        MatrixFormat::Binary => write_binary(&mut w, a)?,
    }
    w.flush()?;
    Ok(())
}

/// Reads one column per non-blank line. With `header`, the first line is
/// skipped; without it, a non-numeric first line is an error.
pub fn read_csv<R: BufRead>(r: R, header: bool) -> Result<ColumnMatrix<f64>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(header)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(r);
    let mut data = Vec::new();
    let mut rows = None;
    let mut cols = 0;
    for rec in rdr.records() {
        let rec = rec.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            parse_err(format!("line {line}"), e.to_string())
        })?;
        let line = rec.position().map_or(0, |p| p.line());
        if rec.iter().all(|f| f.is_empty()) {
            continue;
        }
        let before = data.len();
        for (field, text) in rec.iter().enumerate() {
            let v: f64 = text.parse().map_err(|_| {
                parse_err(
                    format!("line {line}, field {}", field + 1),
                    format!("'{text}' is not a number"),
                )
            })?;
            if !v.is_finite() {
                return Err(parse_err(format!("line {line}, field {}", field + 1), "non-finite value"));
            }
            data.push(v);
        }
        let len = data.len() - before;
        match rows {
            None => rows = Some(len),
            Some(d) if d != len => {
                return Err(parse_err(
                    format!("line {line}"),
                    format!("column has {len} entries, expected {d}"),
                ))
            }
            _ => {}
        }
        cols += 1;
    }
    let Some(d) = rows else {
        return Err(CssError::Empty("matrix file holds no columns".into()));
    };
    ColumnMatrix::from_col_major(d, cols, data)
}

pub fn write_csv<W: Write>(w: W, a: &ColumnMatrix<f64>) -> Result<()> {
    let mut wtr = csv::WriterBuilder::new().has_headers(false).from_writer(w);
    for c in a.columns() {
        // `{:?}` keeps enough digits for an exact round trip.
        wtr.write_record(c.iter().map(|v| format!("{v:?}")))
            .map_err(|e| CssError::Io(e.into()))?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn read_binary<R: Read>(mut r: R) -> Result<ColumnMatrix<f64>> {
    let d = r
        .read_u64::<LittleEndian>()
        .map_err(|e| parse_err("offset 0", format!("row count: {e}")))? as usize;
    let n = r
        .read_u64::<LittleEndian>()
        .map_err(|e| parse_err("offset 8", format!("column count: {e}")))? as usize;
    let total = d
        .checked_mul(n)
        .ok_or_else(|| parse_err("offset 0", "matrix size overflows"))?;
    let mut data = Vec::with_capacity(total.min(1 << 24));
    for i in 0..total {
        let v = r.read_f64::<LittleEndian>().map_err(|e| {
            parse_err(format!("offset {}", 16 + 8 * i), format!("value {i} of {total}: {e}"))
        })?;
        data.push(v);
    }
    let mut rest = [0u8; 1];
    if r.read(&mut rest)? != 0 {
        return Err(parse_err(format!("offset {}", 16 + 8 * total), "trailing bytes"));
    }
    ColumnMatrix::from_col_major(d, n, data)
}

pub fn write_binary<W: Write>(mut w: W, a: &ColumnMatrix<f64>) -> Result<()> {
    w.write_u64::<LittleEndian>(a.rows() as u64)?;
    w.write_u64::<LittleEndian>(a.cols() as u64)?;
    for &v in a.as_slice() {
        w.write_f64::<LittleEndian>(v)?;
    }
    Ok(())
}

/// Parses a shard assignment: one server id per non-blank line, in column order.
pub fn read_assignment<R: BufRead>(r: R) -> Result<Vec<usize>> {
    let mut out = Vec::new();
    for (i, line) in r.lines().enumerate() {
        let line = line?;
        let t = line.trim();
        if t.is_empty() {
            continue;
        }
        out.push(
            t.parse()
                .map_err(|_| parse_err(format!("line {}", i + 1), format!("'{t}' is not a server id")))?,
        );
    }
    Ok(out)
}
