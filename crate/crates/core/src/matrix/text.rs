//! Plain-text matrix format: a first line holding the dimension, then one
//! line per row of whitespace-separated decimals.

use std::fs;
use std::io::Write;
use std::path::Path;

use super::Matrix;
use crate::error::{Error, Result};

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

pub fn parse_matrix(text: &str) -> Result<Matrix> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (idx, header) = lines.next().ok_or_else(|| parse_err(1, "empty input"))?;
    let dim: usize = header
        .trim()
        .parse()
        .map_err(|_| parse_err(idx + 1, format!("expected a dimension, found {:?}", header.trim())))?;
    if dim == 0 {
        return Err(parse_err(idx + 1, "dimension must be positive"));
    }
    let mut rows = Vec::with_capacity(dim);
    for (idx, line) in lines {
        if rows.len() == dim {
            return Err(parse_err(idx + 1, format!("more than {dim} rows")));
        }
        let row = line
            .split_whitespace()
            .map(|tok| {
                tok.parse::<f64>()
                    .map_err(|_| parse_err(idx + 1, format!("invalid number {tok:?}")))
            })
            .collect::<Result<Vec<f64>>>()?;
        if row.len() != dim {
            return Err(parse_err(
                idx + 1,
                format!("expected {dim} entries, found {}", row.len()),
            ));
        }
        if let Some(x) = row.iter().find(|x| !x.is_finite()) {
            return Err(parse_err(idx + 1, format!("non-finite entry {x}")));
        }
        rows.push(row);
    }
    if rows.len() != dim {
        return Err(parse_err(
            text.lines().count(),
            format!("expected {dim} rows, found {}", rows.len()),
        ));
    }
    Ok(Matrix::from_rows(&rows).expect("rows validated above"))
}

pub fn read_matrix_file(path: impl AsRef<Path>) -> Result<Matrix> {
    parse_matrix(&fs::read_to_string(path)?)
}

/// Writes 17 significant digits per entry.
pub fn write_matrix(m: &Matrix, mut out: impl Write) -> Result<()> {
    writeln!(out, "{}", m.dim())?;
    for i in 0..m.dim() {
        let row: Vec<String> = m.row(i).iter().map(|x| format!("{x:.16e}")).collect();
        writeln!(out, "{}", row.join(" "))?;
    }
    Ok(())
}

pub fn write_matrix_file(m: &Matrix, path: impl AsRef<Path>) -> Result<()> {
    let mut buf = Vec::new();
    write_matrix(m, &mut buf)?;
    fs::write(path, buf)?;
    Ok(())
}
