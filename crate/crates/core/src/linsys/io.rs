//! Plain-text matrix and vector files.
//!
//! Matrix: a header line `R C`, then `R` lines of `C` space-separated
//! numbers. Vector: a header line `N`, then `N` lines of one number.
//! Writers emit 17 significant digits and `\n` line endings, so a value
//! survives a write/read cycle bit-for-bit.

use std::fmt::Write as _;
use std::io::{BufRead, Write};

use super::matrix::{DenseMatrix, Vector};
use crate::error::{Error, Result};

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn parse_count(token: &str, line: usize) -> Result<usize> {
    token
        .parse()
        .map_err(|_| parse_err(line, format!("invalid count `{token}`")))
}

fn parse_real(token: &str, line: usize) -> Result<f64> {
    let v: f64 = token
        .parse()
        .map_err(|_| parse_err(line, format!("invalid number `{token}`")))?;
    if !v.is_finite() {
        return Err(parse_err(line, format!("non-finite number `{token}`")));
    }
    Ok(v)
}

fn next_line(lines: &mut impl Iterator<Item = std::io::Result<String>>, line: usize) -> Result<String> {
    match lines.next() {
        Some(l) => Ok(l?),
        None => Err(parse_err(line, "unexpected end of input")),
    }
}

pub fn format_real(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn read_matrix(reader: impl BufRead) -> Result<DenseMatrix> {
    let mut lines = reader.lines();
    let header = next_line(&mut lines, 1)?;
    let dims: Vec<&str> = header.split(' ').collect();
    if dims.len() != 2 {
        return Err(parse_err(1, format!("expected `R C`, got `{header}`")));
    }
    let rows = parse_count(dims[0], 1)?;
    let cols = parse_count(dims[1], 1)?;
    let mut data = Vec::with_capacity(rows * cols);
    for r in 0..rows {
        let lineno = r + 2;
        let line = next_line(&mut lines, lineno)?;
        let before = data.len();
        for token in line.split(' ') {
            data.push(parse_real(token, lineno)?);
        }
        if data.len() - before != cols {
            return Err(parse_err(
                lineno,
                format!("expected {cols} values, got {}", data.len() - before),
            ));
        }
    }
    DenseMatrix::from_row_major(rows, cols, data)
}

pub fn read_vector(reader: impl BufRead) -> Result<Vector> {
    let mut lines = reader.lines();
    let header = next_line(&mut lines, 1)?;
    let n = parse_count(header.trim_end(), 1)?;
    let mut data = Vec::with_capacity(n);
    for i in 0..n {
        let line = next_line(&mut lines, i + 2)?;
        data.push(parse_real(&line, i + 2)?);
    }
    Vector::new(data)
}

pub fn matrix_to_string(m: &DenseMatrix) -> String {
    let mut out = format!("{} {}\n", m.rows(), m.cols());
    for i in 0..m.rows() {
        for (j, v) in m.row(i).iter().enumerate() {
            if j > 0 {
                out.push(' ');
            }
            let _ = write!(out, "{}", format_real(*v));
        }
        out.push('\n');
    }
    out
}

pub fn vector_to_string(v: &[f64]) -> String {
    let mut out = format!("{}\n", v.len());
    for x in v {
        let _ = writeln!(out, "{}", format_real(*x));
    }
    out
}

pub fn write_matrix(mut w: impl Write, m: &DenseMatrix) -> Result<()> {
    w.write_all(matrix_to_string(m).as_bytes())?;
    Ok(())
}

pub fn write_vector(mut w: impl Write, v: &[f64]) -> Result<()> {
    w.write_all(vector_to_string(v).as_bytes())?;
    Ok(())
}
