//! Plain-text matrix and vector files plus the flat `key = value` config
//! format. One format serves every CLI command: a header line `m n`, then m
//! rows of n space-separated decimals. Lines starting with `#` are comments;
//! blank lines are skipped. Vectors are 1-row matrices with header `1 n`.

use std::fs;
use std::path::Path;

use crate::matrix::{CoreError, SensingMatrix};

#[derive(Debug, thiserror::Error)]
pub enum TextIoError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("line {line}: {message}")]
    MalformedFile { line: usize, message: String },
    #[error(transparent)]
    Core(#[from] CoreError),
}

fn malformed(line: usize, message: impl Into<String>) -> TextIoError {
    TextIoError::MalformedFile { line, message: message.into() }
}

/// Lines that carry data: skips blanks and `#` comments, keeps 1-based
/// physical line numbers for error reporting.
fn data_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            None
        } else {
            Some((i + 1, trimmed))
        }
    })
}

fn parse_dimension(token: &str, line: usize, what: &str) -> Result<usize, TextIoError> {
    token
        .parse::<usize>()
        .map_err(|_| malformed(line, format!("expected {what} as a nonnegative integer, got {token:?}")))
}

pub fn parse_matrix(text: &str) -> Result<SensingMatrix, TextIoError> {
    let mut lines = data_lines(text);
    let (header_line, header) =
        lines.next().ok_or_else(|| malformed(1, "missing `m n` header line"))?;
    let tokens: Vec<&str> = header.split_whitespace().collect();
    if tokens.len() != 2 {
        return Err(malformed(header_line, "header must contain exactly `m n`"));
    }
    let m = parse_dimension(tokens[0], header_line, "row count")?;
    let n = parse_dimension(tokens[1], header_line, "column count")?;
    if m == 0 || n == 0 {
        return Err(malformed(header_line, "matrix dimensions must be at least 1x1"));
    }

    let mut entries = Vec::with_capacity(m * n);
    let mut rows_read = 0;
    let mut last_line = header_line;
    for (line, row) in lines {
        if rows_read == m {
            return Err(malformed(line, format!("expected exactly {m} data rows")));
        }
        let mut count = 0;
        for token in row.split_whitespace() {
            let value: f64 = token
                .parse()
                .map_err(|_| malformed(line, format!("bad numeric entry {token:?}")))?;
            if !value.is_finite() {
                return Err(malformed(line, format!("non-finite entry {token:?}")));
            }
            entries.push(value);
            count += 1;
        }
        if count != n {
            return Err(malformed(line, format!("expected {n} entries per row, got {count}")));
        }
        rows_read += 1;
        last_line = line;
    }
    if rows_read != m {
        return Err(malformed(last_line, format!("expected {m} data rows, got {rows_read}")));
    }
    Ok(SensingMatrix::new(m, n, entries)?)
}

pub fn read_matrix(path: impl AsRef<Path>) -> Result<SensingMatrix, TextIoError> {
    parse_matrix(&fs::read_to_string(path)?)
}

/// Vectors are stored as 1-row matrices.
pub fn parse_vector(text: &str) -> Result<Vec<f64>, TextIoError> {
    let m = parse_matrix(text)?;
    if m.rows() != 1 {
        return Err(malformed(1, format!("vector files need header `1 n`, got {} rows", m.rows())));
    }
    Ok(m.row(0).to_vec())
}

pub fn read_vector(path: impl AsRef<Path>) -> Result<Vec<f64>, TextIoError> {
    parse_vector(&fs::read_to_string(path)?)
}

/// 17 significant digits, enough for exact f64 round trips.
pub fn format_real(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn format_matrix(a: &SensingMatrix) -> String {
    let mut out = format!("{} {}\n", a.rows(), a.cols());
    for r in 0..a.rows() {
        let row: Vec<String> = a.row(r).iter().map(|&v| format_real(v)).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}

pub fn write_matrix(path: impl AsRef<Path>, a: &SensingMatrix) -> Result<(), TextIoError> {
    fs::write(path, format_matrix(a))?;
    Ok(())
}

pub fn format_vector(v: &[f64]) -> String {
    let mut out = format!("1 {}\n", v.len());
    let row: Vec<String> = v.iter().map(|&x| format_real(x)).collect();
    out.push_str(&row.join(" "));
    out.push('\n');
    out
}

pub fn write_vector(path: impl AsRef<Path>, v: &[f64]) -> Result<(), TextIoError> {
    fs::write(path, format_vector(v))?;
    Ok(())
}

/// Flat config format: one `key = value` per line, `#` comments, blank lines
/// ignored. Returns (line, key, value) triples in file order; duplicate keys
/// are rejected by the consumer, which knows the schema.
pub fn parse_key_values(text: &str) -> Result<Vec<(usize, String, String)>, TextIoError> {
    let mut out = Vec::new();
    for (line, content) in data_lines(text) {
        let Some((key, value)) = content.split_once('=') else {
            return Err(malformed(line, "expected `key = value`"));
        };
        let key = key.trim();
        let value = value.trim();
        if key.is_empty() {
            return Err(malformed(line, "empty key"));
        }
        out.push((line, key.to_string(), value.to_string()));
    }
    Ok(out)
}
