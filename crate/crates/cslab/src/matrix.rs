//! Sensing matrices and signal vectors.
//!
//! A [`SensingMatrix`] is a dense row-major `m x n` real matrix. Columns are
//! the atoms measurements are built from, so column Euclidean norms are
//! computed once at construction and cached. Columns are *not* normalized
//! automatically; the mutual-coherence computation divides by the cached
//! norms instead, and generated ensembles normalize explicitly.

use thiserror::Error;

/// Errors from matrix and vector construction and column selection.
#[derive(Debug, Error, PartialEq)]
pub enum CoreError {
    #[error("entry at flat index {0} is not finite")]
    NonFinite(usize),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("column index {index} out of range for {n} columns")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("column {0} has (near-)zero norm")]
    ZeroColumn(usize),
    #[error("need at least two columns, got {0}")]
    TooFewColumns(usize),
    #[error("weight {0} outside [0, 1]")]
    WeightOutOfRange(f64),
}

/// Dense row-major sensing matrix with cached column norms.
///
/// Invariants: `m >= 1`, all entries finite, `entries.len() == m * n`.
/// `n == 0` is permitted so that selecting an empty column set yields a
/// well-formed `m x 0` matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SensingMatrix {
    m: usize,
    n: usize,
    entries: Vec<f64>,
    column_norms: Vec<f64>,
}

impl SensingMatrix {
    /// Builds a matrix from row-major entries, validating finiteness and
    /// caching column Euclidean norms.
    pub fn new(m: usize, n: usize, entries: Vec<f64>) -> Result<Self, CoreError> {
        if m < 1 {
            return Err(CoreError::DimensionMismatch { expected: 1, got: 0 });
        }
        if entries.len() != m * n {
            return Err(CoreError::DimensionMismatch { expected: m * n, got: entries.len() });
        }
        if let Some(bad) = entries.iter().position(|e| !e.is_finite()) {
            return Err(CoreError::NonFinite(bad));
        }
        let mut column_norms = vec![0.0; n];
        for row in 0..m {
            for (col, norm2) in column_norms.iter_mut().enumerate() {
                let e = entries[row * n + col];
                *norm2 += e * e;
            }
        }
        for norm2 in &mut column_norms {
            *norm2 = norm2.sqrt();
        }
        Ok(Self { m, n, entries, column_norms })
    }

    /// Number of rows (measurements).
    pub fn rows(&self) -> usize {
        self.m
    }

    /// Number of columns (ambient signal dimension).
    pub fn cols(&self) -> usize {
        self.n
    }

    /// Entry at `(row, col)`.
    pub fn entry(&self, row: usize, col: usize) -> f64 {
        self.entries[row * self.n + col]
    }

    /// Row `row` as a contiguous slice.
    pub fn row(&self, row: usize) -> &[f64] {
        &self.entries[row * self.n..(row + 1) * self.n]
    }

    /// Cached Euclidean norms of the columns.
    pub fn column_norms(&self) -> &[f64] {
        &self.column_norms
    }

    /// Inner product of columns `i` and `j`.
    pub fn col_dot(&self, i: usize, j: usize) -> f64 {
        let mut acc = 0.0;
        for row in 0..self.m {
            acc += self.entry(row, i) * self.entry(row, j);
        }
        acc
    }

    /// Inner product of column `j` with a length-`m` vector.
    pub fn col_dot_vec(&self, j: usize, v: &[f64]) -> f64 {
        debug_assert_eq!(v.len(), self.m);
        let mut acc = 0.0;
        for (row, value) in v.iter().enumerate() {
            acc += self.entry(row, j) * value;
        }
        acc
    }

    /// Matrix-vector product `A x` for a length-`n` vector.
    pub fn mul(&self, x: &[f64]) -> Result<Vec<f64>, CoreError> {
        if x.len() != self.n {
            return Err(CoreError::DimensionMismatch { expected: self.n, got: x.len() });
        }
        let mut out = vec![0.0; self.m];
        for (row, slot) in out.iter_mut().enumerate() {
            let r = self.row(row);
            let mut acc = 0.0;
            for (e, xv) in r.iter().zip(x) {
                acc += e * xv;
            }
            *slot = acc;
        }
        Ok(out)
    }
}

/// Real signal vector with finite entries.
#[derive(Debug, Clone, PartialEq)]
pub struct SignalVector {
    values: Vec<f64>,
}

impl SignalVector {
    pub fn new(values: Vec<f64>) -> Result<Self, CoreError> {
        if let Some(bad) = values.iter().position(|v| !v.is_finite()) {
            return Err(CoreError::NonFinite(bad));
        }
        Ok(Self { values })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Indices with `|x_i| > 1e-12`, ascending. The absolute threshold is the
    /// project-wide convention for "nonzero".
    pub fn support(&self) -> Vec<usize> {
        self.values
            .iter()
            .enumerate()
            .filter(|(_, v)| v.abs() > NONZERO_TOLERANCE)
            .map(|(i, _)| i)
            .collect()
    }
}

/// Absolute magnitude below which an entry counts as zero.
pub const NONZERO_TOLERANCE: f64 = 1e-12;

/// Mutual coherence: the largest normalized inner product between two
/// distinct columns, `max_{i != j} |a_i . a_j| / (|a_i| |a_j|)`.
///
/// The value lands in `[0, 1]` up to roundoff (duplicate columns can come out
/// a few ulps above 1; no clamping is applied).
pub fn coherence(a: &SensingMatrix) -> Result<f64, CoreError> {
    if a.cols() < 2 {
        return Err(CoreError::TooFewColumns(a.cols()));
    }
    for (j, norm) in a.column_norms().iter().enumerate() {
        if *norm <= 1e-14 {
            return Err(CoreError::ZeroColumn(j));
        }
    }
    let mut best = 0.0f64;
    for i in 0..a.cols() {
        for j in (i + 1)..a.cols() {
            let c = a.col_dot(i, j).abs() / (a.column_norms()[i] * a.column_norms()[j]);
            best = best.max(c);
        }
    }
    Ok(best)
}

/// Selects columns `s` (in the given order) into a new `m x |s|` matrix.
pub fn submatrix_columns(a: &SensingMatrix, s: &[usize]) -> Result<SensingMatrix, CoreError> {
    for &j in s {
        if j >= a.cols() {
            return Err(CoreError::IndexOutOfRange { index: j, n: a.cols() });
        }
    }
    let mut entries = Vec::with_capacity(a.rows() * s.len());
    for row in 0..a.rows() {
        for &j in s {
            entries.push(a.entry(row, j));
        }
    }
    SensingMatrix::new(a.rows(), s.len(), entries)
}
