//! Small dense symmetric eigenproblems and least squares.
//!
//! Everything downstream needs eigenvalues of Gram matrices whose side never
//! exceeds a couple dozen, so a cyclic Jacobi iteration is used throughout:
//! no dependencies, deterministic, and accurate to roundoff at these sizes.
//! Sweeps stop once every off-diagonal magnitude is at or below 1e-12.
//! Singular values of rectangular cross-Gram blocks come from eigenvalues of
//! the smaller symmetric square.

use crate::matrix::SensingMatrix;

const OFF_DIAGONAL_TOLERANCE: f64 = 1e-12;
const MAX_SWEEPS: usize = 64;

/// Relative eigenvalue cutoff for pseudo-inverse least squares.
const PINV_RELATIVE_CUTOFF: f64 = 1e-12;

/// Cyclic Jacobi on a symmetric `p x p` matrix (row-major, overwritten).
/// Returns unsorted eigenvalues; when `vectors` is `Some`, it is filled with
/// the rotation product so that column `j` pairs with eigenvalue `j`.
fn jacobi(p: usize, a: &mut [f64], mut vectors: Option<&mut [f64]>) -> Vec<f64> {
    debug_assert_eq!(a.len(), p * p);
    if let Some(v) = vectors.as_deref_mut() {
        v.fill(0.0);
        for i in 0..p {
            v[i * p + i] = 1.0;
        }
    }
    for _ in 0..MAX_SWEEPS {
        let mut off = 0.0f64;
        for r in 0..p {
            for c in (r + 1)..p {
                off = off.max(a[r * p + c].abs());
            }
        }
        if off <= OFF_DIAGONAL_TOLERANCE {
            break;
        }
        for r in 0..p {
            for c in (r + 1)..p {
                let arc = a[r * p + c];
                if arc.abs() <= OFF_DIAGONAL_TOLERANCE {
                    continue;
                }
                let theta = (a[c * p + c] - a[r * p + r]) / (2.0 * arc);
                let t = if theta.is_finite() {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                } else {
                    0.0
                };
                let cs = 1.0 / (t * t + 1.0).sqrt();
                let sn = t * cs;
                for k in 0..p {
                    let akr = a[k * p + r];
                    let akc = a[k * p + c];
                    a[k * p + r] = cs * akr - sn * akc;
                    a[k * p + c] = sn * akr + cs * akc;
                }
                for k in 0..p {
                    let ark = a[r * p + k];
                    let ack = a[c * p + k];
                    a[r * p + k] = cs * ark - sn * ack;
                    a[c * p + k] = sn * ark + cs * ack;
                }
                if let Some(v) = vectors.as_deref_mut() {
                    for k in 0..p {
                        let vkr = v[k * p + r];
                        let vkc = v[k * p + c];
                        v[k * p + r] = cs * vkr - sn * vkc;
                        v[k * p + c] = sn * vkr + cs * vkc;
                    }
                }
            }
        }
    }
    (0..p).map(|i| a[i * p + i]).collect()
}

/// Eigenvalues of a symmetric matrix, ascending. Consumes the buffer.
pub(crate) fn sym_eigenvalues(p: usize, mut a: Vec<f64>) -> Vec<f64> {
    let mut vals = jacobi(p, &mut a, None);
    vals.sort_unstable_by(|x, y| x.partial_cmp(y).unwrap());
    vals
}

/// Gram matrix of the selected columns, `G = A_S' A_S`, row-major `p x p`.
pub(crate) fn gram(a: &SensingMatrix, s: &[usize]) -> Vec<f64> {
    let p = s.len();
    let mut g = vec![0.0; p * p];
    for (r, &i) in s.iter().enumerate() {
        for (c, &j) in s.iter().enumerate().skip(r) {
            let d = a.col_dot(i, j);
            g[r * p + c] = d;
            g[c * p + r] = d;
        }
    }
    g
}

/// Cross-Gram block `A_S' A_T`, row-major `|s| x |t|`.
pub(crate) fn cross_gram(a: &SensingMatrix, s: &[usize], t: &[usize]) -> Vec<f64> {
    let cols = t.len();
    let mut g = vec![0.0; s.len() * cols];
    for (r, &i) in s.iter().enumerate() {
        for (c, &j) in t.iter().enumerate() {
            g[r * cols + c] = a.col_dot(i, j);
        }
    }
    g
}

/// Smallest and largest eigenvalue of the Gram matrix of columns `s`.
pub(crate) fn gram_eig_extremes(a: &SensingMatrix, s: &[usize]) -> (f64, f64) {
    let vals = sym_eigenvalues(s.len(), gram(a, s));
    match (vals.first(), vals.last()) {
        (Some(&lo), Some(&hi)) => (lo, hi),
        _ => (0.0, 0.0),
    }
}

/// Largest singular value of `A_S' A_T`, computed as the square root of the
/// top eigenvalue of the smaller of `M M'` and `M' M`.
pub(crate) fn sigma_max_cross(a: &SensingMatrix, s: &[usize], t: &[usize]) -> f64 {
    let (rows, cols) = (s.len(), t.len());
    if rows == 0 || cols == 0 {
        return 0.0;
    }
    let m = cross_gram(a, s, t);
    let p = rows.min(cols);
    let mut sq = vec![0.0; p * p];
    if rows <= cols {
        // M M'
        for r in 0..rows {
            for c in r..rows {
                let mut acc = 0.0;
                for k in 0..cols {
                    acc += m[r * cols + k] * m[c * cols + k];
                }
                sq[r * rows + c] = acc;
                sq[c * rows + r] = acc;
            }
        }
    } else {
        // M' M
        for r in 0..cols {
            for c in r..cols {
                let mut acc = 0.0;
                for k in 0..rows {
                    acc += m[k * cols + r] * m[k * cols + c];
                }
                sq[r * cols + c] = acc;
                sq[c * cols + r] = acc;
            }
        }
    }
    let top = sym_eigenvalues(p, sq).last().copied().unwrap_or(0.0);
    top.max(0.0).sqrt()
}

/// Extreme singular values of `A_S`, as `(sigma_min, sigma_max)`.
pub(crate) fn column_sv_extremes(a: &SensingMatrix, s: &[usize]) -> (f64, f64) {
    if s.is_empty() {
        return (0.0, 0.0);
    }
    let (lo, hi) = gram_eig_extremes(a, s);
    (lo.max(0.0).sqrt(), hi.max(0.0).sqrt())
}

/// Minimum-norm least-squares solution of `A_S z ~ y` via the eigendecomposed
/// normal equations. Returns the coefficients (aligned with `s`) and the
/// max-abs residual of `A_S z - y`.
pub(crate) fn least_squares_min_norm(
    a: &SensingMatrix,
    s: &[usize],
    y: &[f64],
) -> (Vec<f64>, f64) {
    let p = s.len();
    if p == 0 {
        return (Vec::new(), inf_norm(y));
    }
    let mut g = gram(a, s);
    let mut vectors = vec![0.0; p * p];
    let vals = jacobi(p, &mut g, Some(&mut vectors));
    let b: Vec<f64> = s.iter().map(|&j| a.col_dot_vec(j, y)).collect();
    let lambda_max = vals.iter().cloned().fold(0.0f64, f64::max);
    let cutoff = lambda_max * PINV_RELATIVE_CUTOFF;
    let mut z = vec![0.0; p];
    for (j, &lam) in vals.iter().enumerate() {
        if lam <= cutoff || lam <= 0.0 {
            continue;
        }
        let mut proj = 0.0;
        for i in 0..p {
            proj += vectors[i * p + j] * b[i];
        }
        let scale = proj / lam;
        for i in 0..p {
            z[i] += scale * vectors[i * p + j];
        }
    }
    let mut residual = 0.0f64;
    for (row, target) in y.iter().enumerate() {
        let mut acc = -target;
        for (i, &col) in s.iter().enumerate() {
            acc += a.entry(row, col) * z[i];
        }
        residual = residual.max(acc.abs());
    }
    (z, residual)
}

/// Solves the dense symmetric system `G u = rhs` by Gaussian elimination
/// with partial pivoting. Returns `None` on a vanishing pivot; callers are
/// expected to have screened rank separately.
pub(crate) fn solve_sym_system(p: usize, g: &[f64], rhs: &[f64]) -> Option<Vec<f64>> {
    debug_assert_eq!(g.len(), p * p);
    debug_assert_eq!(rhs.len(), p);
    let mut a = g.to_vec();
    let mut b = rhs.to_vec();
    for col in 0..p {
        let mut pivot_row = col;
        let mut pivot_mag = a[col * p + col].abs();
        for r in (col + 1)..p {
            let mag = a[r * p + col].abs();
            if mag > pivot_mag {
                pivot_mag = mag;
                pivot_row = r;
            }
        }
        if pivot_mag <= 1e-300 {
            return None;
        }
        if pivot_row != col {
            for c in 0..p {
                a.swap(col * p + c, pivot_row * p + c);
            }
            b.swap(col, pivot_row);
        }
        let pivot = a[col * p + col];
        for r in (col + 1)..p {
            let factor = a[r * p + col] / pivot;
            if factor == 0.0 {
                continue;
            }
            for c in col..p {
                a[r * p + c] -= factor * a[col * p + c];
            }
            b[r] -= factor * b[col];
        }
    }
    let mut u = vec![0.0; p];
    for col in (0..p).rev() {
        let mut acc = b[col];
        for c in (col + 1)..p {
            acc -= a[col * p + c] * u[c];
        }
        u[col] = acc / a[col * p + col];
    }
    Some(u)
}

pub(crate) fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}
