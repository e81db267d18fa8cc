//! Independent oracle helpers shared by the integration tests.
//!
//! Everything in this module is re-derived from the definitions: bitmask
//! subset scans instead of ranked enumeration, a self-contained Jacobi sweep
//! with eigenvector accumulation, and pseudoinverse least squares. None of it
//! calls the library routines it is used to check, so agreement between the
//! two is evidence rather than tautology.

#![allow(dead_code)]

use cslab::SensingMatrix;

pub const NONZERO_TOL: f64 = 1e-12;

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |acc, x| acc.max(x.abs()))
}

pub fn col_vec(a: &SensingMatrix, j: usize) -> Vec<f64> {
    (0..a.rows()).map(|r| a.entry(r, j)).collect()
}

pub fn cols_of(a: &SensingMatrix, idx: &[usize]) -> Vec<Vec<f64>> {
    idx.iter().map(|&j| col_vec(a, j)).collect()
}

/// Eigenvalues and eigenvectors of a symmetric matrix (row-major, n x n) by
/// cyclic Jacobi rotations. Returns (values, vectors) with vectors stored
/// row-major so column j of the returned matrix is the j-th eigenvector.
pub fn sym_eig(mat: &[f64], n: usize) -> (Vec<f64>, Vec<f64>) {
    assert_eq!(mat.len(), n * n);
    let mut a = mat.to_vec();
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    if n < 2 {
        return ((0..n).map(|i| a[i * n + i]).collect(), v);
    }
    for _sweep in 0..120 {
        let mut off = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off += a[p * n + q] * a[p * n + q];
            }
        }
        if off.sqrt() < 1e-14 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                if apq.abs() < 1e-300 {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                let tau = (aqq - app) / (2.0 * apq);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                for i in 0..n {
                    let aip = a[i * n + p];
                    let aiq = a[i * n + q];
                    a[i * n + p] = c * aip - s * aiq;
                    a[i * n + q] = s * aip + c * aiq;
                }
                for i in 0..n {
                    let api = a[p * n + i];
                    let aqi = a[q * n + i];
                    a[p * n + i] = c * api - s * aqi;
                    a[q * n + i] = s * api + c * aqi;
                }
                for i in 0..n {
                    let vip = v[i * n + p];
                    let viq = v[i * n + q];
                    v[i * n + p] = c * vip - s * viq;
                    v[i * n + q] = s * vip + c * viq;
                }
            }
        }
    }
    ((0..n).map(|i| a[i * n + i]).collect(), v)
}

pub fn gram_of(cols: &[Vec<f64>]) -> Vec<f64> {
    let c = cols.len();
    let mut g = vec![0.0; c * c];
    for i in 0..c {
        for j in 0..c {
            g[i * c + j] = dot(&cols[i], &cols[j]);
        }
    }
    g
}

fn eig_extremes(mat: &[f64], n: usize) -> (f64, f64) {
    let (vals, _) = sym_eig(mat, n);
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for v in vals {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    (lo, hi)
}

fn masks_with_popcount(n: usize, k: usize) -> Vec<u32> {
    (0u32..(1 << n)).filter(|m| m.count_ones() as usize == k).collect()
}

fn mask_to_indices(mask: u32) -> Vec<usize> {
    (0..32).filter(|&b| mask & (1 << b) != 0).collect()
}

/// Isometry constant of order k by scanning every size-k column subset.
pub fn delta_oracle(a: &SensingMatrix, k: usize) -> f64 {
    let n = a.cols();
    assert!(k >= 1 && k <= n && n <= 20);
    let mut worst = 0.0f64;
    for mask in masks_with_popcount(n, k) {
        let cols = cols_of(a, &mask_to_indices(mask));
        let g = gram_of(&cols);
        let (lo, hi) = eig_extremes(&g, k);
        worst = worst.max(hi - 1.0).max(1.0 - lo);
    }
    worst
}

/// Orthogonality constant for orders (s, s_tilde) by scanning every disjoint
/// subset pair. The largest singular value of the cross block comes from the
/// smaller of the two Gram products.
pub fn theta_oracle(a: &SensingMatrix, s: usize, s_tilde: usize) -> f64 {
    let n = a.cols();
    assert!(s >= 1 && s_tilde >= 1 && s + s_tilde <= n && n <= 20);
    let mut worst = 0.0f64;
    for ms in masks_with_popcount(n, s) {
        let left = cols_of(a, &mask_to_indices(ms));
        for mt in masks_with_popcount(n, s_tilde) {
            if ms & mt != 0 {
                continue;
            }
            let right = cols_of(a, &mask_to_indices(mt));
            let (small, big) = if s <= s_tilde { (&left, &right) } else { (&right, &left) };
            let c = small.len();
            let mut sq = vec![0.0; c * c];
            for i in 0..c {
                for j in 0..c {
                    let mut acc = 0.0;
                    for col in big.iter() {
                        acc += dot(&small[i], col) * dot(&small[j], col);
                    }
                    sq[i * c + j] = acc;
                }
            }
            let (_, hi) = eig_extremes(&sq, c);
            worst = worst.max(hi.max(0.0).sqrt());
        }
    }
    worst
}

pub fn coherence_oracle(a: &SensingMatrix) -> f64 {
    let n = a.cols();
    assert!(n >= 2);
    let cols: Vec<Vec<f64>> = (0..n).map(|j| col_vec(a, j)).collect();
    let norms: Vec<f64> = cols.iter().map(|c| dot(c, c).sqrt()).collect();
    let mut mu = 0.0f64;
    for i in 0..n {
        for j in (i + 1)..n {
            mu = mu.max(dot(&cols[i], &cols[j]).abs() / (norms[i] * norms[j]));
        }
    }
    mu
}

/// Minimum-norm least squares on the given columns via the pseudoinverse of
/// the normal matrix: coefficients u with A_S u closest to y, smallest norm
/// among ties. Rank decisions use a relative eigenvalue cutoff.
pub fn min_norm_ls(cols: &[Vec<f64>], y: &[f64]) -> Vec<f64> {
    let c = cols.len();
    if c == 0 {
        return Vec::new();
    }
    let g = gram_of(cols);
    let b: Vec<f64> = cols.iter().map(|col| dot(col, y)).collect();
    let (vals, vecs) = sym_eig(&g, c);
    let lead = vals.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    let cutoff = 1e-12 * lead.max(1e-300);
    let mut x = vec![0.0; c];
    for j in 0..c {
        if vals[j].abs() <= cutoff {
            continue;
        }
        let mut proj = 0.0;
        for i in 0..c {
            proj += vecs[i * c + j] * b[i];
        }
        let scale = proj / vals[j];
        for i in 0..c {
            x[i] += scale * vecs[i * c + j];
        }
    }
    x
}

pub fn apply_cols(cols: &[Vec<f64>], coef: &[f64], m: usize) -> Vec<f64> {
    let mut out = vec![0.0; m];
    for (col, &u) in cols.iter().zip(coef) {
        for r in 0..m {
            out[r] += u * col[r];
        }
    }
    out
}

pub fn weighted_count(x: &[f64], prior: &[usize], w: f64) -> f64 {
    let mut total = 0.0;
    for (i, &v) in x.iter().enumerate() {
        if v.abs() > NONZERO_TOL {
            total += if prior.binary_search(&i).is_ok() { w } else { 1.0 };
        }
    }
    total
}

pub fn weighted_sum(x: &[f64], prior: &[usize], w: f64) -> f64 {
    let mut total = 0.0;
    for (i, &v) in x.iter().enumerate() {
        total += v.abs() * if prior.binary_search(&i).is_ok() { w } else { 1.0 };
    }
    total
}

fn residual_ok(a: &SensingMatrix, x: &[f64], y: &[f64]) -> bool {
    let mut r = y.to_vec();
    for (j, &v) in x.iter().enumerate() {
        if v != 0.0 {
            for (row, slot) in r.iter_mut().enumerate() {
                *slot -= v * a.entry(row, j);
            }
        }
    }
    inf_norm(&r) <= 1e-8 * (1.0 + inf_norm(y))
}

fn scatter(n: usize, idx: &[usize], coef: &[f64]) -> Vec<f64> {
    let mut x = vec![0.0; n];
    for (&i, &v) in idx.iter().zip(coef) {
        x[i] = v;
    }
    x
}

fn vec_close(a: &[f64], b: &[f64], tol: f64) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
}

/// Unpruned scan of all 2^n supports for the weighted counting problem.
/// Returns the optimal objective and every distinct minimizing vector.
pub fn l0_oracle(a: &SensingMatrix, y: &[f64], prior: &[usize], w: f64) -> (f64, Vec<Vec<f64>>) {
    let n = a.cols();
    assert!(n <= 16);
    let mut best = f64::INFINITY;
    let mut mins: Vec<Vec<f64>> = Vec::new();
    for mask in 0u32..(1 << n) {
        let idx = mask_to_indices(mask);
        let cols = cols_of(a, &idx);
        let coef = min_norm_ls(&cols, y);
        let x = scatter(n, &idx, &coef);
        if !residual_ok(a, &x, y) {
            continue;
        }
        let obj = weighted_count(&x, prior, w);
        if obj < best - 1e-9 {
            best = obj;
            mins.clear();
        }
        if obj <= best + 1e-9 && !mins.iter().any(|m| vec_close(m, &x, 1e-9)) {
            mins.push(x);
        }
    }
    (best, mins)
}

/// Weighted 1-norm optimum by direct enumeration of candidate basic
/// solutions: every column subset of size at most m that reproduces y.
pub fn l1_vertex_oracle(a: &SensingMatrix, y: &[f64], prior: &[usize], w: f64) -> f64 {
    let n = a.cols();
    let m = a.rows();
    assert!(n <= 16);
    let mut best = f64::INFINITY;
    for mask in 0u32..(1 << n) {
        if mask.count_ones() as usize > m {
            continue;
        }
        let idx = mask_to_indices(mask);
        let cols = cols_of(a, &idx);
        let coef = min_norm_ls(&cols, y);
        let x = scatter(n, &idx, &coef);
        if !residual_ok(a, &x, y) {
            continue;
        }
        best = best.min(weighted_sum(&x, prior, w));
    }
    best
}

/// Set equality of two vector families up to entrywise tolerance.
pub fn same_vector_set(xs: &[Vec<f64>], ys: &[Vec<f64>], tol: f64) -> bool {
    xs.len() == ys.len()
        && xs.iter().all(|x| ys.iter().any(|y| vec_close(x, y, tol)))
        && ys.iter().all(|y| xs.iter().any(|x| vec_close(x, y, tol)))
}
