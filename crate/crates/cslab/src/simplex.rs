//! Dense two-phase primal simplex for standard-form problems
//! `min c'v  s.t.  M v = b, v >= 0`.
//!
//! Pivoting follows Bland's rule throughout: the entering variable is the
//! lowest-index column with negative reduced cost, and among the ratio-test
//! minimizers the row whose basic variable has the lowest index leaves. That
//! rules out cycling and makes the returned vertex deterministic.
//!
//! Phase 1 starts from an all-artificial basis and minimizes the artificial
//! sum; residual basic artificials are pivoted out (or their rows dropped as
//! redundant) before phase 2 runs on the real costs. Problem sizes here are
//! tens of columns, so the tableau is kept dense and reduced costs are
//! recomputed per iteration.

#[derive(Debug, PartialEq, Eq)]
pub(crate) enum LpError {
    Infeasible,
    Unbounded,
}

const PIVOT_TOLERANCE: f64 = 1e-9;
const REDUCED_COST_TOLERANCE: f64 = 1e-9;
const RATIO_TIE_TOLERANCE: f64 = 1e-12;

struct Tableau {
    rows: usize,
    // Width = real columns + artificial columns + 1 (rhs).
    width: usize,
    real_cols: usize,
    data: Vec<f64>,
    basis: Vec<usize>,
}

impl Tableau {
    fn at(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.width + c]
    }

    fn rhs(&self, r: usize) -> f64 {
        self.at(r, self.width - 1)
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let w = self.width;
        let pivot = self.data[row * w + col];
        for c in 0..w {
            self.data[row * w + c] /= pivot;
        }
        for r in 0..self.rows {
            if r == row {
                continue;
            }
            let factor = self.data[r * w + col];
            if factor == 0.0 {
                continue;
            }
            for c in 0..w {
                self.data[r * w + c] -= factor * self.data[row * w + c];
            }
        }
        self.basis[row] = col;
    }

    /// Runs Bland-rule simplex minimizing `cost` over columns `0..limit`.
    fn optimize(&mut self, cost: &[f64], limit: usize) -> Result<(), LpError> {
        loop {
            // Multipliers y = c_B applied to the canonical tableau give the
            // reduced cost of column j as c_j - sum_i c_{B_i} T[i, j].
            let mut entering = None;
            for j in 0..limit {
                if self.basis.contains(&j) {
                    continue;
                }
                let mut reduced = cost[j];
                for (i, &bj) in self.basis.iter().enumerate() {
                    let cb = cost[bj];
                    if cb != 0.0 {
                        reduced -= cb * self.at(i, j);
                    }
                }
                if reduced < -REDUCED_COST_TOLERANCE {
                    entering = Some(j);
                    break;
                }
            }
            let Some(col) = entering else {
                return Ok(());
            };
            let mut best_ratio = f64::INFINITY;
            for r in 0..self.rows {
                let t = self.at(r, col);
                if t > PIVOT_TOLERANCE {
                    best_ratio = best_ratio.min(self.rhs(r) / t);
                }
            }
            if !best_ratio.is_finite() {
                return Err(LpError::Unbounded);
            }
            let mut leaving: Option<usize> = None;
            for r in 0..self.rows {
                let t = self.at(r, col);
                if t > PIVOT_TOLERANCE && self.rhs(r) / t <= best_ratio + RATIO_TIE_TOLERANCE {
                    leaving = match leaving {
                        Some(prev) if self.basis[prev] <= self.basis[r] => Some(prev),
                        _ => Some(r),
                    };
                }
            }
            self.pivot(leaving.expect("ratio test found a finite minimum"), col);
        }
    }

    fn drop_row(&mut self, row: usize) {
        let w = self.width;
        self.data.drain(row * w..(row + 1) * w);
        self.basis.remove(row);
        self.rows -= 1;
    }
}

/// Solves `min c'v  s.t.  M v = b, v >= 0` for a dense row-major `M`.
/// Returns the optimal basic feasible solution.
pub(crate) fn solve_standard_form(
    m: usize,
    n: usize,
    mat: &[f64],
    b: &[f64],
    cost: &[f64],
) -> Result<Vec<f64>, LpError> {
    debug_assert_eq!(mat.len(), m * n);
    debug_assert_eq!(b.len(), m);
    debug_assert_eq!(cost.len(), n);
    let width = n + m + 1;
    let mut data = vec![0.0; m * width];
    for r in 0..m {
        let flip = if b[r] < 0.0 { -1.0 } else { 1.0 };
        for c in 0..n {
            data[r * width + c] = flip * mat[r * n + c];
        }
        data[r * width + n + r] = 1.0;
        data[r * width + width - 1] = flip * b[r];
    }
    let mut tab = Tableau { rows: m, width, real_cols: n, data, basis: (n..n + m).collect() };

    // Phase 1: minimize the artificial sum.
    let mut phase1_cost = vec![0.0; n + m];
    for c in phase1_cost.iter_mut().skip(n) {
        *c = 1.0;
    }
    tab.optimize(&phase1_cost, n + m)?;
    let artificial_sum: f64 = tab
        .basis
        .iter()
        .enumerate()
        .filter(|(_, &bj)| bj >= n)
        .map(|(i, _)| tab.rhs(i))
        .sum();
    let scale = 1.0 + b.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    if artificial_sum > 1e-8 * scale {
        return Err(LpError::Infeasible);
    }

    // Drive leftover artificials out of the basis; a row with no usable real
    // column is redundant and gets dropped.
    let mut row = 0;
    while row < tab.rows {
        if tab.basis[row] < n {
            row += 1;
            continue;
        }
        let col = (0..n).find(|&j| tab.at(row, j).abs() > PIVOT_TOLERANCE);
        match col {
            Some(j) => {
                tab.pivot(row, j);
                row += 1;
            }
            None => tab.drop_row(row),
        }
    }

    // Phase 2 over the real columns only.
    tab.optimize(cost, tab.real_cols)?;

    let mut v = vec![0.0; n];
    for (i, &bj) in tab.basis.iter().enumerate() {
        if bj < n {
            v[bj] = tab.rhs(i);
        }
    }
    Ok(v)
}
