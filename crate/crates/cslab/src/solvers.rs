//! Exact desk-scale solvers for the prior-weighted recovery problems and the
//! dual-certificate machinery that certifies ℓ1 uniqueness.
//!
//! `solve_weighted_l0` enumerates candidate supports in order of best-possible
//! weighted 0-norm and returns every minimizer, so its uniqueness verdict is
//! definitive. `solve_weighted_l1` solves the equivalent linear program with a
//! Bland-rule simplex and then certifies uniqueness through the strict dual
//! certificate plus injectivity on the prior/support union; a failed
//! certificate is reported as `Inconclusive`, never as `No`, because the test
//! is only sufficient.

use std::collections::BTreeMap;
use std::fmt;

use crate::linalg;
use crate::matrix::{
    submatrix_columns, CoreError, SensingMatrix, SignalVector, NONZERO_TOLERANCE,
};
use crate::simplex::{self, LpError};
use crate::subsets::{unrank_lex, BinomialTable};
use crate::support::{decompose_support, weighted_norm, NormOrder, SupportDecomposition,
    WeightedNormParams};

/// Largest ambient dimension accepted by the exhaustive ℓ0 solver.
pub const MAX_L0_DIMENSION: usize = 24;

/// Consistency test scale: a support fits when the least-squares residual is
/// at most `CONSISTENCY_TOLERANCE * (1 + max|y_i|)`.
pub const CONSISTENCY_TOLERANCE: f64 = 1e-8;

/// Two weighted 0-norm objectives are considered tied within this tolerance.
const OBJECTIVE_TIE_TOLERANCE: f64 = 1e-9;

/// Minimizer vectors closer than this in max-abs distance count as one.
const VECTOR_MATCH_TOLERANCE: f64 = 1e-9;

/// A certificate is strict when every off-support correlation stays below
/// `1 - STRICTNESS_MARGIN`.
pub const STRICTNESS_MARGIN: f64 = 1e-9;

/// Column submatrices count as full rank when sigma_min > RANK_RATIO * sigma_max.
const RANK_RATIO: f64 = 1e-8;

/// Built certificates must reproduce the target sign vector this closely.
const INTERPOLATION_TOLERANCE: f64 = 1e-9;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum SolveError {
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error("no coefficient vector can reproduce the measurements")]
    Inconsistent,
    #[error("ambient dimension {n} exceeds the enumeration bound {limit}")]
    TooLarge { n: usize, limit: usize },
    #[error("the linear program is unbounded below")]
    Unbounded,
    #[error("selected columns are rank deficient")]
    RankDeficient,
    #[error("bound denominator is not strictly positive")]
    DegenerateDenominator,
}

/// Outcome of a uniqueness determination. `No` is only ever produced by the
/// exhaustive ℓ0 search; the ℓ1 certificate test is sufficient-only and falls
/// back to `Inconclusive`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Uniqueness {
    Yes,
    No,
    Inconclusive,
}

impl fmt::Display for Uniqueness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Uniqueness::Yes => "yes",
            Uniqueness::No => "no",
            Uniqueness::Inconclusive => "inconclusive",
        };
        f.write_str(s)
    }
}

/// Dual vector certifying ℓ1 optimality. `gamma` lives in measurement space;
/// `correlations[i]` is `gamma' a_i` for every column.
#[derive(Debug, Clone)]
pub struct DualCertificate {
    pub gamma: Vec<f64>,
    pub correlations: Vec<f64>,
    pub max_off_support: f64,
    pub strict: bool,
}

#[derive(Debug, Clone)]
pub struct RecoveryResult {
    pub minimizers: Vec<SignalVector>,
    pub objective: f64,
    pub unique: Uniqueness,
    pub residual: f64,
    pub diagnostics: BTreeMap<String, f64>,
    pub certificate: Option<DualCertificate>,
}

fn check_problem_shape(
    a: &SensingMatrix,
    y: &[f64],
    params: &WeightedNormParams,
) -> Result<(), SolveError> {
    if y.len() != a.rows() {
        return Err(CoreError::DimensionMismatch { expected: a.rows(), got: y.len() }.into());
    }
    if params.ambient() != a.cols() {
        return Err(
            CoreError::DimensionMismatch { expected: a.cols(), got: params.ambient() }.into()
        );
    }
    if let Some(bad) = y.iter().position(|v| !v.is_finite()) {
        return Err(CoreError::NonFinite(bad).into());
    }
    Ok(())
}

fn merge_sorted(left: &[usize], right: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(left.len() + right.len());
    let (mut i, mut j) = (0, 0);
    while i < left.len() && j < right.len() {
        if left[i] < right[j] {
            out.push(left[i]);
            i += 1;
        } else {
            out.push(right[j]);
            j += 1;
        }
    }
    out.extend_from_slice(&left[i..]);
    out.extend_from_slice(&right[j..]);
    out
}

fn scatter(n: usize, support: &[usize], coeffs: &[f64]) -> Vec<f64> {
    let mut x = vec![0.0; n];
    for (&idx, &v) in support.iter().zip(coeffs) {
        x[idx] = v;
    }
    x
}

/// Exhaustive weighted ℓ0 minimization. Candidate supports are visited in
/// nondecreasing order of the best objective they could possibly achieve
/// (`w * |S ∩ T| + |S ∩ T^c|`), so the scan stops as soon as the next block
/// can no longer tie the incumbent. Every minimizer is returned; supports
/// whose least-squares solutions coincide as vectors count once.
pub fn solve_weighted_l0(
    a: &SensingMatrix,
    y: &[f64],
    params: &WeightedNormParams,
) -> Result<RecoveryResult, SolveError> {
    check_problem_shape(a, y, params)?;
    let n = a.cols();
    if n > MAX_L0_DIMENSION {
        return Err(SolveError::TooLarge { n, limit: MAX_L0_DIMENSION });
    }
    let tolerance = CONSISTENCY_TOLERANCE * (1.0 + linalg::inf_norm(y));

    let prior = params.prior_support().to_vec();
    let rest: Vec<usize> = (0..n).filter(|i| !params.in_prior(*i)).collect();
    let w = params.weight();

    // Blocks keyed by (|S ∩ T|, |S ∩ T^c|), cheapest attainable objective first.
    let mut blocks = Vec::new();
    for in_prior in 0..=prior.len() {
        for outside in 0..=rest.len() {
            blocks.push((w * in_prior as f64 + outside as f64, in_prior, outside));
        }
    }
    blocks.sort_by(|x, z| {
        x.0.partial_cmp(&z.0)
            .expect("block costs are finite")
            .then((x.1 + x.2).cmp(&(z.1 + z.2)))
            .then(x.1.cmp(&z.1))
    });

    let table = BinomialTable::new(n, n);
    let mut best = f64::INFINITY;
    let mut candidates: Vec<(Vec<f64>, f64, f64)> = Vec::new();
    let mut scanned = 0u64;

    for &(block_cost, in_prior, outside) in &blocks {
        if block_cost > best + OBJECTIVE_TIE_TOLERANCE {
            break;
        }
        let prior_count = table.get(prior.len(), in_prior) as u64;
        let rest_count = table.get(rest.len(), outside) as u64;
        for pr in 0..prior_count {
            let from_prior: Vec<usize> =
                unrank_lex(prior.len(), in_prior, pr, &table).iter().map(|&i| prior[i]).collect();
            for rr in 0..rest_count {
                let from_rest: Vec<usize> =
                    unrank_lex(rest.len(), outside, rr, &table).iter().map(|&i| rest[i]).collect();
                let support = merge_sorted(&from_prior, &from_rest);
                scanned += 1;
                let (coeffs, residual) = linalg::least_squares_min_norm(a, &support, y);
                if residual > tolerance {
                    continue;
                }
                let x = scatter(n, &support, &coeffs);
                let signal = SignalVector::new(x.clone())?;
                let objective = weighted_norm(&signal, NormOrder::Zero, params)?;
                if objective < best - OBJECTIVE_TIE_TOLERANCE {
                    best = objective;
                    candidates.clear();
                    candidates.push((x, objective, residual));
                } else if objective <= best + OBJECTIVE_TIE_TOLERANCE {
                    best = best.min(objective);
                    candidates.push((x, objective, residual));
                }
            }
        }
    }

    if candidates.is_empty() {
        return Err(SolveError::Inconsistent);
    }

    let mut minimizers: Vec<Vec<f64>> = Vec::new();
    let mut residual = 0.0f64;
    for (x, objective, res) in &candidates {
        if *objective > best + OBJECTIVE_TIE_TOLERANCE {
            continue;
        }
        let duplicate = minimizers.iter().any(|kept| {
            kept.iter().zip(x).all(|(p, q)| (p - q).abs() <= VECTOR_MATCH_TOLERANCE)
        });
        if !duplicate {
            minimizers.push(x.clone());
            residual = residual.max(*res);
        }
    }

    let unique = if minimizers.len() == 1 { Uniqueness::Yes } else { Uniqueness::No };
    let mut diagnostics = BTreeMap::new();
    diagnostics.insert("supports_scanned".to_string(), scanned as f64);
    Ok(RecoveryResult {
        minimizers: minimizers
            .into_iter()
            .map(SignalVector::new)
            .collect::<Result<Vec<_>, _>>()?,
        objective: best,
        unique,
        residual,
        diagnostics,
        certificate: None,
    })
}

/// Weighted ℓ1 minimization via the split formulation `x = p - q, p,q >= 0`,
/// which turns the weighted 1-norm objective into the linear cost
/// `sum_i w_i (p_i + q_i)`. Columns `a_i` and `-a_i` are linearly dependent,
/// so no simplex basis activates both halves of a pair and the cost equals
/// the weighted 1-norm at every vertex. Uniqueness is then assessed with the
/// dual certificate built on the prior/support union.
pub fn solve_weighted_l1(
    a: &SensingMatrix,
    y: &[f64],
    params: &WeightedNormParams,
) -> Result<RecoveryResult, SolveError> {
    check_problem_shape(a, y, params)?;
    let (m, n) = (a.rows(), a.cols());

    let mut lp_matrix = vec![0.0; m * 2 * n];
    for r in 0..m {
        for c in 0..n {
            let v = a.entry(r, c);
            lp_matrix[r * 2 * n + c] = v;
            lp_matrix[r * 2 * n + n + c] = -v;
        }
    }
    let mut cost = vec![0.0; 2 * n];
    for i in 0..n {
        cost[i] = params.index_weight(i);
        cost[n + i] = params.index_weight(i);
    }
    let v = simplex::solve_standard_form(m, 2 * n, &lp_matrix, y, &cost).map_err(|e| match e {
        LpError::Infeasible => SolveError::Inconsistent,
        LpError::Unbounded => SolveError::Unbounded,
    })?;

    let x: Vec<f64> = (0..n).map(|i| v[i] - v[n + i]).collect();
    let signal = SignalVector::new(x.clone())?;
    let objective = weighted_norm(&signal, NormOrder::One, params)?;
    let residual = {
        let ax = a.mul(&x)?;
        ax.iter().zip(y).fold(0.0f64, |acc, (l, r)| acc.max((l - r).abs()))
    };

    let decomp = decompose_support(&signal.support(), params.prior_support(), n)?;
    let mut diagnostics = BTreeMap::new();
    let (unique, certificate) =
        match build_certificate(a, &decomp, &signal, params.weight()) {
            Ok(cert) => {
                diagnostics.insert("max_off_support".to_string(), cert.max_off_support);
                diagnostics.insert("union_full_rank".to_string(), 1.0);
                let verdict = verify_l1_uniqueness(a, &decomp, &signal, params.weight(), &cert);
                (verdict, Some(cert))
            }
            Err(SolveError::RankDeficient) => {
                diagnostics.insert("union_full_rank".to_string(), 0.0);
                (Uniqueness::Inconclusive, None)
            }
            Err(other) => return Err(other),
        };

    Ok(RecoveryResult {
        minimizers: vec![signal],
        objective,
        unique,
        residual,
        diagnostics,
        certificate,
    })
}

fn sign_within_tolerance(v: f64) -> f64 {
    if v.abs() <= NONZERO_TOLERANCE {
        0.0
    } else if v > 0.0 {
        1.0
    } else {
        -1.0
    }
}

/// Target sign vector on the prior/support union: `w * sgn(x_i)` on the prior
/// set, `sgn(x_i)` on the unknown part, with sgn(0) = 0.
fn sign_targets(decomp: &SupportDecomposition, x: &SignalVector, w: f64) -> Vec<f64> {
    let prior = decomp.prior_support();
    decomp
        .union_with_prior()
        .iter()
        .map(|&i| {
            let s = sign_within_tolerance(x.values()[i]);
            if prior.binary_search(&i).is_ok() {
                w * s
            } else {
                s
            }
        })
        .collect()
}

fn union_has_full_rank(a: &SensingMatrix, union: &[usize]) -> bool {
    if union.is_empty() {
        return true;
    }
    let Ok(sub) = submatrix_columns(a, union) else {
        return false;
    };
    let (lo, hi) = linalg::column_sv_extremes(&sub, &(0..union.len()).collect::<Vec<_>>());
    lo > RANK_RATIO * hi
}

/// Builds the least-norm dual interpolant on `S = T ∪ Δ`:
/// `gamma = A_S (A_S' A_S)^{-1} c_S` with `c` the weighted sign targets, so
/// `gamma' a_i = c_i` exactly on `S`. Off-support correlations are reported in
/// full together with the strictness flag `max_{i ∉ S} |gamma' a_i| < 1 - 1e-9`.
pub fn build_certificate(
    a: &SensingMatrix,
    decomp: &SupportDecomposition,
    x: &SignalVector,
    w: f64,
) -> Result<DualCertificate, SolveError> {
    if x.len() != a.cols() || decomp.ambient() != a.cols() {
        return Err(CoreError::DimensionMismatch { expected: a.cols(), got: x.len() }.into());
    }
    let union = decomp.union_with_prior();
    let m = a.rows();

    let gamma = if union.is_empty() {
        vec![0.0; m]
    } else {
        if !union_has_full_rank(a, &union) {
            return Err(SolveError::RankDeficient);
        }
        let sub = submatrix_columns(a, &union)?;
        let local: Vec<usize> = (0..union.len()).collect();
        let g = linalg::gram(&sub, &local);
        let c = sign_targets(decomp, x, w);
        let u = linalg::solve_sym_system(union.len(), &g, &c)
            .ok_or(SolveError::RankDeficient)?;
        let mut gamma = vec![0.0; m];
        for (j, &col) in union.iter().enumerate() {
            for (r, g_r) in gamma.iter_mut().enumerate() {
                *g_r += u[j] * a.entry(r, col);
            }
        }
        gamma
    };

    let correlations: Vec<f64> = (0..a.cols()).map(|i| a.col_dot_vec(i, &gamma)).collect();
    let mut max_off_support = 0.0f64;
    for (i, corr) in correlations.iter().enumerate() {
        if union.binary_search(&i).is_err() {
            max_off_support = max_off_support.max(corr.abs());
        }
    }
    let strict = max_off_support < 1.0 - STRICTNESS_MARGIN;
    Ok(DualCertificate { gamma, correlations, max_off_support, strict })
}

/// Sufficient uniqueness test for the weighted ℓ1 problem: `Yes` exactly when
/// the certificate is strict, it still interpolates the weighted signs on the
/// union, and the union columns are injective. Anything else is
/// `Inconclusive`; failure of a sufficient test proves nothing.
pub fn verify_l1_uniqueness(
    a: &SensingMatrix,
    decomp: &SupportDecomposition,
    x: &SignalVector,
    w: f64,
    cert: &DualCertificate,
) -> Uniqueness {
    if cert.correlations.len() != a.cols() || x.len() != a.cols() {
        return Uniqueness::Inconclusive;
    }
    if !cert.strict {
        return Uniqueness::Inconclusive;
    }
    let union = decomp.union_with_prior();
    let targets = sign_targets(decomp, x, w);
    let interpolates = union
        .iter()
        .zip(&targets)
        .all(|(&i, &c)| (cert.correlations[i] - c).abs() <= INTERPOLATION_TOLERANCE);
    if !interpolates {
        return Uniqueness::Inconclusive;
    }
    if union_has_full_rank(a, &union) {
        Uniqueness::Yes
    } else {
        Uniqueness::Inconclusive
    }
}

/// Closed-form bound on off-support correlations of the least-norm dual
/// interpolant: `theta_s / ((1 - delta_s - theta_s_2s) * sqrt(s)) * c_norm`.
pub fn certificate_bound(
    delta_s: f64,
    theta_s: f64,
    theta_s_2s: f64,
    s: usize,
    c_norm: f64,
) -> Result<f64, SolveError> {
    for (pos, v) in [delta_s, theta_s, theta_s_2s, c_norm].into_iter().enumerate() {
        if !v.is_finite() || v < 0.0 {
            return Err(CoreError::NonFinite(pos).into());
        }
    }
    let denominator = 1.0 - delta_s - theta_s_2s;
    if denominator <= 0.0 || s == 0 {
        return Err(SolveError::DegenerateDenominator);
    }
    Ok(theta_s / (denominator * (s as f64).sqrt()) * c_norm)
}
