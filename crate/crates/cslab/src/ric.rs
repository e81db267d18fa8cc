//! Restricted isometry and restricted orthogonality constants.
//!
//! `delta_exact` computes the order-`k` restricted isometry constant by
//! enumerating every size-`k` column subset and taking
//! `max(lambda_max - 1, 1 - lambda_min)` of the subset Gram matrix; a
//! rank-deficient Gram naturally yields a value of at least 1, with no
//! special-casing. `theta_exact` computes the `(s, s~)` restricted
//! orthogonality constant as the largest top singular value of `A_T' A_T~`
//! over all disjoint set pairs with `|T| = s`, `|T~| = s~` (the maximum over
//! sets of *at most* those sizes is attained at exact sizes, since adding a
//! column can only grow the top singular value).
//!
//! Exact enumeration refuses to start when the subset count exceeds a cap;
//! there is deliberately no silent fallback to sampling. The `*_sampled`
//! variants give seeded lower bounds instead. Each sampled trial derives its
//! own generator from `(seed, trial_index)`, so parallel execution is
//! deterministic.

use crate::linalg;
use crate::matrix::SensingMatrix;
use crate::rng;
use crate::subsets::{
    binomial, max_over_ranks, max_over_ranks_seq, sample_combination, sample_indices, unrank_lex,
    BinomialTable,
};
use thiserror::Error;

/// Default ceiling on exact enumeration, in subsets (or subset pairs).
pub const DEFAULT_ENUM_CAP: u64 = 2_000_000;

#[derive(Debug, Error, PartialEq)]
pub enum RicError {
    #[error("order {order} invalid for a matrix with {n} columns")]
    BadOrder { order: usize, n: usize },
    #[error("exact enumeration needs {required} subsets, cap is {cap}")]
    CapExceeded { required: u128, cap: u64 },
    #[error("sampled estimate needs at least one trial")]
    NoTrials,
}

/// How a reported constant was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RicMode {
    Exact,
    SampledLowerBound,
}

impl std::fmt::Display for RicMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RicMode::Exact => write!(f, "exact"),
            RicMode::SampledLowerBound => write!(f, "sampled-lower-bound"),
        }
    }
}

/// Which constant a report describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RicOrder {
    Delta { k: usize },
    Theta { s: usize, s_tilde: usize },
}

impl std::fmt::Display for RicOrder {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RicOrder::Delta { k } => write!(f, "delta_{k}"),
            RicOrder::Theta { s, s_tilde } => write!(f, "theta_{s},{s_tilde}"),
        }
    }
}

/// Result of one constant computation.
#[derive(Debug, Clone, PartialEq)]
pub struct RicReport {
    pub order: RicOrder,
    pub value: f64,
    pub mode: RicMode,
    /// Subsets (or pairs) actually evaluated.
    pub subsets_enumerated: u64,
    /// Random trials consumed; 0 in exact mode.
    pub samples_used: u64,
}

fn delta_of_subset(a: &SensingMatrix, subset: &[usize]) -> f64 {
    let (lo, hi) = linalg::gram_eig_extremes(a, subset);
    (hi - 1.0).max(1.0 - lo)
}

fn check_delta_order(a: &SensingMatrix, k: usize) -> Result<(), RicError> {
    if k < 1 || k > a.cols() {
        return Err(RicError::BadOrder { order: k, n: a.cols() });
    }
    Ok(())
}

fn delta_exact_impl(
    a: &SensingMatrix,
    k: usize,
    cap: u64,
    force_seq: bool,
) -> Result<RicReport, RicError> {
    check_delta_order(a, k)?;
    let required = binomial(a.cols(), k);
    if required > cap as u128 {
        return Err(RicError::CapExceeded { required, cap });
    }
    let count = required as u64;
    let table = BinomialTable::new(a.cols(), k);
    let eval = |rank: u64| delta_of_subset(a, &unrank_lex(a.cols(), k, rank, &table));
    let value = if force_seq {
        max_over_ranks_seq(count, eval)
    } else {
        max_over_ranks(count, eval)
    };
    Ok(RicReport {
        order: RicOrder::Delta { k },
        value,
        mode: RicMode::Exact,
        subsets_enumerated: count,
        samples_used: 0,
    })
}

/// Exact `delta_k` by full enumeration of the `C(n, k)` column subsets.
pub fn delta_exact(a: &SensingMatrix, k: usize, cap: u64) -> Result<RicReport, RicError> {
    delta_exact_impl(a, k, cap, false)
}

/// Single-threaded `delta_exact`; the default entry point uses the thread
/// pool when the `parallel` feature is on.
pub fn delta_exact_seq(a: &SensingMatrix, k: usize, cap: u64) -> Result<RicReport, RicError> {
    delta_exact_impl(a, k, cap, true)
}

fn check_theta_orders(a: &SensingMatrix, s: usize, s_tilde: usize) -> Result<(), RicError> {
    if s < 1 || s > a.cols() {
        return Err(RicError::BadOrder { order: s, n: a.cols() });
    }
    if s_tilde < 1 || s + s_tilde > a.cols() {
        return Err(RicError::BadOrder { order: s_tilde, n: a.cols() });
    }
    Ok(())
}

fn complement_of(sorted: &[usize], n: usize) -> Vec<usize> {
    let mut out = Vec::with_capacity(n - sorted.len());
    let mut it = sorted.iter().peekable();
    for i in 0..n {
        if it.peek() == Some(&&i) {
            it.next();
        } else {
            out.push(i);
        }
    }
    out
}

fn theta_exact_impl(
    a: &SensingMatrix,
    s: usize,
    s_tilde: usize,
    cap: u64,
    force_seq: bool,
) -> Result<RicReport, RicError> {
    check_theta_orders(a, s, s_tilde)?;
    let n = a.cols();
    let outer = binomial(n, s);
    let inner = binomial(n - s, s_tilde);
    let required = outer.saturating_mul(inner);
    if required > cap as u128 {
        return Err(RicError::CapExceeded { required, cap });
    }
    let outer_table = BinomialTable::new(n, s);
    let inner_table = BinomialTable::new(n - s, s_tilde);
    let inner = inner as u64;
    // One rank per outer subset; the inner scan is cheap enough to stay
    // serial inside each work item.
    let eval = |outer_rank: u64| {
        let first = unrank_lex(n, s, outer_rank, &outer_table);
        let rest = complement_of(&first, n);
        let mut best = f64::NEG_INFINITY;
        for inner_rank in 0..inner {
            let picked = unrank_lex(rest.len(), s_tilde, inner_rank, &inner_table);
            let second: Vec<usize> = picked.iter().map(|&i| rest[i]).collect();
            best = best.max(linalg::sigma_max_cross(a, &first, &second));
        }
        best
    };
    let value = if force_seq {
        max_over_ranks_seq(outer as u64, eval)
    } else {
        max_over_ranks(outer as u64, eval)
    };
    Ok(RicReport {
        order: RicOrder::Theta { s, s_tilde },
        value,
        mode: RicMode::Exact,
        subsets_enumerated: (outer as u64) * inner,
        samples_used: 0,
    })
}

/// Exact `theta_{s, s~}` over all disjoint subset pairs of exactly those sizes.
pub fn theta_exact(
    a: &SensingMatrix,
    s: usize,
    s_tilde: usize,
    cap: u64,
) -> Result<RicReport, RicError> {
    theta_exact_impl(a, s, s_tilde, cap, false)
}

/// Single-threaded `theta_exact`.
pub fn theta_exact_seq(
    a: &SensingMatrix,
    s: usize,
    s_tilde: usize,
    cap: u64,
) -> Result<RicReport, RicError> {
    theta_exact_impl(a, s, s_tilde, cap, true)
}

/// Seeded lower bound on `delta_k` from uniformly sampled subsets.
/// Trial `i` draws from `rng::stream(seed, i)`.
pub fn delta_sampled(
    a: &SensingMatrix,
    k: usize,
    trials: u64,
    seed: u64,
) -> Result<RicReport, RicError> {
    check_delta_order(a, k)?;
    if trials == 0 {
        return Err(RicError::NoTrials);
    }
    let eval = |trial: u64| {
        let mut rng = rng::stream(seed, trial);
        delta_of_subset(a, &sample_combination(a.cols(), k, &mut rng))
    };
    let value = max_over_ranks(trials, eval);
    Ok(RicReport {
        order: RicOrder::Delta { k },
        value,
        mode: RicMode::SampledLowerBound,
        subsets_enumerated: trials,
        samples_used: trials,
    })
}

/// Seeded lower bound on `theta_{s, s~}` from uniformly sampled disjoint pairs.
pub fn theta_sampled(
    a: &SensingMatrix,
    s: usize,
    s_tilde: usize,
    trials: u64,
    seed: u64,
) -> Result<RicReport, RicError> {
    check_theta_orders(a, s, s_tilde)?;
    if trials == 0 {
        return Err(RicError::NoTrials);
    }
    let eval = |trial: u64| {
        let mut rng = rng::stream(seed, trial);
        let picked = sample_indices(a.cols(), s + s_tilde, &mut rng);
        let mut first = picked[..s].to_vec();
        let mut second = picked[s..].to_vec();
        first.sort_unstable();
        second.sort_unstable();
        linalg::sigma_max_cross(a, &first, &second)
    };
    let value = max_over_ranks(trials, eval);
    Ok(RicReport {
        order: RicOrder::Theta { s, s_tilde },
        value,
        mode: RicMode::SampledLowerBound,
        subsets_enumerated: trials,
        samples_used: trials,
    })
}
