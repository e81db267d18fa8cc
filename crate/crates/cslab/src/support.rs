//! Support-set bookkeeping and weighted norms.
//!
//! The recovery problems treated here get a *prior support estimate* `T`
//! alongside the measurements. A signal's true support `N` splits against it
//! into the overlap `T ∩ N`, the unknown part `Δ = N \ T`, and the prior's
//! error `E = T \ N`. Conditions and solvers are stated in terms of the
//! cardinalities of those pieces, so the decomposition is computed once and
//! carried around as a value.
//!
//! The weighted norm discounts (or ignores, at weight 0) the part of a signal
//! lying on `T`: `|x|_{p,w} = w * |x_T|_p + |x_{T^c}|_p` for `p` in `{0, 1}`.

use crate::matrix::{CoreError, SignalVector, NONZERO_TOLERANCE};

/// Split of a true support `N` against a prior support estimate `T`,
/// inside ambient dimension `n`.
///
/// All index sets are strictly increasing and duplicate-free. `overlap` and
/// `unknown` partition `true_support`; `overlap` and `false_prior` partition
/// `prior_support`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SupportDecomposition {
    ambient: usize,
    true_support: Vec<usize>,
    prior_support: Vec<usize>,
    overlap: Vec<usize>,
    unknown: Vec<usize>,
    false_prior: Vec<usize>,
}

impl SupportDecomposition {
    pub fn ambient(&self) -> usize {
        self.ambient
    }

    /// `N`, the indices the signal actually lives on.
    pub fn true_support(&self) -> &[usize] {
        &self.true_support
    }

    /// `T`, the prior estimate of the support.
    pub fn prior_support(&self) -> &[usize] {
        &self.prior_support
    }

    /// `T ∩ N`.
    pub fn overlap(&self) -> &[usize] {
        &self.overlap
    }

    /// `Δ = N \ T`, the part of the support the prior missed.
    pub fn unknown(&self) -> &[usize] {
        &self.unknown
    }

    /// `E = T \ N`, the part of the prior that is wrong.
    pub fn false_prior(&self) -> &[usize] {
        &self.false_prior
    }

    /// `s = |N|`.
    pub fn sparsity(&self) -> usize {
        self.true_support.len()
    }

    /// `k = |T|`.
    pub fn prior_len(&self) -> usize {
        self.prior_support.len()
    }

    /// `t = |T ∩ N|`.
    pub fn overlap_len(&self) -> usize {
        self.overlap.len()
    }

    /// `u = |N \ T|`.
    pub fn unknown_len(&self) -> usize {
        self.unknown.len()
    }

    /// `e = |T \ N|`.
    pub fn false_prior_len(&self) -> usize {
        self.false_prior.len()
    }

    /// `T ∪ Δ = T ∪ N`, the union certificates interpolate on.
    pub fn union_with_prior(&self) -> Vec<usize> {
        merge_sorted(&self.prior_support, &self.unknown)
    }
}

/// Sorts, dedupes, and range-checks an index list.
fn normalize_set(raw: &[usize], n: usize) -> Result<Vec<usize>, CoreError> {
    let mut v = raw.to_vec();
    v.sort_unstable();
    v.dedup();
    if let Some(&bad) = v.last() {
        if bad >= n {
            return Err(CoreError::IndexOutOfRange { index: bad, n });
        }
    }
    Ok(v)
}

fn merge_sorted(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    out.extend_from_slice(a);
    out.extend_from_slice(b);
    out.sort_unstable();
    out.dedup();
    out
}

/// Splits `true_support` against `prior_support` within `[0, n)`.
///
/// Inputs may arrive in any order and with duplicates; they are normalized
/// to sorted duplicate-free sets first.
pub fn decompose_support(
    true_support: &[usize],
    prior_support: &[usize],
    n: usize,
) -> Result<SupportDecomposition, CoreError> {
    let ns = normalize_set(true_support, n)?;
    let ts = normalize_set(prior_support, n)?;
    let mut overlap = Vec::new();
    let mut unknown = Vec::new();
    for &i in &ns {
        if ts.binary_search(&i).is_ok() {
            overlap.push(i);
        } else {
            unknown.push(i);
        }
    }
    let false_prior: Vec<usize> =
        ts.iter().copied().filter(|i| ns.binary_search(i).is_err()).collect();
    Ok(SupportDecomposition {
        ambient: n,
        true_support: ns,
        prior_support: ts,
        overlap,
        unknown,
        false_prior,
    })
}

/// Which weighted norm to evaluate: the counting norm or the absolute-sum norm.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormOrder {
    Zero,
    One,
}

/// Prior support `T` plus the weight `w ∈ [0, 1]` applied to it, pinned to an
/// ambient dimension so vectors can be validated against it.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedNormParams {
    ambient: usize,
    prior_support: Vec<usize>,
    weight: f64,
}

impl WeightedNormParams {
    pub fn new(ambient: usize, prior_support: &[usize], weight: f64) -> Result<Self, CoreError> {
        if !(0.0..=1.0).contains(&weight) {
            return Err(CoreError::WeightOutOfRange(weight));
        }
        let prior_support = normalize_set(prior_support, ambient)?;
        Ok(Self { ambient, prior_support, weight })
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn prior_support(&self) -> &[usize] {
        &self.prior_support
    }

    pub fn weight(&self) -> f64 {
        self.weight
    }

    pub fn in_prior(&self, index: usize) -> bool {
        self.prior_support.binary_search(&index).is_ok()
    }

    /// Per-index weight: `w` on the prior support, `1` elsewhere.
    pub fn index_weight(&self, index: usize) -> f64 {
        if self.in_prior(index) {
            self.weight
        } else {
            1.0
        }
    }
}

/// Evaluates `w * |x_T|_p + |x_{T^c}|_p`.
///
/// For `p = 0` an entry counts as nonzero when `|x_i| > 1e-12`; for `p = 1`
/// the exact absolute values are summed. At `w = 1` this is the ordinary
/// l0 count or l1 norm.
pub fn weighted_norm(
    x: &SignalVector,
    order: NormOrder,
    params: &WeightedNormParams,
) -> Result<f64, CoreError> {
    if x.len() != params.ambient() {
        return Err(CoreError::DimensionMismatch { expected: params.ambient(), got: x.len() });
    }
    let mut acc = 0.0;
    for (i, &v) in x.values().iter().enumerate() {
        let contribution = match order {
            NormOrder::Zero => {
                if v.abs() > NONZERO_TOLERANCE {
                    1.0
                } else {
                    0.0
                }
            }
            NormOrder::One => v.abs(),
        };
        acc += params.index_weight(i) * contribution;
    }
    Ok(acc)
}
