//! Lexicographic k-subset enumeration.
//!
//! Subsets are addressed by rank so the scan can be split anywhere: every
//! consumer reduces with `max`, which is associative and commutative, so the
//! result is identical however the rank range is partitioned.

use rand::Rng;

/// Pascal's triangle rows up to `n`, truncated at column `k_max`, saturating
/// instead of overflowing. Gives O(1) lookups during unranking.
pub(crate) struct BinomialTable {
    k_max: usize,
    v: Vec<u128>,
}

impl BinomialTable {
    pub(crate) fn new(n: usize, k_max: usize) -> Self {
        let width = k_max + 1;
        let mut v = vec![0u128; (n + 1) * width];
        for i in 0..=n {
            v[i * width] = 1;
            for j in 1..=k_max.min(i) {
                let a = v[(i - 1) * width + j - 1];
                let b = v[(i - 1) * width + j];
                v[i * width + j] = a.saturating_add(b);
            }
        }
        Self { k_max, v }
    }

    pub(crate) fn get(&self, n: usize, k: usize) -> u128 {
        if k > n || k > self.k_max {
            return 0;
        }
        self.v[n * (self.k_max + 1) + k]
    }
}

/// `C(n, k)`, saturating at `u128::MAX`.
pub(crate) fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = match acc.checked_mul((n - i) as u128) {
            Some(prod) => prod / (i as u128 + 1),
            None => return u128::MAX,
        };
    }
    acc
}

/// The `rank`-th `k`-subset of `{0, .., n-1}` in lexicographic order.
/// Callers must have checked `rank < C(n, k)` and that the total count fits
/// in `u64` (it does whenever an enumeration cap was enforced).
pub(crate) fn unrank_lex(n: usize, k: usize, rank: u64, table: &BinomialTable) -> Vec<usize> {
    let mut out = Vec::with_capacity(k);
    let mut r = rank as u128;
    let mut x = 0usize;
    for pos in 0..k {
        loop {
            let c = table.get(n - 1 - x, k - 1 - pos);
            if r < c {
                out.push(x);
                x += 1;
                break;
            }
            r -= c;
            x += 1;
        }
    }
    out
}

/// Max of `eval` over ranks `0..count`. Fans out over the global thread pool
/// when the `parallel` feature is enabled.
#[cfg(feature = "parallel")]
pub(crate) fn max_over_ranks<F>(count: u64, eval: F) -> f64
where
    F: Fn(u64) -> f64 + Sync + Send,
{
    use rayon::prelude::*;
    (0..count)
        .into_par_iter()
        .map(eval)
        .reduce(|| f64::NEG_INFINITY, f64::max)
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn max_over_ranks<F>(count: u64, eval: F) -> f64
where
    F: Fn(u64) -> f64 + Sync,
{
    max_over_ranks_seq(count, eval)
}

/// Single-threaded variant, kept callable unconditionally so the two paths
/// can be compared directly.
pub(crate) fn max_over_ranks_seq<F>(count: u64, eval: F) -> f64
where
    F: Fn(u64) -> f64 + Sync,
{
    (0..count).map(eval).fold(f64::NEG_INFINITY, f64::max)
}

/// Uniform ordered selection of `k` distinct indices from `{0, .., n-1}`.
/// Partial Fisher-Yates over an index array; consumes exactly `k` bounded
/// draws from `rng`. Unsorted, so a prefix/suffix split of the result is a
/// uniform pair of disjoint sets.
pub(crate) fn sample_indices<R: Rng>(n: usize, k: usize, rng: &mut R) -> Vec<usize> {
    debug_assert!(k <= n);
    let mut idx: Vec<usize> = (0..n).collect();
    for i in 0..k {
        let j = rng.random_range(i..n);
        idx.swap(i, j);
    }
    idx.truncate(k);
    idx
}

/// Uniform random `k`-subset of `{0, .., n-1}`, sorted.
pub(crate) fn sample_combination<R: Rng>(n: usize, k: usize, rng: &mut R) -> Vec<usize> {
    let mut out = sample_indices(n, k, rng);
    out.sort_unstable();
    out
}
