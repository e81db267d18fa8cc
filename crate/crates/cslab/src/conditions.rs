//! Sufficient conditions for recovery, evaluated as explicit comparisons.
//!
//! Each checker is a pure function of precomputed constants (`delta_k`,
//! `theta_{s,s~}`, coherence) and the support cardinalities; wiring a sensing
//! matrix to the right constants is the harness's job. A checker returns a
//! [`ConditionVerdict`] recording the comparison it performed: left-hand
//! side, threshold, and whether the condition holds. Comparisons are strict
//! (`lhs < threshold`) in plain f64 arithmetic, with no epsilon slack: a
//! borderline "fails" is the honest answer for a sufficient condition.
//!
//! Compound conditions fold their clauses into a single normalized `lhs` so
//! the invariant `holds == (lhs < threshold)` survives; the individual
//! clauses are retained in `inputs`. An unsatisfiable side hypothesis (such
//! as `u <= k`) is encoded as `lhs = +inf`.

use std::collections::BTreeMap;

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ConditionError {
    #[error("constant {0} is negative")]
    NegativeConstant(&'static str),
    #[error("delta for the prior order is {0}, must be < 1")]
    DeltaKTooLarge(f64),
    #[error("missing constant {0:?}")]
    MissingConstant(VaswaniConstant),
    #[error("invalid decomposition: {0}")]
    BadDecomposition(String),
    #[error("prior support and unknown part are both empty")]
    EmptySupportUnion,
}

/// Identifies a condition; `Display` gives the stable short name used in CSV
/// output and on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum ConditionName {
    CandesL0,
    CandesL1,
    CoherenceL1,
    VaswaniL0,
    VaswaniL1,
    VaswaniCorollary,
    WeightedL0,
    WeightedL1,
    WeightedL1RicOnly,
}

/// All conditions in their canonical reporting order.
pub const ALL_CONDITIONS: [ConditionName; 9] = [
    ConditionName::CandesL0,
    ConditionName::CandesL1,
    ConditionName::CoherenceL1,
    ConditionName::VaswaniL0,
    ConditionName::VaswaniL1,
    ConditionName::VaswaniCorollary,
    ConditionName::WeightedL0,
    ConditionName::WeightedL1,
    ConditionName::WeightedL1RicOnly,
];

impl std::fmt::Display for ConditionName {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            ConditionName::CandesL0 => "candes0",
            ConditionName::CandesL1 => "candes1",
            ConditionName::CoherenceL1 => "coherence",
            ConditionName::VaswaniL0 => "vaswani0",
            ConditionName::VaswaniL1 => "vaswani1",
            ConditionName::VaswaniCorollary => "vaswani-cor",
            ConditionName::WeightedL0 => "w0",
            ConditionName::WeightedL1 => "w1",
            ConditionName::WeightedL1RicOnly => "w1-ric",
        };
        f.write_str(s)
    }
}

impl std::str::FromStr for ConditionName {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ALL_CONDITIONS
            .iter()
            .copied()
            .find(|c| c.to_string() == s)
            .ok_or_else(|| format!("unknown condition name: {s}"))
    }
}

/// Outcome of one condition check.
///
/// `holds` is `lhs < threshold` exactly, and always `false` when
/// `degenerate` is set (a denominator collapsed or a needed constant does
/// not exist at this decomposition, so nothing is established).
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionVerdict {
    pub name: ConditionName,
    pub lhs: f64,
    pub threshold: f64,
    pub holds: bool,
    pub degenerate: bool,
    /// Constants that actually entered the comparison, by name.
    pub inputs: BTreeMap<String, f64>,
    /// The isometry order the comparison consumed, when the checker can
    /// derive it from its arguments.
    pub order_used: Option<usize>,
}

fn verdict(
    name: ConditionName,
    lhs: f64,
    threshold: f64,
    degenerate: bool,
    inputs: BTreeMap<String, f64>,
    order_used: Option<usize>,
) -> ConditionVerdict {
    ConditionVerdict {
        name,
        lhs,
        threshold,
        holds: !degenerate && lhs < threshold,
        degenerate,
        inputs,
        order_used,
    }
}

fn require_nonnegative(value: f64, label: &'static str) -> Result<(), ConditionError> {
    if value < 0.0 {
        return Err(ConditionError::NegativeConstant(label));
    }
    Ok(())
}

fn require_weight(w: f64) -> Result<(), ConditionError> {
    if !(0.0..=1.0).contains(&w) {
        return Err(ConditionError::BadDecomposition(format!("weight {w} outside [0, 1]")));
    }
    Ok(())
}

fn map(entries: &[(&str, f64)]) -> BTreeMap<String, f64> {
    entries.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

/// Exact-recovery condition for plain l0 minimization: `delta_{2s} < 1`.
pub fn check_candes_l0(delta_2s: f64) -> Result<ConditionVerdict, ConditionError> {
    require_nonnegative(delta_2s, "delta_2s")?;
    Ok(verdict(
        ConditionName::CandesL0,
        delta_2s,
        1.0,
        false,
        map(&[("delta_2s", delta_2s)]),
        None,
    ))
}

/// l1 equivalence condition: `delta_s + theta_{s,s} + theta_{2s,s} < 1`.
pub fn check_candes_l1(
    delta_s: f64,
    theta_s_s: f64,
    theta_2s_s: f64,
) -> Result<ConditionVerdict, ConditionError> {
    require_nonnegative(delta_s, "delta_s")?;
    require_nonnegative(theta_s_s, "theta_s_s")?;
    require_nonnegative(theta_2s_s, "theta_2s_s")?;
    let lhs = delta_s + theta_s_s + theta_2s_s;
    Ok(verdict(
        ConditionName::CandesL1,
        lhs,
        1.0,
        false,
        map(&[
            ("delta_s", delta_s),
            ("theta_s_s", theta_s_s),
            ("theta_2s_s", theta_2s_s),
        ]),
        None,
    ))
}

/// Coherence-based l0/l1 equivalence: sparsity `< (1 + 1/mu) / 2`.
///
/// An (effectively) orthogonal matrix, `mu <= 1e-14`, makes the condition
/// vacuous: the verdict reports `threshold = +inf` and holds.
pub fn check_coherence_l1(mu: f64, sparsity: usize) -> Result<ConditionVerdict, ConditionError> {
    require_nonnegative(mu, "mu")?;
    let lhs = sparsity as f64;
    let threshold = if mu <= 1e-14 { f64::INFINITY } else { 0.5 * (1.0 + 1.0 / mu) };
    Ok(verdict(
        ConditionName::CoherenceL1,
        lhs,
        threshold,
        false,
        map(&[("mu", mu), ("sparsity", lhs)]),
        None,
    ))
}

/// Prior-support l0 condition: `delta_{k+2u} < 1`.
pub fn check_vaswani_l0(delta_k_plus_2u: f64) -> Result<ConditionVerdict, ConditionError> {
    require_nonnegative(delta_k_plus_2u, "delta_k_plus_2u")?;
    Ok(verdict(
        ConditionName::VaswaniL0,
        delta_k_plus_2u,
        1.0,
        false,
        map(&[("delta_k_plus_2u", delta_k_plus_2u)]),
        None,
    ))
}

/// Value of the interference ratio, or a marker that its denominator
/// collapsed and the ratio carries no information.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RhoValue {
    Value(f64),
    Degenerate,
}

/// The ratio `rho_k(s, s~)` used by the prior-support l1 condition:
///
/// ```text
/// (theta_{s~,s} + theta_{s~,k} * theta_{s,k} / (1 - delta_k))
/// -----------------------------------------------------------
/// (1 - delta_s - theta_{s,k}^2 / (1 - delta_k))
/// ```
///
/// Arguments are the five constants in that formula: `theta_cross` is
/// `theta_{s~,s}`, `theta_second_prior` is `theta_{s~,k}`,
/// `theta_first_prior` is `theta_{s,k}`, then `delta_k` and `delta_s`.
/// Returns [`RhoValue::Degenerate`] when the outer denominator is
/// `<= 1e-12`.
pub fn rho_k(
    theta_cross: f64,
    theta_second_prior: f64,
    theta_first_prior: f64,
    delta_prior: f64,
    delta_first: f64,
) -> Result<RhoValue, ConditionError> {
    require_nonnegative(theta_cross, "theta_cross")?;
    require_nonnegative(theta_second_prior, "theta_second_prior")?;
    require_nonnegative(theta_first_prior, "theta_first_prior")?;
    require_nonnegative(delta_prior, "delta_prior")?;
    require_nonnegative(delta_first, "delta_first")?;
    if delta_prior >= 1.0 {
        return Err(ConditionError::DeltaKTooLarge(delta_prior));
    }
    let inner = 1.0 - delta_prior;
    let numer = theta_cross + theta_second_prior * theta_first_prior / inner;
    let denom = 1.0 - delta_first - theta_first_prior * theta_first_prior / inner;
    if denom <= 1e-12 {
        return Ok(RhoValue::Degenerate);
    }
    Ok(RhoValue::Value(numer / denom))
}

/// Keys for the constants [`check_vaswani_l1`] consumes. Names follow the
/// orders involved: the prior size `k`, the unknown-part size `u`, and `2u`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum VaswaniConstant {
    DeltaKPlusU,
    Delta2U,
    DeltaK,
    DeltaU,
    ThetaK2U,
    ThetaU2U,
    ThetaUK,
    Theta2UK,
    ThetaUU,
}

fn fetch(
    constants: &BTreeMap<VaswaniConstant, f64>,
    key: VaswaniConstant,
) -> Result<f64, ConditionError> {
    let v = *constants.get(&key).ok_or(ConditionError::MissingConstant(key))?;
    if v < 0.0 {
        return Err(ConditionError::NegativeConstant("vaswani constant"));
    }
    Ok(v)
}

/// Prior-support l1 condition. Three clauses, all required:
///
/// 1. `delta_{k+u} < 1`
/// 2. `delta_{2u} + delta_k + theta_{k,2u}^2 < 1`
/// 3. `rho_k(2u, u) + rho_k(u, u) < 1`
///
/// The reported `lhs` is the max of the three clause values, against
/// threshold 1; clause values and the two ratios land in `inputs`. A
/// degenerate ratio (or `delta_k >= 1`) makes the verdict degenerate.
pub fn check_vaswani_l1(
    constants: &BTreeMap<VaswaniConstant, f64>,
) -> Result<ConditionVerdict, ConditionError> {
    use VaswaniConstant::*;
    let delta_ku = fetch(constants, DeltaKPlusU)?;
    let delta_2u = fetch(constants, Delta2U)?;
    let delta_k = fetch(constants, DeltaK)?;
    let delta_u = fetch(constants, DeltaU)?;
    let theta_k_2u = fetch(constants, ThetaK2U)?;
    let theta_u_2u = fetch(constants, ThetaU2U)?;
    let theta_u_k = fetch(constants, ThetaUK)?;
    let theta_2u_k = fetch(constants, Theta2UK)?;
    let theta_u_u = fetch(constants, ThetaUU)?;

    let clause_a = delta_ku;
    let clause_b = delta_2u + delta_k + theta_k_2u * theta_k_2u;

    let mut inputs = map(&[
        ("delta_k_plus_u", delta_ku),
        ("delta_2u", delta_2u),
        ("delta_k", delta_k),
        ("delta_u", delta_u),
        ("theta_k_2u", theta_k_2u),
        ("theta_u_2u", theta_u_2u),
        ("theta_u_k", theta_u_k),
        ("theta_2u_k", theta_2u_k),
        ("theta_u_u", theta_u_u),
        ("clause_isometry", clause_a),
        ("clause_mixed", clause_b),
    ]);

    // rho_k(2u, u): first order 2u, second order u.
    let rho_a = match rho_k(theta_u_2u, theta_u_k, theta_2u_k, delta_k, delta_2u) {
        Ok(v) => v,
        Err(ConditionError::DeltaKTooLarge(_)) => RhoValue::Degenerate,
        Err(e) => return Err(e),
    };
    // rho_k(u, u).
    let rho_b = match rho_k(theta_u_u, theta_u_k, theta_u_k, delta_k, delta_u) {
        Ok(v) => v,
        Err(ConditionError::DeltaKTooLarge(_)) => RhoValue::Degenerate,
        Err(e) => return Err(e),
    };

    match (rho_a, rho_b) {
        (RhoValue::Value(ra), RhoValue::Value(rb)) => {
            let clause_c = ra + rb;
            inputs.insert("rho_2u_u".to_string(), ra);
            inputs.insert("rho_u_u".to_string(), rb);
            inputs.insert("clause_ratios".to_string(), clause_c);
            let lhs = clause_a.max(clause_b).max(clause_c);
            Ok(verdict(ConditionName::VaswaniL1, lhs, 1.0, false, inputs, None))
        }
        _ => Ok(verdict(ConditionName::VaswaniL1, f64::INFINITY, 1.0, true, inputs, None)),
    }
}

/// Corollary form of the prior-support l1 condition: `u <= k` and
/// `delta_{k+2u} < 1/5`.
pub fn check_vaswani_corollary(
    delta_k_plus_2u: f64,
    k: usize,
    u: usize,
) -> Result<ConditionVerdict, ConditionError> {
    require_nonnegative(delta_k_plus_2u, "delta_k_plus_2u")?;
    let hypothesis = u <= k;
    let lhs = if hypothesis { delta_k_plus_2u } else { f64::INFINITY };
    Ok(verdict(
        ConditionName::VaswaniCorollary,
        lhs,
        0.2,
        false,
        map(&[
            ("delta_k_plus_2u", delta_k_plus_2u),
            ("k", k as f64),
            ("u", u as f64),
            ("hypothesis_u_le_k", if hypothesis { 1.0 } else { 0.0 }),
        ]),
        Some(k + 2 * u),
    ))
}

/// Isometry order consumed by the weighted l0 condition:
/// `k + 2u + ceil(w * t)`.
pub fn weighted_l0_order(k: usize, u: usize, t: usize, w: f64) -> Result<usize, ConditionError> {
    require_weight(w)?;
    if t > k {
        return Err(ConditionError::BadDecomposition(format!("overlap {t} exceeds prior size {k}")));
    }
    let _ = u;
    Ok(k + 2 * u + (w * t as f64).ceil() as usize)
}

/// Weighted l0 condition: `delta_{k + 2u + ceil(w t)} < 1`. The caller
/// supplies `delta` already evaluated at that order (see
/// [`weighted_l0_order`]); the verdict records the order used.
///
/// At `w = 0` the order is `k + 2u`; at `w = 1` with an error-free prior
/// (`t = k`) it is `2(t + u)`, twice the sparsity.
pub fn check_weighted_l0(
    delta_at_order: f64,
    k: usize,
    u: usize,
    t: usize,
    w: f64,
) -> Result<ConditionVerdict, ConditionError> {
    require_nonnegative(delta_at_order, "delta_at_order")?;
    let order = weighted_l0_order(k, u, t, w)?;
    Ok(verdict(
        ConditionName::WeightedL0,
        delta_at_order,
        1.0,
        false,
        map(&[
            ("delta_at_order", delta_at_order),
            ("k", k as f64),
            ("u", u as f64),
            ("t", t as f64),
            ("w", w),
        ]),
        Some(order),
    ))
}

/// Weighted l1 condition:
///
/// ```text
/// sqrt((k w^2 + u) / (k + u)) * theta_{k+u} + delta_{k+u} + theta_{k+u, 2(k+u)} < 1
/// ```
///
/// At `w = 1` the leading factor is exactly 1 and the comparison coincides
/// with the classical l1 condition at order `s = k + u`; at `w = 0` with
/// `k = u` the factor is `1/sqrt(2)`.
pub fn check_weighted_l1(
    delta_ku: f64,
    theta_ku: f64,
    theta_ku_2ku: f64,
    k: usize,
    u: usize,
    w: f64,
) -> Result<ConditionVerdict, ConditionError> {
    require_nonnegative(delta_ku, "delta_ku")?;
    require_nonnegative(theta_ku, "theta_ku")?;
    require_nonnegative(theta_ku_2ku, "theta_ku_2ku")?;
    require_weight(w)?;
    if k + u == 0 {
        return Err(ConditionError::EmptySupportUnion);
    }
    let factor = ((k as f64 * w * w + u as f64) / (k + u) as f64).sqrt();
    let lhs = factor * theta_ku + delta_ku + theta_ku_2ku;
    Ok(verdict(
        ConditionName::WeightedL1,
        lhs,
        1.0,
        false,
        map(&[
            ("delta_k_plus_u", delta_ku),
            ("theta_k_plus_u", theta_ku),
            ("theta_k_plus_u_2", theta_ku_2ku),
            ("factor", factor),
            ("k", k as f64),
            ("u", u as f64),
            ("w", w),
        ]),
        Some(k + u),
    ))
}

/// Threshold of the isometry-only weighted l1 condition:
/// `sqrt(2) / (1 + 2 sqrt(2))`, about 0.3694.
pub fn ric_only_threshold() -> f64 {
    let r = std::f64::consts::SQRT_2;
    r / (1.0 + 2.0 * r)
}

/// Isometry-only sufficient condition for the weighted l1 problem at `w = 0`:
/// requires the side hypothesis `u <= k` and `delta_{3(k+u)}` below
/// [`ric_only_threshold`]. A failed hypothesis is reported as `lhs = +inf`
/// (nothing established), not as an error.
pub fn check_weighted_l1_ric_only(
    delta_3ku: f64,
    k: usize,
    u: usize,
) -> Result<ConditionVerdict, ConditionError> {
    require_nonnegative(delta_3ku, "delta_3ku")?;
    if k + u == 0 {
        return Err(ConditionError::EmptySupportUnion);
    }
    let hypothesis = u <= k;
    let lhs = if hypothesis { delta_3ku } else { f64::INFINITY };
    Ok(verdict(
        ConditionName::WeightedL1RicOnly,
        lhs,
        ric_only_threshold(),
        false,
        map(&[
            ("delta_3_k_plus_u", delta_3ku),
            ("k", k as f64),
            ("u", u as f64),
            ("hypothesis_u_le_k", if hypothesis { 1.0 } else { 0.0 }),
        ]),
        Some(3 * (k + u)),
    ))
}
