//! Cross-checks of the library against independently written oracles.
//!
//! The reference values asserted here were produced by the helpers in
//! `common` (bitmask scans, pseudoinverse least squares, direct formula
//! evaluation) and frozen; each test also re-runs the oracle so a regression
//! on either side surfaces.

mod common;

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_1_SQRT_2, SQRT_2};

use cslab::conditions::{
    check_coherence_l1, check_vaswani_l1, check_weighted_l1, ric_only_threshold, VaswaniConstant,
};
use cslab::harness::{gen_instance, gen_matrix, ExperimentConfig};
use cslab::ric::{delta_exact, delta_sampled, theta_exact, theta_sampled, RicMode};
use cslab::solvers::{build_certificate, solve_weighted_l0, solve_weighted_l1, verify_l1_uniqueness, Uniqueness};
use cslab::{coherence, decompose_support, SensingMatrix, SignalVector, WeightedNormParams};

const CAP: u64 = 2_000_000;

fn skewed_columns() -> SensingMatrix {
    SensingMatrix::new(
        2,
        3,
        vec![1.0, 0.0, FRAC_1_SQRT_2, 0.0, 1.0, FRAC_1_SQRT_2],
    )
    .unwrap()
}

fn identity(n: usize) -> SensingMatrix {
    let mut e = vec![0.0; n * n];
    for i in 0..n {
        e[i * n + i] = 1.0;
    }
    SensingMatrix::new(n, n, e).unwrap()
}

fn small_config(seed: u64) -> ExperimentConfig {
    ExperimentConfig {
        m: 8,
        n: 16,
        k: 1,
        t: 1,
        u: 0,
        w_grid: vec![0.0, 0.25],
        trials: 1,
        seed,
        ensemble: Default::default(),
        value_range: (0.5, 2.0),
        cap: CAP,
    }
}

#[test]
fn coherence_matches_pairwise_scan() {
    let a = skewed_columns();
    let mu = coherence(&a).unwrap();
    assert!((mu - FRAC_1_SQRT_2).abs() < 1e-14);
    assert!((mu - common::coherence_oracle(&a)).abs() < 1e-14);

    assert_eq!(coherence(&identity(4)).unwrap(), 0.0);

    for seed in 1..=5 {
        let a = gen_matrix(6, 10, seed).unwrap();
        let lib = coherence(&a).unwrap();
        let oracle = common::coherence_oracle(&a);
        assert!((lib - oracle).abs() < 1e-12, "seed {seed}: {lib} vs {oracle}");
    }
}

#[test]
fn delta_exact_matches_subset_scan() {
    let a = skewed_columns();
    let d2 = delta_exact(&a, 2, CAP).unwrap();
    assert!((d2.value - FRAC_1_SQRT_2).abs() < 1e-12);
    assert_eq!(d2.mode, RicMode::Exact);
    assert_eq!(d2.subsets_enumerated, 3);

    let d3 = delta_exact(&a, 3, CAP).unwrap();
    assert!((d3.value - 1.0).abs() < 1e-12, "rank-deficient Gram pins delta at 1, got {}", d3.value);

    for seed in [2, 3] {
        let a = gen_matrix(5, 9, seed).unwrap();
        for k in 1..=4 {
            let lib = delta_exact(&a, k, CAP).unwrap().value;
            let oracle = common::delta_oracle(&a, k);
            assert!((lib - oracle).abs() < 1e-10, "seed {seed} k {k}: {lib} vs {oracle}");
        }
    }
}

#[test]
fn theta_exact_matches_subset_scan() {
    let a = skewed_columns();
    let t11 = theta_exact(&a, 1, 1, CAP).unwrap();
    assert!((t11.value - FRAC_1_SQRT_2).abs() < 1e-12);

    for seed in [4, 5] {
        let a = gen_matrix(5, 8, seed).unwrap();
        for (s, st) in [(1, 1), (1, 2), (2, 1), (2, 2)] {
            let lib = theta_exact(&a, s, st, CAP).unwrap().value;
            let oracle = common::theta_oracle(&a, s, st);
            assert!(
                (lib - oracle).abs() < 1e-10,
                "seed {seed} orders ({s},{st}): {lib} vs {oracle}"
            );
        }
    }
}

#[test]
fn sampled_reports_never_exceed_exact() {
    let a = gen_matrix(6, 9, 11).unwrap();
    for k in [2, 3] {
        let exact = delta_exact(&a, k, CAP).unwrap().value;
        let sampled = delta_sampled(&a, k, 40, 9).unwrap();
        assert_eq!(sampled.mode, RicMode::SampledLowerBound);
        assert!(sampled.value <= exact + 1e-12);
    }
    let exact = theta_exact(&a, 2, 2, CAP).unwrap().value;
    let sampled = theta_sampled(&a, 2, 2, 40, 9).unwrap();
    assert!(sampled.value <= exact + 1e-12);

    // Tiny instance where seeded sampling visits each of the six subsets
    // with overwhelming probability: the lower bound becomes tight.
    let b = gen_matrix(3, 4, 12).unwrap();
    let exact = delta_exact(&b, 2, CAP).unwrap().value;
    let sampled = delta_sampled(&b, 2, 300, 3).unwrap();
    assert!((sampled.value - exact).abs() < 1e-12);
}

#[test]
fn coherence_condition_agrees_with_actual_sparse_recovery() {
    let a = skewed_columns();
    let mu = coherence(&a).unwrap();
    let verdict = check_coherence_l1(mu, 1).unwrap();
    assert!((verdict.threshold - (1.0 + SQRT_2) / 2.0).abs() < 1e-12);
    assert!(verdict.holds);

    // The verdict promises every 1-sparse signal is the unique minimizer;
    // exercise all three spikes.
    let params = WeightedNormParams::new(3, &[], 1.0).unwrap();
    for i in 0..3 {
        let mut x = vec![0.0; 3];
        x[i] = 1.5;
        let y: Vec<f64> = (0..2).map(|r| 1.5 * a.entry(r, i)).collect();
        let result = solve_weighted_l1(&a, &y, &params).unwrap();
        for (got, want) in result.minimizers[0].values().iter().zip(&x) {
            assert!((got - want).abs() < 1e-9, "spike {i}");
        }
    }
}

#[test]
fn compound_prior_verdict_matches_direct_reevaluation() {
    let a = gen_matrix(8, 16, 42).unwrap();
    let (k, u) = (2usize, 1usize);

    let delta = |ord: usize| delta_exact(&a, ord, CAP).unwrap().value;
    let theta = |s: usize, st: usize| theta_exact(&a, s, st, CAP).unwrap().value;
    let (d1, d2, d3) = (delta(u), delta(k), delta(k + u));
    let t11 = theta(u, u);
    let t12 = theta(u, 2 * u);
    let t22 = theta(k, 2 * u);

    let mut constants = BTreeMap::new();
    constants.insert(VaswaniConstant::DeltaKPlusU, d3);
    constants.insert(VaswaniConstant::Delta2U, d2);
    constants.insert(VaswaniConstant::DeltaK, d2);
    constants.insert(VaswaniConstant::DeltaU, d1);
    constants.insert(VaswaniConstant::ThetaK2U, t22);
    constants.insert(VaswaniConstant::ThetaU2U, t12);
    constants.insert(VaswaniConstant::ThetaUK, t12);
    constants.insert(VaswaniConstant::Theta2UK, t22);
    constants.insert(VaswaniConstant::ThetaUU, t11);
    let verdict = check_vaswani_l1(&constants).unwrap();

    // Re-evaluate the three clauses from the same table with local
    // arithmetic only.
    let clause_a = d3;
    let clause_b = d2 + d2 + t22 * t22;
    let rho = |tc: f64, tsp: f64, tfp: f64, dp: f64, df: f64| -> Option<f64> {
        if dp >= 1.0 {
            return None;
        }
        let inner = 1.0 - dp;
        let denom = 1.0 - df - tfp * tfp / inner;
        if denom <= 1e-12 {
            return None;
        }
        Some((tc + tsp * tfp / inner) / denom)
    };
    match (rho(t12, t12, t22, d2, d2), rho(t11, t12, t12, d2, d1)) {
        (Some(ra), Some(rb)) => {
            let clause_c = ra + rb;
            let lhs = clause_a.max(clause_b).max(clause_c);
            assert!(!verdict.degenerate);
            assert!((verdict.lhs - lhs).abs() < 1e-12);
            assert_eq!(verdict.holds, lhs < 1.0);
        }
        _ => {
            assert!(verdict.degenerate);
            assert!(!verdict.holds);
        }
    }
}

#[test]
fn counting_solver_matches_unpruned_scan() {
    let a = skewed_columns();
    let y = vec![FRAC_1_SQRT_2, FRAC_1_SQRT_2];

    let inside = WeightedNormParams::new(3, &[0, 1], 0.0).unwrap();
    let result = solve_weighted_l0(&a, &y, &inside).unwrap();
    let (oracle_obj, oracle_mins) = common::l0_oracle(&a, &y, &[0, 1], 0.0);
    assert!((result.objective - oracle_obj).abs() < 1e-12);
    assert_eq!(oracle_obj, 0.0);
    let got: Vec<Vec<f64>> =
        result.minimizers.iter().map(|m| m.values().to_vec()).collect();
    assert!(common::same_vector_set(&got, &oracle_mins, 1e-9));
    assert!(got
        .iter()
        .any(|x| (x[0] - FRAC_1_SQRT_2).abs() < 1e-9 && (x[1] - FRAC_1_SQRT_2).abs() < 1e-9));

    let plain = WeightedNormParams::new(3, &[], 1.0).unwrap();
    let result = solve_weighted_l0(&a, &y, &plain).unwrap();
    let (oracle_obj, oracle_mins) = common::l0_oracle(&a, &y, &[], 1.0);
    assert_eq!(result.objective, 1.0);
    assert!((result.objective - oracle_obj).abs() < 1e-12);
    let got: Vec<Vec<f64>> =
        result.minimizers.iter().map(|m| m.values().to_vec()).collect();
    assert!(common::same_vector_set(&got, &oracle_mins, 1e-9));
    assert!((got[0][2] - 1.0).abs() < 1e-9);

    for seed in 20..25 {
        let a = gen_matrix(4, 7, seed).unwrap();
        let mut r = cslab::rng::stream(seed, 1);
        use rand::Rng;
        let spike = r.random_range(0..7usize);
        let other = (spike + 1 + r.random_range(0..6usize)) % 7;
        let mut x = vec![0.0; 7];
        x[spike] = 1.0 + r.random::<f64>();
        x[other] = -(1.0 + r.random::<f64>());
        let y = a.mul(&x).unwrap();
        let prior = if spike < other { vec![spike, other] } else { vec![other, spike] };
        let params = WeightedNormParams::new(7, &prior, 0.5).unwrap();
        let result = solve_weighted_l0(&a, &y, &params).unwrap();
        let (oracle_obj, oracle_mins) = common::l0_oracle(&a, &y, &prior, 0.5);
        assert!((result.objective - oracle_obj).abs() < 1e-12, "seed {seed}");
        let got: Vec<Vec<f64>> =
            result.minimizers.iter().map(|m| m.values().to_vec()).collect();
        assert!(common::same_vector_set(&got, &oracle_mins, 1e-8), "seed {seed}");
    }
}

#[test]
fn vertex_solver_matches_basic_solution_scan() {
    let a = skewed_columns();
    let y = vec![FRAC_1_SQRT_2, FRAC_1_SQRT_2];

    let plain = WeightedNormParams::new(3, &[], 1.0).unwrap();
    let result = solve_weighted_l1(&a, &y, &plain).unwrap();
    assert!((result.objective - 1.0).abs() < 1e-9);
    assert!((result.objective - common::l1_vertex_oracle(&a, &y, &[], 1.0)).abs() < 1e-9);
    assert!((result.minimizers[0].values()[2] - 1.0).abs() < 1e-9);

    let inside = WeightedNormParams::new(3, &[0, 1], 0.0).unwrap();
    let result = solve_weighted_l1(&a, &y, &inside).unwrap();
    assert!(result.objective.abs() < 1e-9);
    assert!((result.objective - common::l1_vertex_oracle(&a, &y, &[0, 1], 0.0)).abs() < 1e-9);

    let eye = identity(3);
    let y = vec![0.4, -1.2, 0.0];
    let params = WeightedNormParams::new(3, &[0], 0.7).unwrap();
    let result = solve_weighted_l1(&eye, &y, &params).unwrap();
    for (got, want) in result.minimizers[0].values().iter().zip(&y) {
        assert!((got - want).abs() < 1e-9);
    }

    for seed in 30..35 {
        let a = gen_matrix(3, 6, seed).unwrap();
        let mut r = cslab::rng::stream(seed, 2);
        use rand::Rng;
        let y: Vec<f64> = (0..3).map(|_| r.random::<f64>() * 2.0 - 1.0).collect();
        let prior = vec![1, 4];
        for w in [0.0, 0.4, 1.0] {
            let params = WeightedNormParams::new(6, &prior, w).unwrap();
            let result = solve_weighted_l1(&a, &y, &params).unwrap();
            let oracle = common::l1_vertex_oracle(&a, &y, &prior, w);
            assert!(
                (result.objective - oracle).abs() < 1e-7,
                "seed {seed} w {w}: {} vs {oracle}",
                result.objective
            );
        }
    }
}

#[test]
fn certificate_matches_normal_equation_solve() {
    let eye = identity(3);
    let x = SignalVector::new(vec![0.0, 5.0, 0.0]).unwrap();
    let d = decompose_support(&[1], &[], 3).unwrap();
    let cert = build_certificate(&eye, &d, &x, 0.5).unwrap();
    assert!((cert.gamma[0]).abs() < 1e-12);
    assert!((cert.gamma[1] - 1.0).abs() < 1e-12);
    assert!((cert.gamma[2]).abs() < 1e-12);
    assert!(cert.strict);
    assert_eq!(verify_l1_uniqueness(&eye, &d, &x, 0.5, &cert), Uniqueness::Yes);

    // Orthonormal pair: the normal system is the identity, so the
    // interpolant is the sign target itself pushed through the columns.
    let a = skewed_columns();
    let x = SignalVector::new(vec![1.0, -1.0, 0.0]).unwrap();
    let d = decompose_support(&[0, 1], &[0, 1], 3).unwrap();
    let cert = build_certificate(&a, &d, &x, 0.5).unwrap();
    assert!((cert.gamma[0] - 0.5).abs() < 1e-12);
    assert!((cert.gamma[1] + 0.5).abs() < 1e-12);
    assert!(cert.correlations[2].abs() < 1e-12);
    assert!(cert.strict);

    // Random full-rank unions: compare against a pseudoinverse solve of the
    // normal equations and re-verify interpolation.
    for seed in 50..54 {
        let a = gen_matrix(4, 7, seed).unwrap();
        let support = vec![1, 5];
        let prior = vec![1, 2];
        let d = decompose_support(&support, &prior, 7).unwrap();
        let mut xv = vec![0.0; 7];
        xv[1] = 1.3;
        xv[5] = -0.4;
        let x = SignalVector::new(xv).unwrap();
        let w = 0.6;
        let cert = build_certificate(&a, &d, &x, w).unwrap();

        let union = d.union_with_prior();
        let cols = common::cols_of(&a, &union);
        let sign = |v: f64| {
            if v.abs() <= 1e-12 {
                0.0
            } else {
                v.signum()
            }
        };
        let targets: Vec<f64> = union
            .iter()
            .map(|&i| {
                if prior.binary_search(&i).is_ok() {
                    w * sign(x.values()[i])
                } else {
                    sign(x.values()[i])
                }
            })
            .collect();
        let g = common::gram_of(&cols);
        let (vals, vecs) = common::sym_eig(&g, cols.len());
        let mut coef = vec![0.0; cols.len()];
        for j in 0..cols.len() {
            let mut proj = 0.0;
            for i in 0..cols.len() {
                proj += vecs[i * cols.len() + j] * targets[i];
            }
            assert!(vals[j] > 1e-10, "union must be full rank in this setup");
            let scale = proj / vals[j];
            for i in 0..cols.len() {
                coef[i] += scale * vecs[i * cols.len() + j];
            }
        }
        let gamma = common::apply_cols(&cols, &coef, 4);
        for (g_lib, g_orc) in cert.gamma.iter().zip(&gamma) {
            assert!((g_lib - g_orc).abs() < 1e-9, "seed {seed}");
        }
        for (&i, &c) in union.iter().zip(&targets) {
            assert!((cert.correlations[i] - c).abs() <= 1e-9, "seed {seed} col {i}");
        }
    }
}

#[test]
fn holding_prior_l1_condition_forces_recovery() {
    // Scan seeds until the prior-weighted l1 condition actually holds on a
    // generated 8x16 instance, then confirm the guaranteed outcome: the
    // solver returns the planted vector and the certificate closes the case.
    let mut holding = 0;
    for seed in 0..60u64 {
        let cfg = small_config(seed);
        let (a, x, d, y) = gen_instance(&cfg, 0).unwrap();
        let ku = d.prior_len() + d.unknown_len();
        let delta = delta_exact(&a, ku, CAP).unwrap().value;
        let theta = theta_exact(&a, ku, ku, CAP).unwrap().value;
        let theta_far = theta_exact(&a, ku, 2 * ku, CAP).unwrap().value;
        for &w in &cfg.w_grid {
            let verdict =
                check_weighted_l1(delta, theta, theta_far, d.prior_len(), d.unknown_len(), w)
                    .unwrap();
            if !verdict.holds {
                continue;
            }
            holding += 1;
            let params = WeightedNormParams::new(cfg.n, d.prior_support(), w).unwrap();
            let result = solve_weighted_l1(&a, &y, &params).unwrap();
            for (got, want) in result.minimizers[0].values().iter().zip(x.values()) {
                assert!((got - want).abs() < 1e-6, "seed {seed} w {w}");
            }
            let cert = result.certificate.as_ref().expect("full-rank union");
            assert!(cert.strict, "seed {seed} w {w}");
            assert_eq!(result.unique, Uniqueness::Yes, "seed {seed} w {w}");
        }
        if holding > 0 {
            break;
        }
    }
    assert!(holding > 0, "no seed in range produced a holding verdict");
}

#[test]
fn weighted_l1_lhs_formula_reevaluation() {
    let verdict = check_weighted_l1(0.2, 0.2, 0.2, 3, 1, 0.5).unwrap();
    let factor = (1.75f64 / 4.0).sqrt();
    assert!((factor - 0.66144).abs() < 1e-5);
    let lhs = factor * 0.2 + 0.2 + 0.2;
    assert!((verdict.lhs - lhs).abs() < 1e-15);
    assert!((verdict.lhs - 0.53229).abs() < 1e-5);
    assert!(verdict.holds);
}

#[test]
fn ric_only_threshold_matches_closed_forms() {
    let t = ric_only_threshold();
    assert!((t - SQRT_2 / (1.0 + 2.0 * SQRT_2)).abs() < 1e-15);
    assert!((t - (4.0 - SQRT_2) / 7.0).abs() < 1e-15);
    assert!((t - 0.369).abs() < 1e-3);

    use cslab::conditions::check_weighted_l1_ric_only;
    assert!(check_weighted_l1_ric_only(0.36, 2, 1).unwrap().holds);
    assert!(!check_weighted_l1_ric_only(0.37, 2, 1).unwrap().holds);
}
