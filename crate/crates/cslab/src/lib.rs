//! Verification laboratory for sparse recovery with partially known support.
//!
//! Everything here operates at desk scale: matrices with a few dozen columns,
//! where restricted isometry and restricted orthogonality constants can be
//! computed *exactly* by enumerating column subsets, and where the weighted
//! l0/l1 recovery problems can be solved to global optimality. That makes it
//! possible to check sufficient recovery conditions against ground truth
//! instead of against bounds.
//!
//! The pieces:
//!
//! * [`matrix`], [`support`]: sensing matrices, support-set bookkeeping, and
//!   the weighted norms that treat a prior support estimate `T` differently
//!   from its complement.
//! * [`ric`]: exact (and sampled lower-bound) restricted isometry constants
//!   `delta_k` and restricted orthogonality constants `theta_{s,s~}`.
//! * [`conditions`]: checkers for the classical and prior-support recovery
//!   conditions, each reporting the comparison it performed.
//! * [`solvers`]: exact weighted l0 minimization by support enumeration,
//!   weighted l1 minimization by simplex, and dual-certificate uniqueness
//!   verification.
//! * [`harness`]: seeded instance generation and the experiment runner that
//!   cross-checks condition verdicts against actual solver behavior.
//! * [`textio`]: the plain-text matrix/vector format and experiment CSV.
//!
//! With the default `parallel` feature, subset enumeration and experiment
//! trials fan out over a thread pool; results are identical to the
//! single-threaded fallback because every reduction used is order-independent.
//!
//! ```
//! use cslab::matrix::SensingMatrix;
//! use cslab::ric::{delta_exact, DEFAULT_ENUM_CAP};
//!
//! let a = SensingMatrix::new(2, 3, vec![
//!     1.0, 0.0, std::f64::consts::FRAC_1_SQRT_2,
//!     0.0, 1.0, std::f64::consts::FRAC_1_SQRT_2,
//! ]).unwrap();
//! let report = delta_exact(&a, 2, DEFAULT_ENUM_CAP).unwrap();
//! assert!((report.value - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-10);
//! ```

pub mod conditions;
pub mod harness;
pub mod matrix;
pub mod ric;
pub mod rng;
pub mod solvers;
pub mod support;
pub mod textio;

mod linalg;
mod simplex;
mod subsets;

pub use matrix::{coherence, submatrix_columns, SensingMatrix, SignalVector};
pub use support::{decompose_support, weighted_norm, NormOrder, SupportDecomposition, WeightedNormParams};
