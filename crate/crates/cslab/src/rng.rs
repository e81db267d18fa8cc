//! Deterministic random streams.
//!
//! Every randomized routine in this crate draws from a fixed, named
//! generator so runs are reproducible from a single 64-bit seed and so the
//! streams can be re-created in other languages:
//!
//! * Generator: ChaCha with 8 rounds (`rand_chacha::ChaCha8Rng`), keyed via
//!   `seed_from_u64` (the SplitMix64 expansion specified by `rand_core`).
//! * Sub-streams: ChaCha's 64-bit stream counter. Work item `i` of a task
//!   seeded with `s` uses `stream(s, i)`, which makes parallel execution
//!   order-independent.
//! * Normal deviates: basic Box-Muller. Each call consumes exactly two `f64`
//!   draws `r1, r2` from `[0, 1)` and returns
//!   `sqrt(-2 ln(1 - r1)) * cos(2 pi r2)`.
//!
//! The golden values pinned in the tests freeze this contract.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// ChaCha8 generator for sub-stream `index` of `seed`.
pub fn stream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// One standard-normal deviate by Box-Muller; consumes two uniform draws.
pub fn standard_normal<R: Rng>(rng: &mut R) -> f64 {
    let r1: f64 = rng.random();
    let r2: f64 = rng.random();
    let radius = (-2.0 * (1.0 - r1).ln()).sqrt();
    radius * (std::f64::consts::TAU * r2).cos()
}
