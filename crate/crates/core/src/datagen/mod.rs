//! Seeded generators for experiment inputs.
//!
//! Every generator takes an explicit [`Rng`] or seed; identical seeds and
//! parameters reproduce identical output. Per-item streams are derived with
//! [`derive_seed`] so datasets can be generated in any order or in parallel.

mod manifold;
mod normal;
mod rossler;
mod series;
mod zero_one;

use rand::{Rng as _, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

pub use manifold::{gen_manifold, ManifoldKind};
pub use normal::gen_normal_diagram;
pub use rossler::{rk4_integrate, rk4_step, rossler_simulate, RosslerConfig, RosslerLabel, RosslerRun};
pub use series::{autocorrelation, delay_embed, embedding_delay, extrema, zero_crossing_delay};
pub use zero_one::{zero_one_test, ZERO_ONE_MIN_LENGTH};

pub type Rng = ChaCha8Rng;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DatagenError {
    #[error("unknown manifold kind `{0}`")]
    UnknownManifold(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("trajectory left the finite range at step {step}")]
    BlowUp { step: usize },
    #[error("series of length {found} is too short, need {needed}")]
    TooShort { needed: usize, found: usize },
}

pub fn rng(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// splitmix64 finalizer.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of sub-stream `index` of `seed`: `splitmix64(seed + index * golden)`.
/// Used for per-run and per-item generators.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    splitmix64(seed.wrapping_add(index.wrapping_mul(0x9E37_79B9_7F4A_7C15)))
}

/// Two independent standard normals by the Box-Muller transform.
pub fn standard_normal_pair(rng: &mut Rng) -> (f64, f64) {
    // u1 in (0, 1] keeps the logarithm finite
    let u1 = 1.0 - rng.random::<f64>();
    let u2 = rng.random::<f64>();
    let r = (-2.0 * u1.ln()).sqrt();
    let theta = std::f64::consts::TAU * u2;
    (r * theta.cos(), r * theta.sin())
}

pub fn uniform(rng: &mut Rng, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * rng.random::<f64>()
}
