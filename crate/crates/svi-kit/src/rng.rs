//! Deterministic splittable random streams.
//!
//! Every random quantity in a solver run is keyed by
//! `(master_seed, path, iteration, half_step)`, never by execution order,
//! so runs are reproducible bit-for-bit regardless of how sample paths are
//! scheduled across threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::problem::Vector;

const MIX_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;
const MIX_CONST1: u64 = 0xBF58_476D_1CE4_E5B9;
const MIX_CONST2: u64 = 0x94D0_49BB_1331_11EB;

/// SplitMix64 output function: bijective, avalanching.
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(MIX_CONST1);
    z = (z ^ (z >> 27)).wrapping_mul(MIX_CONST2);
    z ^ (z >> 31)
}

/// Fold a word into the running state, SplitMix-style.
fn absorb(state: u64, word: u64) -> u64 {
    mix64(state.wrapping_add(MIX_GAMMA).wrapping_add(word))
}

fn chacha_from_state(mut state: u64) -> ChaCha8Rng {
    let mut seed = [0u8; 32];
    for chunk in seed.chunks_exact_mut(8) {
        state = state.wrapping_add(MIX_GAMMA);
        chunk.copy_from_slice(&mix64(state).to_le_bytes());
    }
    ChaCha8Rng::from_seed(seed)
}

/// Which of the two per-iteration map evaluations a draw feeds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum HalfStep {
    /// Evaluation at the current iterate.
    First = 0,
    /// Evaluation at the extragradient midpoint.
    Second = 1,
}

/// Address of one random stream: two draws with equal fields yield
/// identical output, distinct fields yield statistically independent output.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Draw {
    pub master_seed: u64,
    pub path: u64,
    pub iteration: u64,
    pub half: HalfStep,
}

impl Draw {
    pub fn first(master_seed: u64, path: u64, iteration: u64) -> Self {
        Draw {
            master_seed,
            path,
            iteration,
            half: HalfStep::First,
        }
    }

    pub fn second(master_seed: u64, path: u64, iteration: u64) -> Self {
        Draw {
            master_seed,
            path,
            iteration,
            half: HalfStep::Second,
        }
    }

    /// Generator for this stream. Callers that need several random objects
    /// from one draw (a matrix and a vector, say) sample them sequentially
    /// from a single generator, which keeps the draw deterministic.
    pub fn rng(&self) -> ChaCha8Rng {
        let mut state = absorb(0x5356_494b_4954_0001, self.master_seed);
        state = absorb(state, self.path);
        state = absorb(state, self.iteration);
        state = absorb(state, self.half as u64);
        chacha_from_state(state)
    }
}

/// Generator for "generated once" instance parameters; a separate namespace
/// from the per-iteration noise streams so a problem instance stays fixed
/// across sample paths and master seeds.
pub fn instance_rng(instance_seed: u64, family_tag: u64) -> ChaCha8Rng {
    let mut state = absorb(0x5356_494b_4954_0002, instance_seed);
    state = absorb(state, family_tag);
    chacha_from_state(state)
}

/// `n` i.i.d. standard normal values, deterministic in `(draw, n)`.
pub fn gaussian_vector(draw: &Draw, n: usize) -> Result<Vector> {
    if n == 0 {
        return Err(Error::EmptyDimension);
    }
    let mut rng = draw.rng();
    Ok(Vector::from_fn(n, |_, _| rng.sample(StandardNormal)))
}

/// `n` i.i.d. Uniform(lo, hi) values, deterministic in the inputs.
pub fn uniform_vector(draw: &Draw, n: usize, lo: f64, hi: f64) -> Result<Vector> {
    if n == 0 {
        return Err(Error::EmptyDimension);
    }
    if !(lo < hi) {
        return Err(Error::InvalidRange { lo, hi });
    }
    let mut rng = draw.rng();
    Ok(Vector::from_fn(n, |_, _| rng.random_range(lo..hi)))
}
