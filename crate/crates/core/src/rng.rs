//! Seeded random streams.
//!
//! Every random construction draws from ChaCha8 (`rand_chacha::ChaCha8Rng`),
//! a portable 64-bit-seeded generator whose output does not depend on the
//! platform. Each graph in a batch gets its own stream selected with
//! [`stream_rng`], so the order in which a batch is evaluated never changes
//! any individual graph.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

/// Name recorded in output metadata.
pub const GENERATOR_NAME: &str = "chacha8";

pub fn stream_rng(seed: u64, stream: u64) -> StreamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Uniform integer in `0..bound`, drawn through `u64` so the result is the
/// same on 32- and 64-bit targets.
pub(crate) fn below<R: Rng + ?Sized>(rng: &mut R, bound: usize) -> usize {
    rng.random_range(0..bound as u64) as usize
}
