//! Deterministic randomness. Every stream in the crate is a ChaCha20 stream
//! keyed by a 64-bit seed; trial `t` of a game runs on stream `t` of its seed.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

pub type SimRng = ChaCha20Rng;

pub fn seeded(seed: u64) -> SimRng {
    ChaCha20Rng::seed_from_u64(seed)
}

/// The independent stream for `(seed, index)`.
pub fn derived(seed: u64, index: u64) -> SimRng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

pub fn random_bit<R: Rng + ?Sized>(rng: &mut R) -> bool {
    rng.gen::<bool>()
}
