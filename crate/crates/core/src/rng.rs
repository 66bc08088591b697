//! Seeded random number generation.
//!
//! All randomness goes through ChaCha8 seeded with `seed_from_u64`, which is
//! specified bit-for-bit by `rand_chacha` and gives identical streams on every
//! platform. Independent tasks (trials, samples) use their own stream number
//! on the same key, so results never depend on scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

pub fn seeded(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Stream `stream` of the generator keyed by `seed`.
pub fn seeded_stream(seed: u64, stream: u64) -> Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
