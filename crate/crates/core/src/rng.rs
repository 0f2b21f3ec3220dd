//! Seeded random streams.
//!
//! All randomness comes from ChaCha8 (`rand_chacha` 0.9), seeded with
//! `seed_from_u64(seed)` and split into independent streams with
//! `set_stream(id)`. Uniform variates are `(next_u64 >> 11) * 2^-53`, so
//! any ChaCha8 implementation reproduces the same numbers.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

pub type Stream = ChaCha8Rng;

/// Independent stream `id` of generator `seed`.
pub fn stream(seed: u64, id: u64) -> Stream {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

/// Uniform draw from `[0, 1)` with 53 bits of precision.
pub fn unit(rng: &mut Stream) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Standard exponential draw by inversion.
pub fn exponential(rng: &mut Stream) -> f64 {
    -(1.0 - unit(rng)).ln()
}

/// Uniform index in `0..n`.
pub fn index(rng: &mut Stream, n: usize) -> usize {
    ((unit(rng) * n as f64) as usize).min(n.saturating_sub(1))
}
