//! Seeded random streams.
//!
//! Every randomized operation takes a u64 seed and draws from its own ChaCha8
//! stream. Floats are built from the top 53 bits of `next_u64` so the byte
//! output never depends on a distribution implementation.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn stream(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform draw in [0, 1) with 53-bit resolution.
pub fn unit_f64(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Uniform draw in [lo, hi).
pub fn uniform_in(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    lo + unit_f64(rng) * (hi - lo)
}

/// Uniform joint angle in [-pi, pi).
pub fn uniform_angle(rng: &mut ChaCha8Rng) -> f64 {
    uniform_in(rng, -std::f64::consts::PI, std::f64::consts::PI)
}

/// Uniform index in [0, n). n must be nonzero. The modulo bias is below 2^-32
/// for any n this crate uses and irrelevant next to sampling noise.
pub fn uniform_index(rng: &mut ChaCha8Rng, n: usize) -> usize {
    (rng.next_u64() % n as u64) as usize
}

/// Derives an independent child seed for a named sub-stream.
pub fn subseed(seed: u64, stream_id: u64) -> u64 {
    splitmix64(seed ^ stream_id.wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
