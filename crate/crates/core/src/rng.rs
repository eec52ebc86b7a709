//! Counter-based random streams.
//!
//! Every simulated object draws from a ChaCha8 generator keyed by a 64-bit
//! seed and selected by a 64-bit stream id, so worker `i` of a parallel run
//! owns stream `i` and results do not depend on scheduling.

use rand_chacha::ChaCha8Rng;
use rand_core::SeedableRng;
use rand_distr::{Distribution, Exp1, Open01, StandardNormal};

pub type PathRng = ChaCha8Rng;

/// Generator for `(seed, stream_id)`.
pub fn stream(seed: u64, stream_id: u64) -> PathRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream_id);
    rng
}

/// Derives an independent stream id for an auxiliary purpose (e.g. the
/// killed-process simulations of a check) from a base id and a tag.
pub fn substream(stream_id: u64, tag: u64) -> u64 {
    // splitmix64 finaliser
    let mut z = stream_id ^ tag.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[inline]
pub fn normal(rng: &mut PathRng) -> f64 {
    StandardNormal.sample(rng)
}

#[inline]
pub fn exp1(rng: &mut PathRng) -> f64 {
    Exp1.sample(rng)
}

/// Uniform on the open interval `(0, 1)`.
#[inline]
pub fn uniform(rng: &mut PathRng) -> f64 {
    Open01.sample(rng)
}
