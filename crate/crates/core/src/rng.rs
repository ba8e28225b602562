//! Seeded random streams.
//!
//! Every random quantity in a search is drawn from a ChaCha stream keyed by
//! `(seed, stream)`, so repetitions can run in any order or on any thread
//! and still produce identical draws.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Stream offset separating the `-Y` pass from the `+Y` pass.
pub const NEGATIVE_PASS_STREAM: u64 = 1 << 40;

pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
