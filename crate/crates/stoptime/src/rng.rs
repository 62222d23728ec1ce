//! Reproducible random streams.
//!
//! Every stream is ChaCha8 keyed by `ChaCha8Rng::seed_from_u64(seed)` with
//! the ChaCha stream number set to a stream id. Fuzz instance `i` uses
//! stream `i`; Monte Carlo checks use ids from [`MC_STREAM_BASE`] upwards.
//! Streams are independent of the order or thread in which they are used.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub const MC_STREAM_BASE: u64 = 1 << 40;

pub fn stream(seed: u64, id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}
