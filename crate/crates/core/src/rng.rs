//! Per-purpose random streams.
//!
//! Every random draw in a run comes from a ChaCha8 stream keyed by
//! `(seed, ue, purpose)`. Streams never share state, so the order in which
//! UEs or links are processed cannot change any value, and two runs that
//! differ only in protocol settings see identical mobility and channels.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type SimRng = ChaCha8Rng;

/// Stream purposes. Site links use `LINK_BASE + site`.
pub mod purpose {
    pub const MOBILITY: u32 = 0;
    pub const MEAS_NOISE: u32 = 1;
    pub const LINK_BASE: u32 = 16;
}

pub fn stream(seed: u64, ue: usize, purpose: u32) -> SimRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((ue as u64) << 32) | u64::from(purpose));
    rng
}
