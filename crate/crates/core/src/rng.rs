//! Deterministic RNG substreams.
//!
//! Each Monte Carlo replicate owns one logical stream, split into fixed-role
//! substreams (component grids, jump times, path noise). Substream seeds are
//! derived by hashing `(base, replicate, role)` with splitmix64, so streams
//! never share state and the same inputs always reproduce the same draws.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Fixed substream roles within one replicate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stream {
    Grid1 = 1,
    Grid2 = 2,
    JumpTimes = 3,
    Path = 4,
}

/// splitmix64 finalizer; a full-period mixer over u64.
pub fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Combine a base seed, replicate index and stream role into one seed.
pub fn derive_seed(base: u64, rep: u64, stream: Stream) -> u64 {
    splitmix64(base ^ splitmix64(rep ^ splitmix64(stream as u64)))
}

/// RNG for one substream of one replicate.
pub fn substream(base: u64, rep: u64, stream: Stream) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(base, rep, stream))
}
