//! Derivation of independent random streams from one master seed.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Purpose tags for derived streams.
pub const TAG_CABLE: u64 = 0x0063_6162_6c65; // "cable"
pub const TAG_THETA: u64 = 0x0074_6865_7461; // "theta"
pub const TAG_SHOTS: u64 = 0x0073_686f_7473; // "shots"

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Mixes `(master, index, tag)` into a new 64-bit seed.
pub fn derive_seed(master: u64, index: u64, tag: u64) -> u64 {
    splitmix64(splitmix64(splitmix64(master) ^ index) ^ tag)
}

pub fn stream(master: u64, index: u64, tag: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(master, index, tag))
}
