//! Seed derivation for reproducible parallel sampling.
//!
//! Draws are cut into consecutive blocks of [`BLOCK_SIZE`]; block `b` gets
//! its own generator seeded with [`block_seed`]`(seed, b)`. Which worker runs
//! a block never affects its draws, and blocks are merged in index order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub const BLOCK_SIZE: u64 = 1 << 16;

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// The SplitMix64 finalizer.
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(GOLDEN_GAMMA);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// `splitmix64(seed ^ splitmix64(block + γ))`.
pub fn block_seed(seed: u64, block: u64) -> u64 {
    splitmix64(seed ^ splitmix64(block.wrapping_add(GOLDEN_GAMMA)))
}

pub fn block_rng(seed: u64, block: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(block_seed(seed, block))
}

/// `(block index, draws in block)` covering `samples` draws.
pub fn blocks(samples: u64) -> impl Iterator<Item = (u64, u64)> {
    (0..samples.div_ceil(BLOCK_SIZE)).map(move |b| (b, BLOCK_SIZE.min(samples - b * BLOCK_SIZE)))
}
