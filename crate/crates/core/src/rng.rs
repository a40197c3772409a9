//! Seed discipline: all randomness flows from a single master seed through
//! documented sub-seed derivation, so trials and rounds are reproducible and
//! order-independent.

use rand_chacha::ChaCha20Rng;

/// SplitMix64 output mix; a cheap, well-distributed 64-bit mixer.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e3779b97f4a7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

/// Derives an independent sub-seed for the (`stream`, `index`) pair.
pub fn derive_seed(master: u64, stream: u64, index: u64) -> u64 {
    mix(mix(master ^ mix(stream)) ^ index)
}

/// The project-wide seedable generator.
pub fn rng_from_seed(seed: u64) -> ChaCha20Rng {
    use rand::SeedableRng;
    ChaCha20Rng::seed_from_u64(seed)
}

/// Stream tags for sub-seed derivation.
pub mod stream {
    pub const TRIAL: u64 = 1;
    pub const ROUND: u64 = 2;
    pub const BINARY_SEARCH: u64 = 3;
    pub const GENERATOR: u64 = 4;
    pub const CORRUPTION: u64 = 5;
}
