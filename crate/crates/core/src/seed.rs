//! Seed plumbing shared by every randomized routine.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The single RNG stream used throughout the crate.
pub type Rng = ChaCha8Rng;

pub fn rng(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// 64-bit FNV-1a. Used to derive per-stage seeds; stable across platforms and builds.
pub fn fnv1a(text: &str) -> u64 {
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    for byte in text.bytes() {
        hash ^= u64::from(byte);
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    hash
}

/// Seed for a named pipeline stage: `fnv1a(stage) ^ seed`.
pub fn stage_seed(seed: u64, stage: &str) -> u64 {
    fnv1a(stage) ^ seed
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fnv_reference_values() {
        assert_eq!(fnv1a(""), 0xcbf2_9ce4_8422_2325);
        assert_eq!(fnv1a("a"), 0xaf63_dc4c_8601_ec8c);
    }

    #[test]
    fn stage_seeds_differ() {
        assert_ne!(stage_seed(7, "amplify"), stage_seed(7, "color"));
        assert_eq!(stage_seed(7, "amplify"), stage_seed(7, "amplify"));
    }
}
