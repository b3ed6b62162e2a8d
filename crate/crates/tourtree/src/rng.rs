//! Seed discipline. Every randomized entry point takes an explicit `u64`
//! seed; batch experiments derive one independent stream per trial from a
//! single master seed so runs replay byte-for-byte regardless of thread
//! count or trial order.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The stream cipher RNG used throughout the crate: fast, splittable by
/// seed, and stable across platforms and releases.
pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// SplitMix64 step: the standard 64-bit finalizer-based generator. Used only
/// to stretch a master seed into well-separated per-trial seeds.
pub fn splitmix64(state: u64) -> u64 {
    let mut z = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Per-trial seed: trial `index` under `master` gets
/// `splitmix64(master + (index + 1) * GOLDEN)` where GOLDEN is the SplitMix64
/// increment. Trials are independent of each other and of the master stream.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    splitmix64(master.wrapping_add((index.wrapping_add(1)).wrapping_mul(0x9E37_79B9_7F4A_7C15)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn derived_seeds_are_distinct_and_stable() {
        let master = 0xDEAD_BEEF;
        let s: Vec<u64> = (0..64).map(|i| derive_seed(master, i)).collect();
        let mut sorted = s.clone();
        sorted.sort_unstable();
        sorted.dedup();
        assert_eq!(sorted.len(), 64, "collision among derived seeds");
        // frozen: replaying the same (master, index) must give the same seed
        assert_eq!(derive_seed(master, 0), derive_seed(0xDEAD_BEEF, 0));
        assert_ne!(derive_seed(master, 0), derive_seed(master, 1));
    }

    #[test]
    fn rng_replays_byte_identically() {
        let mut a = rng_from_seed(7);
        let mut b = rng_from_seed(7);
        for _ in 0..100 {
            assert_eq!(a.gen::<u64>(), b.gen::<u64>());
        }
    }

    #[test]
    fn splitmix_reference_values() {
        // reference vector from the public-domain splitmix64.c test output
        assert_eq!(splitmix64(0), 0xE220_A839_7B1D_CDAF);
        assert_eq!(splitmix64(1), 0x910A_2DEC_8902_5CC1);
    }
}
