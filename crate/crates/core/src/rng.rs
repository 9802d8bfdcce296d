//! Deterministic RNG substreams.
//!
//! All randomness flows from one 64-bit seed. Each consumer derives an
//! independent ChaCha stream keyed by a [`Domain`] tag and an index (sample
//! index, trial index, ...). Keying streams by index rather than by worker
//! makes every parallel loop reproduce bit-identically across thread counts.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Named substream domains. The numeric tags are part of the reproducibility
/// contract: changing them changes every seeded artifact.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[repr(u16)]
pub enum Domain {
    Draw = 1,
    FilterAccept = 2,
    MixedFilter = 3,
    MixedAugment = 4,
    AugmentDraw = 5,
    Evidence = 6,
    FitStart = 7,
    Trial = 8,
    Joint = 9,
}

/// An independent generator for `(seed, domain, index)`.
pub fn substream(seed: u64, domain: Domain, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    debug_assert!(index < 1 << 48, "substream index exceeds 48 bits");
    rng.set_stream(((domain as u64) << 48) | (index & 0x0000_FFFF_FFFF_FFFF));
    rng
}

/// Derive a child seed (per pipeline stage, per scenario, ...) from a parent
/// seed and a salt. SplitMix64 finalizer; stable across platforms.
pub fn derive_seed(seed: u64, salt: u64) -> u64 {
    let mut z = seed ^ salt.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn substreams_are_reproducible() {
        let a: Vec<u64> = (0..8).map(|_| 0u64).collect();
        let _ = a;
        let mut r1 = substream(42, Domain::Draw, 7);
        let mut r2 = substream(42, Domain::Draw, 7);
        let x: u64 = r1.random();
        let y: u64 = r2.random();
        assert_eq!(x, y);
    }

    #[test]
    fn substreams_differ_by_domain_and_index() {
        let mut a = substream(42, Domain::Draw, 0);
        let mut b = substream(42, Domain::FilterAccept, 0);
        let mut c = substream(42, Domain::Draw, 1);
        let (x, y, z): (u64, u64, u64) = (a.random(), b.random(), c.random());
        assert_ne!(x, y);
        assert_ne!(x, z);
    }

    #[test]
    fn derived_seeds_spread() {
        assert_ne!(derive_seed(1, 0), derive_seed(1, 1));
        assert_ne!(derive_seed(1, 0), derive_seed(2, 0));
    }
}
