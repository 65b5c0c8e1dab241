//! Seedable, stable random number generation.
//!
//! All sampling in this crate goes through [`Xoshiro256PlusPlus`], seeded
//! from a single `u64` via SplitMix64 (the seeding procedure recommended by
//! the xoshiro authors and implemented by `SeedableRng::seed_from_u64`).
//! The generator is pinned by the test vectors below so that instances
//! sampled from a seed stay reproducible across releases; serialized
//! instance files remain the primary exchange artifact.

use rand::SeedableRng;
pub use rand_xoshiro::Xoshiro256PlusPlus;

/// The generator used everywhere a seed appears in a public API.
pub type SeedableStdRng = Xoshiro256PlusPlus;

/// Build the crate-wide RNG from a `u64` seed.
pub fn rng_from_seed(seed: u64) -> SeedableStdRng {
    Xoshiro256PlusPlus::seed_from_u64(seed)
}

/// SplitMix64 step; used to derive independent stream seeds.
fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derive the seed of worker stream `index` from a master seed.
///
/// Streams for distinct indices are independent for all practical purposes;
/// the derivation is fixed so that parallel runs are reproducible given
/// (master seed, worker count).
pub fn derive_stream_seed(master: u64, index: u64) -> u64 {
    let mut state = master ^ 0xa076_1d64_78bd_642f;
    let mut out = splitmix64(&mut state);
    for _ in 0..=(index % 4) {
        out = out.wrapping_add(splitmix64(&mut state));
    }
    let mut state2 = out ^ index.wrapping_mul(0xe703_7ed1_a0b4_28db);
    splitmix64(&mut state2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::RngCore;

    // Pinned outputs; a change here means seeded reproducibility broke.
    #[test]
    fn seed_42_vector_is_stable() {
        let mut rng = rng_from_seed(42);
        let got: Vec<u64> = (0..4).map(|_| rng.next_u64()).collect();
        assert_eq!(
            got,
            vec![
                15021278609987233951,
                5881210131331364753,
                18149643915985481100,
                12933668939759105464,
            ]
        );
    }

    #[test]
    fn streams_differ_per_index() {
        let a = derive_stream_seed(7, 0);
        let b = derive_stream_seed(7, 1);
        let c = derive_stream_seed(8, 0);
        assert_ne!(a, b);
        assert_ne!(a, c);
    }
}
