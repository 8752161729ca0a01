//! Deterministic random number generation.
//!
//! Every randomized routine in the crate draws from [`Pcg64`]
//! (PCG XSL RR 128/64), seeded through `SeedableRng::seed_from_u64`. No path
//! reads OS entropy, so equal seeds give bit-identical output on every
//! platform.

use rand::SeedableRng;

pub use rand_pcg::Pcg64;

/// Builds the crate PRNG from a 64-bit seed.
pub fn seeded(seed: u64) -> Pcg64 {
    Pcg64::seed_from_u64(seed)
}

/// SplitMix64 finalizer.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives the seed of stream `index` from `master`.
///
/// `mix(m, i) = splitmix64(m ^ splitmix64(i))`. Bootstrap replicate `i` uses
/// `mix(master_seed, i)` whatever the execution strategy, which is what makes
/// single, parallel and distributed runs agree bit for bit.
pub fn mix(master: u64, index: u64) -> u64 {
    splitmix64(master ^ splitmix64(index))
}
