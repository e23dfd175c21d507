//! Seed plumbing. Every random choice in the crate flows through the 64-bit
//! permuted-congruential family (PCG) from `rand_pcg`, which is portable and
//! stable across platforms, so identical seeds give identical streams.

use rand_pcg::Pcg64Mcg;
use rand::SeedableRng;

/// The crate-wide generator type.
pub type AfdmRng = Pcg64Mcg;

/// A PCG seeded directly from a 64-bit seed.
pub fn rng_from_seed(seed: u64) -> AfdmRng {
    Pcg64Mcg::seed_from_u64(seed)
}

/// SplitMix64 finalizer; used to derive independent streams from one seed.
pub fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Key a generator on (seed, member, position). Used by the online bagging
/// ensemble so each member's replication count for each stream position is a
/// pure function of the three keys.
pub fn keyed_rng(seed: u64, member: u64, position: u64) -> AfdmRng {
    let a = splitmix64(seed ^ 0x517C_C1B7_2722_0A95u64.wrapping_mul(member.wrapping_add(1)));
    let b = splitmix64(a ^ position.wrapping_mul(0x2545_F491_4F6C_DD1D));
    Pcg64Mcg::seed_from_u64(b)
}

/// Derive a fresh stream for a named sub-purpose (fold seeds, member seeds).
pub fn derive_seed(seed: u64, tag: u64) -> u64 {
    splitmix64(seed ^ splitmix64(tag))
}
