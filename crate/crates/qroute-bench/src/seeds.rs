//! Deterministic child-seed derivation.
//!
//! A sweep point, circuit index and stream tag are packed into disjoint bit
//! fields and pushed through splitmix64 after mixing with the hashed base
//! seed.  splitmix64 is a bijection on u64, so for a fixed base seed the
//! children are injective over the packed domain (point and index below
//! 2^30, stream below 16).  Per-circuit results therefore do not depend on
//! execution order or worker count.

/// Independent random streams derived per (point, circuit index).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeedStream {
    Circuit = 0,
    Layout = 1,
    Route = 2,
}

pub fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

pub fn child_seed(base: u64, point: usize, index: usize, stream: SeedStream) -> u64 {
    assert!(point < (1 << 30), "sweep point out of seed domain");
    assert!(index < (1 << 30), "circuit index out of seed domain");
    let packed = ((point as u64) << 34) | ((index as u64) << 4) | stream as u64;
    splitmix64(splitmix64(base) ^ packed)
}
