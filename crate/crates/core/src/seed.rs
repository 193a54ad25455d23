//! Seed derivation for nested deterministic components.
//!
//! Every parallel work unit (tree, fold, grid point) gets its own seed
//! derived from the master seed through `mix`, so results do not depend
//! on scheduling order.

/// splitmix64 finalizer. Bijective on u64, good avalanche.
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derive a child seed from a parent seed and a stream index.
pub fn mix(seed: u64, index: u64) -> u64 {
    splitmix64(seed ^ splitmix64(index))
}
