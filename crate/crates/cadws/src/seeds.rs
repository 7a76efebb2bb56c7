//! Deterministic seed derivation for independent RNG streams.

/// Derives a child seed from a parent seed and a stream tag.
///
/// SplitMix64 finalizer over the combined input. Stable across platforms and
/// releases, so every RNG stream in the system is reconstructable from the
/// top-level scenario or trainer seed.
pub fn derive_seed(parent: u64, tag: u64) -> u64 {
    let mut z = parent
        .wrapping_mul(0x9e37_79b9_7f4a_7c15)
        .wrapping_add(tag)
        .wrapping_add(0x2545_f491_4f6c_dd1d);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derives a seed from a parent and a multi-part tag path.
pub fn derive_seed_path(parent: u64, tags: &[u64]) -> u64 {
    tags.iter().fold(parent, |acc, &t| derive_seed(acc, t))
}
