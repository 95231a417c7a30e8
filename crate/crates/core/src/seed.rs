//! Deterministic seed derivation.
//!
//! All randomness in the crate flows from explicit 64-bit seeds. Sub-seeds
//! (per trial, per flow, per pipeline stage) are derived with a fixed mixing
//! function so results are reproducible across runs, platforms and thread
//! counts. The mixer is the splitmix64 finalizer, which is a bijection on
//! u64 with good avalanche behavior.

/// splitmix64 finalizer.
pub fn mix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// Folds a sequence of components into one seed. Order matters.
pub fn derive_seed(parts: &[u64]) -> u64 {
    let mut h = 0x853c_49e6_748f_ea9b;
    for &p in parts {
        h = mix64(h ^ p);
    }
    h
}
