//! Child-seed derivation for reproducible, order-independent sweeps.

const GAMMA: u64 = 0x9e37_79b9_7f4a_7c15;

/// The SplitMix64 output finalizer (a bijection on `u64`).
pub fn splitmix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed for the task identified by `indices` under `master`.
///
/// Algorithm:
///
/// ```text
/// h ← mix(master + γ·(len + 1))
/// for i in indices: h ← mix(h ⊕ (i + γ))
/// ```
///
/// where `mix` is [`splitmix64`], `γ = 0x9e3779b97f4a7c15` and all arithmetic
/// wraps modulo 2⁶⁴. Since `mix` is a bijection, two tuples of the same
/// length that differ only in their last index never collide.
pub fn derive_seed(master: u64, indices: &[u64]) -> u64 {
    let len = indices.len() as u64;
    let mut h = splitmix64(master.wrapping_add(GAMMA.wrapping_mul(len + 1)));
    for &i in indices {
        h = splitmix64(h ^ i.wrapping_add(GAMMA));
    }
    h
}
