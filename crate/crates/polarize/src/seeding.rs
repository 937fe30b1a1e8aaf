//! Deterministic seed derivation.
//!
//! Batch drivers (optimizer multi-starts, local-search restarts, random
//! trials) give every unit of work its own RNG seeded from the user seed and
//! the unit's index. Results are then independent of scheduling order, which
//! keeps parallel and sequential runs bit-identical.

/// Derives a child seed from a parent seed and a stream index.
///
/// SplitMix64 finalizer over the xored inputs: cheap, stateless, and
/// decorrelated enough that neighboring stream indices share no structure.
pub fn derive_seed(seed: u64, stream: u64) -> u64 {
    let mut z = seed ^ stream.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
