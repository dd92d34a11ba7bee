//! Seed derivation.
//!
//! All randomness flows from one root seed. Orchestration layers derive
//! per-component seeds as `component_seed(root, STREAM, index)` with the
//! stream constants below, so each component can be reproduced in isolation.
//! Cross-validation additionally fixes the per-run root at `seed + run`.

/// Stratified fold assignment.
pub const STRATIFY: u64 = 1;
/// SMOTE oversampling; index is the fold number.
pub const SMOTE: u64 = 2;
/// Classifier training; index is the fold number.
pub const TRAIN: u64 = 3;
/// LDA Gibbs sampling; index is the candidate topic count.
pub const LDA: u64 = 4;
/// Genetic search over the topic count.
pub const GA: u64 = 5;
/// Per-category topic runs; index is the category's canonical position.
pub const CATEGORY: u64 = 6;

/// Mixes `(root, stream, index)` into a single 64-bit seed (splitmix64
/// finalizer over the three words).
pub fn component_seed(root: u64, stream: u64, index: u64) -> u64 {
    let mut z = root;
    for word in [stream, index] {
        z = z
            .wrapping_add(0x9e37_79b9_7f4a_7c15)
            .wrapping_add(word.wrapping_mul(0xbf58_476d_1ce4_e5b9));
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^= z >> 31;
    }
    z
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn distinct_streams_and_indices_do_not_collide() {
        let mut seen = std::collections::HashSet::new();
        for root in [0u64, 42, u64::MAX] {
            for stream in 1..=6 {
                for index in 0..32 {
                    assert!(seen.insert(component_seed(root, stream, index)));
                }
            }
        }
    }

    #[test]
    fn derivation_is_stable() {
        assert_eq!(
            component_seed(42, STRATIFY, 0),
            component_seed(42, STRATIFY, 0)
        );
        assert_ne!(component_seed(42, SMOTE, 0), component_seed(42, SMOTE, 1));
    }
}
