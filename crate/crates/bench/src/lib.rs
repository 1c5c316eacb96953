//! Shared inputs for the criterion benches.

use realforms::{construct_extremal, EquipmentModel, SwellingSystem};

/// Extremal polygon models for `4 ≤ n ≤ max_n`, `m = 1`.
pub fn extremal_models(max_n: usize) -> Vec<EquipmentModel> {
    (4..=max_n)
        .map(|n| construct_extremal(n, 1).expect("n in domain"))
        .collect()
}

/// A two-contour system with a few automorphisms, used to stress
/// canonicalization.
pub fn symmetric_system() -> SwellingSystem {
    SwellingSystem::new(4, vec![vec![1, 2, 1, 2, 3, 4], vec![3, 4, 1, 2]])
}
