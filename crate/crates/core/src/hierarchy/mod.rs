//! Collapsing maps, Duhamel trees, board-game classes and evaluators for the
//! Duhamel expansion of the Boltzmann hierarchy.
//!
//! Hierarchy states are kept factorised: a `(k+1)`-particle state is a list of
//! single-particle fields, and a collision merges two of them. The only full
//! tensor code is the brute-force reference in [`oracle`].

pub mod duhamel;
pub mod expand;
pub mod identity;
pub mod maps;
pub mod oracle;
pub mod time;
pub mod tree;

pub use duhamel::{
    contraction_demo, contraction_horizon, duhamel_reconstruction, ContractionConstants, ContractionRow,
    ContractionTable, DuhamelReport,
};
pub use expand::{eval_j_direct, eval_j_direct_slots, expand_tree, expand_tree_slots, Collider, SlotState};
pub use identity::{board_game_identity, BoardGameReport};
pub use maps::{
    catalan, class_table_csv, echelon_reduce, enumerate_collapse_maps, km_classes, CollapseMap, EchelonClass, MAX_DEPTH,
};
pub use oracle::tensor_oracle_d1;
pub use time::{simplex_rule, simplex_volume, time_domain_sample, TimeDomainSample};
pub use tree::{build_duhamel_tree, Child, DuhamelTree};

/// `(4 C C0 T^{1/2})^k`, the bound on the depth-`k` remainder.
pub fn iterate_bound(k: usize, t: f64, c: f64, c0: f64) -> f64 {
    (4.0 * c * c0 * t.sqrt()).powi(k as i32)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn iterate_bound_examples() {
        // 4 C C0 T^{1/2} = 1/2
        let (c, c0, t) = (0.5, 0.25, 1.0);
        for k in 0..6 {
            assert!((iterate_bound(k, t, c, c0) - 0.5f64.powi(k as i32)).abs() < 1e-15);
        }
        assert_eq!(iterate_bound(0, 3.0, 2.0, 2.0), 1.0);
        assert_eq!(iterate_bound(2, 0.0, 2.0, 2.0), 0.0);
    }
}
