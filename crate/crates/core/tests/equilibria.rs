mod common;

use common::*;
use game_miner::equilibrium::{
    enumerate_nash, grid_oracle_nash, support_enumeration, vertex_enumeration, GridNeighbourhood,
};
use game_miner::{is_nash, pure_best_responses, MixedStrategy, Player};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn every_reported_profile_is_an_equilibrium(game in game()) {
        let set = enumerate_nash(&game);
        prop_assert!(!set.is_empty());
        for ne in set.equilibria() {
            prop_assert!(is_nash(&game, ne).unwrap());
        }
        // Nondegenerate games have isolated equilibria found by both methods.
        let (vertices, degenerate) = vertex_enumeration(&game);
        prop_assert_eq!(degenerate, set.degenerate());
        if !degenerate {
            prop_assert!(set.complete());
            let mut supports = support_enumeration(&game);
            supports.sort();
            prop_assert_eq!(supports, vertices);
        }
    }

    /// Pure profiles are polytope vertices, so every pure equilibrium is
    /// reported even in degenerate games.
    #[test]
    fn pure_equilibria_are_found(game in game()) {
        let set = enumerate_nash(&game);
        for r in 0..game.rows() {
            for c in 0..game.cols() {
                let a = MixedStrategy::pure(Player::A, game.rows(), r);
                let b = MixedStrategy::pure(Player::B, game.cols(), c);
                let rows = pure_best_responses(&game, Player::A, &b).unwrap();
                let cols = pure_best_responses(&game, Player::B, &a).unwrap();
                if rows.contains(&r) && cols.contains(&c) {
                    prop_assert!(set.contains(&game_miner::StrategyProfile::new(a, b).unwrap()));
                }
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    /// Every exact equilibrium has a grid approximate equilibrium within one
    /// grid step.
    #[test]
    fn grid_oracle_covers_exact_equilibria(game in (1usize..=3, 1usize..=3).prop_flat_map(|(r, c)| game_of(r, c))) {
        let n = 24;
        let grid = grid_oracle_nash(&game, n);
        for ne in enumerate_nash(&game).equilibria() {
            let near = GridNeighbourhood::new(ne, n, 1);
            prop_assert!(grid.iter().any(|p| near.contains(p)), "no grid point near {:?}", ne);
        }
    }
}
