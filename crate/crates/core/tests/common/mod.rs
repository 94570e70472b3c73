#![allow(dead_code)]

use game_miner::{Contract, Game, Matrix, Player, Scalar};
use proptest::prelude::*;

/// Entries are multiples of 1/2 in [-5, 5].
pub fn entry() -> impl Strategy<Value = Scalar> {
    (-10i64..=10).prop_map(|n| Scalar::ratio(n, 2))
}

pub fn matrix(rows: usize, cols: usize) -> impl Strategy<Value = Matrix> {
    proptest::collection::vec(proptest::collection::vec(entry(), cols), rows)
        .prop_map(|r| Matrix::from_rows(r).unwrap())
}

pub fn game_of(rows: usize, cols: usize) -> impl Strategy<Value = Game> {
    (matrix(rows, cols), matrix(rows, cols)).prop_map(|(a, b)| Game::new(a, b).unwrap())
}

/// Games with 1 to 3 actions per player.
pub fn game() -> impl Strategy<Value = Game> {
    (1usize..=3, 1usize..=3).prop_flat_map(|(r, c)| game_of(r, c))
}

pub fn player() -> impl Strategy<Value = Player> {
    prop_oneof![Just(Player::A), Just(Player::B)]
}

/// A game together with a contract for one of its players.
pub fn game_and_contract() -> impl Strategy<Value = (Game, Contract)> {
    game().prop_flat_map(|g| {
        let (r, c) = (g.rows(), g.cols());
        (Just(g), player(), matrix(r, c)).prop_map(|(g, p, m)| (g, Contract::new(p, m)))
    })
}
