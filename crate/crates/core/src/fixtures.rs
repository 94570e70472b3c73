//! Small reference games used throughout the tests, benches and CLI fixtures.

use crate::game::{Contract, Game, Matrix, Player};

fn labelled(a: Matrix, b: Matrix, rows: &[&str], cols: &[&str]) -> Game {
    Game::new(a, b)
        .and_then(|g| {
            g.with_labels(
                rows.iter().map(|s| s.to_string()).collect(),
                cols.iter().map(|s| s.to_string()).collect(),
            )
        })
        .expect("fixture game is well formed")
}

/// Two producers choosing high (H) or low (L) output. Unique NE (H, H).
pub fn cell_phone() -> Game {
    labelled(
        Matrix::parse(&[&["1", "2"], &["0", "1"]]),
        Matrix::parse(&[&[".5", "0"], &["0", "1"]]),
        &["H", "L"],
        &["H", "L"],
    )
}

/// Net transfers of the up-front-payment contract offered to A in the
/// cell-phone game: pay 1.5 now, receive `[[0, 1.01], [1.5, 2]]` back.
pub fn cell_phone_literal_contract() -> Contract {
    Contract::new(Player::A, Matrix::parse(&[&["1.5", ".49"], &["0", "-.5"]]))
}

/// 3x3 game with unique NE (y, y) where a single-contract auction leaves
/// both players worse off.
pub fn flow_example() -> Game {
    labelled(
        Matrix::from_ints(&[&[-1, -1, 0], &[-1, 0, 3], &[-2, -1, 2]]),
        Matrix::from_ints(&[&[2, 3, 0], &[-1, 0, -1], &[-2, -1, -1]]),
        &["x", "y", "z"],
        &["x", "y", "z"],
    )
}

/// 3x3 game in which `x` is strictly dominant for B; unique NE (x, x).
pub fn sequential_example() -> Game {
    labelled(
        Matrix::from_ints(&[&[2, 0, 5], &[1, 1, 2], &[0, 0, 2]]),
        Matrix::from_ints(&[&[5, 0, 4], &[3, 2, 0], &[3, 1, 0]]),
        &["x", "y", "z"],
        &["x", "y", "z"],
    )
}

/// A pays 2 on (x, x).
pub fn sequential_contract_a() -> Contract {
    Contract::new(Player::A, Matrix::from_ints(&[&[2, 0, 0], &[0, 0, 0], &[0, 0, 0]]))
}

/// B pays 4 on (y, x) and 3 on (y, y), as literally printed. On its own it
/// does not move B off `x` against A's `x`.
pub fn sequential_contract_b_literal() -> Contract {
    Contract::new(Player::B, Matrix::from_ints(&[&[0, 0, 0], &[4, 3, 0], &[0, 0, 0]]))
}

/// The literal B contract plus a charge of 2 on (x, x), which makes (x, z)
/// the unique equilibrium once A's contract is in force.
pub fn sequential_contract_b() -> Contract {
    Contract::new(Player::B, Matrix::from_ints(&[&[2, 0, 0], &[4, 3, 0], &[0, 0, 0]]))
}

/// 3x3 game where both players have `z` strictly dominant; unique NE (z, z).
pub fn miner_offers_example() -> Game {
    labelled(
        Matrix::from_ints(&[&[5, 1, 1], &[5, 1, 2], &[6, 2, 3]]),
        Matrix::from_ints(&[&[5, 5, 6], &[1, 1, 2], &[1, 2, 3]]),
        &["x", "y", "z"],
        &["x", "y", "z"],
    )
}

/// The miner's offer to A; the offer to B is its transpose.
pub fn miner_offer_a() -> Contract {
    Contract::new(
        Player::A,
        Matrix::parse(&[&["2.99", "-2", "0"], &["3", "-1", "-3"], &["4", ".5", "0"]]),
    )
}

pub fn miner_offer_b() -> Contract {
    Contract::new(Player::B, miner_offer_a().transfers().transpose())
}
