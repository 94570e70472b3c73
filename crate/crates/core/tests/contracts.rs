mod common;

use common::*;
use game_miner::equilibrium::enumerate_nash;
use game_miner::{apply_contract, expected_payoff, q, Contract, Game, Matrix, Player, Scalar, StrategyProfile};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn shifting_a_contract_keeps_the_equilibria((game, contract) in game_and_contract(), x in entry()) {
        let payer = contract.payer();
        let before = apply_contract(&game, &contract).unwrap();
        let after = apply_contract(&game, &contract.shifted(&x)).unwrap();
        let ne_before = enumerate_nash(before.effective());
        let ne_after = enumerate_nash(after.effective());
        prop_assert_eq!(ne_before.equilibria(), ne_after.equilibria());
        for ne in ne_before.equilibria() {
            prop_assert_eq!(
                after.effective_payoff(ne, payer),
                before.effective_payoff(ne, payer) - &x
            );
            prop_assert_eq!(after.expected_transfers(ne), before.expected_transfers(ne) + &x);
        }
    }

    #[test]
    fn expected_payoff_is_bilinear(game in game(), wa in proptest::collection::vec(1i64..5, 3), wb in proptest::collection::vec(1i64..5, 3)) {
        let norm = |w: &[i64]| {
            let total: i64 = w.iter().sum();
            w.iter().map(|&x| Scalar::ratio(x, total)).collect::<Vec<_>>()
        };
        let x = norm(&wa[..game.rows()]);
        let y = norm(&wb[..game.cols()]);
        let profile = StrategyProfile::from_probs(x.clone(), y.clone());
        for p in Player::BOTH {
            let mut sum = Scalar::zero();
            for (r, xr) in x.iter().enumerate() {
                for (c, yc) in y.iter().enumerate() {
                    sum += xr * yc * game.payoff(p).get(r, c);
                }
            }
            prop_assert_eq!(expected_payoff(&game, &profile, p).unwrap(), sum);
        }
    }
}

/// B's payoffs plus a bonus that makes column `dominant` strictly dominant.
fn with_dominant_column(game: &Game, dominant: usize) -> Game {
    let bonus = q("11");
    let mut b = game.payoff(Player::B).clone();
    for r in 0..game.rows() {
        let v = b.get(r, dominant) + &bonus;
        b.set(r, dominant, v);
    }
    Game::new(game.payoff(Player::A).clone(), b).unwrap()
}

fn dominance_case() -> impl Strategy<Value = (Game, Vec<Matrix>)> {
    (1usize..=3, 2usize..=3)
        .prop_flat_map(|(r, c)| (game_of(r, c), 0..c, proptest::collection::vec(matrix(r, c), 50)))
        .prop_map(|(g, d, contracts)| (with_dominant_column(&g, d), contracts))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    /// With a strictly dominant opponent, no contract lets both the payer and
    /// the miner strictly gain in any equilibrium.
    #[test]
    fn strict_dominance_blocks_mining((game, contracts) in dominance_case(), swap in any::<bool>()) {
        let game = if swap { game.transpose_players() } else { game };
        let payer = if swap { Player::B } else { Player::A };
        let best_before = enumerate_nash(&game)
            .equilibria()
            .iter()
            .map(|ne| expected_payoff(&game, ne, payer).unwrap())
            .max()
            .unwrap();
        for m in contracts {
            let m = if swap { m.transpose() } else { m };
            let post = apply_contract(&game, &Contract::new(payer, m)).unwrap();
            for ne in enumerate_nash(post.effective()).equilibria() {
                let gain = post.effective_payoff(ne, payer) - &best_before;
                let transfer = post.expected_transfers(ne);
                prop_assert!(!(gain.is_positive() && transfer.is_positive()));
            }
        }
    }
}
