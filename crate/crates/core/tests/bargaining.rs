mod common;

use common::*;
use game_miner::bargaining::*;
use game_miner::equilibrium::enumerate_nash;
use game_miner::{q, Game, Player};
use proptest::prelude::*;

fn menu(game: &Game) -> ContractMenu {
    let params = MenuParams {
        steps: 3,
        ..MenuParams::default()
    };
    generate_candidate_menu(game, &params, &StrategyMap::default()).unwrap()
}

fn two_or_three() -> impl Strategy<Value = Game> {
    (2usize..=3, 2usize..=3).prop_flat_map(|(r, c)| game_of(r, c))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn menu_equilibria_respect_the_bounds(game in two_or_three()) {
        let map = StrategyMap::default();
        let menu = menu(&game);
        let bound = spe_payment_upper_bound(&game);
        let one = match one_contract_equilibrium(&game, &menu, &map) {
            Ok(o) => o,
            Err(game_miner::Error::NoPureOfferEquilibrium(_)) => return Ok(()),
            Err(e) => panic!("{e}"),
        };
        prop_assert!(one.payoff_g <= bound, "{} > {}", one.payoff_g, bound);
        prop_assert!(one.conservation_gap(&game).is_zero());
        // The restricted miner need not do better on a finite menu: players
        // cannot always undercut their joint-game payment, so only
        // conservation is checked here.
        if let Ok(both) = both_contracts_equilibrium(&game, &menu, &map) {
            prop_assert!(both.conservation_gap(&game).is_zero());
        }
        for first in Player::BOTH {
            let seq = sequential_equilibrium(&game, &menu, &map, first).unwrap();
            prop_assert!(seq.conservation_gap(&game).is_zero());
        }
    }

    #[test]
    fn dual_offers_are_sound(game in two_or_three()) {
        let map = StrategyMap::default();
        if let Some(dual) = synthesize_dual_offer(&game, &q("1/100"), &map).unwrap() {
            prop_assert!(dual.miner_profit <= dual_offer_profit_bound(&game, false));
            let acc = build_acceptance_game(&game, &dual.offer_a, &dual.offer_b, &map).unwrap();
            for p in Player::BOTH {
                for other in 0..2 {
                    prop_assert!(acc.entry(p, 0, other) >= acc.entry(p, 1, other));
                }
            }
            let out = miner_offers_outcome(&game, &dual, &map).unwrap();
            prop_assert!(out.conservation_gap(&game).is_zero());
        }
    }

    #[test]
    fn null_menus_give_the_base_outcome(game in game()) {
        let map = StrategyMap::default();
        let menu = ContractMenu::null_only(&game);
        let base = map.select(&game_miner::no_contract(&game)).unwrap();
        prop_assert!(enumerate_nash(&game).contains(&base));
        for first in Player::BOTH {
            let seq = sequential_equilibrium(&game, &menu, &map, first).unwrap();
            prop_assert_eq!(&seq.final_profile, &base);
            prop_assert!(seq.payoff_g.is_zero());
        }
    }
}
