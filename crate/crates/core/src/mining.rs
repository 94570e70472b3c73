//! Single-contractor analysis: what one player and the miner can extract from
//! a game through an outcome-contingent contract.
//!
//! Everything here works in the contracting player's own orientation: `own`
//! indexes the contractor's actions and `opp` the opponent's.

use crate::equilibrium::{enumerate_nash, EquilibriumSet};
use crate::error::{Error, Result};
use crate::game::{
    apply_contract, dominant_strategy, is_best_response, Contract, Dominance, Game, Matrix,
    MixedStrategy, Player, StrategyProfile,
};
use crate::lp::{solve_lp, LinearProgram, Relation, Sense};
use crate::scalar::Scalar;

/// One point of a contractor's aggregate payoff set: the contractor's base
/// payoff at an equilibrium of the post-contract game.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AggregateOutcome {
    pub value: Scalar,
    pub witness: StrategyProfile,
    pub contract: Contract,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SynthesisParams {
    pub epsilon: Scalar,
    /// The contractor's target share of the aggregate payoff.
    pub division: Scalar,
    pub target: Option<StrategyProfile>,
}

impl SynthesisParams {
    pub fn new(epsilon: Scalar, division: Scalar, target: Option<StrategyProfile>) -> Result<Self> {
        if !epsilon.is_positive() {
            return Err(Error::NonPositiveEpsilon);
        }
        Ok(SynthesisParams {
            epsilon,
            division,
            target,
        })
    }
}

impl Default for SynthesisParams {
    fn default() -> Self {
        SynthesisParams {
            epsilon: Scalar::ratio(1, 100),
            division: Scalar::zero(),
            target: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Feasibility {
    Yes,
    /// The opponent has a strictly dominant action, so no contract lets both
    /// the contractor and the miner strictly gain at any equilibrium.
    NoStrictDominance,
    /// The opponent has a weakly dominant action, so no contract lets both
    /// strictly gain at every equilibrium.
    NoWeakDominanceEveryNe,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MiningVerdict {
    pub feasible: Feasibility,
    pub detail: String,
}

fn profile_for(player: Player, own: MixedStrategy, opp: MixedStrategy) -> StrategyProfile {
    let (a, b) = match player {
        Player::A => (own, opp),
        Player::B => (opp, own),
    };
    StrategyProfile::new(a, b).expect("owners assigned by construction")
}

/// Converts an own-by-opponent matrix into the game's row-by-column layout.
fn oriented(player: Player, own_rows: Vec<Vec<Scalar>>) -> Matrix {
    let m = Matrix::from_rows(own_rows).expect("nonempty matrix");
    match player {
        Player::A => m,
        Player::B => m.transpose(),
    }
}

fn check_payer(contract: &Contract, player: Player) -> Result<()> {
    if contract.payer() != player {
        return Err(Error::WrongPayer {
            expected: player,
            found: contract.payer(),
        });
    }
    Ok(())
}

/// The contractor's base payoff at every listed equilibrium of `Γ(contract)`.
pub fn aggregate_payoff_set(game: &Game, contract: &Contract, player: Player) -> Result<Vec<AggregateOutcome>> {
    check_payer(contract, player)?;
    let post = apply_contract(game, contract)?;
    Ok(enumerate_nash(post.effective())
        .equilibria()
        .iter()
        .map(|ne| AggregateOutcome {
            value: post.base_payoff(ne, player),
            witness: ne.clone(),
            contract: contract.clone(),
        })
        .collect())
}

/// Best contractor payoff while the opponent plays one fixed pure action and
/// that action is a best response.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MaxAggCandidate {
    pub opponent_action: usize,
    pub value: Scalar,
    pub strategy: MixedStrategy,
}

/// One LP per opponent action `b`: maximize the contractor's payoff against `b`
/// over its mixed strategies to which `b` is a best response. Opponent actions
/// that are never best responses are skipped.
pub fn maxagg_candidates(game: &Game, player: Player) -> Vec<MaxAggCandidate> {
    let opp = player.other();
    let (n_own, n_opp) = (game.actions(player), game.actions(opp));
    (0..n_opp)
        .filter_map(|b| {
            let objective = (0..n_own).map(|a| game.entry(player, a, b).clone()).collect();
            let mut lp = LinearProgram::new(Sense::Maximize, objective);
            lp.add(vec![Scalar::one(); n_own], Relation::Eq, Scalar::one());
            for other in (0..n_opp).filter(|&o| o != b) {
                let coeffs = (0..n_own)
                    .map(|a| game.entry(opp, b, a) - game.entry(opp, other, a))
                    .collect();
                lp.add(coeffs, Relation::Ge, Scalar::zero());
            }
            let (value, point) = solve_lp(&lp).optimal()?;
            Some(MaxAggCandidate {
                opponent_action: b,
                value,
                strategy: MixedStrategy::new(player, point).expect("LP point lies on the simplex"),
            })
        })
        .collect()
}

/// The indifference contract `D = U_player - a * ones`, under which the
/// contractor's effective payoff is `a` everywhere.
pub(crate) fn flat_contract(game: &Game, player: Player, level: &Scalar) -> Contract {
    Contract::new(player, game.payoff(player).map(|u| u - level))
}

/// Largest aggregate payoff over all contracts: the contractor's best payoff
/// subject to the opponent best-responding.
///
/// A mixed opponent best response pays a convex combination of tied pure
/// columns, so maximizing over pure opponent actions loses nothing. The
/// returned contract is the total-indifference contract, under which the
/// witness is an equilibrium.
pub fn maxagg(game: &Game, player: Player) -> AggregateOutcome {
    let best = maxagg_candidates(game, player)
        .into_iter()
        .reduce(|best, c| if c.value > best.value { c } else { best })
        .expect("some opponent action is a best response to something");
    let opp = MixedStrategy::pure(player.other(), game.actions(player.other()), best.opponent_action);
    AggregateOutcome {
        value: best.value,
        witness: profile_for(player, best.strategy, opp),
        contract: flat_contract(game, player, &Scalar::zero()),
    }
}

/// Worst equilibrium payoff of the contractor under one contract.
fn worst_outcome(game: &Game, contract: &Contract, player: Player) -> Result<AggregateOutcome> {
    aggregate_payoff_set(game, contract, player)?
        .into_iter()
        .reduce(|worst, o| if o.value < worst.value { o } else { worst })
        .ok_or_else(|| Error::Invariant("post-contract game without equilibria".into()))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MaxMinAgg {
    /// Best worst-case aggregate payoff over the menu (null contract included).
    pub lower: AggregateOutcome,
    /// The maxagg value.
    pub upper: Scalar,
    /// Worst-case outcome of each menu contract, null first.
    pub entries: Vec<AggregateOutcome>,
}

/// Brackets the maximum guaranteed aggregate payoff: the best worst-case value
/// over an explicit menu from below, maxagg from above. Worst cases over
/// degenerate games are exact because a bilinear payoff attains its minimum
/// over an equilibrium component at one of its extreme points.
pub fn maxminagg(game: &Game, player: Player, menu: &[Contract]) -> Result<MaxMinAgg> {
    let null = Contract::null_for(game, player);
    let mut contracts = vec![null.clone()];
    contracts.extend(menu.iter().filter(|c| **c != null).cloned());
    let entries = contracts
        .iter()
        .map(|c| worst_outcome(game, c, player))
        .collect::<Result<Vec<_>>>()?;
    let lower = entries
        .iter()
        .cloned()
        .reduce(|best, o| if o.value > best.value { o } else { best })
        .expect("null contract always present");
    Ok(MaxMinAgg {
        lower,
        upper: maxagg(game, player).value,
        entries,
    })
}

/// A contract under which the contractor is indifferent among all its actions
/// and earns exactly `division`, so that `target` is an equilibrium and the
/// miner receives the rest of the contractor's payoff there.
pub fn synthesize_indifference_contract(
    game: &Game,
    player: Player,
    division: &Scalar,
    target: &StrategyProfile,
) -> Result<Contract> {
    let opp = player.other();
    if !is_best_response(game, opp, target.get(opp), target.get(player))? {
        return Err(Error::NotABestResponse(format!(
            "{}'s part of {} is not a best response to {}'s part in the base game",
            opp, target, player
        )));
    }
    Ok(flat_contract(game, player, division))
}

pub fn shift_contract(contract: &Contract, x: &Scalar) -> Contract {
    contract.shifted(x)
}

/// Result of [`synthesize_epsilon_contract`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EpsilonContract {
    pub contract: Contract,
    /// The unique equilibrium of the post-contract game.
    pub certificate: StrategyProfile,
    /// Contractor's base payoff at the certificate.
    pub value: Scalar,
    /// `value >= maxagg - k * epsilon` is guaranteed.
    pub k: Scalar,
}

/// Closed interval of `p` in [0, 1] satisfying `alpha + beta p >= 0` for all
/// given pairs.
fn interval(constraints: &[(Scalar, Scalar)]) -> Option<(Scalar, Scalar)> {
    let (mut lo, mut hi) = (Scalar::zero(), Scalar::one());
    for (alpha, beta) in constraints {
        if beta.is_zero() {
            if alpha.is_negative() {
                return None;
            }
        } else {
            let root = -alpha / beta;
            if beta.is_positive() {
                lo = lo.max(root);
            } else {
                hi = hi.min(root);
            }
        }
    }
    (lo <= hi).then_some((lo, hi))
}

/// Range of `p` (weight on `s1`, rest on `s2`) over which opponent action `c`
/// is a best response.
fn br_interval(game: &Game, player: Player, s1: usize, s2: usize, c: usize) -> Option<(Scalar, Scalar)> {
    let opp = player.other();
    let constraints: Vec<_> = (0..game.actions(opp))
        .filter(|&o| o != c)
        .map(|o| {
            let at1 = game.entry(opp, c, s1) - game.entry(opp, o, s1);
            let at2 = game.entry(opp, c, s2) - game.entry(opp, o, s2);
            // at2 + (at1 - at2) p >= 0
            (at2.clone(), at1 - at2)
        })
        .collect();
    interval(&constraints)
}

/// Contractor effective payoffs (own x opp) for one maxagg candidate, or why
/// the candidate cannot be handled.
fn epsilon_effective(
    game: &Game,
    player: Player,
    cand: &MaxAggCandidate,
    eps: &Scalar,
) -> std::result::Result<Vec<Vec<Scalar>>, String> {
    let opp = player.other();
    let (n_own, n_opp) = (game.actions(player), game.actions(opp));
    let support = cand.strategy.support();
    let b_star = cand.opponent_action;
    match support.as_slice() {
        [a_star] => {
            let own = MixedStrategy::pure(player, n_own, *a_star);
            let br = crate::game::pure_best_responses(game, opp, &own).expect("dimensions agree");
            if br != [b_star] {
                return Err(format!(
                    "opponent is not uniquely best-responding at pure witness {}",
                    game.action_name(player, *a_star)
                ));
            }
            // Make the witness action strictly dominant.
            Ok((0..n_own)
                .map(|a| vec![if a == *a_star { eps.clone() } else { Scalar::zero() }; n_opp])
                .collect())
        }
        [s1, s2] => {
            let (s1, s2) = (*s1, *s2);
            let p_star = cand.strategy.probs()[s1].clone();
            let half = Scalar::ratio(1, 2);
            let (lo, hi) = br_interval(game, player, s1, s2, b_star)
                .ok_or_else(|| "witness action is not a best response on its support".to_string())?;
            // +1: the witness column lies below p*, so push p upwards against it.
            let dir = if hi == p_star && lo < p_star {
                Scalar::one()
            } else if lo == p_star && hi > p_star {
                -Scalar::one()
            } else {
                return Err("witness column is not a one-sided best response at the witness".into());
            };
            let mut diff = vec![Scalar::zero(); n_opp];
            diff[b_star] = &dir * eps;
            for c in (0..n_opp).filter(|&c| c != b_star) {
                let Some((l, h)) = br_interval(game, player, s1, s2, c) else {
                    continue;
                };
                let below = l < p_star;
                let above = h > p_star;
                diff[c] = match (below, above) {
                    (true, false) => half.clone(),
                    (false, true) => -half.clone(),
                    _ => Scalar::zero(),
                };
            }
            Ok((0..n_own)
                .map(|a| {
                    if a == s1 {
                        diff.clone()
                    } else if a == s2 {
                        vec![Scalar::zero(); n_opp]
                    } else {
                        vec![-Scalar::one(); n_opp]
                    }
                })
                .collect())
        }
        _ => Err(format!("witness support of size {} is not supported", support.len())),
    }
}

fn describe_set(game: &Game, set: &EquilibriumSet) -> String {
    let listed: Vec<String> = set.equilibria().iter().map(|p| p.describe(game)).collect();
    format!(
        "{} equilibria{}: {}",
        set.len(),
        if set.complete() { "" } else { " (incomplete list)" },
        listed.join(", ")
    )
}

/// A contract whose post-contract game has a unique, certified equilibrium
/// with aggregate payoff at least `maxagg - k * epsilon`.
///
/// Starts from the indifference contract at a maxagg witness and perturbs the
/// contractor's effective payoffs so that best responses point towards the
/// witness. Witnesses with a pure contractor strategy and a unique opponent
/// best response, or a two-action contractor support, are handled.
pub fn synthesize_epsilon_contract(game: &Game, player: Player, epsilon: &Scalar) -> Result<EpsilonContract> {
    if !epsilon.is_positive() {
        return Err(Error::NonPositiveEpsilon);
    }
    let best = maxagg(game, player).value;
    let k = Scalar::from_int(2) * game.spread();
    let mut diagnostics = Vec::new();
    for cand in maxagg_candidates(game, player).into_iter().filter(|c| c.value == best) {
        let label = format!(
            "witness {} against {}",
            cand.strategy,
            game.action_name(player.other(), cand.opponent_action)
        );
        let effective = match epsilon_effective(game, player, &cand, epsilon) {
            Ok(e) => e,
            Err(why) => {
                diagnostics.push(format!("{label}: {why}"));
                continue;
            }
        };
        let payoff = game.payoff(player);
        let contract = Contract::new(player, payoff.zip_with(&oriented(player, effective), |u, e| u - e));
        let post = apply_contract(game, &contract)?;
        let set = enumerate_nash(post.effective());
        let Some(ne) = set.unique() else {
            diagnostics.push(format!("{label}: {}", describe_set(game, &set)));
            continue;
        };
        let value = post.base_payoff(ne, player);
        if value < &best - &k * epsilon {
            return Err(Error::Invariant(format!(
                "epsilon contract value {value} below the guaranteed {best} - {k} * {epsilon}"
            )));
        }
        return Ok(EpsilonContract {
            contract,
            certificate: ne.clone(),
            value,
            k,
        });
    }
    Err(Error::UniquenessNotCertified(diagnostics.join("; ")))
}

/// Smallest payoff `player` can get while best-responding to some opponent
/// strategy, with a profile attaining it.
pub fn min_payoff_best_responding(game: &Game, player: Player) -> (Scalar, StrategyProfile) {
    min_payoff_while_responding(game, player, player)
}

/// Smallest payoff to `payee` over profiles where `responder` best-responds.
///
/// One LP per pure action of the responder; a mixed best response pays a
/// convex combination of those, so the pure actions suffice.
pub fn min_payoff_while_responding(game: &Game, payee: Player, responder: Player) -> (Scalar, StrategyProfile) {
    let other = responder.other();
    let (n_own, n_opp) = (game.actions(responder), game.actions(other));
    (0..n_own)
        .filter_map(|a| {
            let objective = (0..n_opp)
                .map(|b| game.entry_for(payee, responder, a, b).clone())
                .collect();
            let mut lp = LinearProgram::new(Sense::Minimize, objective);
            lp.add(vec![Scalar::one(); n_opp], Relation::Eq, Scalar::one());
            for alt in (0..n_own).filter(|&o| o != a) {
                let coeffs = (0..n_opp)
                    .map(|b| game.entry(responder, a, b) - game.entry(responder, alt, b))
                    .collect();
                lp.add(coeffs, Relation::Ge, Scalar::zero());
            }
            let (value, point) = solve_lp(&lp).optimal()?;
            let own = MixedStrategy::pure(responder, n_own, a);
            let opp_s = MixedStrategy::new(other, point).expect("LP point lies on the simplex");
            Some((value, profile_for(responder, own, opp_s)))
        })
        .reduce(|best, c| if c.0 < best.0 { c } else { best })
        .expect("some action is a best response to something")
}

/// Whether a single contract between `player` and the miner can make both
/// strictly better off.
pub fn mining_feasibility(game: &Game, player: Player) -> MiningVerdict {
    let opp = player.other();
    if let Some(d) = dominant_strategy(game, opp, Dominance::Strict) {
        return MiningVerdict {
            feasible: Feasibility::NoStrictDominance,
            detail: format!(
                "{opp} strictly dominant: {}; single-contract mining infeasible for {player}",
                game.action_name(opp, d)
            ),
        };
    }
    if let Some(d) = dominant_strategy(game, opp, Dominance::Weak) {
        return MiningVerdict {
            feasible: Feasibility::NoWeakDominanceEveryNe,
            detail: format!(
                "{opp} weakly dominant: {}; no contract lets {player} and the miner gain at every equilibrium",
                game.action_name(opp, d)
            ),
        };
    }
    MiningVerdict {
        feasible: Feasibility::Yes,
        detail: format!("{opp} has no dominant action; mining may be feasible for {player}"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::scalar::q;

    fn profile(a: &[&str], b: &[&str]) -> StrategyProfile {
        StrategyProfile::from_probs(a.iter().map(|s| q(s)).collect(), b.iter().map(|s| q(s)).collect())
    }

    fn closed_form(eps: &Scalar) -> Scalar {
        let two_eps = Scalar::from_int(2) * eps;
        q("5/3") - &two_eps / &(Scalar::one() + &two_eps)
    }

    #[test]
    fn aggregate_set_examples() {
        let g = fixtures::cell_phone();
        let null = Contract::null_for(&g, Player::A);
        let set = aggregate_payoff_set(&g, &null, Player::A).unwrap();
        assert_eq!(set.iter().map(|o| o.value.clone()).collect::<Vec<_>>(), vec![q("1")]);

        let eps = synthesize_epsilon_contract(&g, Player::A, &q("1/100")).unwrap();
        let set = aggregate_payoff_set(&g, &eps.contract, Player::A).unwrap();
        assert_eq!(set.len(), 1);
        assert_eq!(set[0].value, closed_form(&q("1/100")));

        assert!(matches!(
            aggregate_payoff_set(&g, &Contract::null_for(&g, Player::B), Player::A),
            Err(Error::WrongPayer { .. })
        ));
    }

    #[test]
    fn maxagg_examples() {
        let g = fixtures::cell_phone();
        let m = maxagg(&g, Player::A);
        assert_eq!(m.value, q("5/3"));
        assert_eq!(m.witness, profile(&["2/3", "1/3"], &["0", "1"]));

        // B has x strictly dominant, so the answer is the best entry of A's column x.
        let seq = fixtures::sequential_example();
        assert_eq!(maxagg(&seq, Player::A).value, q("2"));

        assert_eq!(maxagg(&fixtures::flow_example(), Player::A).value, q("2"));
    }

    #[test]
    fn maxminagg_examples() {
        let g = fixtures::cell_phone();
        let eps = synthesize_epsilon_contract(&g, Player::A, &q("1/100")).unwrap();
        let r = maxminagg(&g, Player::A, &[eps.contract]).unwrap();
        assert_eq!(r.lower.value, closed_form(&q("1/100")));
        assert_eq!(r.upper, q("5/3"));

        let r = maxminagg(&g, Player::A, &[]).unwrap();
        assert_eq!(r.lower.value, q("1"));

        let indiff = flat_contract(&g, Player::A, &Scalar::zero());
        let r = maxminagg(&g, Player::A, &[indiff]).unwrap();
        assert_eq!(r.entries[1].value, q("2/3"));
        assert_eq!(r.lower.value, q("1"));
    }

    #[test]
    fn indifference_contract_examples() {
        let g = fixtures::cell_phone();
        let target = profile(&["2/3", "1/3"], &["0", "1"]);
        for a in ["0", "5/3", "1/2"] {
            let d = synthesize_indifference_contract(&g, Player::A, &q(a), &target).unwrap();
            let post = apply_contract(&g, &d).unwrap();
            assert!(crate::game::is_nash(post.effective(), &target).unwrap());
            assert_eq!(post.effective_payoff(&target, Player::A), q(a));
            assert_eq!(d.expected_transfer(&target), q("5/3") - q(a));
        }
        let bad = profile(&["1", "0"], &["0", "1"]);
        assert!(matches!(
            synthesize_indifference_contract(&g, Player::A, &q("0"), &bad),
            Err(Error::NotABestResponse(_))
        ));
    }

    #[test]
    fn shifting_preserves_equilibria() {
        let g = fixtures::cell_phone();
        let d = synthesize_epsilon_contract(&g, Player::A, &q("1/100")).unwrap().contract;
        assert_eq!(shift_contract(&d, &q("0")), d);
        let shifted = shift_contract(&d, &q("7/3"));
        let e1 = enumerate_nash(apply_contract(&g, &d).unwrap().effective());
        let e2 = enumerate_nash(apply_contract(&g, &shifted).unwrap().effective());
        assert_eq!(e1, e2);
    }

    #[test]
    fn epsilon_contract_matches_closed_form() {
        let g = fixtures::cell_phone();
        let mut last = None;
        for e in ["1/10", "1/100", "1/1000"] {
            let eps = q(e);
            let r = synthesize_epsilon_contract(&g, Player::A, &eps).unwrap();
            assert_eq!(r.value, closed_form(&eps));
            if let Some(prev) = last {
                assert!(r.value > prev);
            }
            last = Some(r.value);
        }
        let r = synthesize_epsilon_contract(&g, Player::A, &q("1/100")).unwrap();
        assert_eq!(r.certificate, profile(&["2/3", "1/3"], &["1/51", "50/51"]));
        assert_eq!(
            synthesize_epsilon_contract(&g, Player::A, &q("0")),
            Err(Error::NonPositiveEpsilon)
        );
    }

    #[test]
    fn epsilon_contract_with_dominant_opponent_is_exact() {
        let g = fixtures::sequential_example();
        for e in ["1/10", "1/1000"] {
            let r = synthesize_epsilon_contract(&g, Player::A, &q(e)).unwrap();
            assert_eq!(r.value, q("2"));
            assert_eq!(r.certificate.b().as_pure(), Some(0));
        }
    }

    #[test]
    fn min_payoff_while_best_responding() {
        let g = fixtures::cell_phone();
        // H is dominant for A; its worst payoff is 1 against B's H.
        assert_eq!(min_payoff_best_responding(&g, Player::A).0, q("1"));
        assert_eq!(min_payoff_best_responding(&g, Player::B).0, q("1/3"));
        let pd = fixtures::miner_offers_example();
        assert_eq!(min_payoff_best_responding(&pd, Player::A).0, q("2"));
        assert_eq!(min_payoff_best_responding(&pd, Player::B).0, q("2"));
    }

    #[test]
    fn feasibility_examples() {
        assert_eq!(
            mining_feasibility(&fixtures::sequential_example(), Player::A).feasible,
            Feasibility::NoStrictDominance
        );
        assert_eq!(mining_feasibility(&fixtures::cell_phone(), Player::A).feasible, Feasibility::Yes);
        let pennies = Game::new(
            Matrix::from_ints(&[&[1, -1], &[-1, 1]]),
            Matrix::from_ints(&[&[-1, 1], &[1, -1]]),
        )
        .unwrap();
        assert_eq!(mining_feasibility(&pennies, Player::A).feasible, Feasibility::Yes);
        let weak = Game::new(Matrix::zeros(2, 2), Matrix::from_ints(&[&[1, 1], &[1, 0]])).unwrap();
        assert_eq!(mining_feasibility(&weak, Player::A).feasible, Feasibility::NoWeakDominanceEveryNe);
    }
}
