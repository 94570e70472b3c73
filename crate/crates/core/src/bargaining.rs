//! Bargaining between the two players and a monopolist miner.
//!
//! Four structures are covered: players offer and the miner accepts at most
//! one contract, players offer and the miner may accept both, players contract
//! one after the other, and the miner makes take-it-or-leave-it offers.
//!
//! Contract spaces are continua, so every equilibrium search runs over a finite
//! [`ContractMenu`]. The payment bounds are computed exactly over the continuum.

use std::fmt;

use rayon::prelude::*;

use crate::equilibrium::{enumerate_nash, select_equilibrium, SelectionPolicy};
use crate::error::{Error, Result};
use crate::game::{apply_two, Contract, Game, Matrix, Player, PostContractGame, StrategyProfile};
use crate::lp::{solve_lp, Bounds, LinearProgram, Relation, Sense};
use crate::mining::{self, min_payoff_while_responding};
use crate::scalar::Scalar;

/// Post-contract behavior: selects one Nash equilibrium of every post-contract
/// game by applying a selection policy to its enumerated equilibria.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StrategyMap {
    pub policy: SelectionPolicy,
}

impl Default for StrategyMap {
    fn default() -> Self {
        StrategyMap {
            policy: SelectionPolicy::ContractorOptimistic,
        }
    }
}

impl StrategyMap {
    pub fn new(policy: SelectionPolicy) -> Self {
        StrategyMap { policy }
    }

    pub fn select(&self, post: &PostContractGame) -> Result<StrategyProfile> {
        select_equilibrium(&enumerate_nash(post.effective()), post, self.policy)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Provenance {
    Null,
    Indifference,
    Epsilon,
    Shift,
    Fixture,
    Grid,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Provenance::Null => "null",
            Provenance::Indifference => "indifference",
            Provenance::Epsilon => "epsilon",
            Provenance::Shift => "shift",
            Provenance::Fixture => "fixture",
            Provenance::Grid => "grid",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MenuEntry {
    pub contract: Contract,
    pub provenance: Provenance,
}

/// Finite contract menus, one per player. Index 0 of each is always the null
/// contract and no contract appears twice.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContractMenu {
    a: Vec<MenuEntry>,
    b: Vec<MenuEntry>,
}

impl ContractMenu {
    /// Menus holding only the null contract.
    pub fn null_only(game: &Game) -> ContractMenu {
        let entry = |p| MenuEntry {
            contract: Contract::null_for(game, p),
            provenance: Provenance::Null,
        };
        ContractMenu {
            a: vec![entry(Player::A)],
            b: vec![entry(Player::B)],
        }
    }

    /// Null menus extended by the given contracts, which are checked for payer
    /// and dimensions.
    pub fn with_contracts(
        game: &Game,
        a: impl IntoIterator<Item = Contract>,
        b: impl IntoIterator<Item = Contract>,
        provenance: Provenance,
    ) -> Result<ContractMenu> {
        let mut menu = ContractMenu::null_only(game);
        for c in a {
            menu.push(game, Player::A, c, provenance)?;
        }
        for c in b {
            menu.push(game, Player::B, c, provenance)?;
        }
        Ok(menu)
    }

    /// Appends a contract unless an identical one is already listed.
    pub fn push(&mut self, game: &Game, player: Player, contract: Contract, provenance: Provenance) -> Result<()> {
        if contract.payer() != player {
            return Err(Error::WrongPayer {
                expected: player,
                found: contract.payer(),
            });
        }
        contract.transfers().check_shape("menu contract", game.rows(), game.cols())?;
        let list = self.entries_mut(player);
        if !list.iter().any(|e| e.contract == contract) {
            list.push(MenuEntry { contract, provenance });
        }
        Ok(())
    }

    fn entries_mut(&mut self, player: Player) -> &mut Vec<MenuEntry> {
        match player {
            Player::A => &mut self.a,
            Player::B => &mut self.b,
        }
    }

    pub fn entries(&self, player: Player) -> &[MenuEntry] {
        match player {
            Player::A => &self.a,
            Player::B => &self.b,
        }
    }

    pub fn contract(&self, player: Player, index: usize) -> &Contract {
        &self.entries(player)[index].contract
    }

    pub fn len(&self, player: Player) -> usize {
        self.entries(player).len()
    }
}

/// Settings for [`generate_candidate_menu`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MenuParams {
    pub epsilon: Scalar,
    /// Number of payment increments between 0 and the payment bound.
    pub steps: u32,
    /// Keep only aggregate-maximizing contracts and their shifts.
    pub restrict_to_aggregate_maximizers: bool,
    /// Contracts appended verbatim to their payer's menu.
    pub fixtures: Vec<Contract>,
}

impl Default for MenuParams {
    fn default() -> Self {
        MenuParams {
            epsilon: Scalar::ratio(1, 100),
            steps: 6,
            restrict_to_aggregate_maximizers: false,
            fixtures: Vec::new(),
        }
    }
}

/// Contract sets the miner can accept.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Accepted {
    Neither,
    A,
    B,
    Both,
}

impl Accepted {
    fn includes(self, player: Player) -> bool {
        matches!(
            (self, player),
            (Accepted::Both, _) | (Accepted::A, Player::A) | (Accepted::B, Player::B)
        )
    }
}

impl fmt::Display for Accepted {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Accepted::Neither => "neither",
            Accepted::A => "A",
            Accepted::B => "B",
            Accepted::Both => "both",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Structure {
    OneContract,
    BothContracts,
    Sequential,
    MinerOffers,
}

impl fmt::Display for Structure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Structure::OneContract => "one",
            Structure::BothContracts => "both",
            Structure::Sequential => "sequential",
            Structure::MinerOffers => "miner-offers",
        })
    }
}

/// Equilibrium of one bargaining structure. Player payoffs are net of
/// transfers; the miner's payoff is the expected transfer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BargainingOutcome {
    pub structure: Structure,
    pub accepted: Accepted,
    pub contract_a: Option<Contract>,
    pub contract_b: Option<Contract>,
    pub final_profile: StrategyProfile,
    pub payoff_a: Scalar,
    pub payoff_b: Scalar,
    pub payoff_g: Scalar,
    /// Menu indices of the offers made, A's first.
    pub offers: (usize, usize),
    /// Every pure offer equilibrium, for the simultaneous-offer structures.
    pub offer_equilibria: Vec<(usize, usize)>,
    pub trace: Vec<String>,
}

impl BargainingOutcome {
    pub fn payoff(&self, player: Player) -> &Scalar {
        match player {
            Player::A => &self.payoff_a,
            Player::B => &self.payoff_b,
        }
    }

    /// `payoff_a + payoff_b + payoff_g` minus both players' base payoffs at
    /// the final profile; zero whenever transfers conserve value.
    pub fn conservation_gap(&self, game: &Game) -> Scalar {
        let base: Scalar = Player::BOTH
            .iter()
            .map(|&p| game.payoff(p).bilinear(self.final_profile.a().probs(), self.final_profile.b().probs()))
            .sum();
        &self.payoff_a + &self.payoff_b + &self.payoff_g - base
    }
}

/// Payoffs and miner decision for one pair of offers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OfferCell {
    pub accepted: Accepted,
    /// Payoffs to A, B and the miner.
    pub payoffs: [Scalar; 3],
}

/// The stage-one offer game: one cell per pair of menu offers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OfferMatrix {
    pub cells: Vec<Vec<OfferCell>>,
}

impl OfferMatrix {
    /// Pure equilibria of the offer game, in row-major order.
    pub fn pure_equilibria(&self) -> Vec<(usize, usize)> {
        let rows = self.cells.len();
        let cols = self.cells[0].len();
        let best_a: Vec<&Scalar> = (0..cols)
            .map(|l| (0..rows).map(|k| &self.cells[k][l].payoffs[0]).max().expect("nonempty menu"))
            .collect();
        let best_b: Vec<&Scalar> = (0..rows)
            .map(|k| self.cells[k].iter().map(|c| &c.payoffs[1]).max().expect("nonempty menu"))
            .collect();
        let mut out = Vec::new();
        for (k, row) in self.cells.iter().enumerate() {
            for (l, c) in row.iter().enumerate() {
                if &c.payoffs[0] == best_a[l] && &c.payoffs[1] == best_b[k] {
                    out.push((k, l));
                }
            }
        }
        out
    }
}

/// Result of playing one post-contract game under the strategy map.
#[derive(Debug, Clone)]
struct Played {
    profile: StrategyProfile,
    /// Effective payoffs of A and B, then the miner's transfer.
    payoffs: [Scalar; 3],
    base: [Scalar; 2],
}

/// A null contract is the same as no contract, also for selection.
fn play(game: &Game, a: Option<&Contract>, b: Option<&Contract>, map: &StrategyMap) -> Result<Played> {
    let post = apply_two(game, a.filter(|c| !c.is_null()), b.filter(|c| !c.is_null()))?;
    let profile = map.select(&post)?;
    Ok(Played {
        payoffs: [
            post.effective_payoff(&profile, Player::A),
            post.effective_payoff(&profile, Player::B),
            post.expected_transfers(&profile),
        ],
        base: [
            post.base_payoff(&profile, Player::A),
            post.base_payoff(&profile, Player::B),
        ],
        profile,
    })
}

fn slot(player: Player) -> usize {
    match player {
        Player::A => 0,
        Player::B => 1,
    }
}

fn single(player: Player, contract: &Contract) -> (Option<&Contract>, Option<&Contract>) {
    match player {
        Player::A => (Some(contract), None),
        Player::B => (None, Some(contract)),
    }
}

/// `m_player(D | map)`: the player's base payoff at the map's equilibrium of
/// the game with only `contract` in force. The contract may be either
/// player's; for the payer this is the payer's and miner's joint take.
pub fn aggregate_payoff_fn(game: &Game, contract: &Contract, player: Player, map: &StrategyMap) -> Result<Scalar> {
    let (a, b) = single(contract.payer(), contract);
    Ok(play(game, a, b, map)?.base[slot(player)].clone())
}

/// Which post-contract game the single-contract bidding settles on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EquilibriumGame {
    Base,
    WithContract(Player),
}

/// One player's row of the willingness-to-pay table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeltaRow {
    pub player: Player,
    /// Menu index of the aggregate maximizer `D̂_i`.
    pub best_own: usize,
    /// Menu index of the opponent contract `D̲_j` that is worst for this player.
    pub worst_opponent: usize,
    pub m_best_own: Scalar,
    pub m_best_opponent: Scalar,
    pub m_worst_opponent: Scalar,
    pub m_null: Scalar,
    /// `δ_i(D̂_i) = m_i(D̂_i) - m_i(D_0)`.
    pub delta_own: Scalar,
    /// `δ_i(D̂_i, D̂_j) = m_i(D̂_i) - m_i(D̂_j)`.
    pub delta_vs_best: Scalar,
    /// `δ_i(D̂_i, D̲_j) = m_i(D̂_i) - m_i(D̲_j)`.
    pub delta_vs_worst: Scalar,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeltaTable {
    pub a: DeltaRow,
    pub b: DeltaRow,
    pub equilibrium_game: EquilibriumGame,
    /// Payment the winning player needs to offer the miner.
    pub predicted_payment: Scalar,
}

impl DeltaTable {
    pub fn row(&self, player: Player) -> &DeltaRow {
        match player {
            Player::A => &self.a,
            Player::B => &self.b,
        }
    }
}

fn first_extreme(values: &[Scalar], want_max: bool) -> usize {
    let mut best = 0;
    for (i, v) in values.iter().enumerate() {
        if (want_max && *v > values[best]) || (!want_max && *v < values[best]) {
            best = i;
        }
    }
    best
}

/// Aggregate payoff values and willingness-to-pay differences for the
/// menu's distinguished contracts.
pub fn delta_table(game: &Game, menu: &ContractMenu, map: &StrategyMap) -> Result<DeltaTable> {
    // m_i of every menu contract of either player, for both players.
    let values = |payer: Player| -> Result<Vec<[Scalar; 2]>> {
        menu.entries(payer)
            .par_iter()
            .map(|e| {
                let (a, b) = single(payer, &e.contract);
                let played = play(game, a, b, map)?;
                Ok(played.base)
            })
            .collect()
    };
    let by_payer = [values(Player::A)?, values(Player::B)?];
    let row = |p: Player| {
        let (i, j) = (slot(p), slot(p.other()));
        let own: Vec<Scalar> = by_payer[i].iter().map(|v| v[i].clone()).collect();
        let opp: Vec<Scalar> = by_payer[j].iter().map(|v| v[i].clone()).collect();
        let best_own = first_extreme(&own, true);
        let best_opp_for_them = {
            let theirs: Vec<Scalar> = by_payer[j].iter().map(|v| v[j].clone()).collect();
            first_extreme(&theirs, true)
        };
        let worst_opponent = first_extreme(&opp, false);
        let m_null = own[0].clone();
        DeltaRow {
            player: p,
            best_own,
            worst_opponent,
            delta_own: &own[best_own] - &m_null,
            delta_vs_best: &own[best_own] - &opp[best_opp_for_them],
            delta_vs_worst: &own[best_own] - &opp[worst_opponent],
            m_best_own: own[best_own].clone(),
            m_best_opponent: opp[best_opp_for_them].clone(),
            m_worst_opponent: opp[worst_opponent].clone(),
            m_null,
        }
    };
    let (a, b) = (row(Player::A), row(Player::B));
    let zero = Scalar::zero();
    let (equilibrium_game, predicted_payment) = if a.delta_own <= zero && b.delta_own <= zero {
        (EquilibriumGame::Base, zero)
    } else {
        let (winner, loser) = if b.delta_vs_best > a.delta_vs_best { (&b, &a) } else { (&a, &b) };
        let pay = loser.delta_vs_best.clone().max(zero).min(winner.delta_vs_best.clone());
        (EquilibriumGame::WithContract(winner.player), pay)
    };
    Ok(DeltaTable {
        a,
        b,
        equilibrium_game,
        predicted_payment,
    })
}

/// Per-player term of a payment bound.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundTerm {
    pub player: Player,
    pub maxagg: Scalar,
    pub min_best_responding: Scalar,
}

impl BoundTerm {
    pub fn value(&self) -> Scalar {
        &self.maxagg - &self.min_best_responding
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PaymentBound {
    pub value: Scalar,
    pub terms: Vec<BoundTerm>,
    /// The minima may only be attained on component boundaries when the base
    /// game is degenerate.
    pub degenerate: bool,
}

/// Largest subgame-perfect payment to the miner when players make offers and
/// the miner accepts one: `max_i (maxagg_i - min { U_i : i best-responds })`.
pub fn spe_payment_bound(game: &Game) -> PaymentBound {
    let terms: Vec<BoundTerm> = Player::BOTH
        .iter()
        .map(|&p| BoundTerm {
            player: p,
            maxagg: mining::maxagg(game, p).value,
            min_best_responding: mining::min_payoff_best_responding(game, p).0,
        })
        .collect();
    PaymentBound {
        value: terms.iter().map(BoundTerm::value).max().expect("two players"),
        terms,
        degenerate: enumerate_nash(game).degenerate(),
    }
}

pub fn spe_payment_upper_bound(game: &Game) -> Scalar {
    spe_payment_bound(game).value
}

fn stage_two_one(none: &Played, a: &Played, b: &Played) -> (Accepted, Played) {
    // Ties favor the null contract, then A.
    let mut best = (Accepted::Neither, none);
    for cand in [(Accepted::A, a), (Accepted::B, b)] {
        if cand.1.payoffs[2] > best.1.payoffs[2] {
            best = cand;
        }
    }
    (best.0, best.1.clone())
}

fn play_each(game: &Game, menu: &ContractMenu, payer: Player, map: &StrategyMap) -> Result<Vec<Played>> {
    menu.entries(payer)
        .par_iter()
        .map(|e| {
            let (a, b) = single(payer, &e.contract);
            play(game, a, b, map)
        })
        .collect()
}

fn cell(accepted: Accepted, played: &Played) -> OfferCell {
    OfferCell {
        accepted,
        payoffs: played.payoffs.clone(),
    }
}

/// Headline offer equilibrium: the miner's best, then lowest menu indices.
fn headline(matrix: &OfferMatrix, equilibria: &[(usize, usize)]) -> Option<(usize, usize)> {
    equilibria
        .iter()
        .copied()
        .reduce(|best, e| {
            if matrix.cells[e.0][e.1].payoffs[2] > matrix.cells[best.0][best.1].payoffs[2] {
                e
            } else {
                best
            }
        })
}

#[allow(clippy::too_many_arguments)]
fn finish(
    game: &Game,
    structure: Structure,
    menu: &ContractMenu,
    matrix: OfferMatrix,
    map: &StrategyMap,
    mut trace: Vec<String>,
) -> Result<BargainingOutcome> {
    let equilibria = matrix.pure_equilibria();
    let Some((k, l)) = headline(&matrix, &equilibria) else {
        return Err(Error::NoPureOfferEquilibrium(Box::new(matrix)));
    };
    let accepted = matrix.cells[k][l].accepted;
    let contract_a = accepted.includes(Player::A).then(|| menu.contract(Player::A, k).clone());
    let contract_b = accepted.includes(Player::B).then(|| menu.contract(Player::B, l).clone());
    let played = play(game, contract_a.as_ref(), contract_b.as_ref(), map)?;
    trace.push(format!(
        "{} pure offer equilibria; headline offers A#{k}, B#{l}; miner accepts {accepted}",
        equilibria.len()
    ));
    trace.push(format!("final profile {}", played.profile.describe(game)));
    let [payoff_a, payoff_b, payoff_g] = played.payoffs;
    Ok(BargainingOutcome {
        structure,
        accepted,
        contract_a,
        contract_b,
        final_profile: played.profile,
        payoff_a,
        payoff_b,
        payoff_g,
        offers: (k, l),
        offer_equilibria: equilibria,
        trace,
    })
}

/// The offer matrix when the miner accepts at most one contract.
pub fn one_contract_offer_matrix(game: &Game, menu: &ContractMenu, map: &StrategyMap) -> Result<OfferMatrix> {
    let none = play(game, None, None, map)?;
    let with_a = play_each(game, menu, Player::A, map)?;
    let with_b = play_each(game, menu, Player::B, map)?;
    let cells = with_a
        .iter()
        .map(|pa| {
            with_b
                .iter()
                .map(|pb| {
                    let (acc, played) = stage_two_one(&none, pa, pb);
                    cell(acc, &played)
                })
                .collect()
        })
        .collect();
    Ok(OfferMatrix { cells })
}

/// Subgame-perfect outcome over the menus when players offer simultaneously
/// and the miner accepts at most one contract (ties: null, then A, then B).
pub fn one_contract_equilibrium(game: &Game, menu: &ContractMenu, map: &StrategyMap) -> Result<BargainingOutcome> {
    let matrix = one_contract_offer_matrix(game, menu, map)?;
    let trace = vec![format!(
        "offer game over {} x {} menu contracts, miner accepts at most one",
        menu.len(Player::A),
        menu.len(Player::B)
    )];
    finish(game, Structure::OneContract, menu, matrix, map, trace)
}

/// Miner's choice among the four acceptance sets; ties go to the earlier of
/// neither, A only, B only, both.
fn stage_two_both(options: [(Accepted, &Played); 4]) -> (Accepted, Played) {
    let mut best = options[0];
    for cand in &options[1..] {
        if cand.1.payoffs[2] > best.1.payoffs[2] {
            best = *cand;
        }
    }
    (best.0, best.1.clone())
}

/// The offer matrix when the miner may accept any subset of the offers.
pub fn both_contracts_offer_matrix(game: &Game, menu: &ContractMenu, map: &StrategyMap) -> Result<OfferMatrix> {
    let none = play(game, None, None, map)?;
    let with_a = play_each(game, menu, Player::A, map)?;
    let with_b = play_each(game, menu, Player::B, map)?;
    let pairs: Vec<(usize, usize)> = (0..menu.len(Player::A))
        .flat_map(|k| (0..menu.len(Player::B)).map(move |l| (k, l)))
        .collect();
    let joint: Vec<Played> = pairs
        .par_iter()
        .map(|&(k, l)| {
            play(
                game,
                Some(menu.contract(Player::A, k)),
                Some(menu.contract(Player::B, l)),
                map,
            )
        })
        .collect::<Result<_>>()?;
    let cols = menu.len(Player::B);
    let cells = (0..menu.len(Player::A))
        .map(|k| {
            (0..cols)
                .map(|l| {
                    let (acc, played) = stage_two_both([
                        (Accepted::Neither, &none),
                        (Accepted::A, &with_a[k]),
                        (Accepted::B, &with_b[l]),
                        (Accepted::Both, &joint[k * cols + l]),
                    ]);
                    cell(acc, &played)
                })
                .collect()
        })
        .collect();
    Ok(OfferMatrix { cells })
}

pub fn both_contracts_equilibrium(game: &Game, menu: &ContractMenu, map: &StrategyMap) -> Result<BargainingOutcome> {
    let matrix = both_contracts_offer_matrix(game, menu, map)?;
    let trace = vec![format!(
        "offer game over {} x {} menu contracts, miner may accept both",
        menu.len(Player::A),
        menu.len(Player::B)
    )];
    finish(game, Structure::BothContracts, menu, matrix, map, trace)
}

/// `Φ_player`: menu contracts maximizing the player's payoff against a fixed
/// opponent contract when the miner may accept both.
pub fn best_contract_response(
    game: &Game,
    player: Player,
    opponent_contract: &Contract,
    menu: &ContractMenu,
    map: &StrategyMap,
) -> Result<Vec<Contract>> {
    let opp = player.other();
    if opponent_contract.payer() != opp {
        return Err(Error::WrongPayer {
            expected: opp,
            found: opponent_contract.payer(),
        });
    }
    let none = play(game, None, None, map)?;
    let (oa, ob) = single(opp, opponent_contract);
    let opp_only = play(game, oa, ob, map)?;
    let values: Vec<Scalar> = menu
        .entries(player)
        .par_iter()
        .map(|e| {
            let (sa, sb) = single(player, &e.contract);
            let own_only = play(game, sa, sb, map)?;
            let both = match player {
                Player::A => play(game, Some(&e.contract), Some(opponent_contract), map)?,
                Player::B => play(game, Some(opponent_contract), Some(&e.contract), map)?,
            };
            let (a_only, b_only) = match player {
                Player::A => (&own_only, &opp_only),
                Player::B => (&opp_only, &own_only),
            };
            let (_, played) = stage_two_both([
                (Accepted::Neither, &none),
                (Accepted::A, a_only),
                (Accepted::B, b_only),
                (Accepted::Both, &both),
            ]);
            Ok(played.payoffs[slot(player)].clone())
        })
        .collect::<Result<_>>()?;
    let best = values.iter().max().expect("nonempty menu");
    Ok(menu
        .entries(player)
        .iter()
        .zip(&values)
        .filter(|(_, v)| *v == best)
        .map(|(e, _)| e.contract.clone())
        .collect())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RestrictionComparison {
    /// Miner payoff when accepting at most one contract.
    pub restricted: Scalar,
    /// Miner payoff when free to accept both.
    pub unrestricted: Scalar,
    pub ok: bool,
}

pub fn compare_restriction(game: &Game, menu: &ContractMenu, map: &StrategyMap) -> Result<RestrictionComparison> {
    let restricted = one_contract_equilibrium(game, menu, map)?.payoff_g;
    let unrestricted = both_contracts_equilibrium(game, menu, map)?.payoff_g;
    Ok(RestrictionComparison {
        ok: restricted >= unrestricted,
        restricted,
        unrestricted,
    })
}

fn pair_for(first: Player, own: usize, reply: usize) -> (usize, usize) {
    match first {
        Player::A => (own, reply),
        Player::B => (reply, own),
    }
}

/// Both players contract in turn and every contract takes effect. The second
/// mover best-responds to the observed first contract (lowest menu index on
/// ties); the first mover anticipates this.
pub fn sequential_equilibrium(
    game: &Game,
    menu: &ContractMenu,
    map: &StrategyMap,
    first_mover: Player,
) -> Result<BargainingOutcome> {
    let second = first_mover.other();
    let (n_first, n_second) = (menu.len(first_mover), menu.len(second));
    let pairs: Vec<(usize, usize)> = (0..n_first)
        .flat_map(|f| (0..n_second).map(move |s| (f, s)))
        .collect();
    let played: Vec<Played> = pairs
        .par_iter()
        .map(|&(f, s)| {
            let (k, l) = pair_for(first_mover, f, s);
            play(
                game,
                Some(menu.contract(Player::A, k)),
                Some(menu.contract(Player::B, l)),
                map,
            )
        })
        .collect::<Result<_>>()?;
    let at = |f: usize, s: usize| &played[f * n_second + s];
    let mut trace = Vec::new();
    let replies: Vec<usize> = (0..n_first)
        .map(|f| {
            let vals: Vec<Scalar> = (0..n_second).map(|s| at(f, s).payoffs[slot(second)].clone()).collect();
            first_extreme(&vals, true)
        })
        .collect();
    for (f, &s) in replies.iter().enumerate() {
        trace.push(format!(
            "{first_mover} offers #{f} ({}): {second} replies #{s} ({}), outcome {}, {first_mover} gets {}",
            menu.entries(first_mover)[f].provenance,
            menu.entries(second)[s].provenance,
            at(f, s).profile.describe(game),
            at(f, s).payoffs[slot(first_mover)]
        ));
    }
    let first_vals: Vec<Scalar> = (0..n_first)
        .map(|f| at(f, replies[f]).payoffs[slot(first_mover)].clone())
        .collect();
    let f = first_extreme(&first_vals, true);
    let s = replies[f];
    let (k, l) = pair_for(first_mover, f, s);
    let result = at(f, s).clone();
    trace.push(format!("{first_mover} moves first with #{f}; {second} replies #{s}"));
    let [payoff_a, payoff_b, payoff_g] = result.payoffs;
    Ok(BargainingOutcome {
        structure: Structure::Sequential,
        accepted: Accepted::Both,
        contract_a: Some(menu.contract(Player::A, k).clone()),
        contract_b: Some(menu.contract(Player::B, l).clone()),
        final_profile: result.profile,
        payoff_a,
        payoff_b,
        payoff_g,
        offers: (k, l),
        offer_equilibria: Vec::new(),
        trace,
    })
}

/// What each player gains by contracting first rather than second.
pub fn first_mover_value(game: &Game, menu: &ContractMenu, map: &StrategyMap) -> Result<(Scalar, Scalar)> {
    let a_first = sequential_equilibrium(game, menu, map, Player::A)?;
    let b_first = sequential_equilibrium(game, menu, map, Player::B)?;
    Ok((
        &a_first.payoff_a - &b_first.payoff_a,
        &b_first.payoff_b - &a_first.payoff_b,
    ))
}

/// Equilibria and payoffs of the four games a pair of miner offers induces.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OfferEvaluation {
    /// Selected equilibria of Γ(D_A,D_B), Γ(D_A), Γ(D_B) and Γ.
    pub predicted: [StrategyProfile; 4],
    /// 2x2 game, rows A accept/reject, columns B accept/reject.
    pub acceptance: Game,
    /// Miner's expected take when both accept.
    pub miner_profit: Scalar,
    /// `[accept - reject when the other rejects, accept - reject when the
    /// other accepts]` for each player.
    pub margins: [[Scalar; 2]; 2],
}

impl OfferEvaluation {
    /// Accepting weakly dominates rejecting for both players.
    pub fn accept_dominant(&self) -> bool {
        self.margins.iter().flatten().all(|m| !m.is_negative())
    }
}

/// Plays the four post-contract games a pair of offers can lead to.
pub fn evaluate_offers(game: &Game, offer_a: &Contract, offer_b: &Contract, map: &StrategyMap) -> Result<OfferEvaluation> {
    let both = play(game, Some(offer_a), Some(offer_b), map)?;
    let only_a = play(game, Some(offer_a), None, map)?;
    let only_b = play(game, None, Some(offer_b), map)?;
    let none = play(game, None, None, map)?;
    let entry = |p: &Played, i: usize| p.payoffs[i].clone();
    let grid = |i: usize| {
        Matrix::from_rows(vec![
            vec![entry(&both, i), entry(&only_a, i)],
            vec![entry(&only_b, i), entry(&none, i)],
        ])
        .expect("2x2")
    };
    let acceptance = Game::new(grid(0), grid(1))
        .and_then(|g| g.with_labels(vec!["accept".into(), "reject".into()], vec!["accept".into(), "reject".into()]))?;
    let margins = [
        [&only_a.payoffs[0] - &none.payoffs[0], &both.payoffs[0] - &only_b.payoffs[0]],
        [&only_b.payoffs[1] - &none.payoffs[1], &both.payoffs[1] - &only_a.payoffs[1]],
    ];
    Ok(OfferEvaluation {
        miner_profit: both.payoffs[2].clone(),
        predicted: [both.profile, only_a.profile, only_b.profile, none.profile],
        acceptance,
        margins,
    })
}

/// The acceptance game `[[(accept, accept), (accept, reject)], ...]` with each
/// player's effective payoff at the map's equilibrium of the induced game.
pub fn build_acceptance_game(game: &Game, offer_a: &Contract, offer_b: &Contract, map: &StrategyMap) -> Result<Game> {
    Ok(evaluate_offers(game, offer_a, offer_b, map)?.acceptance)
}

/// Pure targets of a dual offer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DualTargets {
    /// Target of Γ(D_A, D_B).
    pub both: (usize, usize),
    /// Target of Γ(D_A).
    pub only_a: (usize, usize),
    /// Target of Γ(D_B).
    pub only_b: (usize, usize),
}

/// A pair of miner offers that both players accept.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DualOffer {
    pub offer_a: Contract,
    pub offer_b: Contract,
    pub margin: Scalar,
    pub targets: DualTargets,
    pub evaluation: OfferEvaluation,
    pub miner_profit: Scalar,
}

/// Upper bound on the miner's profit from offers that make accepting weakly
/// dominant: the best total payoff minus what B and A can be held down to.
///
/// The third term is A's lowest payoff while A best-responds. With
/// `statement_term` it is instead B's lowest payoff while A best-responds.
pub fn dual_offer_profit_bound(game: &Game, statement_term: bool) -> Scalar {
    let a = game.payoff(Player::A);
    let b = game.payoff(Player::B);
    let best_total = a.zip_with(b, |x, y| x + y).max_entry();
    let second = min_payoff_while_responding(game, Player::B, Player::B).0;
    let third = if statement_term {
        min_payoff_while_responding(game, Player::B, Player::A).0
    } else {
        min_payoff_while_responding(game, Player::A, Player::A).0
    };
    best_total - second - third
}

fn strict_pure_br(game: &Game, player: Player, own: usize, opp: usize, margin: &Scalar) -> bool {
    (0..game.actions(player))
        .filter(|&o| o != own)
        .all(|o| game.entry(player, own, opp) >= &(game.entry(player, o, opp) + margin))
}

/// Column layout of the offer LP: A's offer entries, then B's, row-major.
#[derive(Clone, Copy)]
struct OfferVars {
    rows: usize,
    cols: usize,
}

impl OfferVars {
    fn count(self) -> usize {
        2 * self.rows * self.cols
    }

    fn index(self, payer: Player, r: usize, c: usize) -> usize {
        slot(payer) * self.rows * self.cols + r * self.cols + c
    }

    fn contract(self, payer: Player, point: &[Scalar]) -> Contract {
        let rows = (0..self.rows)
            .map(|r| (0..self.cols).map(|c| point[self.index(payer, r, c)].clone()).collect())
            .collect();
        Contract::new(payer, Matrix::from_rows(rows).expect("nonempty"))
    }
}

/// One of the post-contract games a pair of offers can induce.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Induced {
    Both,
    OnlyA,
    OnlyB,
}

impl Induced {
    fn pays(self, player: Player) -> bool {
        matches!(
            (self, player),
            (Induced::Both, _) | (Induced::OnlyA, Player::A) | (Induced::OnlyB, Player::B)
        )
    }
}

/// `coeffs · x + constant`.
struct Affine {
    coeffs: Vec<Scalar>,
    constant: Scalar,
}

impl Affine {
    /// The player's effective payoff in `induced`, averaged with the given
    /// profile weights.
    fn effective(game: &Game, vars: OfferVars, induced: Induced, player: Player, weights: &[(usize, usize, Scalar)]) -> Affine {
        let mut coeffs = vec![Scalar::zero(); vars.count()];
        let mut constant = Scalar::zero();
        for (r, c, w) in weights {
            constant += w * game.payoff(player).get(*r, *c);
            if induced.pays(player) {
                coeffs[vars.index(player, *r, *c)] -= w;
            }
        }
        Affine { coeffs, constant }
    }

    fn pure(game: &Game, vars: OfferVars, induced: Induced, player: Player, (r, c): (usize, usize)) -> Affine {
        Affine::effective(game, vars, induced, player, &[(r, c, Scalar::one())])
    }
}

/// A linear inequality `coeffs · x >= rhs` over the offer entries.
#[derive(Debug, Clone, PartialEq, Eq)]
struct Cut {
    coeffs: Vec<Scalar>,
    rhs: Scalar,
}

impl Cut {
    /// `better >= worse + margin`.
    fn prefer(better: Affine, worse: Affine, margin: &Scalar) -> Cut {
        Cut {
            coeffs: better.coeffs.iter().zip(&worse.coeffs).map(|(x, y)| x - y).collect(),
            rhs: margin + &worse.constant - &better.constant,
        }
    }

    fn trivially_infeasible(&self) -> bool {
        self.coeffs.iter().all(Scalar::is_zero) && self.rhs.is_positive()
    }
}

/// The per-triple constraints: strict equilibria with the given margin in all
/// three induced games, plus acceptance being weakly dominant.
fn target_cuts(game: &Game, vars: OfferVars, t: &DualTargets, base: &[Scalar; 2], margin: &Scalar) -> Vec<Cut> {
    let mut cuts = Vec::new();
    for (induced, (r, c)) in [(Induced::Both, t.both), (Induced::OnlyA, t.only_a), (Induced::OnlyB, t.only_b)] {
        for o in (0..game.rows()).filter(|&o| o != r) {
            cuts.push(Cut::prefer(
                Affine::pure(game, vars, induced, Player::A, (r, c)),
                Affine::pure(game, vars, induced, Player::A, (o, c)),
                margin,
            ));
        }
        for o in (0..game.cols()).filter(|&o| o != c) {
            cuts.push(Cut::prefer(
                Affine::pure(game, vars, induced, Player::B, (r, c)),
                Affine::pure(game, vars, induced, Player::B, (r, o)),
                margin,
            ));
        }
    }
    let constant = |v: &Scalar| Affine {
        coeffs: vec![Scalar::zero(); vars.count()],
        constant: v.clone(),
    };
    // Accept against the other's reject, and against the other's accept.
    let (own_only, other_only) = ([(Induced::OnlyA, t.only_a), (Induced::OnlyB, t.only_b)], [t.only_b, t.only_a]);
    for (i, p) in Player::BOTH.into_iter().enumerate() {
        let (induced, own) = own_only[i];
        cuts.push(Cut::prefer(Affine::pure(game, vars, induced, p, own), constant(&base[i]), margin));
        let other = other_only[i];
        cuts.push(Cut::prefer(
            Affine::pure(game, vars, Induced::Both, p, t.both),
            constant(game.payoff(p).get(other.0, other.1)),
            margin,
        ));
    }
    cuts
}

/// Search node: one target triple plus the cuts added so far.
/// LP value, cuts and the offer pair at a solved node.
type NodeSolution = (Scalar, Vec<Cut>, Contract, Contract);

struct OfferNode {
    id: usize,
    value: Scalar,
    targets: DualTargets,
    cuts: Vec<Cut>,
    /// Deviation cuts added on top of the triple's own constraints.
    depth: usize,
    offer_a: Contract,
    offer_b: Contract,
}

fn solve_offer_node(vars: OfferVars, targets: DualTargets, cuts: Vec<Cut>) -> Option<NodeSolution> {
    if cuts.iter().any(Cut::trivially_infeasible) {
        return None;
    }
    let mut objective = vec![Scalar::zero(); vars.count()];
    for p in Player::BOTH {
        objective[vars.index(p, targets.both.0, targets.both.1)] = Scalar::one();
    }
    let mut lp = LinearProgram::new(Sense::Maximize, objective);
    for v in 0..vars.count() {
        lp.set_bounds(v, Bounds::free());
    }
    for cut in cuts.iter().filter(|c| !c.coeffs.iter().all(Scalar::is_zero)) {
        lp.add(cut.coeffs.clone(), Relation::Ge, cut.rhs.clone());
    }
    let (value, point) = solve_lp(&lp).optimal()?;
    Some((value, cuts, vars.contract(Player::A, &point), vars.contract(Player::B, &point)))
}

/// Cuts that each remove `sigma` as an equilibrium of `induced`: some paying
/// player gains at least the margin by a pure deviation.
fn deviation_cuts(game: &Game, vars: OfferVars, induced: Induced, sigma: &StrategyProfile, margin: &Scalar) -> Vec<Cut> {
    let weights: Vec<(usize, usize, Scalar)> = (0..game.rows())
        .flat_map(|r| (0..game.cols()).map(move |c| (r, c)))
        .map(|(r, c)| (r, c, &sigma.a().probs()[r] * &sigma.b().probs()[c]))
        .filter(|(_, _, w)| !w.is_zero())
        .collect();
    let mut out = Vec::new();
    for p in Player::BOTH.into_iter().filter(|&p| induced.pays(p)) {
        let current = || Affine::effective(game, vars, induced, p, &weights);
        for dev in 0..game.actions(p) {
            let dev_weights: Vec<(usize, usize, Scalar)> = match p {
                Player::A => (0..game.cols()).map(|c| (dev, c, sigma.b().probs()[c].clone())).collect(),
                Player::B => (0..game.rows()).map(|r| (r, dev, sigma.a().probs()[r].clone())).collect(),
            };
            out.push(Cut::prefer(Affine::effective(game, vars, induced, p, &dev_weights), current(), margin));
        }
    }
    out
}

/// Cut depth and node budget of the offer search.
const MAX_CUTS: usize = 6;
const MAX_EXPANSIONS: usize = 400;

/// Best pair of miner offers over pure target triples.
///
/// Each triple gives one exact LP: maximize the miner's take at the joint
/// target subject to the three targets being strict equilibria with margin
/// `margin` and accepting being weakly dominant. Strictness does not make the
/// targets the selected equilibria, so candidates are checked against the
/// strategy map; a miss is cut off by requiring a profitable deviation from
/// the equilibrium the map chose. Nodes are explored best LP value first, so
/// the first verified offer is the best one reachable within the search
/// budget. `None` when nothing verifies.
pub fn synthesize_dual_offer(game: &Game, margin: &Scalar, map: &StrategyMap) -> Result<Option<DualOffer>> {
    if !margin.is_positive() {
        return Err(Error::NonPositiveEpsilon);
    }
    let none = play(game, None, None, map)?;
    let vars = OfferVars {
        rows: game.rows(),
        cols: game.cols(),
    };
    let profiles: Vec<(usize, usize)> = (0..vars.rows).flat_map(|r| (0..vars.cols).map(move |c| (r, c))).collect();
    // In Γ(D_A) B's payoffs are untouched, so B must already strictly prefer
    // the target column; symmetrically for Γ(D_B).
    let only_a: Vec<_> = profiles
        .iter()
        .copied()
        .filter(|&(r, c)| strict_pure_br(game, Player::B, c, r, margin))
        .collect();
    let only_b: Vec<_> = profiles
        .iter()
        .copied()
        .filter(|&(r, c)| strict_pure_br(game, Player::A, r, c, margin))
        .collect();
    let triples: Vec<DualTargets> = profiles
        .iter()
        .flat_map(|&both| {
            let only_b = &only_b;
            only_a
                .iter()
                .flat_map(move |&oa| only_b.iter().map(move |&ob| DualTargets { both, only_a: oa, only_b: ob }))
        })
        .collect();
    let base = [none.payoffs[0].clone(), none.payoffs[1].clone()];

    let mut next_id = 0;
    let mut open: Vec<OfferNode> = Vec::new();
    let mut push = |open: &mut Vec<OfferNode>, depth: usize, solved: Vec<(DualTargets, Option<NodeSolution>)>| {
        for (targets, sol) in solved {
            if let Some((value, cuts, offer_a, offer_b)) = sol {
                open.push(OfferNode {
                    id: next_id,
                    value,
                    targets,
                    cuts,
                    depth,
                    offer_a,
                    offer_b,
                });
                next_id += 1;
            }
        }
    };
    let roots = triples
        .par_iter()
        .map(|t| (*t, solve_offer_node(vars, *t, target_cuts(game, vars, t, &base, margin))))
        .collect();
    push(&mut open, 0, roots);

    let mut expansions = 0;
    while !open.is_empty() {
        let best = (0..open.len())
            .max_by(|&i, &j| {
                let (x, y) = (&open[i], &open[j]);
                x.value
                    .cmp(&y.value)
                    .then(y.targets.cmp(&x.targets))
                    .then(y.id.cmp(&x.id))
            })
            .expect("nonempty");
        let node = open.swap_remove(best);
        let eval = evaluate_offers(game, &node.offer_a, &node.offer_b, map)?;
        let targets = node.targets;
        let miss = [
            (Induced::Both, 0, targets.both),
            (Induced::OnlyA, 1, targets.only_a),
            (Induced::OnlyB, 2, targets.only_b),
        ]
        .into_iter()
        .find(|(_, i, t)| eval.predicted[*i].as_pure() != Some(*t));
        let Some((induced, i, _)) = miss else {
            if !eval.accept_dominant() {
                continue;
            }
            return Ok(Some(DualOffer {
                miner_profit: eval.miner_profit.clone(),
                offer_a: node.offer_a,
                offer_b: node.offer_b,
                margin: margin.clone(),
                targets,
                evaluation: eval,
            }));
        };
        if node.depth >= MAX_CUTS || expansions >= MAX_EXPANSIONS {
            continue;
        }
        expansions += 1;
        let children = deviation_cuts(game, vars, induced, &eval.predicted[i], margin)
            .into_par_iter()
            .map(|cut| {
                let mut cuts = node.cuts.clone();
                cuts.push(cut);
                (targets, solve_offer_node(vars, targets, cuts))
            })
            .collect();
        push(&mut open, node.depth + 1, children);
    }
    Ok(None)
}

fn pure_name(game: &Game, (r, c): (usize, usize)) -> String {
    StrategyProfile::pure(game, r, c).describe(game)
}

/// Outcome when the miner makes the given offers and both players accept or
/// reject simultaneously. Accepting is played whenever it weakly dominates.
pub fn miner_offers_outcome(game: &Game, dual: &DualOffer, map: &StrategyMap) -> Result<BargainingOutcome> {
    let post = apply_two(game, Some(&dual.offer_a), Some(&dual.offer_b))?;
    let profile = map.select(&post)?;
    Ok(BargainingOutcome {
        structure: Structure::MinerOffers,
        accepted: Accepted::Both,
        contract_a: Some(dual.offer_a.clone()),
        contract_b: Some(dual.offer_b.clone()),
        payoff_a: post.effective_payoff(&profile, Player::A),
        payoff_b: post.effective_payoff(&profile, Player::B),
        payoff_g: post.expected_transfers(&profile),
        trace: vec![
            format!(
                "targets: both {}, A only {}, B only {}",
                pure_name(game, dual.targets.both),
                pure_name(game, dual.targets.only_a),
                pure_name(game, dual.targets.only_b)
            ),
            format!("accepting weakly dominant for both: {}", dual.evaluation.accept_dominant()),
        ],
        final_profile: profile,
        offers: (0, 0),
        offer_equilibria: Vec::new(),
    })
}

/// Deterministic contract menus: null, the total-indifference contract, the
/// epsilon contract, payment-level shifts of both, and the given fixtures.
///
/// Shifts are placed so the miner's take at the map's equilibrium runs from 0
/// to the payment bound in `steps` equal increments.
pub fn generate_candidate_menu(game: &Game, params: &MenuParams, map: &StrategyMap) -> Result<ContractMenu> {
    let mut menu = ContractMenu::null_only(game);
    let bound = spe_payment_upper_bound(game);
    for player in Player::BOTH {
        let mut bases = Vec::new();
        for cand in mining::maxagg_candidates(game, player) {
            let opp = crate::game::MixedStrategy::pure(player.other(), game.actions(player.other()), cand.opponent_action);
            let target = match player {
                Player::A => StrategyProfile::new(cand.strategy, opp),
                Player::B => StrategyProfile::new(opp, cand.strategy),
            }?;
            let c = mining::synthesize_indifference_contract(game, player, &Scalar::zero(), &target)?;
            if !bases.iter().any(|(b, _)| *b == c) {
                bases.push((c, Provenance::Indifference));
            }
        }
        if !params.restrict_to_aggregate_maximizers {
            if let Ok(eps) = mining::synthesize_epsilon_contract(game, player, &params.epsilon) {
                bases.push((eps.contract, Provenance::Epsilon));
            }
        }
        for (c, prov) in &bases {
            menu.push(game, player, c.clone(), *prov)?;
        }
        if params.steps > 0 {
            for (c, _) in &bases {
                let (a, b) = single(player, c);
                let take = play(game, a, b, map)?.payoffs[2].clone();
                for k in 0..=params.steps {
                    let level = &bound * &Scalar::ratio(k as i64, params.steps as i64);
                    menu.push(game, player, c.shifted(&(level - &take)), Provenance::Shift)?;
                }
            }
        }
        for f in params.fixtures.iter().filter(|f| f.payer() == player) {
            menu.push(game, player, f.clone(), Provenance::Fixture)?;
        }
    }
    Ok(menu)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::scalar::q;

    fn map() -> StrategyMap {
        StrategyMap::default()
    }

    fn restricted_menu(game: &Game) -> ContractMenu {
        let params = MenuParams {
            restrict_to_aggregate_maximizers: true,
            ..MenuParams::default()
        };
        generate_candidate_menu(game, &params, &map()).unwrap()
    }

    fn hat(game: &Game, p: Player) -> Contract {
        Contract::new(p, game.payoff(p).clone())
    }

    #[test]
    fn aggregate_payoff_fn_flow_example() {
        let g = fixtures::flow_example();
        let m = map();
        assert_eq!(aggregate_payoff_fn(&g, &hat(&g, Player::A), Player::A, &m).unwrap(), q("2"));
        assert_eq!(aggregate_payoff_fn(&g, &Contract::null_for(&g, Player::A), Player::A, &m).unwrap(), q("0"));
        assert_eq!(aggregate_payoff_fn(&g, &hat(&g, Player::B), Player::A, &m).unwrap(), q("-1"));
    }

    #[test]
    fn delta_table_flow_example() {
        let g = fixtures::flow_example();
        let t = delta_table(&g, &restricted_menu(&g), &map()).unwrap();
        for p in Player::BOTH {
            assert_eq!(t.row(p).delta_own, q("2"));
            assert_eq!(t.row(p).delta_vs_best, q("3"));
        }
        assert_eq!(t.predicted_payment, q("3"));

        let t = delta_table(&g, &ContractMenu::null_only(&g), &map()).unwrap();
        for p in Player::BOTH {
            assert_eq!(t.row(p).delta_own, q("0"));
            assert_eq!(t.row(p).delta_vs_best, q("0"));
            assert_eq!(t.row(p).delta_vs_worst, q("0"));
        }
        assert_eq!(t.equilibrium_game, EquilibriumGame::Base);
    }

    #[test]
    fn spe_bound_examples() {
        assert_eq!(spe_payment_upper_bound(&fixtures::flow_example()), q("3"));
        assert_eq!(spe_payment_upper_bound(&fixtures::cell_phone()), q("2/3"));
        let flat = Game::new(Matrix::filled(2, 3, q("4")), Matrix::filled(2, 3, q("4"))).unwrap();
        assert_eq!(spe_payment_upper_bound(&flat), q("0"));
    }

    #[test]
    fn one_contract_flow_example() {
        let g = fixtures::flow_example();
        let out = one_contract_equilibrium(&g, &restricted_menu(&g), &map()).unwrap();
        assert_eq!((out.payoff_a.clone(), out.payoff_b.clone(), out.payoff_g.clone()), (q("-1"), q("-1"), q("3")));
        assert!(out.payoff_g <= spe_payment_upper_bound(&g));
        assert_eq!(out.conservation_gap(&g), q("0"));
    }

    #[test]
    fn null_menus_reproduce_the_base_game() {
        for g in [fixtures::cell_phone(), fixtures::flow_example(), fixtures::sequential_example()] {
            let menu = ContractMenu::null_only(&g);
            let base = unique(&g);
            for out in [
                one_contract_equilibrium(&g, &menu, &map()).unwrap(),
                both_contracts_equilibrium(&g, &menu, &map()).unwrap(),
                sequential_equilibrium(&g, &menu, &map(), Player::A).unwrap(),
                sequential_equilibrium(&g, &menu, &map(), Player::B).unwrap(),
            ] {
                assert_eq!(out.final_profile, base);
                assert_eq!(out.payoff_g, q("0"));
            }
            let cmp = compare_restriction(&g, &menu, &map()).unwrap();
            assert_eq!((cmp.restricted, cmp.unrestricted, cmp.ok), (q("0"), q("0"), true));
            assert_eq!(first_mover_value(&g, &menu, &map()).unwrap(), (q("0"), q("0")));
        }
    }

    fn unique(g: &Game) -> StrategyProfile {
        crate::equilibrium::unique_nash(g).unwrap()
    }

    #[test]
    fn one_contract_cell_phone_epsilon_offer() {
        let g = fixtures::cell_phone();
        let eps = mining::synthesize_epsilon_contract(&g, Player::A, &q("1/100")).unwrap();
        let take = eps.contract.expected_transfer(&eps.certificate);
        let offer = eps.contract.shifted(&(q("1/100") - take));
        let menu = ContractMenu::with_contracts(&g, [offer], [], Provenance::Epsilon).unwrap();
        let out = one_contract_equilibrium(&g, &menu, &map()).unwrap();
        assert_eq!(out.accepted, Accepted::A);
        assert_eq!(out.payoff_g, q("1/100"));
        assert!(out.payoff_a > q("1"));
    }

    #[test]
    fn restriction_never_hurts_on_flow_example() {
        let g = fixtures::flow_example();
        let cmp = compare_restriction(&g, &restricted_menu(&g), &map()).unwrap();
        assert!(cmp.ok);
        assert!(cmp.unrestricted <= q("3"));
    }

    fn sequential_menu(g: &Game) -> ContractMenu {
        ContractMenu::with_contracts(
            g,
            [fixtures::sequential_contract_a()],
            [fixtures::sequential_contract_b_literal(), fixtures::sequential_contract_b()],
            Provenance::Fixture,
        )
        .unwrap()
    }

    #[test]
    fn sequential_example_outcomes() {
        let g = fixtures::sequential_example();
        let menu = sequential_menu(&g);
        let a_first = sequential_equilibrium(&g, &menu, &map(), Player::A).unwrap();
        assert_eq!(a_first.final_profile, StrategyProfile::pure(&g, 0, 2));
        assert_eq!((a_first.payoff_a.clone(), a_first.payoff_b.clone(), a_first.payoff_g.clone()), (q("5"), q("4"), q("0")));
        let b_first = sequential_equilibrium(&g, &menu, &map(), Player::B).unwrap();
        assert_eq!(b_first.final_profile, StrategyProfile::pure(&g, 0, 0));
        // A: 5 first versus 2 second; B: 5 first versus 4 second.
        assert_eq!(first_mover_value(&g, &menu, &map()).unwrap(), (q("3"), q("1")));
    }

    #[test]
    fn literal_miner_offers() {
        let g = fixtures::miner_offers_example();
        let eval = evaluate_offers(&g, &fixtures::miner_offer_a(), &fixtures::miner_offer_b(), &map()).unwrap();
        assert_eq!(eval.predicted[0], StrategyProfile::pure(&g, 0, 0));
        assert_eq!(eval.predicted[1], StrategyProfile::pure(&g, 1, 2));
        let expected_a = Matrix::parse(&[&["2.01", "5"], &["2", "3"]]);
        assert_eq!(eval.acceptance.payoff(Player::A), &expected_a);
        assert_eq!(eval.acceptance.payoff(Player::B), &expected_a.transpose());
        assert_eq!(eval.miner_profit, q("5.98"));
        assert!(eval.accept_dominant());
    }

    #[test]
    fn synthesized_dual_offer() {
        let g = fixtures::miner_offers_example();
        let dual = synthesize_dual_offer(&g, &q("1/100"), &map()).unwrap().unwrap();
        assert!(dual.miner_profit >= q("5.98"));
        let bound = dual_offer_profit_bound(&g, false);
        assert_eq!(bound, q("6"));
        assert!(dual.miner_profit <= bound);
        assert!(dual.evaluation.accept_dominant());
        let out = miner_offers_outcome(&g, &dual, &map()).unwrap();
        assert_eq!(out.conservation_gap(&g), q("0"));
    }

    #[test]
    fn dual_offer_null_pair_and_constant_game() {
        let g = fixtures::miner_offers_example();
        let acc = build_acceptance_game(&g, &Contract::null_for(&g, Player::A), &Contract::null_for(&g, Player::B), &map()).unwrap();
        assert_eq!(acc.payoff(Player::A), &Matrix::filled(2, 2, q("3")));
        let flat = Game::new(Matrix::filled(2, 2, q("5")), Matrix::filled(2, 2, q("5"))).unwrap();
        assert_eq!(dual_offer_profit_bound(&flat, false), q("0"));
    }

    #[test]
    fn menu_generation() {
        let g = fixtures::cell_phone();
        let params = MenuParams {
            steps: 0,
            ..MenuParams::default()
        };
        let menu = generate_candidate_menu(&g, &params, &map()).unwrap();
        let provs: Vec<Provenance> = menu.entries(Player::A).iter().map(|e| e.provenance).collect();
        assert_eq!(provs, vec![Provenance::Null, Provenance::Indifference, Provenance::Epsilon]);
        let eps = &menu.entries(Player::A)[2].contract;
        let set = mining::aggregate_payoff_set(&g, eps, Player::A).unwrap();
        assert_eq!(set.len(), 1);
        assert_eq!(set[0].value, q("28/17"));

        let seq = fixtures::sequential_example();
        let params = MenuParams {
            fixtures: vec![fixtures::sequential_contract_a(), fixtures::sequential_contract_b()],
            ..MenuParams::default()
        };
        let menu = generate_candidate_menu(&seq, &params, &map()).unwrap();
        assert!(menu.entries(Player::A).iter().any(|e| e.contract == fixtures::sequential_contract_a()));
        assert!(menu.entries(Player::B).iter().any(|e| e.contract == fixtures::sequential_contract_b()));
    }
}
