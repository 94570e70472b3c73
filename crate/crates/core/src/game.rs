//! Games, strategies and contracts, plus the primitive payoff, best-response
//! and dominance queries everything else is built on.
//!
//! Player A picks rows and player B picks columns. Entry `(m, n)` of a payoff
//! matrix is the payoff when A plays its `m`-th action and B its `n`-th.

use std::fmt;

use crate::error::{Axis, Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Player {
    A,
    B,
}

impl Player {
    pub const BOTH: [Player; 2] = [Player::A, Player::B];

    pub fn other(self) -> Player {
        match self {
            Player::A => Player::B,
            Player::B => Player::A,
        }
    }

    fn axis(self) -> Axis {
        match self {
            Player::A => Axis::Rows,
            Player::B => Axis::Cols,
        }
    }
}

impl fmt::Display for Player {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Player::A => f.write_str("A"),
            Player::B => f.write_str("B"),
        }
    }
}

/// Dense row-major matrix of exact scalars.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Scalar>,
}

impl Matrix {
    pub fn from_rows(rows: Vec<Vec<Scalar>>) -> Result<Self> {
        let n_rows = rows.len();
        let n_cols = rows.first().map_or(0, Vec::len);
        if n_rows == 0 || n_cols == 0 {
            return Err(Error::EmptyGame);
        }
        let mut data = Vec::with_capacity(n_rows * n_cols);
        for (r, row) in rows.into_iter().enumerate() {
            if row.len() != n_cols {
                return Err(Error::RaggedMatrix {
                    row: r,
                    expected: n_cols,
                    found: row.len(),
                });
            }
            data.extend(row);
        }
        Ok(Matrix {
            rows: n_rows,
            cols: n_cols,
            data,
        })
    }

    /// Builds a matrix from decimal/fraction literals. Panics on bad input;
    /// meant for fixtures and tests.
    pub fn parse(rows: &[&[&str]]) -> Matrix {
        let rows = rows
            .iter()
            .map(|r| r.iter().map(|s| crate::scalar::q(s)).collect())
            .collect();
        Matrix::from_rows(rows).expect("well-formed literal matrix")
    }

    pub fn from_ints(rows: &[&[i64]]) -> Matrix {
        let rows = rows
            .iter()
            .map(|r| r.iter().map(|&v| Scalar::from_int(v)).collect())
            .collect();
        Matrix::from_rows(rows).expect("well-formed literal matrix")
    }

    pub fn filled(rows: usize, cols: usize, value: Scalar) -> Matrix {
        Matrix {
            rows,
            cols,
            data: vec![value; rows * cols],
        }
    }

    pub fn zeros(rows: usize, cols: usize) -> Matrix {
        Matrix::filled(rows, cols, Scalar::zero())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &Scalar {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, value: Scalar) {
        self.data[r * self.cols + c] = value;
    }

    pub fn row(&self, r: usize) -> &[Scalar] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<Scalar> {
        (0..self.rows).map(|r| self.get(r, c).clone()).collect()
    }

    pub fn entries(&self) -> impl Iterator<Item = &Scalar> {
        self.data.iter()
    }

    pub fn to_rows(&self) -> Vec<Vec<Scalar>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn transpose(&self) -> Matrix {
        let mut data = Vec::with_capacity(self.data.len());
        for c in 0..self.cols {
            for r in 0..self.rows {
                data.push(self.get(r, c).clone());
            }
        }
        Matrix {
            rows: self.cols,
            cols: self.rows,
            data,
        }
    }

    pub fn map(&self, f: impl Fn(&Scalar) -> Scalar) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    /// Entrywise combination; shapes must already agree.
    pub fn zip_with(&self, other: &Matrix, f: impl Fn(&Scalar, &Scalar) -> Scalar) -> Matrix {
        debug_assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| f(a, b))
                .collect(),
        }
    }

    pub fn min_entry(&self) -> Scalar {
        self.data.iter().min().cloned().expect("nonempty matrix")
    }

    pub fn max_entry(&self) -> Scalar {
        self.data.iter().max().cloned().expect("nonempty matrix")
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Scalar::is_zero)
    }

    /// `x^T M y`.
    pub fn bilinear(&self, x: &[Scalar], y: &[Scalar]) -> Scalar {
        let mut total = Scalar::zero();
        for (r, xr) in x.iter().enumerate() {
            if xr.is_zero() {
                continue;
            }
            let row: Scalar = self
                .row(r)
                .iter()
                .zip(y)
                .filter(|(_, yc)| !yc.is_zero())
                .map(|(m, yc)| m * yc)
                .sum();
            total += xr * row;
        }
        total
    }

    pub fn check_shape(&self, what: &'static str, rows: usize, cols: usize) -> Result<()> {
        if self.rows != rows {
            return Err(Error::DimensionMismatch {
                what,
                axis: Axis::Rows,
                expected: rows,
                found: self.rows,
            });
        }
        if self.cols != cols {
            return Err(Error::DimensionMismatch {
                what,
                axis: Axis::Cols,
                expected: cols,
                found: self.cols,
            });
        }
        Ok(())
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list()
            .entries((0..self.rows).map(|r| self.row(r)))
            .finish()
    }
}

/// Optional action names, one list per player.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Labels {
    pub rows: Vec<String>,
    pub cols: Vec<String>,
}

/// A finite two-player normal-form game.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Game {
    payoff_a: Matrix,
    payoff_b: Matrix,
    labels: Option<Labels>,
}

impl Game {
    pub fn new(payoff_a: Matrix, payoff_b: Matrix) -> Result<Game> {
        payoff_b.check_shape("payoff matrix B", payoff_a.rows(), payoff_a.cols())?;
        Ok(Game {
            payoff_a,
            payoff_b,
            labels: None,
        })
    }

    pub fn with_labels(mut self, rows: Vec<String>, cols: Vec<String>) -> Result<Game> {
        if rows.len() != self.rows() {
            return Err(Error::DimensionMismatch {
                what: "action labels",
                axis: Axis::Rows,
                expected: self.rows(),
                found: rows.len(),
            });
        }
        if cols.len() != self.cols() {
            return Err(Error::DimensionMismatch {
                what: "action labels",
                axis: Axis::Cols,
                expected: self.cols(),
                found: cols.len(),
            });
        }
        self.labels = Some(Labels { rows, cols });
        Ok(self)
    }

    pub fn labels(&self) -> Option<&Labels> {
        self.labels.as_ref()
    }

    pub fn rows(&self) -> usize {
        self.payoff_a.rows()
    }

    pub fn cols(&self) -> usize {
        self.payoff_a.cols()
    }

    pub fn actions(&self, player: Player) -> usize {
        match player {
            Player::A => self.rows(),
            Player::B => self.cols(),
        }
    }

    pub fn payoff(&self, player: Player) -> &Matrix {
        match player {
            Player::A => &self.payoff_a,
            Player::B => &self.payoff_b,
        }
    }

    /// Payoff to `payee` when `actor` plays `own` and the other player `opp`.
    pub fn entry_for(&self, payee: Player, actor: Player, own: usize, opp: usize) -> &Scalar {
        let (r, c) = match actor {
            Player::A => (own, opp),
            Player::B => (opp, own),
        };
        self.payoff(payee).get(r, c)
    }

    /// Payoff to `player` when it plays `own` against the opponent's `opp`.
    pub fn entry(&self, player: Player, own: usize, opp: usize) -> &Scalar {
        self.entry_for(player, player, own, opp)
    }

    pub fn action_name(&self, player: Player, action: usize) -> String {
        match (&self.labels, player) {
            (Some(l), Player::A) => l.rows[action].clone(),
            (Some(l), Player::B) => l.cols[action].clone(),
            (None, _) => format!("{}", action + 1),
        }
    }

    /// Largest payoff range of either player.
    pub fn spread(&self) -> Scalar {
        Player::BOTH
            .iter()
            .map(|&p| {
                let (lo, hi) = payoff_bounds(self, p);
                hi - lo
            })
            .max()
            .expect("two players")
    }

    /// Same game with one player's payoff matrix replaced.
    pub(crate) fn with_payoff(&self, player: Player, payoff: Matrix) -> Game {
        let mut g = self.clone();
        match player {
            Player::A => g.payoff_a = payoff,
            Player::B => g.payoff_b = payoff,
        }
        g
    }

    pub fn transpose_players(&self) -> Game {
        Game {
            payoff_a: self.payoff_b.transpose(),
            payoff_b: self.payoff_a.transpose(),
            labels: self.labels.as_ref().map(|l| Labels {
                rows: l.cols.clone(),
                cols: l.rows.clone(),
            }),
        }
    }
}

/// A probability vector over one player's actions.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MixedStrategy {
    owner: Player,
    probs: Vec<Scalar>,
}

impl MixedStrategy {
    pub fn new(owner: Player, probs: Vec<Scalar>) -> Result<MixedStrategy> {
        if probs.is_empty() {
            return Err(Error::InvalidStrategy("no actions".into()));
        }
        if let Some(p) = probs.iter().find(|p| p.is_negative()) {
            return Err(Error::InvalidStrategy(format!("negative probability {p}")));
        }
        let total: Scalar = probs.iter().sum();
        if total != Scalar::one() {
            return Err(Error::InvalidStrategy(format!(
                "probabilities sum to {total}"
            )));
        }
        Ok(MixedStrategy { owner, probs })
    }

    pub fn pure(owner: Player, actions: usize, action: usize) -> MixedStrategy {
        assert!(action < actions, "action {action} out of range");
        let mut probs = vec![Scalar::zero(); actions];
        probs[action] = Scalar::one();
        MixedStrategy { owner, probs }
    }

    pub fn uniform(owner: Player, actions: usize) -> MixedStrategy {
        let p = Scalar::ratio(1, actions as i64);
        MixedStrategy {
            owner,
            probs: vec![p; actions],
        }
    }

    /// Scales a nonnegative, nonzero vector onto the simplex.
    pub fn normalized(owner: Player, weights: Vec<Scalar>) -> Result<MixedStrategy> {
        let total: Scalar = weights.iter().sum();
        if !total.is_positive() {
            return Err(Error::InvalidStrategy("weights do not sum to a positive value".into()));
        }
        MixedStrategy::new(owner, weights.into_iter().map(|w| w / &total).collect())
    }

    pub fn owner(&self) -> Player {
        self.owner
    }

    pub fn probs(&self) -> &[Scalar] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn support(&self) -> Vec<usize> {
        (0..self.probs.len())
            .filter(|&i| self.probs[i].is_positive())
            .collect()
    }

    pub fn as_pure(&self) -> Option<usize> {
        let s = self.support();
        (s.len() == 1).then(|| s[0])
    }

    /// Convex combination `alpha * self + (1 - alpha) * other`.
    pub fn mix(&self, other: &MixedStrategy, alpha: &Scalar) -> MixedStrategy {
        let beta = Scalar::one() - alpha;
        MixedStrategy {
            owner: self.owner,
            probs: self
                .probs
                .iter()
                .zip(&other.probs)
                .map(|(x, y)| alpha * x + &beta * y)
                .collect(),
        }
    }
}

impl fmt::Display for MixedStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, p) in self.probs.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, ")")
    }
}

/// A pair of mixed strategies, A's first.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StrategyProfile {
    a: MixedStrategy,
    b: MixedStrategy,
}

impl StrategyProfile {
    pub fn new(a: MixedStrategy, b: MixedStrategy) -> Result<StrategyProfile> {
        if a.owner != Player::A {
            return Err(Error::WrongOwner {
                expected: Player::A,
                found: a.owner,
            });
        }
        if b.owner != Player::B {
            return Err(Error::WrongOwner {
                expected: Player::B,
                found: b.owner,
            });
        }
        Ok(StrategyProfile { a, b })
    }

    pub fn pure(game: &Game, row: usize, col: usize) -> StrategyProfile {
        StrategyProfile {
            a: MixedStrategy::pure(Player::A, game.rows(), row),
            b: MixedStrategy::pure(Player::B, game.cols(), col),
        }
    }

    /// Builds a profile from two probability vectors. Panics if either is
    /// not a distribution; intended for literals.
    pub fn from_probs(a: Vec<Scalar>, b: Vec<Scalar>) -> StrategyProfile {
        StrategyProfile {
            a: MixedStrategy::new(Player::A, a).expect("valid distribution for A"),
            b: MixedStrategy::new(Player::B, b).expect("valid distribution for B"),
        }
    }

    pub fn a(&self) -> &MixedStrategy {
        &self.a
    }

    pub fn b(&self) -> &MixedStrategy {
        &self.b
    }

    pub fn get(&self, player: Player) -> &MixedStrategy {
        match player {
            Player::A => &self.a,
            Player::B => &self.b,
        }
    }

    pub fn as_pure(&self) -> Option<(usize, usize)> {
        Some((self.a.as_pure()?, self.b.as_pure()?))
    }

    /// L-infinity distance over both probability vectors.
    pub fn linf_distance(&self, other: &StrategyProfile) -> Scalar {
        self.a
            .probs
            .iter()
            .zip(&other.a.probs)
            .chain(self.b.probs.iter().zip(&other.b.probs))
            .map(|(x, y)| (x - y).abs())
            .max()
            .unwrap_or_else(Scalar::zero)
    }

    fn check_dims(&self, game: &Game) -> Result<()> {
        if self.a.len() != game.rows() {
            return Err(Error::DimensionMismatch {
                what: "strategy profile",
                axis: Axis::Rows,
                expected: game.rows(),
                found: self.a.len(),
            });
        }
        if self.b.len() != game.cols() {
            return Err(Error::DimensionMismatch {
                what: "strategy profile",
                axis: Axis::Cols,
                expected: game.cols(),
                found: self.b.len(),
            });
        }
        Ok(())
    }

    /// Human-readable form using the game's action names for pure strategies.
    pub fn describe(&self, game: &Game) -> String {
        let side = |s: &MixedStrategy, p: Player| match s.as_pure() {
            Some(i) => game.action_name(p, i),
            None => s.to_string(),
        };
        format!("({}, {})", side(&self.a, Player::A), side(&self.b, Player::B))
    }
}

impl fmt::Display for StrategyProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.a, self.b)
    }
}

/// Outcome-contingent transfers from `payer` to the miner; entries may be negative.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Contract {
    payer: Player,
    transfers: Matrix,
}

impl Contract {
    pub fn new(payer: Player, transfers: Matrix) -> Contract {
        Contract { payer, transfers }
    }

    pub fn null(payer: Player, rows: usize, cols: usize) -> Contract {
        Contract::new(payer, Matrix::zeros(rows, cols))
    }

    pub fn null_for(game: &Game, payer: Player) -> Contract {
        Contract::null(payer, game.rows(), game.cols())
    }

    pub fn payer(&self) -> Player {
        self.payer
    }

    pub fn transfers(&self) -> &Matrix {
        &self.transfers
    }

    pub fn is_null(&self) -> bool {
        self.transfers.is_zero()
    }

    /// Adds `x` to every transfer.
    pub fn shifted(&self, x: &Scalar) -> Contract {
        Contract::new(self.payer, self.transfers.map(|t| t + x))
    }

    pub fn expected_transfer(&self, profile: &StrategyProfile) -> Scalar {
        self.transfers.bilinear(profile.a.probs(), profile.b.probs())
    }

    fn check_dims(&self, game: &Game) -> Result<()> {
        self.transfers
            .check_shape("contract", game.rows(), game.cols())
    }
}

/// A base game together with the contracts in force and the resulting
/// effective game.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PostContractGame {
    base: Game,
    contract_a: Option<Contract>,
    contract_b: Option<Contract>,
    effective: Game,
}

impl PostContractGame {
    pub fn base(&self) -> &Game {
        &self.base
    }

    pub fn effective(&self) -> &Game {
        &self.effective
    }

    pub fn contract(&self, player: Player) -> Option<&Contract> {
        match player {
            Player::A => self.contract_a.as_ref(),
            Player::B => self.contract_b.as_ref(),
        }
    }

    /// Players with a (possibly null) contract in force.
    pub fn payers(&self) -> Vec<Player> {
        Player::BOTH
            .into_iter()
            .filter(|&p| self.contract(p).is_some())
            .collect()
    }

    /// Total expected transfer to the miner under every contract in force.
    pub fn expected_transfers(&self, profile: &StrategyProfile) -> Scalar {
        Player::BOTH
            .iter()
            .filter_map(|&p| self.contract(p))
            .map(|c| c.expected_transfer(profile))
            .sum()
    }

    pub fn base_payoff(&self, profile: &StrategyProfile, player: Player) -> Scalar {
        self.base
            .payoff(player)
            .bilinear(profile.a.probs(), profile.b.probs())
    }

    pub fn effective_payoff(&self, profile: &StrategyProfile, player: Player) -> Scalar {
        self.effective
            .payoff(player)
            .bilinear(profile.a.probs(), profile.b.probs())
    }
}

/// `sigma_A^T U_player sigma_B`.
pub fn expected_payoff(game: &Game, profile: &StrategyProfile, player: Player) -> Result<Scalar> {
    profile.check_dims(game)?;
    Ok(game
        .payoff(player)
        .bilinear(profile.a.probs(), profile.b.probs()))
}

fn check_opponent(game: &Game, player: Player, opponent: &MixedStrategy) -> Result<()> {
    let other = player.other();
    if opponent.owner() != other {
        return Err(Error::WrongOwner {
            expected: other,
            found: opponent.owner(),
        });
    }
    if opponent.len() != game.actions(other) {
        return Err(Error::DimensionMismatch {
            what: "opponent strategy",
            axis: other.axis(),
            expected: game.actions(other),
            found: opponent.len(),
        });
    }
    Ok(())
}

/// Payoff of each of `player`'s pure actions against an opponent mixture
/// given as raw weights (need not be normalized).
pub fn action_values(game: &Game, player: Player, opponent: &[Scalar]) -> Vec<Scalar> {
    (0..game.actions(player))
        .map(|own| {
            opponent
                .iter()
                .enumerate()
                .filter(|(_, w)| !w.is_zero())
                .map(|(opp, w)| game.entry(player, own, opp) * w)
                .sum()
        })
        .collect()
}

fn argmax_set(values: &[Scalar]) -> Vec<usize> {
    let best = values.iter().max().expect("at least one action");
    (0..values.len()).filter(|&i| &values[i] == best).collect()
}

/// All pure actions of `player` attaining the maximal payoff against `opponent`.
pub fn pure_best_responses(
    game: &Game,
    player: Player,
    opponent: &MixedStrategy,
) -> Result<Vec<usize>> {
    check_opponent(game, player, opponent)?;
    Ok(argmax_set(&action_values(game, player, opponent.probs())))
}

/// True iff every action in the support of `own` is a pure best response.
pub fn is_best_response(
    game: &Game,
    player: Player,
    own: &MixedStrategy,
    opponent: &MixedStrategy,
) -> Result<bool> {
    if own.owner() != player {
        return Err(Error::WrongOwner {
            expected: player,
            found: own.owner(),
        });
    }
    if own.len() != game.actions(player) {
        return Err(Error::DimensionMismatch {
            what: "own strategy",
            axis: player.axis(),
            expected: game.actions(player),
            found: own.len(),
        });
    }
    let best = pure_best_responses(game, player, opponent)?;
    Ok(own.support().iter().all(|i| best.contains(i)))
}

pub fn is_nash(game: &Game, profile: &StrategyProfile) -> Result<bool> {
    Ok(is_best_response(game, Player::A, &profile.a, &profile.b)?
        && is_best_response(game, Player::B, &profile.b, &profile.a)?)
}

/// Applies one contract; the payer's payoffs become `U - D`.
pub fn apply_contract(game: &Game, contract: &Contract) -> Result<PostContractGame> {
    contract.check_dims(game)?;
    let payer = contract.payer();
    let effective = game.with_payoff(
        payer,
        game.payoff(payer).zip_with(contract.transfers(), |u, d| u - d),
    );
    let (contract_a, contract_b) = match payer {
        Player::A => (Some(contract.clone()), None),
        Player::B => (None, Some(contract.clone())),
    };
    Ok(PostContractGame {
        base: game.clone(),
        contract_a,
        contract_b,
        effective,
    })
}

/// Applies a contract for each player. Either may be absent.
pub fn apply_two(
    game: &Game,
    contract_a: Option<&Contract>,
    contract_b: Option<&Contract>,
) -> Result<PostContractGame> {
    if let (Some(a), Some(b)) = (contract_a, contract_b) {
        if a.payer() == b.payer() {
            return Err(Error::DuplicatePayer(a.payer()));
        }
    }
    let mut slots: [Option<Contract>; 2] = [None, None];
    for c in [contract_a, contract_b].into_iter().flatten() {
        c.check_dims(game)?;
        let idx = match c.payer() {
            Player::A => 0,
            Player::B => 1,
        };
        if slots[idx].is_some() {
            return Err(Error::DuplicatePayer(c.payer()));
        }
        slots[idx] = Some(c.clone());
    }
    let [contract_a, contract_b] = slots;
    let mut effective = game.clone();
    for c in contract_a.iter().chain(contract_b.iter()) {
        let payer = c.payer();
        effective = effective.with_payoff(
            payer,
            game.payoff(payer).zip_with(c.transfers(), |u, d| u - d),
        );
    }
    Ok(PostContractGame {
        base: game.clone(),
        contract_a,
        contract_b,
        effective,
    })
}

/// The game itself with no contract in force.
pub fn no_contract(game: &Game) -> PostContractGame {
    PostContractGame {
        base: game.clone(),
        contract_a: None,
        contract_b: None,
        effective: game.clone(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dominance {
    Strict,
    Weak,
}

fn dominates(game: &Game, player: Player, a: usize, b: usize, mode: Dominance) -> bool {
    let opp = game.actions(player.other());
    let mut strictly_somewhere = false;
    for o in 0..opp {
        let (x, y) = (game.entry(player, a, o), game.entry(player, b, o));
        match mode {
            Dominance::Strict if x <= y => return false,
            Dominance::Weak if x < y => return false,
            _ => {}
        }
        strictly_somewhere |= x > y;
    }
    mode == Dominance::Strict || strictly_somewhere
}

fn duplicate_actions(game: &Game, player: Player, a: usize, b: usize) -> bool {
    (0..game.actions(player.other())).all(|o| game.entry(player, a, o) == game.entry(player, b, o))
}

/// Every action that dominates all other actions in the given sense.
///
/// In weak mode an exact duplicate of a qualifying action also qualifies, so
/// duplicated rows yield several dominant actions.
pub fn dominant_actions(game: &Game, player: Player, mode: Dominance) -> Vec<usize> {
    let n = game.actions(player);
    if n == 1 {
        return vec![0];
    }
    (0..n)
        .filter(|&a| {
            let others = (0..n).filter(|&b| b != a);
            match mode {
                Dominance::Strict => others.clone().all(|b| dominates(game, player, a, b, mode)),
                Dominance::Weak => {
                    let mut strict_somewhere = false;
                    for b in others {
                        if duplicate_actions(game, player, a, b) {
                            continue;
                        }
                        if !dominates(game, player, a, b, mode) {
                            return false;
                        }
                        strict_somewhere = true;
                    }
                    strict_somewhere
                }
            }
        })
        .collect()
}

/// The dominant action, lowest index first when several qualify.
pub fn dominant_strategy(game: &Game, player: Player, mode: Dominance) -> Option<usize> {
    dominant_actions(game, player, mode).first().copied()
}

/// Entrywise (min, max) of the player's payoff matrix.
pub fn payoff_bounds(game: &Game, player: Player) -> (Scalar, Scalar) {
    let m = game.payoff(player);
    (m.min_entry(), m.max_entry())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::scalar::q;

    fn mixed(owner: Player, probs: &[&str]) -> MixedStrategy {
        MixedStrategy::new(owner, probs.iter().map(|s| q(s)).collect()).unwrap()
    }

    #[test]
    fn expected_payoff_examples() {
        let g = fixtures::cell_phone();
        let hh = StrategyProfile::pure(&g, 0, 0);
        assert_eq!(expected_payoff(&g, &hh, Player::A).unwrap(), q("1"));
        assert_eq!(expected_payoff(&g, &hh, Player::B).unwrap(), q("1/2"));
        let p = StrategyProfile::from_probs(vec![q("2/3"), q("1/3")], vec![q("0"), q("1")]);
        assert_eq!(expected_payoff(&g, &p, Player::A).unwrap(), q("5/3"));
        for r in 0..2 {
            for c in 0..2 {
                let p = StrategyProfile::pure(&g, r, c);
                assert_eq!(&expected_payoff(&g, &p, Player::B).unwrap(), g.payoff(Player::B).get(r, c));
            }
        }
    }

    #[test]
    fn expected_payoff_dimension_error_names_axis() {
        let g = fixtures::cell_phone();
        let g3 = fixtures::flow_example();
        let p = StrategyProfile::pure(&g3, 0, 0);
        match expected_payoff(&g, &p, Player::A) {
            Err(Error::DimensionMismatch { axis: Axis::Rows, expected: 2, found: 3, .. }) => {}
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn best_response_examples() {
        let g = fixtures::cell_phone();
        let br = |p: &[&str]| pure_best_responses(&g, Player::B, &mixed(Player::A, p)).unwrap();
        assert_eq!(br(&["3/4", "1/4"]), vec![0]);
        assert_eq!(br(&["2/3", "1/3"]), vec![0, 1]);
        assert_eq!(br(&["1/2", "1/2"]), vec![1]);

        let flat = Game::new(Matrix::from_ints(&[&[4, 4], &[4, 4]]), Matrix::from_ints(&[&[1, 2], &[3, 4]])).unwrap();
        let any = MixedStrategy::uniform(Player::B, 2);
        assert_eq!(pure_best_responses(&flat, Player::A, &any).unwrap(), vec![0, 1]);
    }

    #[test]
    fn best_response_rejects_wrong_owner() {
        let g = fixtures::cell_phone();
        let own = MixedStrategy::uniform(Player::B, 2);
        assert!(matches!(
            pure_best_responses(&g, Player::B, &own),
            Err(Error::WrongOwner { .. })
        ));
    }

    #[test]
    fn is_best_response_examples() {
        let g = fixtures::cell_phone();
        let l = MixedStrategy::pure(Player::B, 2, 1);
        assert!(is_best_response(&g, Player::B, &l, &mixed(Player::A, &["1/2", "1/2"])).unwrap());
        let half = mixed(Player::B, &["1/2", "1/2"]);
        assert!(!is_best_response(&g, Player::B, &half, &MixedStrategy::pure(Player::A, 2, 0)).unwrap());
        let h = MixedStrategy::pure(Player::B, 2, 0);
        assert!(is_best_response(&g, Player::B, &h, &MixedStrategy::pure(Player::A, 2, 0)).unwrap());
    }

    #[test]
    fn apply_contract_examples() {
        let g = fixtures::cell_phone();
        let post = apply_contract(&g, &fixtures::cell_phone_literal_contract()).unwrap();
        assert_eq!(post.effective().payoff(Player::A), &Matrix::parse(&[&["-.5", "1.51"], &["0", "1.5"]]));
        assert_eq!(post.effective().payoff(Player::B), g.payoff(Player::B));

        let null = apply_contract(&g, &Contract::null_for(&g, Player::B)).unwrap();
        assert_eq!(null.effective(), &g);

        let eps = q("1/100");
        let d = Contract::new(
            Player::A,
            Matrix::from_rows(vec![vec![q("1.5"), q(".5") - &eps], vec![q("0"), q("-.5")]]).unwrap(),
        );
        let post = apply_contract(&g, &d).unwrap();
        assert_eq!(post.effective().payoff(Player::A).get(0, 1), &(q("1.5") + &eps));
        assert_eq!(post.effective().payoff(Player::A).get(0, 0), &q("-.5"));
    }

    #[test]
    fn apply_two_rejects_same_payer_and_bad_shape() {
        let g = fixtures::cell_phone();
        let d = Contract::null_for(&g, Player::A);
        assert_eq!(apply_two(&g, Some(&d), Some(&d)), Err(Error::DuplicatePayer(Player::A)));
        let wide = Contract::null(Player::B, 2, 3);
        assert!(matches!(apply_contract(&g, &wide), Err(Error::DimensionMismatch { axis: Axis::Cols, .. })));
    }

    #[test]
    fn dominance_examples() {
        let seq = fixtures::sequential_example();
        assert_eq!(dominant_strategy(&seq, Player::B, Dominance::Strict), Some(0));
        let pd = fixtures::miner_offers_example();
        assert_eq!(dominant_strategy(&pd, Player::A, Dominance::Strict), Some(2));
        assert_eq!(dominant_strategy(&fixtures::cell_phone(), Player::B, Dominance::Strict), None);

        let single = Game::new(Matrix::from_ints(&[&[3]]), Matrix::from_ints(&[&[-1]])).unwrap();
        for mode in [Dominance::Strict, Dominance::Weak] {
            assert_eq!(dominant_strategy(&single, Player::A, mode), Some(0));
            assert_eq!(dominant_strategy(&single, Player::B, mode), Some(0));
        }
    }

    #[test]
    fn weak_dominance_ties_return_lowest_index() {
        // rows 1 and 2 are duplicates that weakly dominate row 0
        let g = Game::new(
            Matrix::from_ints(&[&[0, 1], &[1, 1], &[1, 1]]),
            Matrix::zeros(3, 2),
        )
        .unwrap();
        assert_eq!(dominant_actions(&g, Player::A, Dominance::Weak), vec![1, 2]);
        assert_eq!(dominant_strategy(&g, Player::A, Dominance::Weak), Some(1));
        let g = Game::new(Matrix::from_ints(&[&[0, 1], &[1, 1]]), Matrix::zeros(2, 2)).unwrap();
        assert_eq!(dominant_strategy(&g, Player::A, Dominance::Weak), Some(1));
        assert_eq!(dominant_strategy(&g, Player::A, Dominance::Strict), None);
    }

    #[test]
    fn payoff_bounds_examples() {
        assert_eq!(payoff_bounds(&fixtures::cell_phone(), Player::A), (q("0"), q("2")));
        assert_eq!(payoff_bounds(&fixtures::miner_offers_example(), Player::B), (q("1"), q("6")));
        let c = Game::new(Matrix::filled(2, 3, q("7/2")), Matrix::zeros(2, 3)).unwrap();
        assert_eq!(payoff_bounds(&c, Player::A), (q("7/2"), q("7/2")));
    }
}
