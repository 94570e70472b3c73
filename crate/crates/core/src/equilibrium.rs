//! Exact Nash equilibria of bimatrix games, a brute-force grid oracle, and
//! deterministic equilibrium selection.
//!
//! [`enumerate_nash`] runs support enumeration over equal-size support pairs.
//! Degeneracy is decided exactly by enumerating the vertices of the two
//! best-response polytopes: the game is degenerate iff some vertex carries more
//! labels than the dimension. For degenerate games the extreme equilibria found
//! by matching completely labelled vertex pairs are merged in, so every extreme
//! point of every equilibrium component is reported.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::game::{is_nash, Game, Matrix, MixedStrategy, Player, PostContractGame, StrategyProfile};
use crate::linalg;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EquilibriumSet {
    equilibria: Vec<StrategyProfile>,
    degenerate: bool,
    complete: bool,
}

impl EquilibriumSet {
    /// Sorted, duplicate-free list of equilibria.
    pub fn equilibria(&self) -> &[StrategyProfile] {
        &self.equilibria
    }

    pub fn degenerate(&self) -> bool {
        self.degenerate
    }

    /// True when the list is provably the full equilibrium set.
    pub fn complete(&self) -> bool {
        self.complete
    }

    pub fn len(&self) -> usize {
        self.equilibria.len()
    }

    pub fn is_empty(&self) -> bool {
        self.equilibria.is_empty()
    }

    pub fn contains(&self, profile: &StrategyProfile) -> bool {
        self.equilibria.binary_search(profile).is_ok()
    }

    /// The single equilibrium, if uniqueness is certified.
    pub fn unique(&self) -> Option<&StrategyProfile> {
        match self.equilibria.as_slice() {
            [only] if self.complete => Some(only),
            _ => None,
        }
    }
}

/// All `k`-element subsets of `0..n` in lexicographic order.
pub(crate) fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(idx.clone());
        let Some(i) = (0..k).rev().find(|&i| idx[i] != i + n - k) else {
            return out;
        };
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Solves `sum_{c in cols} M[r][c] w_c = v` for all `r in rows`, `sum w = 1`.
/// `M` is addressed through `entry(r, c)`.
fn indifference(
    rows: &[usize],
    cols: &[usize],
    entry: impl Fn(usize, usize) -> Scalar,
) -> Option<Vec<Scalar>> {
    let k = cols.len();
    let mut m = Vec::with_capacity(k + 1);
    for &r in rows {
        let mut line: Vec<Scalar> = cols.iter().map(|&c| entry(r, c)).collect();
        line.push(-Scalar::one());
        m.push(line);
    }
    let mut sum = vec![Scalar::one(); k];
    sum.push(Scalar::zero());
    m.push(sum);
    let mut rhs = vec![Scalar::zero(); k];
    rhs.push(Scalar::one());
    let mut sol = linalg::solve(m, rhs)?;
    sol.pop();
    Some(sol)
}

fn expand(len: usize, support: &[usize], weights: Vec<Scalar>) -> Vec<Scalar> {
    let mut full = vec![Scalar::zero(); len];
    for (&i, w) in support.iter().zip(weights) {
        full[i] = w;
    }
    full
}

fn support_pair(game: &Game, rows: &[usize], cols: &[usize]) -> Option<StrategyProfile> {
    let (a, b) = (game.payoff(Player::A), game.payoff(Player::B));
    let y = indifference(rows, cols, |r, c| a.get(r, c).clone())?;
    let x = indifference(cols, rows, |c, r| b.get(r, c).clone())?;
    if !x.iter().chain(&y).all(Scalar::is_positive) {
        return None;
    }
    let profile = StrategyProfile::from_probs(
        expand(game.rows(), rows, x),
        expand(game.cols(), cols, y),
    );
    is_nash(game, &profile)
        .expect("profile built to game dimensions")
        .then_some(profile)
}

/// Equilibria found by equal-size support enumeration.
pub fn support_enumeration(game: &Game) -> Vec<StrategyProfile> {
    let (m, n) = (game.rows(), game.cols());
    let pairs: Vec<(Vec<usize>, Vec<usize>)> = (1..=m.min(n))
        .flat_map(|k| {
            let cols = combinations(n, k);
            combinations(m, k)
                .into_iter()
                .flat_map(move |r| cols.clone().into_iter().map(move |c| (r.clone(), c)))
        })
        .collect();
    let mut found: Vec<StrategyProfile> = pairs
        .par_iter()
        .filter_map(|(r, c)| support_pair(game, r, c))
        .collect();
    found.sort();
    found.dedup();
    found
}

#[derive(Debug, Clone)]
struct Vertex {
    point: Vec<Scalar>,
    labels: u128,
}

/// Vertices of `{z >= 0, c_r . z <= 1}`. Coordinate `k` carries label
/// `coord_labels[k]` when zero; constraint `r` carries `row_labels[r]` when tight.
fn polytope_vertices(
    constraints: &[Vec<Scalar>],
    coord_labels: &[usize],
    row_labels: &[usize],
) -> Vec<Vertex> {
    let d = coord_labels.len();
    let total = d + constraints.len();
    let found: Vec<Vec<Scalar>> = combinations(total, d)
        .par_iter()
        .filter_map(|tight| {
            let mut m = Vec::with_capacity(d);
            let mut rhs = Vec::with_capacity(d);
            for &t in tight {
                if t < d {
                    let mut e = vec![Scalar::zero(); d];
                    e[t] = Scalar::one();
                    m.push(e);
                    rhs.push(Scalar::zero());
                } else {
                    m.push(constraints[t - d].clone());
                    rhs.push(Scalar::one());
                }
            }
            let z = linalg::solve(m, rhs)?;
            let feasible = z.iter().all(|v| !v.is_negative())
                && constraints.iter().all(|c| dot(c, &z) <= Scalar::one());
            feasible.then_some(z)
        })
        .collect();
    let mut unique: BTreeMap<Vec<Scalar>, ()> = BTreeMap::new();
    for z in found {
        unique.insert(z, ());
    }
    unique
        .into_keys()
        .map(|z| {
            let mut labels = 0u128;
            for (k, v) in z.iter().enumerate() {
                if v.is_zero() {
                    labels |= 1 << coord_labels[k];
                }
            }
            for (r, c) in constraints.iter().enumerate() {
                if dot(c, &z) == Scalar::one() {
                    labels |= 1 << row_labels[r];
                }
            }
            Vertex { point: z, labels }
        })
        .collect()
}

fn dot(a: &[Scalar], b: &[Scalar]) -> Scalar {
    a.iter()
        .zip(b)
        .filter(|(x, y)| !x.is_zero() && !y.is_zero())
        .map(|(x, y)| x * y)
        .sum()
}

fn shifted_positive(m: &Matrix) -> Matrix {
    let lo = m.min_entry();
    m.map(|v| v - &lo + Scalar::one())
}

/// Extreme equilibria via completely labelled vertex pairs, plus whether the
/// game is degenerate.
pub fn vertex_enumeration(game: &Game) -> (Vec<StrategyProfile>, bool) {
    let (m, n) = (game.rows(), game.cols());
    assert!(m + n <= 128, "games with more than 128 actions in total are not supported");
    let a = shifted_positive(game.payoff(Player::A));
    let b = shifted_positive(game.payoff(Player::B));
    // P: x >= 0 (labels 0..m), B'^T x <= 1 (labels m..m+n)
    let p_rows: Vec<Vec<Scalar>> = (0..n).map(|j| b.column(j)).collect();
    let p = polytope_vertices(&p_rows, &(0..m).collect::<Vec<_>>(), &(m..m + n).collect::<Vec<_>>());
    // Q: A' y <= 1 (labels 0..m), y >= 0 (labels m..m+n)
    let q_rows: Vec<Vec<Scalar>> = (0..m).map(|i| a.row(i).to_vec()).collect();
    let q = polytope_vertices(&q_rows, &(m..m + n).collect::<Vec<_>>(), &(0..m).collect::<Vec<_>>());

    let degenerate = p.iter().any(|v| v.labels.count_ones() as usize > m)
        || q.iter().any(|v| v.labels.count_ones() as usize > n);
    let all: u128 = if m + n == 128 { u128::MAX } else { (1u128 << (m + n)) - 1 };
    let nonzero = |v: &&Vertex| v.point.iter().any(Scalar::is_positive);
    let normalize = |z: &[Scalar]| {
        let s: Scalar = z.iter().sum();
        z.iter().map(|v| v / &s).collect::<Vec<_>>()
    };
    let mut found = Vec::new();
    for x in p.iter().filter(nonzero) {
        for y in q.iter().filter(nonzero) {
            if x.labels | y.labels == all {
                found.push(StrategyProfile::from_probs(normalize(&x.point), normalize(&y.point)));
            }
        }
    }
    found.sort();
    found.dedup();
    (found, degenerate)
}

/// True when no two profiles share a strategy of either player. Equilibrium
/// components are convex hulls of such shared-strategy cliques of extreme
/// equilibria, so this makes every component a single point.
fn isolated(extreme: &[StrategyProfile]) -> bool {
    let mut a: Vec<_> = extreme.iter().map(|p| p.a()).collect();
    let mut b: Vec<_> = extreme.iter().map(|p| p.b()).collect();
    a.sort();
    b.sort();
    a.windows(2).all(|w| w[0] != w[1]) && b.windows(2).all(|w| w[0] != w[1])
}

/// Nash equilibria of `game`.
///
/// For nondegenerate games the list is the whole (finite) equilibrium set. For
/// degenerate games every extreme equilibrium is listed; `complete` is still
/// set when those extreme points cannot span a continuum.
pub fn enumerate_nash(game: &Game) -> EquilibriumSet {
    let mut equilibria = support_enumeration(game);
    let (extreme, degenerate) = vertex_enumeration(game);
    if degenerate {
        equilibria.extend(extreme);
        equilibria.sort();
        equilibria.dedup();
    } else {
        debug_assert_eq!(equilibria, extreme, "the two enumerations disagree on a nondegenerate game");
    }
    let complete = !degenerate || isolated(&equilibria);
    EquilibriumSet {
        equilibria,
        degenerate,
        complete,
    }
}

pub fn unique_nash(game: &Game) -> Option<StrategyProfile> {
    enumerate_nash(game).unique().cloned()
}

/// A profile on the `n`-division grid, stored as integer counts summing to `n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GridPoint {
    pub a: Vec<u32>,
    pub b: Vec<u32>,
}

impl GridPoint {
    pub fn to_profile(&self, n: u32) -> StrategyProfile {
        let conv = |v: &[u32]| v.iter().map(|&k| Scalar::ratio(k as i64, n as i64)).collect();
        StrategyProfile::from_probs(conv(&self.a), conv(&self.b))
    }

    /// L-infinity distance to `profile`, both read as probability vectors.
    pub fn distance(&self, n: u32, profile: &StrategyProfile) -> Scalar {
        self.to_profile(n).linf_distance(profile)
    }
}

/// Grid points within `steps / n` (L-infinity) of a fixed profile, as integer
/// count windows so membership tests need no rational arithmetic.
#[derive(Debug, Clone)]
pub struct GridNeighbourhood {
    a: Vec<(i64, i64)>,
    b: Vec<(i64, i64)>,
}

impl GridNeighbourhood {
    pub fn new(profile: &StrategyProfile, n: u32, steps: u32) -> GridNeighbourhood {
        let window = |s: &MixedStrategy| {
            s.probs()
                .iter()
                .map(|p| {
                    let centre = p * &Scalar::from_int(n as i64);
                    let lo = (centre.as_big() - num_rational::BigRational::from_integer(steps.into())).ceil();
                    let hi = (centre.as_big() + num_rational::BigRational::from_integer(steps.into())).floor();
                    (
                        lo.to_integer().to_i64().expect("small grid"),
                        hi.to_integer().to_i64().expect("small grid"),
                    )
                })
                .collect()
        };
        GridNeighbourhood {
            a: window(profile.a()),
            b: window(profile.b()),
        }
    }

    pub fn contains(&self, point: &GridPoint) -> bool {
        let inside = |w: &[(i64, i64)], v: &[u32]| {
            w.iter().zip(v).all(|(&(lo, hi), &k)| lo <= k as i64 && k as i64 <= hi)
        };
        inside(&self.a, &point.a) && inside(&self.b, &point.b)
    }
}

/// The oracle's acceptance threshold `2 L / n`, with `L` the payoff spread.
pub fn grid_tolerance(game: &Game, n: u32) -> Scalar {
    Scalar::from_int(2) * game.spread() / Scalar::from_int(n as i64)
}

/// Grid compositions of `n` into `parts` nonnegative counts, lexicographic.
pub(crate) fn compositions(n: u32, parts: usize) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut cur = vec![0u32; parts];
    fn rec(i: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if i + 1 == cur.len() {
            cur[i] = left;
            out.push(cur.clone());
            return;
        }
        for k in 0..=left {
            cur[i] = k;
            rec(i + 1, left - k, cur, out);
        }
    }
    rec(0, n, &mut cur, &mut out);
    out
}

/// Payoff matrix scaled to integers by the lcm of its denominators.
fn integer_matrix(m: &Matrix, scale: &BigInt) -> Vec<Vec<i128>> {
    m.to_rows()
        .iter()
        .map(|row| {
            row.iter()
                .map(|v| {
                    let z = v.numer() * (scale / v.denom());
                    z.to_i128().expect("scaled payoff fits in i128")
                })
                .collect()
        })
        .collect()
}

/// Every `n`-grid profile whose largest unilateral pure-deviation gain is at
/// most [`grid_tolerance`]. Exhaustive; uses exact integer arithmetic.
pub fn grid_oracle_nash(game: &Game, n: u32) -> Vec<GridPoint> {
    assert!(n >= 1, "grid resolution must be positive");
    let (m, k) = (game.rows(), game.cols());
    let scale = game
        .payoff(Player::A)
        .entries()
        .chain(game.payoff(Player::B).entries())
        .fold(BigInt::from(1), |acc, v| acc.lcm(v.denom()));
    let a = integer_matrix(game.payoff(Player::A), &scale);
    let b = integer_matrix(game.payoff(Player::B), &scale);
    // Gains are in units of 1 / (scale n^2); the tolerance 2 L / n becomes 2 L scale n.
    let spread = game.spread().as_big().clone() * num_rational::BigRational::from_integer(scale.clone());
    debug_assert!(spread.is_integer());
    let tol: i128 = (spread.to_integer() * BigInt::from(2 * n as i64))
        .abs()
        .to_i128()
        .expect("tolerance fits in i128");
    let n128 = n as i128;

    let grid_a = compositions(n, m);
    let grid_b = compositions(n, k);
    // A's row values against each grid point of B, and B's column values against A's.
    let a_vals: Vec<Vec<i128>> = grid_b
        .iter()
        .map(|y| (0..m).map(|r| (0..k).map(|c| a[r][c] * y[c] as i128).sum()).collect())
        .collect();
    let b_vals: Vec<Vec<i128>> = grid_a
        .iter()
        .map(|x| (0..k).map(|c| (0..m).map(|r| b[r][c] * x[r] as i128).sum()).collect())
        .collect();

    grid_a
        .par_iter()
        .enumerate()
        .flat_map_iter(|(ia, x)| {
            let bv = &b_vals[ia];
            let best_b = *bv.iter().max().expect("nonempty");
            let a_vals = &a_vals;
            let grid_b = &grid_b;
            grid_b.iter().enumerate().filter_map(move |(ib, y)| {
                let av = &a_vals[ib];
                let best_a = *av.iter().max().expect("nonempty");
                let cur_a: i128 = x.iter().zip(av).map(|(&p, v)| p as i128 * v).sum();
                if best_a * n128 - cur_a > tol {
                    return None;
                }
                let cur_b: i128 = y.iter().zip(bv).map(|(&p, v)| p as i128 * v).sum();
                if best_b * n128 - cur_b > tol {
                    return None;
                }
                Some(GridPoint {
                    a: x.clone(),
                    b: y.clone(),
                })
            })
        })
        .collect()
}

/// Rule for picking one equilibrium out of several.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SelectionPolicy {
    /// Largest expected transfer to the miner.
    MinerOptimistic,
    /// Largest effective payoff summed over the contracting players, then
    /// largest base payoff to them.
    ContractorOptimistic,
    /// Smallest base payoff to the given player.
    AdversarialTo(Player),
    /// Lexicographically greatest profile, comparing A's vector then B's.
    Lexicographic,
}

impl std::fmt::Display for SelectionPolicy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SelectionPolicy::MinerOptimistic => f.write_str("miner-optimistic"),
            SelectionPolicy::ContractorOptimistic => f.write_str("contractor-optimistic"),
            SelectionPolicy::AdversarialTo(p) => write!(f, "adversarial-to-{p}"),
            SelectionPolicy::Lexicographic => f.write_str("lexicographic"),
        }
    }
}

fn selection_key(ctx: &PostContractGame, profile: &StrategyProfile, policy: SelectionPolicy) -> Vec<Scalar> {
    match policy {
        SelectionPolicy::MinerOptimistic => vec![ctx.expected_transfers(profile)],
        SelectionPolicy::ContractorOptimistic => {
            let payers = ctx.payers();
            vec![
                payers.iter().map(|&p| ctx.effective_payoff(profile, p)).sum(),
                payers.iter().map(|&p| ctx.base_payoff(profile, p)).sum(),
            ]
        }
        SelectionPolicy::AdversarialTo(p) => vec![-ctx.base_payoff(profile, p)],
        SelectionPolicy::Lexicographic => Vec::new(),
    }
}

/// Picks one profile of `set` by `policy`; remaining ties go to the
/// lexicographically greatest profile.
pub fn select_equilibrium(
    set: &EquilibriumSet,
    ctx: &PostContractGame,
    policy: SelectionPolicy,
) -> Result<StrategyProfile> {
    set.equilibria
        .iter()
        .map(|p| (selection_key(ctx, p, policy), p))
        .max()
        .map(|(_, p)| p.clone())
        .ok_or(Error::EmptyEquilibriumSet)
}

/// Builds an equilibrium set from an explicit list, e.g. for selection tests.
/// Each profile is checked against `game`.
pub fn equilibrium_set_from(game: &Game, mut profiles: Vec<StrategyProfile>) -> Result<EquilibriumSet> {
    for p in &profiles {
        if !is_nash(game, p)? {
            return Err(Error::NotABestResponse(format!("{p} is not an equilibrium")));
        }
    }
    profiles.sort();
    profiles.dedup();
    Ok(EquilibriumSet {
        equilibria: profiles,
        degenerate: true,
        complete: false,
    })
}

/// The pure strategy for `player` that puts all weight on `action`.
pub fn pure(game: &Game, player: Player, action: usize) -> MixedStrategy {
    MixedStrategy::pure(player, game.actions(player), action)
}
