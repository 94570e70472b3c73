//! Exact analysis of two-player games for game-mining opportunities: Nash
//! equilibria, outcome-contingent contracts between a player and an outside
//! miner, and the bargaining structures that arise between them.
//!
//! All arithmetic is exact over the rationals; see [`Scalar`].

pub mod bargaining;
pub mod equilibrium;
pub mod error;
pub mod fixtures;
pub mod game;
pub mod linalg;
pub mod lp;
pub mod mining;
pub mod scalar;

pub use error::{Axis, Error, Result};
pub use game::{
    apply_contract, apply_two, dominant_actions, dominant_strategy, expected_payoff,
    is_best_response, is_nash, no_contract, payoff_bounds, pure_best_responses, Contract,
    Dominance, Game, Matrix, MixedStrategy, Player, PostContractGame, StrategyProfile,
};
pub use lp::{solve_lp, Bounds, LinearProgram, LpOutcome, Relation, Sense};
pub use scalar::{q, Scalar};
