use crate::game::Player;

/// Which axis of a payoff matrix or strategy a dimension error refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    /// Row player's actions.
    Rows,
    /// Column player's actions.
    Cols,
}

impl std::fmt::Display for Axis {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Axis::Rows => f.write_str("rows (player A actions)"),
            Axis::Cols => f.write_str("columns (player B actions)"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("{what}: dimension mismatch on {axis}: expected {expected}, found {found}")]
    DimensionMismatch {
        what: &'static str,
        axis: Axis,
        expected: usize,
        found: usize,
    },

    #[error("matrix row {row} has {found} entries, expected {expected}")]
    RaggedMatrix {
        row: usize,
        expected: usize,
        found: usize,
    },

    #[error("a game needs at least one action per player")]
    EmptyGame,

    #[error("invalid mixed strategy: {0}")]
    InvalidStrategy(String),

    #[error("strategy belongs to player {found}, expected player {expected}")]
    WrongOwner { expected: Player, found: Player },

    #[error("contract payer is {found}, expected {expected}")]
    WrongPayer { expected: Player, found: Player },

    #[error("both contracts have payer {0}")]
    DuplicatePayer(Player),

    #[error("empty equilibrium set")]
    EmptyEquilibriumSet,

    #[error("best-response hypothesis violated: {0}")]
    NotABestResponse(String),

    #[error("epsilon must be strictly positive")]
    NonPositiveEpsilon,

    #[error("uniqueness could not be certified: {0}")]
    UniquenessNotCertified(String),

    #[error("no pure-strategy equilibrium of the offer game over the menu")]
    NoPureOfferEquilibrium(Box<crate::bargaining::OfferMatrix>),

    #[error("invariant violated: {0}")]
    Invariant(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
