//! Command-line front end: game files, reports and the `analyze`, `bargain`
//! and `oracle` commands.

pub mod commands;
pub mod gamefile;
pub mod report;

use std::path::PathBuf;

use anyhow::Result;
use clap::{Args, Parser, Subcommand, ValueEnum};
use game_miner::bargaining::Structure;
use game_miner::{Player, Scalar};

pub use commands::{cmd_analyze, cmd_bargain, cmd_oracle, BargainOptions, MenuOptions};
pub use gamefile::{parse_game_file, serialize_game_file, GameFile, ParseError};
pub use report::Report;

/// Exit status for malformed input files.
pub const EXIT_PARSE: u8 = 2;
/// Exit status when an internal consistency check fails.
pub const EXIT_INVARIANT: u8 = 3;

#[derive(Debug, Parser)]
#[command(name = "game-miner", version, about = "Exact analysis of outcome-contingent contracts in bimatrix games")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Equilibria, dominance, aggregate payoffs, mining feasibility and bounds.
    Analyze {
        file: PathBuf,
        #[arg(long)]
        json: bool,
        #[command(flatten)]
        menu: MenuArgs,
    },
    /// Equilibrium of one bargaining structure over generated menus.
    Bargain {
        file: PathBuf,
        #[arg(long, value_enum)]
        structure: StructureArg,
        /// First mover in the sequential structure.
        #[arg(long, value_enum, default_value = "A")]
        first: PlayerArg,
        /// Strictness margin for miner offers.
        #[arg(long, default_value = "1/100", value_parser = parse_positive)]
        margin: Scalar,
        /// Only aggregate-maximizing contracts and their shifts in the menus.
        #[arg(long)]
        restrict_to_aggregate_maximizers: bool,
        /// Use B's payoff in the third term of the miner-offer profit bound.
        #[arg(long)]
        prop7_statement_term: bool,
        #[arg(long)]
        json: bool,
        #[command(flatten)]
        menu: MenuArgs,
    },
    /// Grid cross-checks of equilibria and aggregate maxima.
    Oracle {
        file: PathBuf,
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        grid: u32,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Debug, Args, Clone, Default)]
pub struct MenuArgs {
    /// Epsilon for menu epsilon contracts, as p/q or a decimal.
    #[arg(long, value_parser = parse_positive)]
    pub menu_epsilon: Option<Scalar>,
    /// Payment levels between zero and the payment bound.
    #[arg(long)]
    pub menu_steps: Option<u32>,
    /// Menus hold only the null contract and the file's contracts.
    #[arg(long)]
    pub fixture_menus: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StructureArg {
    One,
    Both,
    Sequential,
    MinerOffers,
}

impl From<StructureArg> for Structure {
    fn from(s: StructureArg) -> Self {
        match s {
            StructureArg::One => Structure::OneContract,
            StructureArg::Both => Structure::BothContracts,
            StructureArg::Sequential => Structure::Sequential,
            StructureArg::MinerOffers => Structure::MinerOffers,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PlayerArg {
    #[value(name = "A")]
    A,
    #[value(name = "B")]
    B,
}

impl From<PlayerArg> for Player {
    fn from(p: PlayerArg) -> Self {
        match p {
            PlayerArg::A => Player::A,
            PlayerArg::B => Player::B,
        }
    }
}

fn parse_positive(text: &str) -> Result<Scalar, String> {
    let v: Scalar = text.parse().map_err(|e| format!("{e}"))?;
    if v.is_positive() {
        Ok(v)
    } else {
        Err("must be positive".into())
    }
}

/// Rendered output and exit status of a successful run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Output {
    pub text: String,
    pub code: u8,
}

fn menu_options(args: &MenuArgs, restrict: bool) -> MenuOptions {
    MenuOptions {
        epsilon: args.menu_epsilon.clone(),
        steps: args.menu_steps,
        restrict_to_aggregate_maximizers: restrict,
        fixtures_only: args.fixture_menus,
    }
}

pub fn load(path: &PathBuf) -> Result<GameFile> {
    let text = std::fs::read_to_string(path).map_err(|e| anyhow::anyhow!("reading {}: {e}", path.display()))?;
    let mut file = parse_game_file(&text).map_err(|e| anyhow::Error::new(e).context(path.display().to_string()))?;
    file.path = Some(path.clone());
    Ok(file)
}

pub fn run(cli: &Cli) -> Result<Output> {
    let (report, json) = match &cli.command {
        Command::Analyze { file, json, menu } => (cmd_analyze(&load(file)?, &menu_options(menu, false))?, *json),
        Command::Bargain {
            file,
            structure,
            first,
            margin,
            restrict_to_aggregate_maximizers,
            prop7_statement_term,
            json,
            menu,
        } => {
            let options = BargainOptions {
                structure: (*structure).into(),
                first: (*first).into(),
                margin: margin.clone(),
                prop7_statement_term: *prop7_statement_term,
                menu: menu_options(menu, *restrict_to_aggregate_maximizers),
            };
            (cmd_bargain(&load(file)?, &options)?, *json)
        }
        Command::Oracle { file, grid, json } => (cmd_oracle(&load(file)?, *grid)?, *json),
    };
    Ok(Output {
        text: if json { report.render_json() } else { report.render_human() },
        code: if report.violations.is_empty() { 0 } else { EXIT_INVARIANT },
    })
}

/// Exit status for an error returned by [`run`].
pub fn exit_code(error: &anyhow::Error) -> u8 {
    if error.chain().any(|e| e.is::<ParseError>()) {
        EXIT_PARSE
    } else if error
        .chain()
        .any(|e| matches!(e.downcast_ref::<game_miner::Error>(), Some(game_miner::Error::Invariant(_))))
    {
        EXIT_INVARIANT
    } else {
        1
    }
}

/// Caps the global thread pool at `GAME_MINER_THREADS` when set.
pub fn configure_threads() -> Result<()> {
    if let Ok(v) = std::env::var("GAME_MINER_THREADS") {
        let n: usize = v
            .parse()
            .map_err(|_| anyhow::anyhow!("GAME_MINER_THREADS must be a positive integer, found `{v}`"))?;
        anyhow::ensure!(n > 0, "GAME_MINER_THREADS must be a positive integer");
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    Ok(())
}
