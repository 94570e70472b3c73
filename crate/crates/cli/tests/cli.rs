use std::path::{Path, PathBuf};
use std::process::Command;

use game_miner::bargaining::Structure;
use game_miner::equilibrium::{enumerate_nash, grid_oracle_nash};
use game_miner::{q, Contract, Game, Matrix, Player, Scalar, StrategyProfile};
use game_miner_cli::gamefile::{MenuSettings, NamedContract};
use game_miner_cli::report::Value;
use game_miner_cli::{
    cmd_analyze, cmd_bargain, cmd_oracle, exit_code, parse_game_file, serialize_game_file, BargainOptions, GameFile,
    MenuOptions, EXIT_INVARIANT, EXIT_PARSE,
};
use proptest::prelude::*;

fn fixture_path(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn fixture(name: &str) -> GameFile {
    parse_game_file(&std::fs::read_to_string(fixture_path(name)).unwrap()).unwrap()
}

fn at<'a>(v: &'a Value, path: &[&str]) -> &'a Value {
    path.iter()
        .fold(v, |v, k| v.get(k).unwrap_or_else(|| panic!("missing key {k} in {path:?}")))
}

fn binary() -> Command {
    Command::new(env!("CARGO_BIN_EXE_game-miner"))
}

// Game files

fn scalar() -> impl Strategy<Value = Scalar> {
    (-60i64..=60, 1i64..=12).prop_map(|(n, d)| Scalar::ratio(n, d))
}

fn matrix(rows: usize, cols: usize) -> impl Strategy<Value = Matrix> {
    prop::collection::vec(prop::collection::vec(scalar(), cols), rows).prop_map(|m| Matrix::from_rows(m).unwrap())
}

fn game_file() -> impl Strategy<Value = GameFile> {
    (1usize..=4, 1usize..=4)
        .prop_flat_map(|(r, c)| {
            (
                matrix(r, c),
                matrix(r, c),
                any::<bool>(),
                prop::collection::vec((any::<bool>(), matrix(r, c)), 0..3),
                prop::option::of(scalar().prop_map(|s| s.abs() + Scalar::ratio(1, 7))),
                prop::option::of(1u32..20),
            )
        })
        .prop_map(|(a, b, labelled, contracts, epsilon, steps)| {
            let (r, c) = (a.rows(), a.cols());
            let mut game = Game::new(a, b).unwrap();
            if labelled {
                game = game
                    .with_labels((0..r).map(|i| format!("r{i}")).collect(), (0..c).map(|j| format!("c{j}")).collect())
                    .unwrap();
            }
            let mut file = GameFile::new(game);
            file.contracts = contracts
                .into_iter()
                .enumerate()
                .map(|(i, (for_a, t))| NamedContract {
                    name: format!("k{i}"),
                    contract: Contract::new(if for_a { Player::A } else { Player::B }, t),
                })
                .collect();
            file.menu = MenuSettings { epsilon, steps };
            file
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn serialize_then_parse_is_identity(file in game_file()) {
        let text = serialize_game_file(&file);
        let back = parse_game_file(&text).map_err(|e| TestCaseError::fail(format!("{e}\n{text}")))?;
        prop_assert_eq!(back, file);
    }
}

#[test]
fn fixture_payoffs_are_exact() {
    let f = fixture("cell_phone.game");
    let b = f.game.payoff(Player::B);
    assert_eq!(b, &Matrix::parse(&[&["1/2", "0"], &["0", "1"]]));
    let upfront = fixture("cell_phone_upfront.game");
    let t = upfront.contracts[0].contract.transfers();
    assert_eq!(t.get(0, 0), &q("3/2"));
    assert_eq!(t.get(0, 1), &q("49/100"));
}

#[test]
fn fraction_entries_stay_exact() {
    let f = parse_game_file("game 1 2\nA:\n3/2 -7/3\nB:\n0.125 4\n").unwrap();
    assert_eq!(f.game.payoff(Player::A).get(0, 0), &q("3/2"));
    assert_eq!(f.game.payoff(Player::A).get(0, 1), &q("-7/3"));
    assert_eq!(f.game.payoff(Player::B).get(0, 0), &q("1/8"));
}

#[test]
fn short_row_names_the_row() {
    let err = parse_game_file("game 2 2\nA:\n1 2\n0\nB:\n1 0\n0 1\n").unwrap_err();
    assert_eq!(err.line, 4);
    assert!(err.message.contains("row 2"), "{err}");
}

#[test]
fn missing_matrix_is_reported() {
    let err = parse_game_file("game 2 2\nA:\n1 2\n0 1\n").unwrap_err();
    assert!(err.to_string().contains('B'), "{err}");
}

// Commands

#[test]
fn analyze_cell_phone() {
    let f = fixture("cell_phone.game");
    let r = cmd_analyze(&f, &MenuOptions::default()).unwrap();
    assert!(r.violations.is_empty(), "{:?}", r.violations);
    let eq = r.get("equilibria").unwrap();
    assert_eq!(at(eq, &["unique"]).as_bool(), Some(true));
    let mining = r.get("mining").unwrap();
    assert_eq!(at(mining, &["A", "maxagg"]).as_num(), Some(&q("5/3")));
    assert_eq!(at(mining, &["A", "epsilon aggregate"]).as_num(), Some(&q("28/17")));
    let bounds = r.get("bounds").unwrap();
    assert_eq!(at(bounds, &["one-contract payment bound"]).as_num(), Some(&q("2/3")));
}

#[test]
fn analyze_reports_dominance_blocker() {
    let r = cmd_analyze(&fixture("sequential.game"), &MenuOptions::default()).unwrap();
    let detail = at(r.get("mining").unwrap(), &["A", "detail"]).as_text().unwrap();
    assert_eq!(detail, "B strictly dominant: x; single-contract mining infeasible for A");
}

#[test]
fn one_by_one_game_is_trivial() {
    let f = parse_game_file("game 1 1\nA:\n4\nB:\n-2\n").unwrap();
    let r = cmd_analyze(&f, &MenuOptions::default()).unwrap();
    assert!(r.violations.is_empty(), "{:?}", r.violations);
    assert_eq!(at(r.get("equilibria").unwrap(), &["count"]), &Value::Int(1));
    assert_eq!(at(r.get("bounds").unwrap(), &["one-contract payment bound"]).as_num(), Some(&q("0")));
    for s in [Structure::OneContract, Structure::BothContracts, Structure::Sequential, Structure::MinerOffers] {
        let options = BargainOptions {
            structure: s,
            ..BargainOptions::default()
        };
        let r = cmd_bargain(&f, &options).unwrap();
        assert!(r.violations.is_empty(), "{s}: {:?}", r.violations);
    }
}

#[test]
fn one_contract_auction_on_flow() {
    let options = BargainOptions {
        menu: MenuOptions {
            restrict_to_aggregate_maximizers: true,
            ..MenuOptions::default()
        },
        ..BargainOptions::default()
    };
    let r = cmd_bargain(&fixture("flow.game"), &options).unwrap();
    assert!(r.violations.is_empty(), "{:?}", r.violations);
    let out = r.get("outcome").unwrap();
    assert_eq!(at(out, &["payoff G"]).as_num(), Some(&q("3")));
    assert_eq!(at(out, &["payoff A"]).as_num(), Some(&q("-1")));
    assert_eq!(at(out, &["payoff B"]).as_num(), Some(&q("-1")));
    assert_eq!(at(r.get("bound").unwrap(), &["payment bound"]).as_num(), Some(&q("3")));
}

#[test]
fn sequential_with_null_menus_is_the_base_game() {
    let f = fixture("flow.game");
    assert!(f.contracts.is_empty());
    let base = enumerate_nash(&f.game);
    let options = BargainOptions {
        structure: Structure::Sequential,
        menu: MenuOptions {
            fixtures_only: true,
            ..MenuOptions::default()
        },
        ..BargainOptions::default()
    };
    let r = cmd_bargain(&f, &options).unwrap();
    let out = r.get("outcome").unwrap();
    assert_eq!(at(out, &["payoff G"]).as_num(), Some(&q("0")));
    let shown = at(out, &["final profile"]).as_text().unwrap();
    assert!(base.equilibria().iter().any(|ne| ne.describe(&f.game) == shown), "{shown}");
}

#[test]
fn miner_offers_reach_the_narrated_profit() {
    let options = BargainOptions {
        structure: Structure::MinerOffers,
        ..BargainOptions::default()
    };
    let r = cmd_bargain(&fixture("miner_offers.game"), &options).unwrap();
    assert!(r.violations.is_empty(), "{:?}", r.violations);
    let offers = r.get("miner offers").unwrap();
    assert_eq!(at(offers, &["profit bound"]).as_num(), Some(&q("6")));
    let profit = at(offers, &["miner profit"]).as_num().unwrap();
    assert!(profit >= &q("5.98"), "{profit}");
}

#[test]
fn oracle_agrees_on_cell_phone() {
    let r = cmd_oracle(&fixture("cell_phone.game"), 60).unwrap();
    assert!(r.violations.is_empty(), "{:?}", r.violations);
    let m = r.get("maxagg").unwrap();
    assert_eq!(at(m, &["A", "within tolerance"]).as_bool(), Some(true));
}

#[test]
fn oracle_with_one_step_grid() {
    let r = cmd_oracle(&fixture("cell_phone.game"), 1).unwrap();
    assert!(r.violations.is_empty(), "{:?}", r.violations);
    assert!(cmd_oracle(&fixture("cell_phone.game"), 0).is_err());
}

#[test]
fn flow_grid_has_a_point_near_y_y() {
    let g = fixture("flow.game").game;
    let yy = StrategyProfile::pure(&g, 1, 1);
    let near = grid_oracle_nash(&g, 60).iter().any(|p| p.distance(60, &yy) <= q("1/60"));
    assert!(near);
}

// Binary

#[test]
fn json_output_is_deterministic() {
    let run = |threads: Option<&str>| {
        let mut cmd = binary();
        cmd.args(["bargain", "--structure", "one", "--json"]).arg(fixture_path("flow.game"));
        if let Some(t) = threads {
            cmd.env("GAME_MINER_THREADS", t);
        }
        let out = cmd.output().unwrap();
        assert!(out.status.success());
        out.stdout
    };
    let first = run(None);
    assert_eq!(first, run(None));
    assert_eq!(first, run(Some("1")));
    let v: serde_json::Value = serde_json::from_slice(&first).unwrap();
    assert_eq!(v["command"], "bargain");
}

#[test]
fn exit_codes() {
    let ok = binary().arg("analyze").arg(fixture_path("cell_phone.game")).output().unwrap();
    assert_eq!(ok.status.code(), Some(0));

    let bad = std::env::temp_dir().join(format!("game-miner-bad-{}.game", std::process::id()));
    std::fs::write(&bad, "game 2 2\nA:\n1 2\n0\n").unwrap();
    let out = binary().arg("analyze").arg(&bad).output().unwrap();
    std::fs::remove_file(&bad).ok();
    assert_eq!(out.status.code(), Some(EXIT_PARSE.into()));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 4"));

    let missing = binary().args(["analyze", "/nonexistent/x.game"]).output().unwrap();
    assert_eq!(missing.status.code(), Some(1));
}

#[test]
fn invariant_errors_map_to_their_exit_code() {
    let e = anyhow::Error::new(game_miner::Error::Invariant("broken".into())).context("while checking");
    assert_eq!(exit_code(&e), EXIT_INVARIANT);
    assert_eq!(exit_code(&anyhow::anyhow!("other")), 1);
}
