//! The `analyze`, `bargain` and `oracle` commands.

use anyhow::{Context, Result};
use game_miner::bargaining::{
    self, BargainingOutcome, ContractMenu, DeltaRow, MenuParams, Provenance, StrategyMap, Structure,
};
use game_miner::equilibrium::{enumerate_nash, grid_oracle_nash, grid_tolerance, GridNeighbourhood, GridPoint};
use game_miner::mining::{self, Feasibility};
use game_miner::{
    apply_contract, dominant_strategy, expected_payoff, is_nash, pure_best_responses, Contract, Dominance, Game,
    MixedStrategy, Player, Scalar, StrategyProfile,
};

use crate::gamefile::GameFile;
use crate::report::{Fields, Report, Value};

/// Menu overrides shared by the commands.
#[derive(Debug, Clone, Default)]
pub struct MenuOptions {
    pub epsilon: Option<Scalar>,
    pub steps: Option<u32>,
    pub restrict_to_aggregate_maximizers: bool,
    /// Menus hold only the null contract and the file's contracts.
    pub fixtures_only: bool,
}

impl MenuOptions {
    /// Command-line values first, then the game file, then defaults.
    pub fn params(&self, file: &GameFile) -> MenuParams {
        let defaults = MenuParams::default();
        MenuParams {
            epsilon: self
                .epsilon
                .clone()
                .or_else(|| file.menu.epsilon.clone())
                .unwrap_or(defaults.epsilon),
            steps: self.steps.or(file.menu.steps).unwrap_or(defaults.steps),
            restrict_to_aggregate_maximizers: self.restrict_to_aggregate_maximizers,
            fixtures: file.contracts.iter().map(|c| c.contract.clone()).collect(),
        }
    }

    pub fn menu(&self, file: &GameFile, map: &StrategyMap) -> Result<ContractMenu> {
        let menu = if self.fixtures_only {
            ContractMenu::with_contracts(
                &file.game,
                file.contracts_of(Player::A).cloned(),
                file.contracts_of(Player::B).cloned(),
                Provenance::Fixture,
            )
        } else {
            bargaining::generate_candidate_menu(&file.game, &self.params(file), map)
        };
        menu.context("building the contract menus")
    }
}

fn profile_value(game: &Game, profile: &StrategyProfile) -> Fields {
    let mut f = Fields::new().with("profile", profile.describe(game));
    for p in Player::BOTH {
        f.push(&format!("payoff {p}"), expected_payoff(game, profile, p).expect("shapes match"));
    }
    f
}

fn game_section(game: &Game) -> Fields {
    let names = |p: Player| (0..game.actions(p)).map(|i| game.action_name(p, i)).collect::<Vec<_>>();
    Fields::new()
        .with("rows (A)", game.rows())
        .with("cols (B)", game.cols())
        .with("actions A", names(Player::A))
        .with("actions B", names(Player::B))
        .with("payoff spread", game.spread())
}

fn contract_value(game: &Game, c: &Contract) -> Value {
    let rows: Vec<Value> = (0..game.rows())
        .map(|r| Value::List(c.transfers().row(r).iter().map(Value::from).collect()))
        .collect();
    Fields::new()
        .with("payer", c.payer().to_string())
        .with("transfers", Value::List(rows))
        .into()
}

fn menu_section(menu: &ContractMenu) -> Fields {
    let mut f = Fields::new();
    for p in Player::BOTH {
        let provs: Vec<String> = menu.entries(p).iter().map(|e| e.provenance.to_string()).collect();
        f.push(&format!("{p} contracts"), menu.len(p));
        f.push(&format!("{p} provenance"), provs);
    }
    f
}

/// Equilibria, dominance, aggregate payoffs, feasibility and bounds.
pub fn cmd_analyze(file: &GameFile, options: &MenuOptions) -> Result<Report> {
    let game = &file.game;
    let map = StrategyMap::default();
    let params = options.params(file);
    let mut report = Report::new("analyze");
    let mut checks = Fields::new();
    report.section("game", game_section(game));

    let set = enumerate_nash(game);
    let list: Vec<Value> = set.equilibria().iter().map(|ne| profile_value(game, ne).into()).collect();
    report.section(
        "equilibria",
        Fields::new()
            .with("count", set.len())
            .with("unique", set.unique().is_some())
            .with("degenerate", set.degenerate())
            .with("complete", set.complete())
            .with("list", Value::List(list)),
    );
    let all_nash = set.equilibria().iter().all(|ne| is_nash(game, ne).unwrap_or(false));
    report.check(&mut checks, "equilibria verified", all_nash);

    let mut dominance = Fields::new();
    for p in Player::BOTH {
        let name = |mode| dominant_strategy(game, p, mode).map(|a| game.action_name(p, a));
        dominance.push(
            &format!("{p}"),
            Fields::new()
                .with("strictly dominant", name(Dominance::Strict))
                .with("weakly dominant", name(Dominance::Weak)),
        );
    }
    report.section("dominance", dominance);

    let menu = options.menu(file, &map)?;
    report.section("menu", menu_section(&menu));

    let mut mining_section = Fields::new();
    for p in Player::BOTH {
        let best = mining::maxagg(game, p);
        let contracts: Vec<Contract> = menu.entries(p).iter().map(|e| e.contract.clone()).collect();
        let mm = mining::maxminagg(game, p, &contracts).context("computing maxminagg")?;
        let verdict = mining::mining_feasibility(game, p);
        let feasible = match verdict.feasible {
            Feasibility::Yes => "feasible",
            Feasibility::NoStrictDominance => "infeasible (strict dominance)",
            Feasibility::NoWeakDominanceEveryNe => "infeasible at every equilibrium (weak dominance)",
        };
        let mut f = Fields::new()
            .with("maxagg", &best.value)
            .with("maxagg witness", best.witness.describe(game))
            .with("maxminagg", &mm.lower.value)
            .with("maxminagg contract", menu_index(&menu, p, &mm.lower.contract))
            .with("feasibility", feasible);
        if !verdict.detail.is_empty() {
            f.push("detail", verdict.detail.clone());
        }
        match mining::synthesize_epsilon_contract(game, p, &params.epsilon) {
            Ok(eps) => {
                f.push("epsilon", &params.epsilon);
                f.push("epsilon aggregate", &eps.value);
                f.push("epsilon equilibrium", eps.certificate.describe(game));
            }
            Err(e) => f.push("epsilon contract", format!("not certified: {e}")),
        }
        mining_section.push(&p.to_string(), f);

        let opp = p.other();
        let witness_ok = pure_best_responses(game, opp, best.witness.get(p))
            .map(|br| best.witness.get(opp).support().iter().all(|a| br.contains(a)))
            .unwrap_or(false)
            && expected_payoff(game, &best.witness, p).ok().as_ref() == Some(&best.value);
        report.check(&mut checks, &format!("maxagg witness valid ({p})"), witness_ok);
        let ordered = mm.lower.value <= mm.upper && mm.entries.iter().all(|e| e.value <= best.value);
        report.check(&mut checks, &format!("menu aggregates <= maxagg ({p})"), ordered);
    }
    report.section("mining", mining_section);

    let spe = bargaining::spe_payment_bound(game);
    let terms: Vec<Value> = spe
        .terms
        .iter()
        .map(|t| {
            Fields::new()
                .with("player", t.player.to_string())
                .with("maxagg", &t.maxagg)
                .with("min while best-responding", &t.min_best_responding)
                .with("term", t.value())
                .into()
        })
        .collect();
    report.section(
        "bounds",
        Fields::new()
            .with("one-contract payment bound", &spe.value)
            .with("base game degenerate", spe.degenerate)
            .with("terms", Value::List(terms))
            .with("miner-offer profit bound", bargaining::dual_offer_profit_bound(game, false))
            .with("miner-offer profit bound (U_B term)", bargaining::dual_offer_profit_bound(game, true)),
    );

    let shift = Scalar::one();
    let invariant = Player::BOTH.iter().all(|&p| {
        menu.entries(p).iter().all(|e| shift_invariant(game, &e.contract, &shift))
    });
    report.check(&mut checks, "shift invariance on menu contracts", invariant);
    report.section("checks", checks);
    Ok(report)
}

fn menu_index(menu: &ContractMenu, p: Player, c: &Contract) -> Value {
    match menu.entries(p).iter().position(|e| &e.contract == c) {
        Some(i) => format!("#{i} ({})", menu.entries(p)[i].provenance).into(),
        None => Value::Null,
    }
}

/// Shifting a contract keeps the equilibria and moves the payer's payoff by
/// exactly the shift.
pub fn shift_invariant(game: &Game, contract: &Contract, x: &Scalar) -> bool {
    let (Ok(before), Ok(after)) = (apply_contract(game, contract), apply_contract(game, &contract.shifted(x))) else {
        return false;
    };
    let ne = enumerate_nash(before.effective());
    ne.equilibria() == enumerate_nash(after.effective()).equilibria()
        && ne.equilibria().iter().all(|p| {
            after.effective_payoff(p, contract.payer()) == before.effective_payoff(p, contract.payer()) - x
        })
}

/// Options of the `bargain` command.
#[derive(Debug, Clone)]
pub struct BargainOptions {
    pub structure: Structure,
    /// First mover for the sequential structure; both orders are always
    /// evaluated for the first-mover values.
    pub first: Player,
    pub margin: Scalar,
    pub prop7_statement_term: bool,
    pub menu: MenuOptions,
}

impl Default for BargainOptions {
    fn default() -> Self {
        BargainOptions {
            structure: Structure::OneContract,
            first: Player::A,
            margin: Scalar::ratio(1, 100),
            prop7_statement_term: false,
            menu: MenuOptions::default(),
        }
    }
}

fn outcome_value(game: &Game, o: &BargainingOutcome) -> Fields {
    let mut f = Fields::new()
        .with("structure", o.structure.to_string())
        .with("accepted", o.accepted.to_string())
        .with("final profile", o.final_profile.describe(game))
        .with("payoff A", &o.payoff_a)
        .with("payoff B", &o.payoff_b)
        .with("payoff G", &o.payoff_g);
    if !o.offer_equilibria.is_empty() {
        f.push("offers", format!("A#{} B#{}", o.offers.0, o.offers.1));
        f.push(
            "offer equilibria",
            o.offer_equilibria.iter().map(|(k, l)| format!("A#{k} B#{l}")).collect::<Vec<_>>(),
        );
    }
    f.push("contract A", o.contract_a.as_ref().map_or(Value::Null, |c| contract_value(game, c)));
    f.push("contract B", o.contract_b.as_ref().map_or(Value::Null, |c| contract_value(game, c)));
    f.push("trace", o.trace.clone());
    f
}

fn delta_row(r: &DeltaRow) -> Fields {
    Fields::new()
        .with("best own contract", format!("#{}", r.best_own))
        .with("m(own best)", &r.m_best_own)
        .with("m(opponent best)", &r.m_best_opponent)
        .with("m(null)", &r.m_null)
        .with("m(opponent worst)", &r.m_worst_opponent)
        .with("delta(own)", &r.delta_own)
        .with("delta(own, opponent best)", &r.delta_vs_best)
        .with("delta(own, opponent worst)", &r.delta_vs_worst)
}

/// Runs one bargaining structure and checks it against its bound.
pub fn cmd_bargain(file: &GameFile, options: &BargainOptions) -> Result<Report> {
    let game = &file.game;
    let map = StrategyMap::default();
    let mut report = Report::new("bargain");
    let mut checks = Fields::new();
    report.section("game", game_section(game));
    let menu = options.menu.menu(file, &map)?;
    report.section("menu", menu_section(&menu));

    let mut outcomes = Vec::new();
    match options.structure {
        Structure::OneContract => {
            let table = bargaining::delta_table(game, &menu, &map)?;
            report.section(
                "aggregate payoffs",
                Fields::new()
                    .with("A", delta_row(&table.a))
                    .with("B", delta_row(&table.b))
                    .with(
                        "equilibrium game",
                        match table.equilibrium_game {
                            bargaining::EquilibriumGame::Base => "base".to_string(),
                            bargaining::EquilibriumGame::WithContract(p) => format!("{p}'s contract"),
                        },
                    )
                    .with("predicted payment", &table.predicted_payment),
            );
            let outcome = bargaining::one_contract_equilibrium(game, &menu, &map)?;
            let bound = bargaining::spe_payment_bound(game);
            report.check(&mut checks, "miner payoff <= payment bound", outcome.payoff_g <= bound.value);
            report.section(
                "bound",
                Fields::new()
                    .with("payment bound", &bound.value)
                    .with("base game degenerate", bound.degenerate)
                    .with("compliant", outcome.payoff_g <= bound.value),
            );
            outcomes.push(outcome);
        }
        Structure::BothContracts => {
            let outcome = bargaining::both_contracts_equilibrium(game, &menu, &map)?;
            let cmp = bargaining::compare_restriction(game, &menu, &map)?;
            report.section(
                "restriction",
                Fields::new()
                    .with("miner payoff, one contract", &cmp.restricted)
                    .with("miner payoff, both contracts", &cmp.unrestricted)
                    .with("restriction at least as good", cmp.ok),
            );
            outcomes.push(outcome);
        }
        Structure::Sequential => {
            let first = bargaining::sequential_equilibrium(game, &menu, &map, options.first)?;
            let second = bargaining::sequential_equilibrium(game, &menu, &map, options.first.other())?;
            let (a_first, b_first) = match options.first {
                Player::A => (&first, &second),
                Player::B => (&second, &first),
            };
            report.section(
                "first-mover values",
                Fields::new()
                    .with("A", &a_first.payoff_a - &b_first.payoff_a)
                    .with("B", &b_first.payoff_b - &a_first.payoff_b),
            );
            report.section("other order", outcome_value(game, &second));
            outcomes.push(first);
            outcomes.push(second);
        }
        Structure::MinerOffers => {
            let bound = bargaining::dual_offer_profit_bound(game, options.prop7_statement_term);
            let mut literal = None;
            if let ([a], [b]) = (
                file.contracts_of(Player::A).collect::<Vec<_>>().as_slice(),
                file.contracts_of(Player::B).collect::<Vec<_>>().as_slice(),
            ) {
                let eval = bargaining::evaluate_offers(game, a, b, &map)?;
                literal = Some(eval.miner_profit.clone());
                report.section("offers from file", offer_eval_value(game, &eval));
            }
            let dual = bargaining::synthesize_dual_offer(game, &options.margin, &map)?;
            let mut f = Fields::new().with("margin", &options.margin).with(
                "profit bound",
                &bound,
            );
            f.push(
                "bound third term",
                if options.prop7_statement_term { "B's payoff while A best-responds" } else { "A's payoff while A best-responds" },
            );
            match &dual {
                Some(d) => {
                    f.push("miner profit", &d.miner_profit);
                    f.push(
                        "targets",
                        Fields::new()
                            .with("both", StrategyProfile::pure(game, d.targets.both.0, d.targets.both.1).describe(game))
                            .with("A only", StrategyProfile::pure(game, d.targets.only_a.0, d.targets.only_a.1).describe(game))
                            .with("B only", StrategyProfile::pure(game, d.targets.only_b.0, d.targets.only_b.1).describe(game)),
                    );
                    f.push("offers", offer_eval_value(game, &d.evaluation));
                    f.push("offer A", contract_value(game, &d.offer_a));
                    f.push("offer B", contract_value(game, &d.offer_b));
                    report.check(&mut checks, "miner profit <= profit bound", d.miner_profit <= bound);
                    report.check(&mut checks, "accepting weakly dominant", d.evaluation.accept_dominant());
                    outcomes.push(bargaining::miner_offers_outcome(game, d, &map)?);
                }
                None => f.push("miner profit", "no offer pair found"),
            }
            if let Some(l) = literal {
                f.push("file offers profit", l);
            }
            report.section("miner offers", f);
        }
    }
    for (i, o) in outcomes.iter().enumerate() {
        let name = match (o.structure, i) {
            (Structure::Sequential, _) => {
                let first = if i == 0 { options.first } else { options.first.other() };
                format!("value conserved ({first} first)")
            }
            _ => "value conserved".to_string(),
        };
        report.check(&mut checks, &name, o.conservation_gap(game).is_zero());
    }
    if let Some(o) = outcomes.first() {
        report.section("outcome", outcome_value(game, o));
    }
    report.section("checks", checks);
    Ok(report)
}

fn offer_eval_value(game: &Game, eval: &bargaining::OfferEvaluation) -> Fields {
    let acc = &eval.acceptance;
    let cell = |r: usize, c: usize| format!("{}, {}", acc.payoff(Player::A).get(r, c), acc.payoff(Player::B).get(r, c));
    Fields::new()
        .with("equilibrium, both accept", eval.predicted[0].describe(game))
        .with("equilibrium, A accepts", eval.predicted[1].describe(game))
        .with("equilibrium, B accepts", eval.predicted[2].describe(game))
        .with("equilibrium, neither", eval.predicted[3].describe(game))
        .with(
            "acceptance game",
            vec![
                format!("accept/accept ({})", cell(0, 0)),
                format!("accept/reject ({})", cell(0, 1)),
                format!("reject/accept ({})", cell(1, 0)),
                format!("reject/reject ({})", cell(1, 1)),
            ],
        )
        .with("accepting weakly dominant", eval.accept_dominant())
        .with("miner profit", &eval.miner_profit)
}

/// Grid estimate of a player's largest aggregate payoff: the best payoff over
/// grid strategies of the player and exact pure best replies of the opponent.
pub fn grid_maxagg(game: &Game, player: Player, n: u32) -> Scalar {
    let own = game.actions(player);
    let mut best: Option<Scalar> = None;
    for weights in compositions(n, own) {
        let probs: Vec<Scalar> = weights.iter().map(|&w| Scalar::ratio(w.into(), n.into())).collect();
        let sigma = MixedStrategy::new(player, probs).expect("grid point is a distribution");
        let replies = pure_best_responses(game, player.other(), &sigma).expect("shapes match");
        for b in replies {
            let opp = MixedStrategy::pure(player.other(), game.actions(player.other()), b);
            let profile = match player {
                Player::A => StrategyProfile::new(sigma.clone(), opp),
                Player::B => StrategyProfile::new(opp, sigma.clone()),
            }
            .expect("owners match");
            let v = expected_payoff(game, &profile, player).expect("shapes match");
            if best.as_ref().is_none_or(|x| &v > x) {
                best = Some(v);
            }
        }
    }
    best.expect("at least one grid point")
}

fn compositions(n: u32, parts: usize) -> Vec<Vec<u32>> {
    if parts == 1 {
        return vec![vec![n]];
    }
    (0..=n)
        .flat_map(|first| {
            compositions(n - first, parts - 1).into_iter().map(move |mut rest| {
                rest.insert(0, first);
                rest
            })
        })
        .collect()
}

/// Result of comparing the exact equilibria with the grid oracle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleAgreement {
    pub grid_points: usize,
    /// Exact equilibria with no grid point within one step.
    pub uncovered: usize,
    /// Grid points farther than one step from every exact equilibrium.
    pub stray: usize,
}

pub fn oracle_agreement(game: &Game, n: u32) -> OracleAgreement {
    let grid = grid_oracle_nash(game, n);
    let exact = enumerate_nash(game);
    let hoods: Vec<GridNeighbourhood> = exact.equilibria().iter().map(|ne| GridNeighbourhood::new(ne, n, 1)).collect();
    let near = |p: &GridPoint| hoods.iter().any(|h| h.contains(p));
    OracleAgreement {
        grid_points: grid.len(),
        uncovered: hoods.iter().filter(|h| !grid.iter().any(|p| h.contains(p))).count(),
        stray: grid.iter().filter(|p| !near(p)).count(),
    }
}

/// Grid cross-checks of the exact equilibria and aggregate maxima.
pub fn cmd_oracle(file: &GameFile, n: u32) -> Result<Report> {
    anyhow::ensure!(n >= 1, "grid resolution must be at least 1");
    let game = &file.game;
    let mut report = Report::new("oracle");
    let mut checks = Fields::new();
    report.section("game", game_section(game));
    let tol = grid_tolerance(game, n);
    let grid = grid_oracle_nash(game, n);
    let agreement = oracle_agreement(game, n);
    let shown: Vec<String> = grid.iter().take(20).map(|p| p.to_profile(n).describe(game)).collect();
    report.section(
        "grid equilibria",
        Fields::new()
            .with("resolution", n)
            .with("gain tolerance", &tol)
            .with("points", agreement.grid_points)
            .with("first points", shown)
            .with("exact equilibria without a grid point within 1/n", agreement.uncovered)
            .with("grid points farther than 1/n from every exact equilibrium", agreement.stray),
    );
    report.check(&mut checks, "every exact equilibrium has a nearby grid point", agreement.uncovered == 0);
    let mut maxagg = Fields::new();
    for p in Player::BOTH {
        let exact = mining::maxagg(game, p).value;
        let approx = grid_maxagg(game, p, n);
        let gap = &exact - &approx;
        let within = gap.abs() <= tol;
        maxagg.push(
            &p.to_string(),
            Fields::new()
                .with("exact", &exact)
                .with("grid", &approx)
                .with("difference", &gap)
                .with("within tolerance", within),
        );
        report.check(&mut checks, &format!("grid maxagg <= exact ({p})"), approx <= exact);
    }
    report.section("maxagg", maxagg);
    report.section("checks", checks);
    Ok(report)
}

