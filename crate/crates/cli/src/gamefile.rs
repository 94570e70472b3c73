//! Text format for games, named contracts and menu settings.
//!
//! ```text
//! # comment
//! game 2 2
//! labels A H L          # optional
//! labels B H L          # optional
//! A:
//! 1 2
//! 0 1
//! B:
//! 1/2 0
//! 0 1
//! contract hedge payer=A:
//! 3/2 .49
//! 0 -.5
//! menu epsilon=1/100 steps=6
//! ```

use std::fmt::{self, Write as _};
use std::path::PathBuf;

use game_miner::{Contract, Game, Matrix, Player, Scalar};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NamedContract {
    pub name: String,
    pub contract: Contract,
}

/// Menu settings stored with a game.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MenuSettings {
    pub epsilon: Option<Scalar>,
    pub steps: Option<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GameFile {
    pub path: Option<PathBuf>,
    pub game: Game,
    pub contracts: Vec<NamedContract>,
    pub menu: MenuSettings,
}

impl GameFile {
    pub fn new(game: Game) -> GameFile {
        GameFile {
            path: None,
            game,
            contracts: Vec::new(),
            menu: MenuSettings::default(),
        }
    }

    pub fn contracts_of(&self, payer: Player) -> impl Iterator<Item = &Contract> {
        self.contracts.iter().map(|c| &c.contract).filter(move |c| c.payer() == payer)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    /// 1-based; 0 when the error concerns the whole file.
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.line == 0 {
            write!(f, "{}", self.message)
        } else {
            write!(f, "line {}, column {}: {}", self.line, self.column, self.message)
        }
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug, Clone, Copy)]
struct Token<'a> {
    text: &'a str,
    column: usize,
}

struct Line<'a> {
    number: usize,
    tokens: Vec<Token<'a>>,
}

impl Line<'_> {
    fn error(&self, column: usize, message: impl Into<String>) -> ParseError {
        ParseError {
            line: self.number,
            column,
            message: message.into(),
        }
    }

    fn first_column(&self) -> usize {
        self.tokens.first().map_or(1, |t| t.column)
    }
}

fn tokenize(text: &str) -> Vec<Line<'_>> {
    text.lines()
        .enumerate()
        .filter_map(|(i, raw)| {
            let body = raw.split('#').next().unwrap_or("");
            let mut tokens = Vec::new();
            let mut start = None;
            for (pos, ch) in body.char_indices().chain(std::iter::once((body.len(), ' '))) {
                match (ch.is_whitespace(), start) {
                    (false, None) => start = Some(pos),
                    (true, Some(s)) => {
                        tokens.push(Token {
                            text: &body[s..pos],
                            column: body[..s].chars().count() + 1,
                        });
                        start = None;
                    }
                    _ => {}
                }
            }
            (!tokens.is_empty()).then_some(Line { number: i + 1, tokens })
        })
        .collect()
}

fn scalar(line: &Line<'_>, tok: Token<'_>) -> Result<Scalar, ParseError> {
    tok.text
        .parse()
        .map_err(|_| line.error(tok.column, format!("expected a number (integer, p/q or decimal), found `{}`", tok.text)))
}

fn count(line: &Line<'_>, tok: Option<&Token<'_>>, what: &str) -> Result<usize, ParseError> {
    let tok = tok.ok_or_else(|| line.error(line.first_column(), format!("missing {what}")))?;
    match tok.text.parse::<usize>() {
        Ok(n) if n > 0 => Ok(n),
        _ => Err(line.error(tok.column, format!("{what} must be a positive integer, found `{}`", tok.text))),
    }
}

fn player(line: &Line<'_>, tok: Token<'_>) -> Result<Player, ParseError> {
    match tok.text {
        "A" => Ok(Player::A),
        "B" => Ok(Player::B),
        other => Err(line.error(tok.column, format!("expected player A or B, found `{other}`"))),
    }
}

struct Parser<'a> {
    lines: Vec<Line<'a>>,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn matrix(&mut self, what: &str, header: usize, rows: usize, cols: usize) -> Result<Matrix, ParseError> {
        let mut out = Vec::with_capacity(rows);
        for r in 0..rows {
            let Some(line) = self.lines.get(self.pos) else {
                return Err(ParseError {
                    line: header,
                    column: 1,
                    message: format!("{what}: file ends after {r} of {rows} rows"),
                });
            };
            if line.tokens.len() != cols {
                return Err(line.error(
                    line.first_column(),
                    format!("{what}: row {} has {} entries, expected {cols}", r + 1, line.tokens.len()),
                ));
            }
            out.push(line.tokens.iter().map(|t| scalar(line, *t)).collect::<Result<Vec<_>, _>>()?);
            self.pos += 1;
        }
        Ok(Matrix::from_rows(out).expect("shape checked"))
    }
}

pub fn parse_game_file(text: &str) -> Result<GameFile, ParseError> {
    let mut p = Parser {
        lines: tokenize(text),
        pos: 0,
    };
    let Some(head) = p.lines.first() else {
        return Err(ParseError {
            line: 0,
            column: 0,
            message: "empty game file: expected `game <rows> <cols>`".into(),
        });
    };
    if head.tokens[0].text != "game" {
        return Err(head.error(head.tokens[0].column, "expected header `game <rows> <cols>`"));
    }
    let rows = count(head, head.tokens.get(1), "row count")?;
    let cols = count(head, head.tokens.get(2), "column count")?;
    if let Some(extra) = head.tokens.get(3) {
        return Err(head.error(extra.column, "unexpected text after the header"));
    }
    p.pos = 1;

    let mut payoffs: [Option<Matrix>; 2] = [None, None];
    let mut labels: [Option<Vec<String>>; 2] = [None, None];
    let mut contracts = Vec::new();
    let mut menu = MenuSettings::default();
    while p.pos < p.lines.len() {
        let line = &p.lines[p.pos];
        let number = line.number;
        let first = line.tokens[0];
        match first.text {
            "A:" | "B:" => {
                if line.tokens.len() > 1 {
                    return Err(line.error(line.tokens[1].column, "payoff rows start on the next line"));
                }
                let who = if first.text == "A:" { Player::A } else { Player::B };
                let slot = who as usize;
                if payoffs[slot].is_some() {
                    return Err(line.error(first.column, format!("payoffs for {who} given twice")));
                }
                p.pos += 1;
                payoffs[slot] = Some(p.matrix(&format!("payoffs of {who}"), number, rows, cols)?);
            }
            "labels" => {
                let who = player(
                    line,
                    *line.tokens.get(1).ok_or_else(|| line.error(first.column, "expected `labels A|B <names>`"))?,
                )?;
                let names: Vec<String> = line.tokens[2..].iter().map(|t| t.text.to_string()).collect();
                let expected = if who == Player::A { rows } else { cols };
                if names.len() != expected {
                    return Err(line.error(
                        first.column,
                        format!("{who} has {expected} actions but {} labels were given", names.len()),
                    ));
                }
                labels[who as usize] = Some(names);
                p.pos += 1;
            }
            "contract" => {
                let name = line
                    .tokens
                    .get(1)
                    .ok_or_else(|| line.error(first.column, "expected `contract <name> payer=<A|B>:`"))?
                    .text
                    .to_string();
                let payer_tok = *line
                    .tokens
                    .get(2)
                    .ok_or_else(|| line.error(first.column, "contract is missing `payer=<A|B>:`"))?;
                let payer_text = payer_tok
                    .text
                    .strip_prefix("payer=")
                    .and_then(|s| s.strip_suffix(':'))
                    .ok_or_else(|| line.error(payer_tok.column, "expected `payer=<A|B>:`"))?;
                let payer = player(
                    line,
                    Token {
                        text: payer_text,
                        column: payer_tok.column + 6,
                    },
                )?;
                if let Some(extra) = line.tokens.get(3) {
                    return Err(line.error(extra.column, "unexpected text after the contract header"));
                }
                if contracts.iter().any(|c: &NamedContract| c.name == name) {
                    return Err(line.error(line.tokens[1].column, format!("contract `{name}` defined twice")));
                }
                p.pos += 1;
                let m = p.matrix(&format!("contract {name}"), number, rows, cols)?;
                contracts.push(NamedContract {
                    name,
                    contract: Contract::new(payer, m),
                });
            }
            "menu" => {
                for tok in &line.tokens[1..] {
                    let (key, value) = tok
                        .text
                        .split_once('=')
                        .ok_or_else(|| line.error(tok.column, "expected `key=value`"))?;
                    let vcol = tok.column + key.len() + 1;
                    let value_tok = Token { text: value, column: vcol };
                    match key {
                        "epsilon" => {
                            let eps = scalar(line, value_tok)?;
                            if !eps.is_positive() {
                                return Err(line.error(vcol, "epsilon must be positive"));
                            }
                            menu.epsilon = Some(eps);
                        }
                        "steps" => {
                            menu.steps = Some(
                                value
                                    .parse()
                                    .map_err(|_| line.error(vcol, format!("steps must be a non-negative integer, found `{value}`")))?,
                            );
                        }
                        other => return Err(line.error(tok.column, format!("unknown menu setting `{other}`"))),
                    }
                }
                p.pos += 1;
            }
            other => {
                return Err(line.error(
                    first.column,
                    format!("unexpected `{other}`: expected `A:`, `B:`, `labels`, `contract` or `menu`"),
                ))
            }
        }
    }
    let [Some(a), Some(b)] = payoffs else {
        let missing = if payoffs[0].is_none() { "A" } else { "B" };
        return Err(ParseError {
            line: 0,
            column: 0,
            message: format!("missing payoff block `{missing}:`"),
        });
    };
    let mut game = Game::new(a, b).expect("shapes checked");
    if labels.iter().any(Option::is_some) {
        let [ra, rb] = labels;
        let rows_l = ra.unwrap_or_else(|| (0..rows).map(|i| game.action_name(Player::A, i)).collect());
        let cols_l = rb.unwrap_or_else(|| (0..cols).map(|i| game.action_name(Player::B, i)).collect());
        game = game.with_labels(rows_l, cols_l).expect("label counts checked");
    }
    Ok(GameFile {
        path: None,
        game,
        contracts,
        menu,
    })
}

fn write_matrix(out: &mut String, m: &Matrix) {
    for r in 0..m.rows() {
        let row: Vec<String> = m.row(r).iter().map(Scalar::to_string).collect();
        let _ = writeln!(out, "{}", row.join(" "));
    }
}

/// Canonical text form; parsing it yields the same data.
pub fn serialize_game_file(file: &GameFile) -> String {
    let g = &file.game;
    let mut out = String::new();
    let _ = writeln!(out, "game {} {}", g.rows(), g.cols());
    if let Some(l) = g.labels() {
        let _ = writeln!(out, "labels A {}", l.rows.join(" "));
        let _ = writeln!(out, "labels B {}", l.cols.join(" "));
    }
    for p in Player::BOTH {
        let _ = writeln!(out, "{p}:");
        write_matrix(&mut out, g.payoff(p));
    }
    for c in &file.contracts {
        let _ = writeln!(out, "contract {} payer={}:", c.name, c.contract.payer());
        write_matrix(&mut out, c.contract.transfers());
    }
    if file.menu != MenuSettings::default() {
        out.push_str("menu");
        if let Some(e) = &file.menu.epsilon {
            let _ = write!(out, " epsilon={e}");
        }
        if let Some(s) = file.menu.steps {
            let _ = write!(out, " steps={s}");
        }
        out.push('\n');
    }
    out
}
