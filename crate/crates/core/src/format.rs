//! JSON file formats for games, matrices, and strategies.
//!
//! Rationals travel as `"p/q"` strings (`"3"` allowed for integers). Game
//! files are 1-indexed (`"s1"`, action pairs `"2,1"`) to match the usual
//! s₁, s₂ naming; everything becomes 0-indexed once parsed. The controller is
//! always detected from the transition table, never read from the file.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::linalg::Matrix;
use crate::model::{ModelError, Player, StationaryStrategy, StochasticGame};
use crate::rational::{format_rational, parse_rational, Rational};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("JSON syntax error at line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("invalid file: {0}")]
    Invalid(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

fn json_error(err: serde_json::Error) -> ParseError {
    if err.is_syntax() || err.is_eof() {
        ParseError::Syntax {
            line: err.line(),
            column: err.column(),
            message: err.to_string(),
        }
    } else {
        ParseError::Invalid(err.to_string())
    }
}

fn rational_at(text: &str, context: &str) -> Result<Rational, ParseError> {
    parse_rational(text).map_err(|e| ParseError::Invalid(format!("{context}: {e}")))
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GameFile {
    states: usize,
    actions_p1: Vec<usize>,
    actions_p2: Vec<usize>,
    payoff: BTreeMap<String, Vec<Vec<String>>>,
    transitions: BTreeMap<String, BTreeMap<String, Vec<String>>>,
}

fn state_key(s: usize) -> String {
    format!("s{}", s + 1)
}

fn pair_key(i: usize, j: usize) -> String {
    format!("{},{}", i + 1, j + 1)
}

/// Parses and validates a game file.
pub fn parse_game(text: &str) -> Result<StochasticGame, ParseError> {
    let file: GameFile = serde_json::from_str(text).map_err(json_error)?;
    let k = file.states;
    if k == 0 {
        return Err(ParseError::Invalid("states must be at least 1".into()));
    }
    for (name, counts) in [("actions_p1", &file.actions_p1), ("actions_p2", &file.actions_p2)] {
        if counts.len() != k {
            return Err(ParseError::Invalid(format!(
                "{name} has {} entries, expected {k}",
                counts.len()
            )));
        }
        if let Some(s) = counts.iter().position(|&m| m == 0) {
            return Err(ParseError::Invalid(format!(
                "{name} for state {} must be at least 1",
                state_key(s)
            )));
        }
    }
    for key in file.payoff.keys() {
        if !(0..k).any(|s| state_key(s) == *key) {
            return Err(ParseError::Invalid(format!("unexpected payoff key `{key}`")));
        }
    }
    for key in file.transitions.keys() {
        if !(0..k).any(|s| state_key(s) == *key) {
            return Err(ParseError::Invalid(format!("unexpected transitions key `{key}`")));
        }
    }

    let mut payoff = Vec::with_capacity(k);
    let mut transition = Vec::with_capacity(k);
    for s in 0..k {
        let key = state_key(s);
        let m1 = file.actions_p1[s];
        let m2 = file.actions_p2[s];
        let rows = file
            .payoff
            .get(&key)
            .ok_or_else(|| ParseError::Invalid(format!("missing payoff for state {key}")))?;
        if rows.len() != m1 || rows.iter().any(|r| r.len() != m2) {
            return Err(ParseError::Invalid(format!(
                "payoff for state {key} must be {m1}x{m2}"
            )));
        }
        let mut matrix = Vec::with_capacity(m1);
        for (i, row) in rows.iter().enumerate() {
            let mut out = Vec::with_capacity(m2);
            for (j, cell) in row.iter().enumerate() {
                out.push(rational_at(cell, &format!("payoff {key}[{}][{}]", i + 1, j + 1))?);
            }
            matrix.push(out);
        }
        payoff.push(matrix);

        let table = file
            .transitions
            .get(&key)
            .ok_or_else(|| ParseError::Invalid(format!("missing transitions for state {key}")))?;
        for pair in table.keys() {
            let known = (0..m1).any(|i| (0..m2).any(|j| pair_key(i, j) == *pair));
            if !known {
                return Err(ParseError::Invalid(format!(
                    "unexpected action pair `{pair}` in transitions for state {key}"
                )));
            }
        }
        let mut per_state = Vec::with_capacity(m1);
        for i in 0..m1 {
            let mut per_i = Vec::with_capacity(m2);
            for j in 0..m2 {
                let pair = pair_key(i, j);
                let cells = table.get(&pair).ok_or_else(|| {
                    ParseError::Invalid(format!(
                        "missing transition row `{pair}` for state {key}"
                    ))
                })?;
                let mut q = Vec::with_capacity(cells.len());
                for (dest, cell) in cells.iter().enumerate() {
                    q.push(rational_at(
                        cell,
                        &format!("transitions {key}[{pair}] -> {}", state_key(dest)),
                    )?);
                }
                per_i.push(q);
            }
            per_state.push(per_i);
        }
        transition.push(per_state);
    }
    Ok(StochasticGame::new(payoff, transition)?)
}

/// Canonical serialization; `parse_game` of the output reproduces the game.
pub fn serialize_game(game: &StochasticGame) -> String {
    let k = game.state_count();
    let mut payoff = BTreeMap::new();
    let mut transitions = BTreeMap::new();
    for s in 0..k {
        let rows: Vec<Vec<String>> = game
            .payoff(s)
            .iter()
            .map(|row| row.iter().map(format_rational).collect())
            .collect();
        payoff.insert(state_key(s), rows);
        let mut table = BTreeMap::new();
        for i in 0..game.m1(s) {
            for j in 0..game.m2(s) {
                let q: Vec<String> = game.q(s, i, j).iter().map(format_rational).collect();
                table.insert(pair_key(i, j), q);
            }
        }
        transitions.insert(state_key(s), table);
    }
    let file = GameFile {
        states: k,
        actions_p1: game.action_counts(Player::One),
        actions_p2: game.action_counts(Player::Two),
        payoff,
        transitions,
    };
    let mut text = serde_json::to_string_pretty(&file).expect("game file serialization");
    text.push('\n');
    text
}

fn parse_string_rows(text: &str, what: &str) -> Result<Vec<Vec<Rational>>, ParseError> {
    let rows: Vec<Vec<String>> = serde_json::from_str(text).map_err(json_error)?;
    if rows.is_empty() || rows[0].is_empty() {
        return Err(ParseError::Invalid(format!("{what} must be nonempty")));
    }
    let mut out = Vec::with_capacity(rows.len());
    for (i, row) in rows.iter().enumerate() {
        let mut r = Vec::with_capacity(row.len());
        for (j, cell) in row.iter().enumerate() {
            r.push(rational_at(cell, &format!("{what}[{}][{}]", i + 1, j + 1))?);
        }
        out.push(r);
    }
    Ok(out)
}

/// Parses a JSON matrix of `"p/q"` strings; must be rectangular.
pub fn parse_matrix(text: &str) -> Result<Matrix, ParseError> {
    let rows = parse_string_rows(text, "matrix")?;
    let cols = rows[0].len();
    if rows.iter().any(|r| r.len() != cols) {
        return Err(ParseError::Invalid("matrix rows must all have the same length".into()));
    }
    Ok(rows)
}

pub fn serialize_matrix(matrix: &Matrix) -> String {
    let rows: Vec<Vec<String>> = matrix
        .iter()
        .map(|row| row.iter().map(format_rational).collect())
        .collect();
    serde_json::to_string(&rows).expect("matrix serialization")
}

/// Parses a strategy file: one probability row per state.
pub fn parse_strategy(text: &str) -> Result<StationaryStrategy, ParseError> {
    let rows = parse_string_rows(text, "strategy")?;
    Ok(StationaryStrategy::new(rows)?)
}

pub fn serialize_strategy(strategy: &StationaryStrategy) -> String {
    let rows: Vec<Vec<String>> = strategy
        .rows()
        .iter()
        .map(|row| row.iter().map(format_rational).collect())
        .collect();
    serde_json::to_string(&rows).expect("strategy serialization")
}
