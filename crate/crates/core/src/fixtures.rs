//! Built-in example games used by the test suite and the `reproduce` command.
//!
//! Four fixtures:
//!
//! * `shift-pair` — the symmetric 2×2 matrix `A = [[1,2],[2,1]]` and the shift
//!   `b = (1,2)`, whose column-shifted game `C = [[2,4],[3,3]]` loses complete
//!   mixing even though `A` has it.
//! * `absorbing` — two states, every transition feeds the absorbing second
//!   state. Completely mixed at every tested discount factor, yet not
//!   completely mixed undiscounted.
//! * `symmetric` — two states with symmetric payoff matrices, player 2's
//!   column choosing the next state. Completely mixed everywhere, discounted
//!   and undiscounted.
//! * `three-state` — player 2 routes state 1 into one of two absorbing
//!   states. Its undiscounted value at state 1 is 0 while every discounted
//!   value there is nonzero.

use crate::linalg::Matrix;
use crate::model::StochasticGame;
use crate::rational::{int, Rational};

fn matrix(rows: &[&[i64]]) -> Matrix {
    rows.iter().map(|r| r.iter().map(|&v| int(v)).collect()).collect()
}

fn point_mass(dest: usize, k: usize) -> Vec<Rational> {
    let mut v = vec![Rational::from_integer(0.into()); k];
    v[dest] = int(1);
    v
}

/// `A = [[1,2],[2,1]]`: symmetric, completely mixed, value 3/2.
pub fn shift_pair_matrix() -> Matrix {
    matrix(&[&[1, 2], &[2, 1]])
}

/// The column shift `b = (1,2)` applied to [`shift_pair_matrix`] in the fixture.
pub fn shift_pair_offsets() -> Vec<Rational> {
    vec![int(1), int(2)]
}

/// `C = [[2,4],[3,3]]`: the shifted game; value 3, not completely mixed.
pub fn shift_pair_shifted() -> Matrix {
    matrix(&[&[2, 4], &[3, 3]])
}

/// Two states. `R(s1) = [[0,2],[3,1]]`, `R(s2) = [[2,0],[0,2]]`; every action
/// pair in either state moves the play to s2, so s2 absorbs.
pub fn absorbing_game() -> StochasticGame {
    let payoff = vec![matrix(&[&[0, 2], &[3, 1]]), matrix(&[&[2, 0], &[0, 2]])];
    let to_s2 = point_mass(1, 2);
    let per_state = vec![
        vec![to_s2.clone(), to_s2.clone()],
        vec![to_s2.clone(), to_s2.clone()],
    ];
    StochasticGame::new(payoff, vec![per_state.clone(), per_state]).expect("fixture is valid")
}

/// Two states with symmetric payoffs `R(s1) = [[2,0],[0,2]]`,
/// `R(s2) = [[3,-1],[-1,3]]`. Player 2's column picks the next state:
/// column 1 goes to s1, column 2 to s2, in both states.
pub fn symmetric_game() -> StochasticGame {
    let payoff = vec![matrix(&[&[2, 0], &[0, 2]]), matrix(&[&[3, -1], &[-1, 3]])];
    let per_state = vec![
        vec![point_mass(0, 2), point_mass(1, 2)],
        vec![point_mass(0, 2), point_mass(1, 2)],
    ];
    StochasticGame::new(payoff, vec![per_state.clone(), per_state]).expect("fixture is valid")
}

/// Three states. `R(s1) = [[4,2],[3,1]]` with player 2's column routing to
/// s2 or s3; `R(s2) = [[2,0],[0,2]]` absorbing; `R(s3) = [[1,-1],[-1,1]]`
/// absorbing.
pub fn three_state_game() -> StochasticGame {
    let payoff = vec![
        matrix(&[&[4, 2], &[3, 1]]),
        matrix(&[&[2, 0], &[0, 2]]),
        matrix(&[&[1, -1], &[-1, 1]]),
    ];
    let s1 = vec![
        vec![point_mass(1, 3), point_mass(2, 3)],
        vec![point_mass(1, 3), point_mass(2, 3)],
    ];
    let absorb = |dest: usize| {
        vec![
            vec![point_mass(dest, 3), point_mass(dest, 3)],
            vec![point_mass(dest, 3), point_mass(dest, 3)],
        ]
    };
    StochasticGame::new(payoff, vec![s1, absorb(1), absorb(2)]).expect("fixture is valid")
}

/// What a named fixture contains.
#[derive(Debug, Clone)]
pub enum FixtureKind {
    /// A matrix game plus a column shift to study.
    MatrixPair { a: Matrix, b: Vec<Rational> },
    Game(StochasticGame),
}

#[derive(Debug, Clone)]
pub struct Fixture {
    pub name: &'static str,
    pub summary: &'static str,
    pub kind: FixtureKind,
}

/// All fixtures, in reporting order.
pub fn all() -> Vec<Fixture> {
    vec![
        Fixture {
            name: "shift-pair",
            summary: "symmetric 2x2 matrix game and the column shift that breaks complete mixing",
            kind: FixtureKind::MatrixPair { a: shift_pair_matrix(), b: shift_pair_offsets() },
        },
        Fixture {
            name: "absorbing",
            summary: "2-state game, s2 absorbing; completely mixed discounted but not undiscounted",
            kind: FixtureKind::Game(absorbing_game()),
        },
        Fixture {
            name: "symmetric",
            summary: "2-state symmetric-payoff game; completely mixed discounted and undiscounted",
            kind: FixtureKind::Game(symmetric_game()),
        },
        Fixture {
            name: "three-state",
            summary: "3-state routing game; undiscounted value 0 in s1, discounted values nonzero",
            kind: FixtureKind::Game(three_state_game()),
        },
    ]
}

/// Looks a fixture up by name.
pub fn by_name(name: &str) -> Option<Fixture> {
    all().into_iter().find(|f| f.name == name)
}
