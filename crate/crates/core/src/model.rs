//! Game data model: validation, controller detection, and the elementary
//! payoff algebra shared by every solver.
//!
//! States and actions are 0-indexed here; the file format (and error
//! messages) use 1-indexed `s1`-style labels.

use crate::linalg::Matrix;
use crate::rational::{format_rational, Rational};
use num_traits::{One, Zero};

/// Which player a strategy belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Player {
    One,
    Two,
}

/// Who controls the transition law, as stored on a validated game. When the
/// transitions depend on the state alone, this collapses to `PlayerTwo`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Controller {
    PlayerOne,
    PlayerTwo,
    None,
}

/// Full detection result. `Both` means every action pair shares one
/// transition row per state, so either player can be viewed as controlling
/// the game; solvers treat it as player-2 control.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ControlStructure {
    PlayerOne,
    PlayerTwo,
    Both,
    None,
}

/// Validation failures when building games or strategies.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ModelError {
    #[error("game must have at least one state")]
    NoStates,
    #[error("state s{} has an empty or ragged payoff matrix", .state + 1)]
    BadPayoffShape { state: usize },
    #[error("transition table for state s{} does not match its {rows}x{cols} action space", .state + 1)]
    BadTransitionShape { state: usize, rows: usize, cols: usize },
    #[error("transition vector for state s{}, actions ({},{}) has length {len}, expected {expected}", .state + 1, .i + 1, .j + 1)]
    BadTransitionLength { state: usize, i: usize, j: usize, len: usize, expected: usize },
    #[error("negative transition probability at state s{}, actions ({},{}), destination s{}", .state + 1, .i + 1, .j + 1, .dest + 1)]
    NegativeTransition { state: usize, i: usize, j: usize, dest: usize },
    #[error("transition row for state s{}, actions ({},{}) sums to {}", .state + 1, .i + 1, .j + 1, format_rational(.sum))]
    TransitionSum { state: usize, i: usize, j: usize, sum: Rational },
    #[error("strategy has {got} state rows, game has {expected}")]
    StrategyStateCount { expected: usize, got: usize },
    #[error("strategy row for state s{} has {got} entries, expected {expected}", .state + 1)]
    StrategyRowLength { state: usize, expected: usize, got: usize },
    #[error("strategy row for state s{} has a negative entry at action {}", .state + 1, .action + 1)]
    StrategyNegative { state: usize, action: usize },
    #[error("strategy row for state s{} sums to {}, expected 1", .state + 1, format_rational(.sum))]
    StrategySum { state: usize, sum: Rational },
}

/// Failures raised by solvers on structurally valid games.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GameError {
    #[error("this operation requires player-2-controlled transitions; detected {found:?}")]
    ControllerMismatch { found: ControlStructure },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("matrix must be nonempty and rectangular")]
    BadMatrix,
    #[error("enumeration guard exceeded: {needed} cases, limit {limit} (set CMSTOCH_GUARD to raise)")]
    GuardExceeded { needed: u128, limit: u64 },
    #[error("matrix game too large for exact vertex enumeration: {rows}x{cols} (limit {limit} total actions)")]
    MatrixTooLarge { rows: usize, cols: usize, limit: usize },
    #[error("discount factor {0} is outside [0, 1)")]
    BadDiscount(String),
    #[error("inconclusive: {0}")]
    Inconclusive(String),
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

/// One mixed action per state for one player.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StationaryStrategy {
    rows: Vec<Vec<Rational>>,
}

impl StationaryStrategy {
    /// Validates that every row is a probability vector.
    pub fn new(rows: Vec<Vec<Rational>>) -> Result<Self, ModelError> {
        for (state, row) in rows.iter().enumerate() {
            if row.is_empty() {
                return Err(ModelError::StrategyRowLength { state, expected: 1, got: 0 });
            }
            for (action, p) in row.iter().enumerate() {
                if p < &Rational::zero() {
                    return Err(ModelError::StrategyNegative { state, action });
                }
            }
            let sum: Rational = row.iter().sum();
            if !sum.is_one() {
                return Err(ModelError::StrategySum { state, sum });
            }
        }
        Ok(StationaryStrategy { rows })
    }

    /// The pure strategy choosing `choices[s]` in state `s`.
    pub fn pure(action_counts: &[usize], choices: &[usize]) -> Self {
        assert_eq!(action_counts.len(), choices.len());
        let rows = action_counts
            .iter()
            .zip(choices)
            .map(|(&m, &c)| {
                assert!(c < m, "pure choice out of range");
                let mut row = vec![Rational::zero(); m];
                row[c] = Rational::one();
                row
            })
            .collect();
        StationaryStrategy { rows }
    }

    /// Uniform mixing in every state.
    pub fn uniform(action_counts: &[usize]) -> Self {
        let rows = action_counts
            .iter()
            .map(|&m| {
                assert!(m > 0);
                vec![Rational::new(1.into(), (m as i64).into()); m]
            })
            .collect();
        StationaryStrategy { rows }
    }

    pub fn rows(&self) -> &[Vec<Rational>] {
        &self.rows
    }

    pub fn row(&self, state: usize) -> &[Rational] {
        &self.rows[state]
    }

    pub fn state_count(&self) -> usize {
        self.rows.len()
    }

    /// True when every coordinate of every row is strictly positive —
    /// "completely mixed" as a property of a single strategy.
    pub fn is_strictly_positive(&self) -> bool {
        self.rows.iter().all(|row| row.iter().all(|p| p > &Rational::zero()))
    }

    /// Indices of the actions played with positive probability, per state.
    pub fn supports(&self) -> Vec<Vec<usize>> {
        self.rows
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .filter(|(_, p)| !p.is_zero())
                    .map(|(a, _)| a)
                    .collect()
            })
            .collect()
    }

    /// First zero coordinate as `(state, action)`, if any.
    pub fn first_zero_coordinate(&self) -> Option<(usize, usize)> {
        for (s, row) in self.rows.iter().enumerate() {
            for (a, p) in row.iter().enumerate() {
                if p.is_zero() {
                    return Some((s, a));
                }
            }
        }
        None
    }
}

/// Per-state value vector.
pub type ValueVector = Vec<Rational>;

/// A finite two-player zero-sum stochastic game: per-state payoff matrices
/// (row player maximizes) and a transition law per (state, action pair).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StochasticGame {
    payoff: Vec<Matrix>,
    /// `transition[s][i][j]` is the distribution over next states.
    transition: Vec<Vec<Vec<Vec<Rational>>>>,
    control: ControlStructure,
}

impl StochasticGame {
    pub fn new(
        payoff: Vec<Matrix>,
        transition: Vec<Vec<Vec<Vec<Rational>>>>,
    ) -> Result<Self, ModelError> {
        let k = payoff.len();
        if k == 0 {
            return Err(ModelError::NoStates);
        }
        if transition.len() != k {
            return Err(ModelError::BadTransitionShape {
                state: transition.len().min(k.saturating_sub(1)),
                rows: 0,
                cols: 0,
            });
        }
        for (s, r) in payoff.iter().enumerate() {
            let rows = r.len();
            let cols = r.first().map_or(0, Vec::len);
            if rows == 0 || cols == 0 || r.iter().any(|row| row.len() != cols) {
                return Err(ModelError::BadPayoffShape { state: s });
            }
            let t = &transition[s];
            if t.len() != rows || t.iter().any(|per_i| per_i.len() != cols) {
                return Err(ModelError::BadTransitionShape { state: s, rows, cols });
            }
            for (i, per_i) in t.iter().enumerate() {
                for (j, q) in per_i.iter().enumerate() {
                    if q.len() != k {
                        return Err(ModelError::BadTransitionLength {
                            state: s,
                            i,
                            j,
                            len: q.len(),
                            expected: k,
                        });
                    }
                    for (dest, p) in q.iter().enumerate() {
                        if p < &Rational::zero() {
                            return Err(ModelError::NegativeTransition { state: s, i, j, dest });
                        }
                    }
                    let sum: Rational = q.iter().sum();
                    if !sum.is_one() {
                        return Err(ModelError::TransitionSum { state: s, i, j, sum });
                    }
                }
            }
        }
        let control = detect_structure(&transition);
        Ok(StochasticGame { payoff, transition, control })
    }

    pub fn state_count(&self) -> usize {
        self.payoff.len()
    }

    /// Player 1's action count in `state`.
    pub fn m1(&self, state: usize) -> usize {
        self.payoff[state].len()
    }

    /// Player 2's action count in `state`.
    pub fn m2(&self, state: usize) -> usize {
        self.payoff[state][0].len()
    }

    pub fn action_counts(&self, player: Player) -> Vec<usize> {
        (0..self.state_count())
            .map(|s| match player {
                Player::One => self.m1(s),
                Player::Two => self.m2(s),
            })
            .collect()
    }

    pub fn payoff(&self, state: usize) -> &Matrix {
        &self.payoff[state]
    }

    /// Transition distribution for `(state, i, j)`.
    pub fn q(&self, state: usize, i: usize, j: usize) -> &[Rational] {
        &self.transition[state][i][j]
    }

    /// Transition distribution under player-2 control: `q(·|s, j)`.
    /// Only meaningful when [`Self::is_p2_controlled`] holds.
    pub fn q_p2(&self, state: usize, j: usize) -> &[Rational] {
        debug_assert!(self.is_p2_controlled());
        &self.transition[state][0][j]
    }

    pub fn control_structure(&self) -> ControlStructure {
        self.control
    }

    /// The stored controller; `Both` collapses to `PlayerTwo`.
    pub fn controller(&self) -> Controller {
        match self.control {
            ControlStructure::PlayerOne => Controller::PlayerOne,
            ControlStructure::PlayerTwo | ControlStructure::Both => Controller::PlayerTwo,
            ControlStructure::None => Controller::None,
        }
    }

    pub fn is_p2_controlled(&self) -> bool {
        matches!(self.control, ControlStructure::PlayerTwo | ControlStructure::Both)
    }

    pub fn require_p2_controlled(&self) -> Result<(), GameError> {
        if self.is_p2_controlled() {
            Ok(())
        } else {
            Err(GameError::ControllerMismatch { found: self.control })
        }
    }

    /// Checks that `strategy` has this game's shape for `player`.
    pub fn validate_strategy(
        &self,
        player: Player,
        strategy: &StationaryStrategy,
    ) -> Result<(), ModelError> {
        let k = self.state_count();
        if strategy.state_count() != k {
            return Err(ModelError::StrategyStateCount { expected: k, got: strategy.state_count() });
        }
        for s in 0..k {
            let expected = match player {
                Player::One => self.m1(s),
                Player::Two => self.m2(s),
            };
            let got = strategy.row(s).len();
            if got != expected {
                return Err(ModelError::StrategyRowLength { state: s, expected, got });
            }
        }
        Ok(())
    }

    /// `Q(g)`: the chain player 2 induces when the game is player-2
    /// controlled. Entry `(s, s')` is `Σ_j g_j(s) q(s'|s,j)`.
    pub fn transition_matrix(&self, g: &StationaryStrategy) -> Result<Matrix, GameError> {
        self.require_p2_controlled()?;
        self.validate_strategy(Player::Two, g)
            .map_err(|e| GameError::Dimension(e.to_string()))?;
        let k = self.state_count();
        let mut q = vec![vec![Rational::zero(); k]; k];
        for s in 0..k {
            for (j, weight) in g.row(s).iter().enumerate() {
                if weight.is_zero() {
                    continue;
                }
                for (dest, p) in self.q_p2(s, j).iter().enumerate() {
                    if !p.is_zero() {
                        q[s][dest] += weight * p;
                    }
                }
            }
        }
        Ok(q)
    }

    /// `r(f,g)`: the stage reward vector, `r(s) = f(s)ᵀ R(s) g(s)`.
    pub fn reward_vector(
        &self,
        f: &StationaryStrategy,
        g: &StationaryStrategy,
    ) -> Result<ValueVector, GameError> {
        self.validate_strategy(Player::One, f)
            .map_err(|e| GameError::Dimension(e.to_string()))?;
        self.validate_strategy(Player::Two, g)
            .map_err(|e| GameError::Dimension(e.to_string()))?;
        let mut r = Vec::with_capacity(self.state_count());
        for s in 0..self.state_count() {
            let mut total = Rational::zero();
            for (i, fi) in f.row(s).iter().enumerate() {
                if fi.is_zero() {
                    continue;
                }
                for (j, gj) in g.row(s).iter().enumerate() {
                    if !gj.is_zero() {
                        total += fi * gj * &self.payoff[s][i][j];
                    }
                }
            }
            r.push(total);
        }
        Ok(r)
    }
}

fn rows_equal(a: &[Rational], b: &[Rational]) -> bool {
    a == b
}

fn detect_structure(transition: &[Vec<Vec<Vec<Rational>>>]) -> ControlStructure {
    // Player 2 controls iff q(·|s,i,j) never varies with i; player 1
    // symmetrically. "Both" means it varies with neither.
    let mut p2 = true;
    let mut p1 = true;
    for t in transition {
        let rows = t.len();
        let cols = t[0].len();
        for i in 0..rows {
            for j in 0..cols {
                if p2 && !rows_equal(&t[i][j], &t[0][j]) {
                    p2 = false;
                }
                if p1 && !rows_equal(&t[i][j], &t[i][0]) {
                    p1 = false;
                }
            }
        }
        if !p1 && !p2 {
            break;
        }
    }
    match (p1, p2) {
        (true, true) => ControlStructure::Both,
        (false, true) => ControlStructure::PlayerTwo,
        (true, false) => ControlStructure::PlayerOne,
        (false, false) => ControlStructure::None,
    }
}

/// Re-runs controller detection on a validated game.
pub fn detect_controller(game: &StochasticGame) -> ControlStructure {
    detect_structure(&game.transition)
}
