//! β-discounted evaluation and solving.
//!
//! Three routes are provided: exact payoff evaluation of a stationary pair
//! through a linear solve, Shapley value iteration with a certified stopping
//! rule, and an exact linear-programming solver for games whose transitions
//! are controlled by player 2. The LP route returns the discounted value
//! vector as exact rationals and certifies it as the fixed point of the
//! one-step operator.

use crate::linalg::{self, LinearSolve, Matrix};
use crate::lp::{self, Constraint, LinearProgram, LpOutcome, Sense};
use crate::matrix_game::{self, MatrixGameSolution};
use crate::model::{GameError, StationaryStrategy, StochasticGame, ValueVector};
use crate::rational::Rational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// A discount factor, validated to lie in `[0, 1)`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Discount(Rational);

impl Discount {
    pub fn new(beta: Rational) -> Result<Self, GameError> {
        if beta < Rational::zero() || beta >= Rational::one() {
            return Err(GameError::BadDiscount(beta.to_string()));
        }
        Ok(Discount(beta))
    }

    pub fn zero() -> Self {
        Discount(Rational::zero())
    }

    pub fn beta(&self) -> &Rational {
        &self.0
    }

    /// `1 − β`.
    pub fn complement(&self) -> Rational {
        Rational::one() - &self.0
    }
}

/// Output of a discounted solve: per-state values, one stationary strategy
/// per player, and the certification data for how the values were obtained.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiscountedSolution {
    pub beta: Rational,
    pub values: ValueVector,
    pub p1: StationaryStrategy,
    pub p2: StationaryStrategy,
    /// Exact bound on `‖v − T(v)‖∞` for the reported `v` under the one-step
    /// operator `T`; zero when the values are the exact fixed point.
    pub residual: Rational,
    /// True exactly when `residual` is zero.
    pub exact: bool,
    /// Value-iteration sweeps performed (zero for the LP solver).
    pub iterations: u64,
    /// A-priori sweep bound from the contraction rate, when it fits in `f64`
    /// range; informational only.
    pub iteration_bound: Option<u64>,
}

/// Exact discounted payoff `(I − βQ(g))⁻¹ r(f, g)` of a stationary pair, one
/// entry per starting state.
pub fn discounted_payoff(
    game: &StochasticGame,
    f: &StationaryStrategy,
    g: &StationaryStrategy,
    beta: &Discount,
) -> Result<ValueVector, GameError> {
    let q = game.transition_matrix(g)?;
    let r = game.reward_vector(f, g)?;
    let k = game.state_count();
    let mut system = vec![vec![Rational::zero(); k]; k];
    for s in 0..k {
        for t in 0..k {
            let scaled = beta.beta() * &q[s][t];
            system[s][t] = if s == t { Rational::one() - scaled } else { -scaled };
        }
    }
    match linalg::solve(&system, &r) {
        LinearSolve::Unique(v) => Ok(v),
        _ => Err(GameError::Internal("I − βQ must be invertible for β < 1".into())),
    }
}

/// The one-step auxiliary matrix at `state`: entry `(i, j)` is
/// `R(s)[i][j] + β · Σ_{s'} q(s'|s, i, j) · v(s')`.
pub fn auxiliary_matrix(
    game: &StochasticGame,
    state: usize,
    beta: &Discount,
    v: &[Rational],
) -> Result<Matrix, GameError> {
    if state >= game.state_count() {
        return Err(GameError::Dimension(format!(
            "state index {} out of range for a {}-state game",
            state + 1,
            game.state_count()
        )));
    }
    if v.len() != game.state_count() {
        return Err(GameError::Dimension(format!(
            "continuation vector has {} entries, expected {}",
            v.len(),
            game.state_count()
        )));
    }
    let payoff = game.payoff(state);
    let mut out = Vec::with_capacity(payoff.len());
    for (i, row) in payoff.iter().enumerate() {
        let mut aux_row = Vec::with_capacity(row.len());
        for (j, entry) in row.iter().enumerate() {
            let continuation = linalg::dot(game.q(state, i, j), v);
            aux_row.push(entry + beta.beta() * continuation);
        }
        out.push(aux_row);
    }
    Ok(out)
}

/// `(1 − β) · v` entrywise.
pub fn normalized_values(values: &[Rational], beta: &Discount) -> ValueVector {
    let scale = beta.complement();
    values.iter().map(|v| &scale * v).collect()
}

const ITERATION_CAP: u64 = 10_000_000;

/// Shapley value iteration from `v₀ = 0`.
///
/// Stops once successive iterates differ by at most `tol · (1 − β) / β` in
/// the sup norm, which bounds the distance of the reported values from the
/// true fixed point by `tol`. With `β = 0` a single sweep is already exact.
/// Strategies are the canonical optimal vertices of the final per-state
/// auxiliary games.
pub fn shapley_iterate(
    game: &StochasticGame,
    beta: &Discount,
    tol: &Rational,
) -> Result<DiscountedSolution, GameError> {
    if *tol <= Rational::zero() {
        return Err(GameError::InvalidArgument("tolerance must be positive".into()));
    }
    let k = game.state_count();
    let threshold = if beta.beta().is_zero() {
        None
    } else {
        Some(tol * beta.complement() / beta.beta())
    };

    let mut v = vec![Rational::zero(); k];
    let mut iterations = 0u64;
    let mut last_diff = Rational::zero();
    loop {
        let mut next = Vec::with_capacity(k);
        for s in 0..k {
            let aux = auxiliary_matrix(game, s, beta, &v)?;
            next.push(matrix_game::game_value(&aux)?);
        }
        iterations += 1;
        let diff = linalg::norm_inf(&linalg::vec_sub(&next, &v));
        v = next;
        match &threshold {
            None => break,
            Some(t) => {
                if diff <= *t {
                    last_diff = diff;
                    break;
                }
            }
        }
        if iterations >= ITERATION_CAP {
            return Err(GameError::Internal(format!(
                "value iteration did not meet the stopping rule within {ITERATION_CAP} sweeps"
            )));
        }
    }

    let (p1_rows, p2_rows) = strategies_from_values(game, beta, &v)?;
    let residual = beta.beta() * &last_diff;
    let exact = residual.is_zero();
    Ok(DiscountedSolution {
        beta: beta.beta().clone(),
        values: v,
        p1: StationaryStrategy::new(p1_rows)
            .map_err(|e| GameError::Internal(e.to_string()))?,
        p2: StationaryStrategy::new(p2_rows)
            .map_err(|e| GameError::Internal(e.to_string()))?,
        residual,
        exact,
        iterations,
        iteration_bound: iteration_bound(game, beta, tol),
    })
}

/// Exact discounted solve for a player-2-controlled game.
///
/// Solves one linear program whose optimum is the discounted value vector:
/// after shifting payoffs to be at least 1, maximise `Σ_s v(s)` over
/// per-state mixtures `x(s)` and values `v ≥ 0` subject to
/// `x(s)ᵀR'(s) + β Σ_{s'} q(s'|s, ·) v(s') ≥ v(s)` columnwise. Every feasible
/// `v` is dominated by the true value vector, which is itself attained, so
/// the optimum is exact. The result is certified by re-solving each
/// auxiliary game at the recovered values and checking the fixed-point
/// property; strategies are the canonical optimal vertices.
pub fn solve_discounted_exact(
    game: &StochasticGame,
    beta: &Discount,
) -> Result<DiscountedSolution, GameError> {
    game.require_p2_controlled()?;
    let k = game.state_count();

    let min_payoff = game_payoff_min(game);
    let shift = if min_payoff < Rational::one() {
        Rational::one() - &min_payoff
    } else {
        Rational::zero()
    };

    let offsets: Vec<usize> = {
        let mut acc = 0;
        (0..k)
            .map(|s| {
                let o = acc;
                acc += game.m1(s);
                o
            })
            .collect()
    };
    let total_x: usize = (0..k).map(|s| game.m1(s)).sum();
    let n = total_x + k;

    let mut constraints = Vec::new();
    for s in 0..k {
        for j in 0..game.m2(s) {
            let mut coeffs = vec![Rational::zero(); n];
            for i in 0..game.m1(s) {
                coeffs[offsets[s] + i] = &game.payoff(s)[i][j] + &shift;
            }
            let q = game.q_p2(s, j);
            for t in 0..k {
                coeffs[total_x + t] = beta.beta() * &q[t];
            }
            coeffs[total_x + s] -= Rational::one();
            constraints.push(Constraint::ge(coeffs, Rational::zero()));
        }
    }
    for s in 0..k {
        let mut coeffs = vec![Rational::zero(); n];
        for i in 0..game.m1(s) {
            coeffs[offsets[s] + i] = Rational::one();
        }
        constraints.push(Constraint::eq(coeffs, Rational::one()));
    }
    let mut objective = vec![Rational::zero(); n];
    for t in 0..k {
        objective[total_x + t] = Rational::one();
    }

    let program = LinearProgram { sense: Sense::Maximize, objective, constraints };
    let LpOutcome::Optimal(solution) = lp::solve(&program) else {
        return Err(GameError::Internal(
            "discounted LP must have an optimal solution".into(),
        ));
    };

    let unshift = &shift / beta.complement();
    let values: ValueVector =
        (0..k).map(|s| &solution.x[total_x + s] - &unshift).collect();

    let mut p1_rows = Vec::with_capacity(k);
    let mut p2_rows = Vec::with_capacity(k);
    for s in 0..k {
        let aux = auxiliary_matrix(game, s, beta, &values)?;
        let sol = matrix_game::solve_matrix_game(&aux)?;
        if sol.value != values[s] {
            return Err(GameError::Internal(format!(
                "fixed-point certificate failed in state s{}: auxiliary value {} vs {}",
                s + 1,
                sol.value,
                values[s]
            )));
        }
        p1_rows.push(sol.canonical_p1().clone());
        p2_rows.push(sol.canonical_p2().clone());
    }

    Ok(DiscountedSolution {
        beta: beta.beta().clone(),
        values,
        p1: StationaryStrategy::new(p1_rows)
            .map_err(|e| GameError::Internal(e.to_string()))?,
        p2: StationaryStrategy::new(p2_rows)
            .map_err(|e| GameError::Internal(e.to_string()))?,
        residual: Rational::zero(),
        exact: true,
        iterations: 0,
        iteration_bound: None,
    })
}

/// Canonical optimal vertices of every per-state auxiliary game at `v`.
fn strategies_from_values(
    game: &StochasticGame,
    beta: &Discount,
    v: &[Rational],
) -> Result<(Vec<Vec<Rational>>, Vec<Vec<Rational>>), GameError> {
    let mut p1_rows = Vec::with_capacity(game.state_count());
    let mut p2_rows = Vec::with_capacity(game.state_count());
    for s in 0..game.state_count() {
        let aux = auxiliary_matrix(game, s, beta, v)?;
        let sol: MatrixGameSolution = matrix_game::solve_matrix_game(&aux)?;
        p1_rows.push(sol.canonical_p1().clone());
        p2_rows.push(sol.canonical_p2().clone());
    }
    Ok((p1_rows, p2_rows))
}

fn game_payoff_min(game: &StochasticGame) -> Rational {
    (0..game.state_count())
        .flat_map(|s| game.payoff(s).iter().flatten())
        .min()
        .expect("games have at least one payoff entry")
        .clone()
}

fn game_payoff_abs_max(game: &StochasticGame) -> Rational {
    (0..game.state_count())
        .flat_map(|s| game.payoff(s).iter().flatten())
        .map(Signed::abs)
        .max()
        .expect("games have at least one payoff entry")
}

fn iteration_bound(game: &StochasticGame, beta: &Discount, tol: &Rational) -> Option<u64> {
    if beta.beta().is_zero() {
        return Some(1);
    }
    let magnitude = game_payoff_abs_max(game);
    if magnitude.is_zero() {
        return Some(1);
    }
    let b = beta.beta().to_f64()?;
    let m = magnitude.to_f64()?;
    let t = (tol * beta.complement() / beta.beta()).to_f64()?;
    if !(b.is_finite() && m.is_finite() && t.is_finite()) || t <= 0.0 {
        return None;
    }
    // Successive differences shrink as βⁿ⁻¹·m, so solve βⁿ⁻¹·m ≤ t for n.
    let steps = ((t / m).ln() / b.ln()).ceil() + 1.0;
    if !steps.is_finite() || steps > 9.0e18 {
        return None;
    }
    Some(steps.max(1.0) as u64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::model::Player;
    use crate::rational::{int, rat};

    fn half() -> Discount {
        Discount::new(rat(1, 2)).unwrap()
    }

    fn uniform(game: &StochasticGame, player: Player) -> StationaryStrategy {
        StationaryStrategy::uniform(&game.action_counts(player))
    }

    #[test]
    fn discount_validates_range() {
        assert!(Discount::new(int(0)).is_ok());
        assert!(Discount::new(rat(999, 1000)).is_ok());
        assert!(matches!(Discount::new(int(1)), Err(GameError::BadDiscount(_))));
        assert!(matches!(Discount::new(rat(-1, 2)), Err(GameError::BadDiscount(_))));
        assert!(matches!(Discount::new(int(2)), Err(GameError::BadDiscount(_))));
    }

    #[test]
    fn payoff_sums_geometric_series() {
        let game = fixtures::absorbing_game();
        let f = uniform(&game, Player::One);
        let g = uniform(&game, Player::Two);
        assert_eq!(
            discounted_payoff(&game, &f, &g, &half()).unwrap(),
            vec![rat(5, 2), int(2)]
        );
        assert_eq!(
            discounted_payoff(&game, &f, &g, &Discount::zero()).unwrap(),
            vec![rat(3, 2), int(1)]
        );
    }

    #[test]
    fn auxiliary_adds_expected_continuation() {
        let game = fixtures::absorbing_game();
        let aux = auxiliary_matrix(&game, 0, &half(), &[int(7), int(2)]).unwrap();
        assert_eq!(aux, vec![vec![int(1), int(3)], vec![int(4), int(2)]]);

        let at_zero = auxiliary_matrix(&game, 0, &Discount::zero(), &[int(7), int(2)]).unwrap();
        assert_eq!(&at_zero, game.payoff(0));

        let game = fixtures::three_state_game();
        let aux = auxiliary_matrix(&game, 0, &half(), &[int(9), int(2), int(0)]).unwrap();
        assert_eq!(aux, vec![vec![int(5), int(2)], vec![int(4), int(1)]]);
    }

    #[test]
    fn auxiliary_varies_entrywise_without_single_control() {
        let zero_payoff = vec![vec![vec![int(0), int(0)], vec![int(0), int(0)]]; 2];
        let to = |t: usize| -> Vec<Rational> {
            (0..2).map(|s| if s == t { int(1) } else { int(0) }).collect()
        };
        let transition = vec![
            vec![vec![to(1), to(0)], vec![to(0), to(1)]],
            vec![vec![to(1), to(1)], vec![to(1), to(1)]],
        ];
        let game = StochasticGame::new(zero_payoff, transition).unwrap();
        assert!(!game.is_p2_controlled());

        let aux = auxiliary_matrix(&game, 0, &half(), &[int(2), int(4)]).unwrap();
        assert_eq!(aux, vec![vec![int(2), int(1)], vec![int(1), int(2)]]);
    }

    #[test]
    fn iteration_meets_tolerance_on_absorbing_game() {
        let game = fixtures::absorbing_game();
        let tol = rat(1, 1_000_000_000);
        let sol = shapley_iterate(&game, &half(), &tol).unwrap();
        let exact = vec![rat(5, 2), int(2)];
        for (got, want) in sol.values.iter().zip(&exact) {
            assert!((got - want).abs() <= tol);
        }
        assert!(!sol.exact);
        assert!(sol.residual > Rational::zero());
        assert!(sol.residual <= tol);
        let bound = sol.iteration_bound.expect("bound fits in f64");
        assert!(sol.iterations <= bound);
    }

    #[test]
    fn iteration_is_exact_at_beta_zero() {
        let game = fixtures::absorbing_game();
        let sol = shapley_iterate(&game, &Discount::zero(), &rat(1, 100)).unwrap();
        assert_eq!(sol.values, vec![rat(3, 2), int(1)]);
        assert_eq!(sol.iterations, 1);
        assert!(sol.exact);
        assert_eq!(sol.residual, int(0));
        assert_eq!(sol.iteration_bound, Some(1));
    }

    #[test]
    fn iteration_tracks_symmetric_fixed_point() {
        let game = fixtures::symmetric_game();
        let beta = Discount::new(rat(3, 4)).unwrap();
        let tol = rat(1, 1_000_000);
        let sol = shapley_iterate(&game, &beta, &tol).unwrap();
        for v in &sol.values {
            assert!((v - int(4)).abs() <= tol);
        }
        assert_eq!(sol.p1.rows(), &[vec![rat(1, 2), rat(1, 2)], vec![rat(1, 2), rat(1, 2)]]);
        assert_eq!(sol.p2.rows(), sol.p1.rows());
    }

    #[test]
    fn exact_solve_matches_closed_form_absorbing() {
        let game = fixtures::absorbing_game();
        let sol = solve_discounted_exact(&game, &half()).unwrap();
        assert_eq!(sol.values, vec![rat(5, 2), int(2)]);
        assert!(sol.exact);
        assert_eq!(sol.residual, int(0));
        assert_eq!(
            sol.p1.rows(),
            &[vec![rat(1, 2), rat(1, 2)], vec![rat(1, 2), rat(1, 2)]]
        );
        assert_eq!(
            sol.p2.rows(),
            &[vec![rat(1, 4), rat(3, 4)], vec![rat(1, 2), rat(1, 2)]]
        );
    }

    #[test]
    fn exact_solve_handles_beta_zero_and_three_states() {
        let game = fixtures::absorbing_game();
        let sol = solve_discounted_exact(&game, &Discount::zero()).unwrap();
        assert_eq!(sol.values, vec![rat(3, 2), int(1)]);

        let game = fixtures::three_state_game();
        let sol = solve_discounted_exact(&game, &half()).unwrap();
        assert_eq!(sol.values, vec![int(2), int(2), int(0)]);
        assert_eq!(sol.p1.row(0), &[int(1), int(0)]);
        assert_eq!(sol.p2.row(0), &[int(0), int(1)]);
    }

    #[test]
    fn exact_solve_agrees_with_iteration() {
        let game = fixtures::symmetric_game();
        let exact = solve_discounted_exact(&game, &half()).unwrap();
        assert_eq!(exact.values, vec![int(2), int(2)]);

        let tol = rat(1, 1_000_000);
        let iterated = shapley_iterate(&game, &half(), &tol).unwrap();
        for (a, b) in iterated.values.iter().zip(&exact.values) {
            assert!((a - b).abs() <= tol);
        }
    }

    #[test]
    fn pure_deviations_cannot_beat_exact_solution() {
        let game = fixtures::absorbing_game();
        let beta = half();
        let sol = solve_discounted_exact(&game, &beta).unwrap();
        let counts1 = game.action_counts(Player::One);
        let counts2 = game.action_counts(Player::Two);
        for picks in crate::average::pure_profiles(&counts1) {
            let f = StationaryStrategy::pure(&counts1, &picks);
            let payoff = discounted_payoff(&game, &f, &sol.p2, &beta).unwrap();
            for (p, v) in payoff.iter().zip(&sol.values) {
                assert!(p <= v);
            }
        }
        for picks in crate::average::pure_profiles(&counts2) {
            let g = StationaryStrategy::pure(&counts2, &picks);
            let payoff = discounted_payoff(&game, &sol.p1, &g, &beta).unwrap();
            for (p, v) in payoff.iter().zip(&sol.values) {
                assert!(p >= v);
            }
        }
    }

    #[test]
    fn one_step_operator_contracts() {
        let game = fixtures::symmetric_game();
        let beta = Discount::new(rat(3, 4)).unwrap();
        let apply = |v: &[Rational]| -> ValueVector {
            (0..game.state_count())
                .map(|s| {
                    let aux = auxiliary_matrix(&game, s, &beta, v).unwrap();
                    matrix_game::game_value(&aux).unwrap()
                })
                .collect()
        };
        let pairs = [
            (vec![int(0), int(0)], vec![int(4), int(-2)]),
            (vec![rat(1, 3), int(5)], vec![int(-1), rat(7, 2)]),
            (vec![int(10), int(10)], vec![int(10), int(10)]),
        ];
        for (u, w) in &pairs {
            let lhs = linalg::norm_inf(&linalg::vec_sub(&apply(u), &apply(w)));
            let rhs = beta.beta() * linalg::norm_inf(&linalg::vec_sub(u, w));
            assert!(lhs <= rhs);
        }
    }

    #[test]
    fn normalization_scales_by_complement() {
        let beta = half();
        assert_eq!(
            normalized_values(&[rat(5, 2), int(2)], &beta),
            vec![rat(5, 4), int(1)]
        );
    }
}
