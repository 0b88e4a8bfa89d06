//! Limiting-average payoffs and exact best responses.
//!
//! With transitions controlled by player 2, the Cesàro limit `Q*(g)` depends
//! only on `g`, so the average payoff of a stationary pair is the exact
//! product `Q*(g) · r(f, g)`. Player 1's best response reduces to a per-state
//! row maximisation weighted by `Q*(g)`; player 2's is computed by multichain
//! policy iteration over pure transition choices, evaluated through exact
//! gain/bias solves.

use crate::chains;
use crate::linalg::{self, LinearSolve, Matrix};
use crate::model::{GameError, Player, StationaryStrategy, StochasticGame, ValueVector};
use crate::rational::Rational;
use num_traits::{One, Zero};

/// Expected limiting-average payoff `Φ(f, g) = Q*(g) · r(f, g)`, one entry
/// per starting state.
pub fn limiting_average_payoff(
    game: &StochasticGame,
    f: &StationaryStrategy,
    g: &StationaryStrategy,
) -> Result<ValueVector, GameError> {
    game.require_p2_controlled()?;
    let q = game.transition_matrix(g)?;
    let r = game.reward_vector(f, g)?;
    let star = chains::cesaro_limit(&q)?;
    Ok(linalg::mat_vec(star.matrix(), &r))
}

/// Best limiting-average payoff player 1 can secure against a fixed `g`,
/// per starting state.
///
/// `Q*(g)` is fixed and nonnegative, so maximising the stage reward
/// `(R(s) g(s))_i` independently in every state maximises the product.
pub fn best_response_value_p1(
    game: &StochasticGame,
    g: &StationaryStrategy,
) -> Result<ValueVector, GameError> {
    game.require_p2_controlled()?;
    let q = game.transition_matrix(g)?;
    let star = chains::cesaro_limit(&q)?;
    let mut best_rewards = Vec::with_capacity(game.state_count());
    for s in 0..game.state_count() {
        let payoff = game.payoff(s);
        let weights = g.row(s);
        let mut best: Option<Rational> = None;
        for row in payoff {
            let value = linalg::dot(row, weights);
            if best.as_ref().map_or(true, |b| value > *b) {
                best = Some(value);
            }
        }
        best_rewards.push(best.expect("at least one action per state"));
    }
    Ok(linalg::mat_vec(star.matrix(), &best_rewards))
}

/// Lowest limiting-average payoff player 2 can force against a fixed `f`,
/// per starting state.
///
/// Runs multichain policy iteration over player 2's pure stationary
/// policies: evaluate the current policy's gain and bias exactly, first
/// improve the expected future gain, and only on gain ties improve
/// `cost + expected bias`. Both steps switch on strict improvement alone and
/// prefer the lowest action index, so the computation is deterministic and
/// terminates at an optimal pure policy.
pub fn best_response_value_p2(
    game: &StochasticGame,
    f: &StationaryStrategy,
) -> Result<ValueVector, GameError> {
    game.require_p2_controlled()?;
    game.validate_strategy(Player::One, f)
        .map_err(|e| GameError::Dimension(e.to_string()))?;
    let k = game.state_count();

    let costs: Vec<Vec<Rational>> = (0..k)
        .map(|s| {
            let payoff = game.payoff(s);
            let fs = f.row(s);
            (0..game.m2(s))
                .map(|j| (0..payoff.len()).map(|i| &fs[i] * &payoff[i][j]).sum())
                .collect()
        })
        .collect();

    let mut policy = vec![0usize; k];
    let cap = policy_iteration_cap(game);
    for _ in 0..cap {
        let q: Matrix = (0..k).map(|s| game.q_p2(s, policy[s]).to_vec()).collect();
        let r: Vec<Rational> = (0..k).map(|s| costs[s][policy[s]].clone()).collect();
        let (rho, h) = gain_bias(&q, &r)?;

        let mut next = policy.clone();
        let mut changed = false;
        for s in 0..k {
            let gains: Vec<Rational> =
                (0..game.m2(s)).map(|j| linalg::dot(game.q_p2(s, j), &rho)).collect();
            let best_gain = gains.iter().min().expect("nonempty action set").clone();
            if gains[policy[s]] > best_gain {
                next[s] = gains.iter().position(|v| *v == best_gain).expect("minimum exists");
                changed = true;
                continue;
            }
            let bias_of =
                |j: usize| &costs[s][j] + linalg::dot(game.q_p2(s, j), &h);
            let mut best_j = policy[s];
            let mut best_bias = bias_of(policy[s]);
            for j in 0..game.m2(s) {
                if gains[j] != best_gain {
                    continue;
                }
                let candidate = bias_of(j);
                if candidate < best_bias && (j < best_j || candidate < bias_of(best_j)) {
                    best_j = j;
                    best_bias = candidate;
                }
            }
            if best_j != policy[s] {
                next[s] = best_j;
                changed = true;
            }
        }
        if !changed {
            return Ok(rho);
        }
        policy = next;
    }
    Err(GameError::Internal(
        "policy iteration exceeded its termination bound".into(),
    ))
}

fn policy_iteration_cap(game: &StochasticGame) -> u64 {
    let mut total: u128 = 1;
    for s in 0..game.state_count() {
        total = total.saturating_mul(game.m2(s) as u128);
    }
    total.saturating_add(8).min(1_000_000) as u64
}

/// Exact gain `ρ = Q* r` and bias `h` of a Markov reward chain, with
/// `(I − Q) h = r − ρ` and `h` pinned to zero at the lowest state of every
/// recurrent class.
pub(crate) fn gain_bias(
    q: &Matrix,
    r: &[Rational],
) -> Result<(ValueVector, ValueVector), GameError> {
    let star = chains::cesaro_limit(q)?;
    let rho = linalg::mat_vec(star.matrix(), r);
    let k = r.len();

    let mut system = vec![vec![Rational::zero(); k]; k];
    let mut rhs = vec![Rational::zero(); k];
    for s in 0..k {
        for t in 0..k {
            system[s][t] = if s == t { Rational::one() - &q[s][t] } else { -&q[s][t] };
        }
        rhs[s] = &r[s] - &rho[s];
    }
    for class in &star.decomposition().recurrent_classes {
        let pin = class[0];
        for t in 0..k {
            system[pin][t] = if t == pin { Rational::one() } else { Rational::zero() };
        }
        rhs[pin] = Rational::zero();
    }
    match linalg::solve(&system, &rhs) {
        LinearSolve::Unique(h) => Ok((rho, h)),
        _ => Err(GameError::Internal("pinned bias system is singular".into())),
    }
}

/// Verdict of checking a stationary pair for limiting-average optimality.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UndiscountedVerification {
    /// `Φ(f, g)` per starting state.
    pub value: ValueVector,
    /// Best payoff player 1 could secure against `g`.
    pub p1_best_response: ValueVector,
    /// Lowest payoff player 2 could force against `f`.
    pub p2_best_response: ValueVector,
    /// `p1_best_response − value`; positive entries are profitable
    /// player 1 deviations.
    pub p1_gap: ValueVector,
    /// `value − p2_best_response`; positive entries are profitable
    /// player 2 deviations.
    pub p2_gap: ValueVector,
    /// True exactly when both gaps vanish in every state.
    pub optimal: bool,
}

/// Checks whether `(f, g)` is a limiting-average optimal pair by comparing
/// `Φ(f, g)` with both exact best-response values.
pub fn verify_optimal_undiscounted(
    game: &StochasticGame,
    f: &StationaryStrategy,
    g: &StationaryStrategy,
) -> Result<UndiscountedVerification, GameError> {
    let value = limiting_average_payoff(game, f, g)?;
    let p1_best = best_response_value_p1(game, g)?;
    let p2_best = best_response_value_p2(game, f)?;
    let p1_gap: ValueVector = p1_best.iter().zip(&value).map(|(b, v)| b - v).collect();
    let p2_gap: ValueVector = value.iter().zip(&p2_best).map(|(v, b)| v - b).collect();
    let optimal = p1_gap.iter().all(Rational::is_zero) && p2_gap.iter().all(Rational::is_zero);
    Ok(UndiscountedVerification {
        value,
        p1_best_response: p1_best,
        p2_best_response: p2_best,
        p1_gap,
        p2_gap,
        optimal,
    })
}

/// All pure action profiles over the given per-state action counts, in
/// lexicographic order.
pub(crate) fn pure_profiles(counts: &[usize]) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = vec![Vec::new()];
    for &m in counts {
        let mut next = Vec::with_capacity(out.len() * m);
        for prefix in &out {
            for a in 0..m {
                let mut profile = prefix.clone();
                profile.push(a);
                next.push(profile);
            }
        }
        out = next;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::rational::{int, rat};

    fn uniform(game: &StochasticGame, player: Player) -> StationaryStrategy {
        StationaryStrategy::uniform(&game.action_counts(player))
    }

    fn pure_p2(game: &StochasticGame, picks: &[usize]) -> StationaryStrategy {
        StationaryStrategy::pure(&game.action_counts(Player::Two), picks)
    }

    #[test]
    fn average_payoff_ignores_transient_rewards() {
        let game = fixtures::absorbing_game();
        let f = StationaryStrategy::new(vec![
            vec![int(1), int(0)],
            vec![rat(1, 2), rat(1, 2)],
        ])
        .unwrap();
        let g = uniform(&game, Player::Two);
        let phi = limiting_average_payoff(&game, &f, &g).unwrap();
        assert_eq!(phi, vec![int(1), int(1)]);
    }

    #[test]
    fn average_payoff_splits_across_absorbing_states() {
        let game = fixtures::three_state_game();
        let f = StationaryStrategy::pure(&game.action_counts(Player::One), &[0, 0, 0]);
        let g = pure_p2(&game, &[0, 0, 0]);
        let phi = limiting_average_payoff(&game, &f, &g).unwrap();
        assert_eq!(phi, vec![int(2), int(2), int(1)]);
    }

    #[test]
    fn p1_best_response_maximises_weighted_rows() {
        let game = fixtures::symmetric_game();
        let g = uniform(&game, Player::Two);
        assert_eq!(best_response_value_p1(&game, &g).unwrap(), vec![int(1), int(1)]);

        let skewed = StationaryStrategy::new(vec![
            vec![int(1), int(0)],
            vec![int(1), int(0)],
        ])
        .unwrap();
        // Both plays loop on s1 forever; the best row there pays 2.
        assert_eq!(best_response_value_p1(&game, &skewed).unwrap(), vec![int(2), int(2)]);
    }

    #[test]
    fn p2_best_response_matches_pure_enumeration() {
        let game = fixtures::absorbing_game();
        let f = StationaryStrategy::new(vec![
            vec![int(1), int(0)],
            vec![rat(1, 2), rat(1, 2)],
        ])
        .unwrap();
        let brp2 = best_response_value_p2(&game, &f).unwrap();
        assert_eq!(brp2, oracle_min_over_pure_g(&game, &f));
        assert_eq!(brp2, vec![int(1), int(1)]);
    }

    #[test]
    fn p2_best_response_exploits_uneven_rows() {
        let game = fixtures::three_state_game();
        let f = StationaryStrategy::pure(&game.action_counts(Player::One), &[0, 0, 0]);
        let brp2 = best_response_value_p2(&game, &f).unwrap();
        assert_eq!(brp2, oracle_min_over_pure_g(&game, &f));
        // Against row 1 everywhere, steering s1 into s3 and playing the
        // cheaper diagonal entries caps every start at the s3 payoff.
        assert_eq!(brp2, vec![int(-1), int(0), int(-1)]);
    }

    fn oracle_min_over_pure_g(game: &StochasticGame, f: &StationaryStrategy) -> ValueVector {
        let profiles = pure_profiles(&game.action_counts(Player::Two));
        let mut best: Option<ValueVector> = None;
        for picks in profiles {
            let g = StationaryStrategy::pure(&game.action_counts(Player::Two), &picks);
            let phi = limiting_average_payoff(game, f, &g).unwrap();
            best = Some(match best {
                None => phi,
                Some(acc) => acc
                    .into_iter()
                    .zip(phi)
                    .map(|(a, b)| if b < a { b } else { a })
                    .collect(),
            });
        }
        best.unwrap()
    }

    #[test]
    fn verifies_optimal_pair_in_absorbing_game() {
        let game = fixtures::absorbing_game();
        let f = StationaryStrategy::new(vec![
            vec![int(1), int(0)],
            vec![rat(1, 2), rat(1, 2)],
        ])
        .unwrap();
        let g = uniform(&game, Player::Two);
        let report = verify_optimal_undiscounted(&game, &f, &g).unwrap();
        assert!(report.optimal);
        assert_eq!(report.value, vec![int(1), int(1)]);
        assert!(report.p1_gap.iter().all(Rational::is_zero));
        assert!(report.p2_gap.iter().all(Rational::is_zero));
    }

    #[test]
    fn verifies_optimal_pair_in_symmetric_game() {
        let game = fixtures::symmetric_game();
        let f = uniform(&game, Player::One);
        let g = uniform(&game, Player::Two);
        let report = verify_optimal_undiscounted(&game, &f, &g).unwrap();
        assert!(report.optimal);
        assert_eq!(report.value, vec![int(1), int(1)]);
    }

    #[test]
    fn flags_profitable_deviation_with_positive_gap() {
        let game = fixtures::symmetric_game();
        let f = StationaryStrategy::pure(&game.action_counts(Player::One), &[0, 0]);
        let g = uniform(&game, Player::Two);
        let report = verify_optimal_undiscounted(&game, &f, &g).unwrap();
        assert!(!report.optimal);
        // Pinning player 1 to row 1 lets player 2 steer into s1 and answer
        // with column 2 for a stage payoff of 0.
        assert!(report.p2_gap.iter().any(|gap| gap > &Rational::zero()));
        assert!(report.p1_gap.iter().all(Rational::is_zero));
    }

    #[test]
    fn gain_bias_satisfies_defining_identities() {
        let q = vec![
            vec![rat(1, 2), rat(1, 2), int(0)],
            vec![int(0), int(0), int(1)],
            vec![int(0), int(1), int(0)],
        ];
        let r = vec![int(4), int(1), int(3)];
        let (rho, h) = gain_bias(&q, &r).unwrap();

        let star = chains::cesaro_limit(&q).unwrap();
        assert_eq!(rho, linalg::mat_vec(star.matrix(), &r));
        for s in 0..3 {
            let flow: Rational = (0..3).map(|t| &q[s][t] * &h[t]).sum();
            assert_eq!(&h[s] - &flow, &r[s] - &rho[s]);
        }
        // s2 is the lowest state of the only recurrent class {s2, s3}.
        assert_eq!(h[1], int(0));
    }

    #[test]
    fn pure_profiles_enumerate_lexicographically() {
        assert_eq!(
            pure_profiles(&[2, 3]),
            vec![
                vec![0, 0],
                vec![0, 1],
                vec![0, 2],
                vec![1, 0],
                vec![1, 1],
                vec![1, 2],
            ]
        );
        assert_eq!(pure_profiles(&[]), vec![Vec::<usize>::new()]);
    }
}
