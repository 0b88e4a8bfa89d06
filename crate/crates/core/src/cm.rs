//! Completely-mixed analysis.
//!
//! A matrix game is completely mixed when every optimal strategy of both
//! players is strictly positive; a stochastic game inherits the notion
//! through its stationary optimal strategies. This module certifies the
//! property exactly for discounted play (per-state auxiliary games at the
//! exact value vector) and for limiting-average play (exhaustive search over
//! optimal-strategy supports), drives the vanishing-discount pipeline that
//! produces certified undiscounted optima, and provides verifiers for the
//! structural claims connecting the discounted and undiscounted regimes.

use crate::average::{self, UndiscountedVerification};
use crate::chains;
use crate::discounted::{self, Discount, DiscountedSolution};
use crate::linalg::{self, Matrix};
use crate::lp::{self, Constraint, LinearProgram, LpOutcome, Sense};
use crate::matrix_game::{self, CmCertificate};
use crate::model::{GameError, Player, StationaryStrategy, StochasticGame, ValueVector};
use crate::rational::Rational;
use num_bigint::BigInt;
use num_traits::{One, Zero};

/// Environment variable that overrides the enumeration guard limit.
pub const GUARD_ENV_VAR: &str = "CMSTOCH_GUARD";

const DEFAULT_GUARD_LIMIT: u64 = 1_000_000;

/// Cap on the exhaustive support enumeration behind undiscounted CM checks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Guard {
    limit: u64,
}

impl Default for Guard {
    fn default() -> Self {
        Guard { limit: DEFAULT_GUARD_LIMIT }
    }
}

impl Guard {
    pub fn new(limit: u64) -> Self {
        Guard { limit }
    }

    /// Reads the limit from `CMSTOCH_GUARD`, falling back to the default
    /// when the variable is unset.
    pub fn from_env() -> Result<Self, GameError> {
        match std::env::var(GUARD_ENV_VAR) {
            Ok(raw) => raw.trim().parse::<u64>().map(Guard::new).map_err(|_| {
                GameError::InvalidArgument(format!(
                    "{GUARD_ENV_VAR} must be an unsigned integer, got {raw:?}"
                ))
            }),
            Err(std::env::VarError::NotPresent) => Ok(Guard::default()),
            Err(e) => Err(GameError::InvalidArgument(format!("{GUARD_ENV_VAR}: {e}"))),
        }
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn check(&self, needed: u128) -> Result<(), GameError> {
        if needed > u128::from(self.limit) {
            Err(GameError::GuardExceeded { needed, limit: self.limit })
        } else {
            Ok(())
        }
    }
}

/// Settings shared by the undiscounted analyses.
#[derive(Clone, Debug)]
pub struct CmOptions {
    /// Discount schedule for the vanishing-discount pipeline.
    pub schedule: Vec<Discount>,
    /// Tolerance for the final normalized values against the certified
    /// limit.
    pub value_tol: Rational,
    pub guard: Guard,
}

impl Default for CmOptions {
    fn default() -> Self {
        CmOptions {
            schedule: default_schedule(20),
            value_tol: default_value_tol(),
            guard: Guard::default(),
        }
    }
}

fn pow2(exp: u32) -> BigInt {
    BigInt::one() << exp
}

/// `β_n = 1 − 2⁻ⁿ` for `n = 1..=n_max`.
pub fn default_schedule(n_max: u32) -> Vec<Discount> {
    (1..=n_max)
        .map(|n| {
            let denom = pow2(n);
            Discount::new(Rational::new(&denom - BigInt::one(), denom))
                .expect("schedule betas lie in [0, 1)")
        })
        .collect()
}

/// Default β grid `{1/2, 3/4, 9/10, 99/100, 999/1000}`.
pub fn default_beta_grid() -> Vec<Discount> {
    [(1, 2), (3, 4), (9, 10), (99, 100), (999, 1000)]
        .into_iter()
        .map(|(n, d)| {
            Discount::new(Rational::new(BigInt::from(n), BigInt::from(d)))
                .expect("grid betas lie in [0, 1)")
        })
        .collect()
}

/// `2⁻¹⁰`, the default agreement tolerance for normalized values.
pub fn default_value_tol() -> Rational {
    Rational::new(BigInt::one(), pow2(10))
}

fn cauchy_tol() -> Rational {
    Rational::new(BigInt::one(), pow2(20))
}

/// An optimal strategy exhibiting the failure of complete mixing.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CmWitness {
    pub player: Player,
    pub strategy: StationaryStrategy,
    /// `(state, action)` of a vanishing coordinate, when the witness has
    /// one.
    pub zero_coordinate: Option<(usize, usize)>,
}

/// Per-state CM certification of a discounted game at the exact values.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StateCm {
    pub state: usize,
    pub auxiliary: Matrix,
    pub value: Rational,
    pub certificate: CmCertificate,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiscountedCmReport {
    pub beta: Rational,
    pub solution: DiscountedSolution,
    pub states: Vec<StateCm>,
    /// Conjunction of the per-state certificates.
    pub completely_mixed: bool,
    pub witness: Option<CmWitness>,
}

/// Decides whether the β-discounted game is completely mixed.
///
/// Solves exactly, then runs the matrix-game CM certificate on every
/// auxiliary game `R_β(s)` at the exact value vector; the stationary optima
/// of the discounted game are exactly the per-state optima of these
/// auxiliary games, so the game is CM iff every state is.
pub fn check_cm_discounted(
    game: &StochasticGame,
    beta: &Discount,
) -> Result<DiscountedCmReport, GameError> {
    let solution = discounted::solve_discounted_exact(game, beta)?;
    let mut states = Vec::with_capacity(game.state_count());
    let mut per_state = Vec::with_capacity(game.state_count());
    for s in 0..game.state_count() {
        let auxiliary = discounted::auxiliary_matrix(game, s, beta, &solution.values)?;
        let sol = matrix_game::solve_matrix_game(&auxiliary)?;
        states.push(StateCm {
            state: s,
            auxiliary,
            value: sol.value.clone(),
            certificate: sol.certificate.clone(),
        });
        per_state.push(sol);
    }
    let completely_mixed = states.iter().all(|s| s.certificate.completely_mixed);
    let witness = if completely_mixed {
        None
    } else {
        Some(discounted_witness(&solution, &per_state)?)
    };
    Ok(DiscountedCmReport {
        beta: beta.beta().clone(),
        solution,
        states,
        completely_mixed,
        witness,
    })
}

/// Finds an optimal stationary strategy with a zero coordinate by scanning
/// the optimal vertices of every auxiliary game. One always exists when some
/// state fails certification: a non-square or non-unique optimal set forces
/// a vanishing coordinate at one of its vertices.
fn discounted_witness(
    solution: &DiscountedSolution,
    per_state: &[matrix_game::MatrixGameSolution],
) -> Result<CmWitness, GameError> {
    for (s, sol) in per_state.iter().enumerate() {
        if sol.certificate.completely_mixed {
            continue;
        }
        for (player, vertices) in
            [(Player::One, &sol.p1_vertices), (Player::Two, &sol.p2_vertices)]
        {
            for vertex in vertices {
                let Some(action) = vertex.iter().position(Rational::is_zero) else {
                    continue;
                };
                let base = match player {
                    Player::One => &solution.p1,
                    Player::Two => &solution.p2,
                };
                let mut rows: Vec<Vec<Rational>> =
                    base.rows().iter().map(|r| r.to_vec()).collect();
                rows[s] = vertex.clone();
                let strategy = StationaryStrategy::new(rows)
                    .map_err(|e| GameError::Internal(e.to_string()))?;
                return Ok(CmWitness {
                    player,
                    strategy,
                    zero_coordinate: Some((s, action)),
                });
            }
        }
    }
    Err(GameError::Internal(
        "non-CM certificate without a zero-coordinate optimal vertex".into(),
    ))
}

/// One β of the vanishing-discount schedule.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SchedulePoint {
    pub beta: Rational,
    pub values: ValueVector,
    /// `(1 − β) · values`.
    pub normalized: ValueVector,
    pub p1: StationaryStrategy,
    pub p2: StationaryStrategy,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CertificationMethod {
    /// The strategies at the final schedule point verified as optimal.
    LiteralPair,
    /// Player 1's strategy was rebuilt by the pure-response program; the
    /// final schedule point supplied player 2's.
    ReconstructedP1,
    /// Both strategies were rebuilt: player 1 from the pure-response
    /// program, player 2 from the support-pattern search at the exact value.
    ReconstructedPair,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LimitStatus {
    Certified {
        method: CertificationMethod,
        /// Exact limiting-average value vector of the certified pair.
        value: ValueVector,
        p1: StationaryStrategy,
        p2: StationaryStrategy,
        verification: UndiscountedVerification,
    },
    Inconclusive {
        reason: String,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VanishingDiscountTrace {
    pub points: Vec<SchedulePoint>,
    /// Supports stable over the last three points and consecutive
    /// normalized values within the declared tolerance.
    pub converged: bool,
    /// Strategy coordinates additionally Cauchy within `2⁻²⁰`; when false,
    /// the literal final pair is not trusted as the limit and certification
    /// goes straight to reconstruction.
    pub strategies_settled: bool,
    pub status: LimitStatus,
}

impl VanishingDiscountTrace {
    pub fn certified_value(&self) -> Option<&ValueVector> {
        match &self.status {
            LimitStatus::Certified { value, .. } => Some(value),
            LimitStatus::Inconclusive { .. } => None,
        }
    }
}

/// Follows the exact discounted solutions along `schedule` and tries to
/// certify their limit as an undiscounted optimal pair.
///
/// Convergence is declared when strategy supports are stable over the last
/// three points and consecutive normalized values agree within the declared
/// tolerance. The final pair is then verified exactly; failing that,
/// player 1's strategy is rebuilt from the pure-response program, and
/// finally player 2's from the support-pattern search at the exact value.
/// Anything short of a verified pair is reported as inconclusive, never as
/// a guessed limit.
pub fn vanishing_discount(
    game: &StochasticGame,
    options: &CmOptions,
) -> Result<VanishingDiscountTrace, GameError> {
    game.require_p2_controlled()?;
    let schedule = &options.schedule;
    if schedule.is_empty() {
        return Err(GameError::InvalidArgument("schedule must be nonempty".into()));
    }
    if schedule.windows(2).any(|w| w[0] >= w[1]) {
        return Err(GameError::InvalidArgument(
            "schedule betas must be strictly increasing".into(),
        ));
    }

    let mut points = Vec::with_capacity(schedule.len());
    for beta in schedule {
        let sol = discounted::solve_discounted_exact(game, beta)?;
        let normalized = discounted::normalized_values(&sol.values, beta);
        points.push(SchedulePoint {
            beta: beta.beta().clone(),
            values: sol.values,
            normalized,
            p1: sol.p1,
            p2: sol.p2,
        });
    }

    let converged = schedule_converged(&points, &options.value_tol);
    let strategies_settled = converged && coordinates_settled(&points);
    let status = if converged {
        certify_limit(game, &points, &options.value_tol, &options.guard, strategies_settled)?
    } else {
        LimitStatus::Inconclusive {
            reason: "strategy supports or normalized values did not stabilize \
                     over the schedule"
                .into(),
        }
    };

    Ok(VanishingDiscountTrace { points, converged, strategies_settled, status })
}

fn schedule_converged(points: &[SchedulePoint], value_tol: &Rational) -> bool {
    if points.len() < 3 {
        return false;
    }
    let last = &points[points.len() - 1];
    let stable_supports = points[points.len() - 3..].iter().all(|p| {
        p.p1.supports() == last.p1.supports() && p.p2.supports() == last.p2.supports()
    });
    let prev = &points[points.len() - 2];
    let cauchy =
        linalg::norm_inf(&linalg::vec_sub(&last.normalized, &prev.normalized)) <= *value_tol;
    stable_supports && cauchy
}

fn coordinates_settled(points: &[SchedulePoint]) -> bool {
    let last = &points[points.len() - 1];
    let prev = &points[points.len() - 2];
    let tol = cauchy_tol();
    let settled = |a: &StationaryStrategy, b: &StationaryStrategy| {
        a.rows().iter().zip(b.rows()).all(|(ra, rb)| {
            ra.iter().zip(rb).all(|(pa, pb)| {
                let diff = pa - pb;
                -&tol <= diff && diff <= tol
            })
        })
    };
    settled(&last.p1, &prev.p1) && settled(&last.p2, &prev.p2)
}

fn certify_limit(
    game: &StochasticGame,
    points: &[SchedulePoint],
    value_tol: &Rational,
    guard: &Guard,
    strategies_settled: bool,
) -> Result<LimitStatus, GameError> {
    let last = &points[points.len() - 1];

    if strategies_settled {
        let literal = average::verify_optimal_undiscounted(game, &last.p1, &last.p2)?;
        if literal.optimal {
            return Ok(finish_certification(
                CertificationMethod::LiteralPair,
                last,
                last.p1.clone(),
                last.p2.clone(),
                literal,
                value_tol,
            ));
        }
    }

    guard.check(pure_profile_count(&game.action_counts(Player::Two)))?;
    let (p1_rebuilt, value) = reconstruct_p1(game)?;
    let verification = average::verify_optimal_undiscounted(game, &p1_rebuilt, &last.p2)?;
    if verification.optimal {
        return Ok(finish_certification(
            CertificationMethod::ReconstructedP1,
            last,
            p1_rebuilt,
            last.p2.clone(),
            verification,
            value_tol,
        ));
    }

    guard.check(p2_pattern_count(game))?;
    if let Some(p2_rebuilt) = reconstruct_p2(game, &value)? {
        let verification =
            average::verify_optimal_undiscounted(game, &p1_rebuilt, &p2_rebuilt)?;
        if verification.optimal {
            return Ok(finish_certification(
                CertificationMethod::ReconstructedPair,
                last,
                p1_rebuilt,
                p2_rebuilt,
                verification,
                value_tol,
            ));
        }
    }

    Ok(LimitStatus::Inconclusive {
        reason: "no limit-candidate pair verified as undiscounted-optimal".into(),
    })
}

fn finish_certification(
    method: CertificationMethod,
    last: &SchedulePoint,
    p1: StationaryStrategy,
    p2: StationaryStrategy,
    verification: UndiscountedVerification,
    value_tol: &Rational,
) -> LimitStatus {
    let drift = linalg::norm_inf(&linalg::vec_sub(&last.normalized, &verification.value));
    if drift > *value_tol {
        return LimitStatus::Inconclusive {
            reason: format!(
                "certified pair value differs from the final normalized values \
                 by {drift}, beyond the tolerance"
            ),
        };
    }
    LimitStatus::Certified {
        method,
        value: verification.value.clone(),
        p1,
        p2,
        verification,
    }
}

/// Rebuilds an optimal player-2 strategy at the exact value vector: the
/// first support pattern whose occupation program is feasible supplies it.
/// Stationary optima exist for the controller, so the search over all
/// patterns cannot come back empty unless `value` is wrong.
fn reconstruct_p2(
    game: &StochasticGame,
    value: &[Rational],
) -> Result<Option<StationaryStrategy>, GameError> {
    for pattern in all_patterns(&game.action_counts(Player::Two)) {
        if let Some(g) = pattern_probe(game, value, &pattern)? {
            return Ok(Some(g));
        }
    }
    Ok(None)
}

fn pure_profile_count(counts: &[usize]) -> u128 {
    counts.iter().fold(1u128, |acc, &m| acc.saturating_mul(m as u128))
}

/// Cesàro matrices of every pure stationary policy of player 2, in
/// lexicographic profile order.
fn pure_p2_data(game: &StochasticGame) -> Result<Vec<(Vec<usize>, Matrix)>, GameError> {
    let counts = game.action_counts(Player::Two);
    average::pure_profiles(&counts)
        .into_iter()
        .map(|profile| {
            let g = StationaryStrategy::pure(&counts, &profile);
            let q = game.transition_matrix(&g)?;
            let star = chains::cesaro_limit(&q)?;
            Ok((profile, star.into_matrix()))
        })
        .collect()
}

/// Recovers an optimal player-1 strategy and the value vector from the
/// pure-response program: maximise `Σ_s w(s)` over mixtures `f` subject to
/// `w(s) ≤ Φ(f, g)(s)` for every pure `g`. Player 2's best response is
/// attained at a pure policy, so feasible `w` are exactly the securable
/// amounts and the optimum is the game's value vector.
fn reconstruct_p1(
    game: &StochasticGame,
) -> Result<(StationaryStrategy, ValueVector), GameError> {
    let k = game.state_count();
    let data = pure_p2_data(game)?;

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
    let total_f: usize = (0..k).map(|s| game.m1(s)).sum();
    let n = total_f + k;

    let min_payoff = (0..k)
        .flat_map(|s| game.payoff(s).iter().flatten())
        .min()
        .expect("games have payoffs")
        .clone();
    let shift = if min_payoff < Rational::zero() { -min_payoff } else { Rational::zero() }
        + Rational::one();

    let mut constraints = Vec::new();
    for (profile, star) in &data {
        for s in 0..k {
            let mut coeffs = vec![Rational::zero(); n];
            for t in 0..k {
                let weight = &star[s][t];
                if weight.is_zero() {
                    continue;
                }
                let j = profile[t];
                for i in 0..game.m1(t) {
                    coeffs[offsets[t] + i] += weight * &game.payoff(t)[i][j];
                }
            }
            coeffs[total_f + s] = -Rational::one();
            constraints.push(Constraint::ge(coeffs, -shift.clone()));
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
    for s in 0..k {
        objective[total_f + s] = Rational::one();
    }

    let program = LinearProgram { sense: Sense::Maximize, objective, constraints };
    let LpOutcome::Optimal(sol) = lp::solve(&program) else {
        return Err(GameError::Internal(
            "pure-response program must have an optimal solution".into(),
        ));
    };

    let rows: Vec<Vec<Rational>> =
        (0..k).map(|s| sol.x[offsets[s]..offsets[s] + game.m1(s)].to_vec()).collect();
    let values: ValueVector = (0..k).map(|s| &sol.x[total_f + s] - &shift).collect();
    let strategy =
        StationaryStrategy::new(rows).map_err(|e| GameError::Internal(e.to_string()))?;
    Ok((strategy, values))
}

/// CM verdict for limiting-average play.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UndiscountedCmReport {
    pub value: ValueVector,
    pub p1_optimal: StationaryStrategy,
    pub p2_optimal: StationaryStrategy,
    pub pair_verification: UndiscountedVerification,
    pub p1_completely_mixed: bool,
    pub p2_completely_mixed: bool,
    pub completely_mixed: bool,
    pub p1_witness: Option<CmWitness>,
    pub p2_witness: Option<CmWitness>,
    pub trace: VanishingDiscountTrace,
}

/// Decides whether the undiscounted game is completely mixed: no optimal
/// stationary strategy of either player may have a zero coordinate.
///
/// The value and a certified optimal pair come from [`vanishing_discount`].
/// Player 1's optimal set is cut out by finitely many linear constraints
/// (`Φ(f, g) ≥ v` against every pure `g`), so each potential zero coordinate
/// is probed by one face-feasibility program. Player 2 controls the chain,
/// so optimality of `g` is relative to the chain it induces; every proper
/// support pattern is checked by an occupation-measure program over the
/// pattern's recurrent classes, with harmonicity pinning the transient part.
/// Witnesses are re-verified through [`average::verify_optimal_undiscounted`]
/// before being reported.
pub fn check_cm_undiscounted(
    game: &StochasticGame,
    options: &CmOptions,
) -> Result<UndiscountedCmReport, GameError> {
    game.require_p2_controlled()?;
    let pattern_product = support_pattern_product(game);
    options.guard.check(pattern_product)?;

    let trace = vanishing_discount(game, options)?;
    let LimitStatus::Certified { value, p1, p2, verification, .. } = trace.status.clone()
    else {
        let LimitStatus::Inconclusive { reason } = &trace.status else { unreachable!() };
        return Err(GameError::Inconclusive(format!(
            "cannot certify the undiscounted value: {reason}"
        )));
    };

    let p1_witness = p1_zero_witness(game, &value, &p2)?;
    let p2_witness = p2_zero_witness(game, &value, &p1)?;

    let p1_cm = p1_witness.is_none();
    let p2_cm = p2_witness.is_none();
    Ok(UndiscountedCmReport {
        value,
        p1_optimal: p1,
        p2_optimal: p2,
        pair_verification: verification,
        p1_completely_mixed: p1_cm,
        p2_completely_mixed: p2_cm,
        completely_mixed: p1_cm && p2_cm,
        p1_witness,
        p2_witness,
        trace,
    })
}

/// Product of per-player support-pattern counts, the guarded size of the
/// exhaustive search.
fn support_pattern_product(game: &StochasticGame) -> u128 {
    let mut product = 1u128;
    for player in [Player::One, Player::Two] {
        for m in game.action_counts(player) {
            let patterns = (1u128 << m.min(126)) - 1;
            product = product.saturating_mul(patterns);
        }
    }
    product
}

fn p2_pattern_count(game: &StochasticGame) -> u128 {
    game.action_counts(Player::Two)
        .into_iter()
        .fold(1u128, |acc, m| acc.saturating_mul((1u128 << m.min(126)) - 1))
}

/// Searches for an optimal `f` with a zero coordinate by probing every face
/// `f_i(s) = 0` of player 1's optimal set.
fn p1_zero_witness(
    game: &StochasticGame,
    value: &[Rational],
    p2_optimal: &StationaryStrategy,
) -> Result<Option<CmWitness>, GameError> {
    let data = pure_p2_data(game)?;
    for s0 in 0..game.state_count() {
        if game.m1(s0) < 2 {
            continue;
        }
        for i0 in 0..game.m1(s0) {
            let Some(witness) = p1_face_probe(game, value, &data, s0, i0)? else {
                continue;
            };
            let check = average::verify_optimal_undiscounted(game, &witness, p2_optimal)?;
            if !check.optimal {
                return Err(GameError::Internal(format!(
                    "face-program strategy at state s{}, action {} failed verification",
                    s0 + 1,
                    i0 + 1
                )));
            }
            let zero = witness.first_zero_coordinate();
            return Ok(Some(CmWitness {
                player: Player::One,
                strategy: witness,
                zero_coordinate: zero,
            }));
        }
    }
    Ok(None)
}

fn p1_face_probe(
    game: &StochasticGame,
    value: &[Rational],
    data: &[(Vec<usize>, Matrix)],
    s0: usize,
    i0: usize,
) -> Result<Option<StationaryStrategy>, GameError> {
    let k = game.state_count();
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
    let n: usize = (0..k).map(|s| game.m1(s)).sum();

    let mut constraints = Vec::new();
    for (profile, star) in data {
        for s in 0..k {
            let mut coeffs = vec![Rational::zero(); n];
            for t in 0..k {
                let weight = &star[s][t];
                if weight.is_zero() {
                    continue;
                }
                let j = profile[t];
                for i in 0..game.m1(t) {
                    coeffs[offsets[t] + i] += weight * &game.payoff(t)[i][j];
                }
            }
            constraints.push(Constraint::ge(coeffs, value[s].clone()));
        }
    }
    for s in 0..k {
        let mut coeffs = vec![Rational::zero(); n];
        for i in 0..game.m1(s) {
            coeffs[offsets[s] + i] = Rational::one();
        }
        constraints.push(Constraint::eq(coeffs, Rational::one()));
    }
    let mut pin = vec![Rational::zero(); n];
    pin[offsets[s0] + i0] = Rational::one();
    constraints.push(Constraint::eq(pin, Rational::zero()));

    let program = LinearProgram {
        sense: Sense::Maximize,
        objective: vec![Rational::zero(); n],
        constraints,
    };
    match lp::solve(&program) {
        LpOutcome::Optimal(sol) => {
            let rows: Vec<Vec<Rational>> =
                (0..k).map(|s| sol.x[offsets[s]..offsets[s] + game.m1(s)].to_vec()).collect();
            Ok(Some(
                StationaryStrategy::new(rows)
                    .map_err(|e| GameError::Internal(e.to_string()))?,
            ))
        }
        LpOutcome::Infeasible => Ok(None),
        LpOutcome::Unbounded => {
            Err(GameError::Internal("bounded feasibility program reported unbounded".into()))
        }
    }
}

/// Searches for an optimal `g` with a zero coordinate by solving one
/// occupation-measure program per proper support pattern.
fn p2_zero_witness(
    game: &StochasticGame,
    value: &[Rational],
    p1_optimal: &StationaryStrategy,
) -> Result<Option<CmWitness>, GameError> {
    let counts = game.action_counts(Player::Two);
    for pattern in proper_patterns(&counts) {
        let Some(witness) = pattern_probe(game, value, &pattern)? else {
            continue;
        };
        let check = average::verify_optimal_undiscounted(game, p1_optimal, &witness)?;
        if !check.optimal {
            return Err(GameError::Internal(
                "support-pattern strategy failed verification".into(),
            ));
        }
        let zero = witness.first_zero_coordinate();
        return Ok(Some(CmWitness {
            player: Player::Two,
            strategy: witness,
            zero_coordinate: zero,
        }));
    }
    Ok(None)
}

/// All per-state nonempty action subsets, in ascending bitmask order
/// (state 1 varies slowest). The everywhere-full pattern comes last.
fn all_patterns(counts: &[usize]) -> Vec<Vec<Vec<usize>>> {
    let per_state: Vec<Vec<Vec<usize>>> = counts
        .iter()
        .map(|&m| {
            (1u32..(1 << m))
                .map(|mask| (0..m).filter(|j| mask & (1 << j) != 0).collect())
                .collect()
        })
        .collect();
    let mut stack: Vec<Vec<Vec<usize>>> = vec![Vec::new()];
    for options in &per_state {
        let mut next = Vec::with_capacity(stack.len() * options.len());
        for prefix in &stack {
            for choice in options {
                let mut pattern = prefix.clone();
                pattern.push(choice.clone());
                next.push(pattern);
            }
        }
        stack = next;
    }
    stack
}

/// [`all_patterns`] minus the everywhere-full pattern: the supports a
/// non-completely-mixed strategy could have.
fn proper_patterns(counts: &[usize]) -> Vec<Vec<Vec<usize>>> {
    all_patterns(counts)
        .into_iter()
        .filter(|pattern| {
            !pattern.iter().zip(counts).all(|(subset, &m)| subset.len() == m)
        })
        .collect()
}

/// Feasibility of an optimal `g` with support exactly `pattern`.
///
/// The chain structure of any such `g` is determined by the pattern alone:
/// recurrent classes are the closed strongly connected components of the
/// union chain. Per class, occupation variables `z(s,j) = π(s)g_j(s)` carry
/// balance, normalisation, and the averaged-reward cap `Σ m ≤ v`; transient
/// states carry `g` directly with `v` harmonic. All pattern coordinates are
/// pushed above a maximised `ε`, so feasibility with `ε > 0` reproduces the
/// pattern exactly and the assembled strategy is optimal by construction.
fn pattern_probe(
    game: &StochasticGame,
    value: &[Rational],
    pattern: &[Vec<usize>],
) -> Result<Option<StationaryStrategy>, GameError> {
    let k = game.state_count();
    let rep: Matrix = (0..k)
        .map(|s| {
            let subset = &pattern[s];
            let weight = Rational::new(BigInt::one(), BigInt::from(subset.len()));
            let mut row = vec![Rational::zero(); k];
            for &j in subset {
                for t in 0..k {
                    row[t] += &weight * &game.q_p2(s, j)[t];
                }
            }
            row
        })
        .collect();
    let decomposition = chains::decompose(&rep)?;

    for class in &decomposition.recurrent_classes {
        let head = &value[class[0]];
        if class.iter().any(|&s| &value[s] != head) {
            return Ok(None);
        }
    }

    // Variable layout: ε, then z(s,j) over recurrent states, then g(t,j)
    // over transient states, then the split pair (m⁺, m⁻) per recurrent
    // state.
    let recurrent: Vec<usize> =
        decomposition.recurrent_classes.iter().flatten().copied().collect();
    let transient = &decomposition.transient;

    let mut index = 1usize;
    let mut z_idx: Vec<Vec<Option<usize>>> = (0..k).map(|s| vec![None; game.m2(s)]).collect();
    for &s in &recurrent {
        for &j in &pattern[s] {
            z_idx[s][j] = Some(index);
            index += 1;
        }
    }
    let mut g_idx: Vec<Vec<Option<usize>>> = (0..k).map(|s| vec![None; game.m2(s)]).collect();
    for &t in transient {
        for &j in &pattern[t] {
            g_idx[t][j] = Some(index);
            index += 1;
        }
    }
    let mut m_idx: Vec<Option<usize>> = vec![None; k];
    for &s in &recurrent {
        m_idx[s] = Some(index);
        index += 2;
    }
    let n = index;
    let eps = 0usize;

    let mut constraints = Vec::new();
    for &s in &recurrent {
        for &j in &pattern[s] {
            let mut coeffs = vec![Rational::zero(); n];
            coeffs[z_idx[s][j].unwrap()] = Rational::one();
            coeffs[eps] = -Rational::one();
            constraints.push(Constraint::ge(coeffs, Rational::zero()));
        }
    }
    for &t in transient {
        for &j in &pattern[t] {
            let mut coeffs = vec![Rational::zero(); n];
            coeffs[g_idx[t][j].unwrap()] = Rational::one();
            coeffs[eps] = -Rational::one();
            constraints.push(Constraint::ge(coeffs, Rational::zero()));
        }
    }
    for class in &decomposition.recurrent_classes {
        let mut total = vec![Rational::zero(); n];
        for &s in class {
            for &j in &pattern[s] {
                total[z_idx[s][j].unwrap()] = Rational::one();
            }
        }
        constraints.push(Constraint::eq(total, Rational::one()));

        for &t in class {
            let mut coeffs = vec![Rational::zero(); n];
            for &s in class {
                for &j in &pattern[s] {
                    coeffs[z_idx[s][j].unwrap()] += &game.q_p2(s, j)[t];
                }
            }
            for &j in &pattern[t] {
                coeffs[z_idx[t][j].unwrap()] -= Rational::one();
            }
            constraints.push(Constraint::eq(coeffs, Rational::zero()));
        }

        let mut cap = vec![Rational::zero(); n];
        for &s in class {
            let m = m_idx[s].unwrap();
            cap[m] = Rational::one();
            cap[m + 1] = -Rational::one();
        }
        constraints.push(Constraint::le(cap, value[class[0]].clone()));
    }
    for &s in &recurrent {
        let m = m_idx[s].unwrap();
        for i in 0..game.m1(s) {
            let mut coeffs = vec![Rational::zero(); n];
            for &j in &pattern[s] {
                coeffs[z_idx[s][j].unwrap()] = game.payoff(s)[i][j].clone();
            }
            coeffs[m] -= Rational::one();
            coeffs[m + 1] += Rational::one();
            constraints.push(Constraint::le(coeffs, Rational::zero()));
        }
    }
    for &t in transient {
        let mut total = vec![Rational::zero(); n];
        for &j in &pattern[t] {
            total[g_idx[t][j].unwrap()] = Rational::one();
        }
        constraints.push(Constraint::eq(total, Rational::one()));

        let mut harmonic = vec![Rational::zero(); n];
        for &j in &pattern[t] {
            harmonic[g_idx[t][j].unwrap()] = linalg::dot(game.q_p2(t, j), value);
        }
        constraints.push(Constraint::eq(harmonic, value[t].clone()));
    }

    let mut objective = vec![Rational::zero(); n];
    objective[eps] = Rational::one();
    let program = LinearProgram { sense: Sense::Maximize, objective, constraints };
    let sol = match lp::solve(&program) {
        LpOutcome::Optimal(sol) => sol,
        LpOutcome::Infeasible => return Ok(None),
        LpOutcome::Unbounded => {
            return Err(GameError::Internal(
                "occupation program is bounded by construction".into(),
            ))
        }
    };
    if sol.x[eps] <= Rational::zero() {
        return Ok(None);
    }

    let mut rows: Vec<Vec<Rational>> = Vec::with_capacity(k);
    for s in 0..k {
        let mut row = vec![Rational::zero(); game.m2(s)];
        if transient.contains(&s) {
            for &j in &pattern[s] {
                row[j] = sol.x[g_idx[s][j].unwrap()].clone();
            }
        } else {
            let mass: Rational =
                pattern[s].iter().map(|&j| sol.x[z_idx[s][j].unwrap()].clone()).sum();
            if mass.is_zero() {
                return Err(GameError::Internal(
                    "recurrent state received zero occupation mass".into(),
                ));
            }
            for &j in &pattern[s] {
                row[j] = &sol.x[z_idx[s][j].unwrap()] / &mass;
            }
        }
        rows.push(row);
    }
    Ok(Some(
        StationaryStrategy::new(rows).map_err(|e| GameError::Internal(e.to_string()))?,
    ))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BetaSweepEntry {
    pub beta: Rational,
    pub completely_mixed: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BetaSweep {
    pub entries: Vec<BetaSweepEntry>,
    /// Smallest tested β from which every later tested β is CM.
    pub cm_from: Option<Rational>,
    pub all_cm: bool,
}

/// Runs [`check_cm_discounted`] across `grid` and locates the empirical
/// threshold after which every tested discount factor is CM.
pub fn beta_threshold_search(
    game: &StochasticGame,
    grid: &[Discount],
) -> Result<BetaSweep, GameError> {
    if grid.is_empty() {
        return Err(GameError::InvalidArgument("grid must be nonempty".into()));
    }
    if grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(GameError::InvalidArgument(
            "grid betas must be strictly increasing".into(),
        ));
    }
    let mut entries = Vec::with_capacity(grid.len());
    for beta in grid {
        let report = check_cm_discounted(game, beta)?;
        entries.push(BetaSweepEntry {
            beta: beta.beta().clone(),
            completely_mixed: report.completely_mixed,
        });
    }
    let first_stable = entries
        .iter()
        .rposition(|e| !e.completely_mixed)
        .map_or(0, |i| i + 1);
    let cm_from = entries.get(first_stable).map(|e| e.beta.clone());
    let all_cm = first_stable == 0;
    Ok(BetaSweep { entries, cm_from, all_cm })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymmetricCmReport {
    /// Hypotheses hold: player-2 control, symmetric payoff matrices, and a
    /// completely mixed undiscounted game.
    pub applicable: bool,
    pub symmetric: bool,
    /// Undiscounted CM flag, when the hypotheses made it worth computing.
    pub undiscounted_cm: Option<bool>,
    pub per_state_cm: Vec<bool>,
    pub pass: bool,
}

/// Checks the symmetric-case conclusion: a completely mixed undiscounted
/// game with symmetric per-state payoff matrices must have every `R(s)`
/// completely mixed as a standalone matrix game. Vacuously passes when the
/// hypotheses fail.
pub fn verify_symmetric_cm(
    game: &StochasticGame,
    options: &CmOptions,
) -> Result<SymmetricCmReport, GameError> {
    let symmetric = (0..game.state_count()).all(|s| {
        let m = game.payoff(s);
        m.len() == m[0].len()
            && (0..m.len()).all(|i| (0..m.len()).all(|j| m[i][j] == m[j][i]))
    });
    let mut per_state_cm = Vec::with_capacity(game.state_count());
    for s in 0..game.state_count() {
        per_state_cm.push(matrix_game::is_completely_mixed(game.payoff(s))?.completely_mixed);
    }

    let undiscounted_cm = if symmetric && game.is_p2_controlled() {
        Some(check_cm_undiscounted(game, options)?.completely_mixed)
    } else {
        None
    };
    let applicable = symmetric && undiscounted_cm == Some(true);
    let pass = !applicable || per_state_cm.iter().all(|&b| b);
    Ok(SymmetricCmReport { applicable, symmetric, undiscounted_cm, per_state_cm, pass })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NonzeroThresholdState {
    pub state: usize,
    pub v: Rational,
    /// Whether `v_β(s) ≠ 0`, per grid point.
    pub v_beta_nonzero: Vec<bool>,
    /// Smallest grid index from which every later `v_β(s)` is nonzero.
    pub threshold_index: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NonzeroThresholdReport {
    pub grid: Vec<Rational>,
    pub per_state: Vec<NonzeroThresholdState>,
    /// States with `v(s) = 0` yet `v_β(s) ≠ 0` somewhere on the grid;
    /// informational, not failures.
    pub converse_violations: Vec<usize>,
    pub pass: bool,
}

/// Checks that every state with nonzero undiscounted value has nonzero
/// discounted values from some tested threshold onward, and reports converse
/// violations.
pub fn verify_nonzero_threshold(
    game: &StochasticGame,
    grid: &[Discount],
    options: &CmOptions,
) -> Result<NonzeroThresholdReport, GameError> {
    game.require_p2_controlled()?;
    if grid.is_empty() {
        return Err(GameError::InvalidArgument("grid must be nonempty".into()));
    }
    let trace = vanishing_discount(game, options)?;
    let Some(value) = trace.certified_value() else {
        let LimitStatus::Inconclusive { reason } = &trace.status else { unreachable!() };
        return Err(GameError::Inconclusive(format!(
            "cannot certify the undiscounted value: {reason}"
        )));
    };

    let mut grid_values = Vec::with_capacity(grid.len());
    for beta in grid {
        grid_values.push(discounted::solve_discounted_exact(game, beta)?.values);
    }

    let mut per_state = Vec::with_capacity(game.state_count());
    let mut converse_violations = Vec::new();
    let mut pass = true;
    for s in 0..game.state_count() {
        let v_beta_nonzero: Vec<bool> =
            grid_values.iter().map(|vals| !vals[s].is_zero()).collect();
        let threshold_index = v_beta_nonzero
            .iter()
            .rposition(|&nz| !nz)
            .map_or(Some(0), |i| if i + 1 < v_beta_nonzero.len() { Some(i + 1) } else { None });
        if !value[s].is_zero() && threshold_index.is_none() {
            pass = false;
        }
        if value[s].is_zero() && v_beta_nonzero.iter().any(|&nz| nz) {
            converse_violations.push(s);
        }
        per_state.push(NonzeroThresholdState {
            state: s,
            v: value[s].clone(),
            v_beta_nonzero,
            threshold_index,
        });
    }
    Ok(NonzeroThresholdReport {
        grid: grid.iter().map(|b| b.beta().clone()).collect(),
        per_state,
        converse_violations,
        pass,
    })
}
