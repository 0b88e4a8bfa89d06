//! Exact one-shot matrix games.
//!
//! The value comes from a pair of exact LPs (maximizer and minimizer sides,
//! checked equal). The optimal-strategy polytopes are enumerated completely:
//! a vertex is determined by which constraints are active, so trying every
//! (zero-set, tight-column-set) pair and keeping the feasible unique
//! solutions yields every extreme optimal strategy. That makes uniqueness and
//! strict positivity — the two ingredients of complete mixing — decidable.

use crate::linalg::{self, LinearSolve, Matrix};
use crate::lp::{Constraint, LinearProgram, LpOutcome, Sense};
use crate::model::GameError;
use crate::rational::Rational;
use num_traits::{One, Zero};

/// Largest `rows + cols` accepted by the vertex enumeration.
pub const ENUMERATION_LIMIT: usize = 12;

/// Why a matrix game fails to be completely mixed, in check order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CmFailure {
    NotSquare,
    P1NotUnique { vertices: usize },
    P2NotUnique { vertices: usize },
    P1ZeroCoordinate { index: usize },
    P2ZeroCoordinate { index: usize },
}

/// Structured outcome of the complete-mixing test: squareness, uniqueness of
/// each player's optimal strategy, and per-coordinate strict positivity of
/// the canonical (lexicographically smallest) optimal vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CmCertificate {
    pub rows: usize,
    pub cols: usize,
    pub square: bool,
    pub p1_vertex_count: usize,
    pub p2_vertex_count: usize,
    pub p1_positive: Vec<bool>,
    pub p2_positive: Vec<bool>,
    pub completely_mixed: bool,
    pub failure: Option<CmFailure>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatrixGameSolution {
    pub value: Rational,
    /// Extreme optimal strategies of the maximizer, sorted lexicographically.
    pub p1_vertices: Vec<Vec<Rational>>,
    /// Extreme optimal strategies of the minimizer, sorted lexicographically.
    pub p2_vertices: Vec<Vec<Rational>>,
    pub completely_mixed: bool,
    pub certificate: CmCertificate,
}

impl MatrixGameSolution {
    /// Lexicographically smallest optimal maximizer vertex.
    pub fn canonical_p1(&self) -> &Vec<Rational> {
        &self.p1_vertices[0]
    }

    /// Lexicographically smallest optimal minimizer vertex.
    pub fn canonical_p2(&self) -> &Vec<Rational> {
        &self.p2_vertices[0]
    }
}

fn check_matrix(m: &Matrix) -> Result<(usize, usize), GameError> {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    if rows == 0 || cols == 0 || m.iter().any(|r| r.len() != cols) {
        return Err(GameError::BadMatrix);
    }
    Ok((rows, cols))
}

fn positivity_shift(m: &Matrix) -> Rational {
    let min = m.iter().flatten().min().expect("nonempty matrix");
    if *min < Rational::one() {
        Rational::one() - min
    } else {
        Rational::zero()
    }
}

/// Exact minimax value together with one optimal strategy per player (basic
/// optimal solutions of the two LPs; deterministic but not canonical).
pub fn optimal_strategies_lp(
    m: &Matrix,
) -> Result<(Rational, Vec<Rational>, Vec<Rational>), GameError> {
    let (rows, cols) = check_matrix(m)?;
    let shift = positivity_shift(m);
    let shifted: Matrix =
        m.iter().map(|r| r.iter().map(|v| v + &shift).collect()).collect();

    // Maximizer: variables (x, w), maximize w subject to xᵀM' ≥ w·eᵀ, Σx = 1.
    let mut constraints = Vec::with_capacity(cols + 1);
    for j in 0..cols {
        let mut coeffs: Vec<Rational> = (0..rows).map(|i| shifted[i][j].clone()).collect();
        coeffs.push(-Rational::one());
        constraints.push(Constraint::ge(coeffs, Rational::zero()));
    }
    let mut ones = vec![Rational::one(); rows];
    ones.push(Rational::zero());
    constraints.push(Constraint::eq(ones, Rational::one()));
    let mut objective = vec![Rational::zero(); rows];
    objective.push(Rational::one());
    let primal = LinearProgram { sense: Sense::Maximize, objective, constraints };
    let LpOutcome::Optimal(p) = crate::lp::solve(&primal) else {
        return Err(GameError::Internal("matrix-game primal LP must be solvable".into()));
    };

    // Minimizer: variables (y, u), minimize u subject to M'y ≤ u·e, Σy = 1.
    let mut constraints = Vec::with_capacity(rows + 1);
    for i in 0..rows {
        let mut coeffs: Vec<Rational> = shifted[i].clone();
        coeffs.push(-Rational::one());
        constraints.push(Constraint::le(coeffs, Rational::zero()));
    }
    let mut ones = vec![Rational::one(); cols];
    ones.push(Rational::zero());
    constraints.push(Constraint::eq(ones, Rational::one()));
    let mut objective = vec![Rational::zero(); cols];
    objective.push(Rational::one());
    let dual = LinearProgram { sense: Sense::Minimize, objective, constraints };
    let LpOutcome::Optimal(d) = crate::lp::solve(&dual) else {
        return Err(GameError::Internal("matrix-game dual LP must be solvable".into()));
    };

    if p.objective != d.objective {
        return Err(GameError::Internal(format!(
            "LP duality gap in matrix game: {} vs {}",
            p.objective, d.objective
        )));
    }
    let value = &p.objective - &shift;
    let x = p.x[..rows].to_vec();
    let y = d.x[..cols].to_vec();
    Ok((value, x, y))
}

/// Exact minimax value.
pub fn game_value(m: &Matrix) -> Result<Rational, GameError> {
    optimal_strategies_lp(m).map(|(v, _, _)| v)
}

fn subsets(n: usize) -> impl Iterator<Item = u32> {
    0..(1u32 << n)
}

fn vertex_side(
    m: &Matrix,
    value: &Rational,
    maximizer: bool,
) -> Result<Vec<Vec<Rational>>, GameError> {
    // For the maximizer the polytope lives in R^rows:
    //   x ≥ 0, Σx = 1, (xᵀM)_j ≥ v for every column j.
    // A vertex is pinned by an active set of rank = dimension, so solve the
    // equality system for every (zero-set Z, tight-set T) pair and keep the
    // unique feasible solutions.
    let (rows, cols) = linalg::dims(m);
    let (dim, other) = if maximizer { (rows, cols) } else { (cols, rows) };
    let entry = |v: usize, o: usize| if maximizer { &m[v][o] } else { &m[o][v] };
    let mut vertices: Vec<Vec<Rational>> = Vec::new();
    for zeros in subsets(dim) {
        for tight in subsets(other) {
            let z = zeros.count_ones() as usize;
            let t = tight.count_ones() as usize;
            if z >= dim || z + t + 1 < dim {
                continue;
            }
            let mut system: Matrix = Vec::with_capacity(z + t + 1);
            let mut rhs: Vec<Rational> = Vec::with_capacity(z + t + 1);
            for v in 0..dim {
                if zeros & (1 << v) != 0 {
                    let mut row = vec![Rational::zero(); dim];
                    row[v] = Rational::one();
                    system.push(row);
                    rhs.push(Rational::zero());
                }
            }
            system.push(vec![Rational::one(); dim]);
            rhs.push(Rational::one());
            for o in 0..other {
                if tight & (1 << o) != 0 {
                    system.push((0..dim).map(|v| entry(v, o).clone()).collect());
                    rhs.push(value.clone());
                }
            }
            let LinearSolve::Unique(x) = linalg::solve(&system, &rhs) else {
                continue;
            };
            if x.iter().any(|v| v < &Rational::zero()) {
                continue;
            }
            let feasible = (0..other).all(|o| {
                let total: Rational = (0..dim).map(|v| &x[v] * entry(v, o)).sum();
                if maximizer {
                    total >= *value
                } else {
                    total <= *value
                }
            });
            if feasible && !vertices.contains(&x) {
                vertices.push(x);
            }
        }
    }
    if vertices.is_empty() {
        return Err(GameError::Internal(
            "optimal polytope of a matrix game cannot be empty".into(),
        ));
    }
    vertices.sort();
    Ok(vertices)
}

/// Complete vertex sets of both optimal-strategy polytopes at the exact
/// `value`. Sorted lexicographically; the first entry is the canonical
/// strategy used everywhere else in this crate.
pub fn enumerate_optimal_vertices(
    m: &Matrix,
    value: &Rational,
) -> Result<(Vec<Vec<Rational>>, Vec<Vec<Rational>>), GameError> {
    let (rows, cols) = check_matrix(m)?;
    if rows + cols > ENUMERATION_LIMIT {
        return Err(GameError::MatrixTooLarge { rows, cols, limit: ENUMERATION_LIMIT });
    }
    Ok((vertex_side(m, value, true)?, vertex_side(m, value, false)?))
}

fn build_certificate(
    rows: usize,
    cols: usize,
    p1: &[Vec<Rational>],
    p2: &[Vec<Rational>],
) -> CmCertificate {
    let square = rows == cols;
    let p1_positive: Vec<bool> = p1[0].iter().map(|v| v > &Rational::zero()).collect();
    let p2_positive: Vec<bool> = p2[0].iter().map(|v| v > &Rational::zero()).collect();
    let failure = if !square {
        Some(CmFailure::NotSquare)
    } else if p1.len() != 1 {
        Some(CmFailure::P1NotUnique { vertices: p1.len() })
    } else if p2.len() != 1 {
        Some(CmFailure::P2NotUnique { vertices: p2.len() })
    } else if let Some(index) = p1_positive.iter().position(|&ok| !ok) {
        Some(CmFailure::P1ZeroCoordinate { index })
    } else if let Some(index) = p2_positive.iter().position(|&ok| !ok) {
        Some(CmFailure::P2ZeroCoordinate { index })
    } else {
        None
    };
    CmCertificate {
        rows,
        cols,
        square,
        p1_vertex_count: p1.len(),
        p2_vertex_count: p2.len(),
        p1_positive,
        p2_positive,
        completely_mixed: failure.is_none(),
        failure,
    }
}

/// Full exact solution: value, both vertex sets, and the CM certificate.
pub fn solve_matrix_game(m: &Matrix) -> Result<MatrixGameSolution, GameError> {
    let (rows, cols) = check_matrix(m)?;
    let value = game_value(m)?;
    let (p1, p2) = enumerate_optimal_vertices(m, &value)?;
    let certificate = build_certificate(rows, cols, &p1, &p2);
    Ok(MatrixGameSolution {
        value,
        p1_vertices: p1,
        p2_vertices: p2,
        completely_mixed: certificate.completely_mixed,
        certificate,
    })
}

/// The complete-mixing test by itself.
pub fn is_completely_mixed(m: &Matrix) -> Result<CmCertificate, GameError> {
    solve_matrix_game(m).map(|s| s.certificate)
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum KaplanskyError {
    #[error("matrix game is not completely mixed; the determinant formula does not apply")]
    NotCompletelyMixed,
    #[error("game value is 0; the determinant formula does not apply")]
    ValueZero,
    #[error("cofactor sum is 0 with nonzero value; inconsistent input")]
    ZeroCofactorSum,
    #[error(transparent)]
    Game(#[from] GameError),
}

/// `det(M) / Σ cofactors` — the classical value formula for completely mixed
/// games with nonzero value. A cross-check oracle, never the primary solver.
pub fn kaplansky_value(m: &Matrix) -> Result<Rational, KaplanskyError> {
    let solution = solve_matrix_game(m)?;
    if solution.value.is_zero() {
        return Err(KaplanskyError::ValueZero);
    }
    if !solution.completely_mixed {
        return Err(KaplanskyError::NotCompletelyMixed);
    }
    let det = linalg::determinant(m);
    let cof = linalg::cofactor_sum(m);
    if cof.is_zero() {
        return Err(KaplanskyError::ZeroCofactorSum);
    }
    Ok(det / cof)
}

/// Result of checking the equalizer property at a claimed value `v`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EqualizerReport {
    /// True iff `xᵀM = v` in every column.
    pub equalizes: bool,
    /// First column where `xᵀM` differs from `v`.
    pub violating_column: Option<usize>,
    /// The row player's payoff against each pure column, `xᵀM`.
    pub column_values: Vec<Rational>,
    pub x_optimal: bool,
    pub y_optimal: bool,
    pub y_strictly_positive: bool,
}

fn is_distribution(v: &[Rational]) -> bool {
    v.iter().all(|p| p >= &Rational::zero()) && v.iter().sum::<Rational>().is_one()
}

/// Checks whether the maximizer strategy `x` equalizes every column at `v`,
/// and verifies the optimality claims the caller makes about `x` and `y`.
pub fn equalizer_check(
    m: &Matrix,
    x: &[Rational],
    y: &[Rational],
    v: &Rational,
) -> Result<EqualizerReport, GameError> {
    let (rows, cols) = check_matrix(m)?;
    if x.len() != rows || y.len() != cols {
        return Err(GameError::Dimension(format!(
            "equalizer check on a {rows}x{cols} game got |x| = {}, |y| = {}",
            x.len(),
            y.len()
        )));
    }
    let column_values = linalg::vec_mat(x, m);
    let row_values = linalg::mat_vec(m, y);
    let violating_column = column_values.iter().position(|c| c != v);
    Ok(EqualizerReport {
        equalizes: violating_column.is_none(),
        violating_column,
        x_optimal: is_distribution(x) && column_values.iter().all(|c| c >= v),
        y_optimal: is_distribution(y) && row_values.iter().all(|r| r <= v),
        y_strictly_positive: y.iter().all(|p| p > &Rational::zero()),
        column_values,
    })
}

/// `C` with `c_ij = a_ij + b_j`.
pub fn column_shift(a: &Matrix, b: &[Rational]) -> Result<Matrix, GameError> {
    let (_, cols) = check_matrix(a)?;
    if b.len() != cols {
        return Err(GameError::Dimension(format!(
            "column shift needs {cols} entries, got {}",
            b.len()
        )));
    }
    if let Some(j) = b.iter().position(|v| v < &Rational::zero()) {
        return Err(GameError::InvalidArgument(format!(
            "column shift entry b[{}] is negative",
            j + 1
        )));
    }
    Ok(a.iter().map(|row| row.iter().zip(b).map(|(v, s)| v + s).collect()).collect())
}

/// Outcome of the column-shift reduction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ShiftReduction {
    /// `C = A + b` is completely mixed, so `A` is too; `delta` is `A`'s value
    /// `v(C) − bᵀy`, and `y` is the shared unique optimal strategy.
    Applicable {
        a_cm: bool,
        delta: Rational,
        y: Vec<Rational>,
        shifted_value: Rational,
    },
    /// `C` is not completely mixed; the reduction's hypothesis fails (this
    /// does not say anything about `A`).
    Inapplicable { reason: String },
}

/// Column-shift reduction for symmetric positive `A`: when `C = A + b` is
/// completely mixed with value `v` and minimizer optimum `y`, then `A` is
/// completely mixed with value `δ = v − bᵀy` and the same optimal strategy
/// `y` for both players. Everything is re-verified exactly, including
/// `A·y = δ·e` and `det(A) ≠ 0`.
pub fn shift_reduce(a: &Matrix, b: &[Rational]) -> Result<ShiftReduction, GameError> {
    let (rows, cols) = check_matrix(a)?;
    if rows != cols {
        return Err(GameError::Dimension(format!(
            "column-shift reduction needs a square matrix, got {rows}x{cols}"
        )));
    }
    for i in 0..rows {
        for j in 0..cols {
            if a[i][j] != a[j][i] {
                return Err(GameError::InvalidArgument(
                    "reduction requires a symmetric matrix".into(),
                ));
            }
            if a[i][j] <= Rational::zero() {
                return Err(GameError::InvalidArgument(
                    "reduction requires strictly positive entries".into(),
                ));
            }
        }
    }
    let c = column_shift(a, b)?;
    let shifted = solve_matrix_game(&c)?;
    if !shifted.completely_mixed {
        return Ok(ShiftReduction::Inapplicable {
            reason: format!(
                "shifted game is not completely mixed ({:?})",
                shifted.certificate.failure.as_ref().expect("non-CM has a failure")
            ),
        });
    }
    let y = shifted.canonical_p2().clone();
    let delta = &shifted.value - linalg::dot(b, &y);
    if linalg::determinant(a).is_zero() {
        return Err(GameError::Internal(
            "shifted game completely mixed but det(A) = 0".into(),
        ));
    }
    let ay = linalg::mat_vec(a, &y);
    if ay.iter().any(|v| *v != delta) {
        return Err(GameError::Internal("A·y failed to equalize at delta".into()));
    }
    let a_solution = solve_matrix_game(a)?;
    if a_solution.value != delta
        || a_solution.p1_vertices != vec![y.clone()]
        || a_solution.p2_vertices != vec![y.clone()]
    {
        return Err(GameError::Internal(
            "reduction disagreed with the direct solution of A".into(),
        ));
    }
    Ok(ShiftReduction::Applicable {
        a_cm: a_solution.completely_mixed,
        delta,
        y,
        shifted_value: shifted.value,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    fn m(rows: &[&[i64]]) -> Matrix {
        rows.iter().map(|r| r.iter().map(|&v| int(v)).collect()).collect()
    }

    fn halves() -> Vec<Rational> {
        vec![rat(1, 2), rat(1, 2)]
    }

    #[test]
    fn solves_the_shifted_game() {
        let s = solve_matrix_game(&m(&[&[2, 4], &[3, 3]])).unwrap();
        assert_eq!(s.value, int(3));
        assert!(!s.completely_mixed);
        // Maximizer must play row 2; minimizer's optimal set is the segment
        // from (1/2,1/2) to (1,0).
        assert_eq!(s.p1_vertices, vec![vec![int(0), int(1)]]);
        assert_eq!(s.p2_vertices, vec![halves(), vec![int(1), int(0)]]);
    }

    #[test]
    fn solves_the_symmetric_cm_game() {
        let s = solve_matrix_game(&m(&[&[1, 2], &[2, 1]])).unwrap();
        assert_eq!(s.value, rat(3, 2));
        assert!(s.completely_mixed);
        assert_eq!(s.p1_vertices, vec![halves()]);
        assert_eq!(s.p2_vertices, vec![halves()]);
    }

    #[test]
    fn solves_degenerate_shapes() {
        let one = solve_matrix_game(&m(&[&[-7]])).unwrap();
        assert_eq!(one.value, int(-7));
        assert_eq!(one.p1_vertices, vec![vec![int(1)]]);
        assert_eq!(one.p2_vertices, vec![vec![int(1)]]);
        assert!(one.completely_mixed);

        let diag = solve_matrix_game(&m(&[&[2, 0], &[0, 2]])).unwrap();
        assert_eq!(diag.value, int(1));
        assert_eq!(diag.p1_vertices, vec![halves()]);
        assert!(diag.completely_mixed);
    }

    #[test]
    fn enumerates_vertex_sets() {
        let (p1, p2) = {
            let mm = m(&[&[0, 1], &[1, 0]]);
            let v = game_value(&mm).unwrap();
            enumerate_optimal_vertices(&mm, &v).unwrap()
        };
        assert_eq!(p1, vec![halves()]);
        assert_eq!(p2, vec![halves()]);

        let constant = m(&[&[1, 1], &[1, 1]]);
        let (p1, p2) = enumerate_optimal_vertices(&constant, &int(1)).unwrap();
        assert_eq!(p1, vec![vec![int(0), int(1)], vec![int(1), int(0)]]);
        assert_eq!(p2, p1);
    }

    #[test]
    fn certificate_explains_failures() {
        let cert = is_completely_mixed(&m(&[&[1, 2, 3]])).unwrap();
        assert!(!cert.completely_mixed);
        assert_eq!(cert.failure, Some(CmFailure::NotSquare));

        let cert = is_completely_mixed(&m(&[&[2, 4], &[3, 3]])).unwrap();
        assert!(!cert.completely_mixed);
        assert_eq!(cert.failure, Some(CmFailure::P2NotUnique { vertices: 2 }));

        let cert = is_completely_mixed(&m(&[&[1, 1], &[2, 0]])).unwrap();
        assert!(!cert.completely_mixed);

        let cert = is_completely_mixed(&m(&[&[1, 2], &[2, 1]])).unwrap();
        assert!(cert.completely_mixed);
        assert_eq!(cert.p1_positive, vec![true, true]);
    }

    #[test]
    fn kaplansky_formula_cases() {
        assert_eq!(kaplansky_value(&m(&[&[1, 2], &[2, 1]])).unwrap(), rat(3, 2));
        assert_eq!(kaplansky_value(&m(&[&[2, 0], &[0, 2]])).unwrap(), int(1));
        assert_eq!(
            kaplansky_value(&m(&[&[0, 1], &[-1, 0]])).unwrap_err(),
            KaplanskyError::ValueZero
        );
        assert_eq!(
            kaplansky_value(&m(&[&[2, 4], &[3, 3]])).unwrap_err(),
            KaplanskyError::NotCompletelyMixed
        );
    }

    #[test]
    fn equalizer_report_cases() {
        let a = m(&[&[1, 2], &[2, 1]]);
        let r = equalizer_check(&a, &halves(), &halves(), &rat(3, 2)).unwrap();
        assert!(r.equalizes && r.x_optimal && r.y_optimal && r.y_strictly_positive);

        let ones = m(&[&[1, 1], &[1, 1]]);
        let r = equalizer_check(&ones, &[int(1), int(0)], &halves(), &int(1)).unwrap();
        assert!(r.equalizes && r.x_optimal);

        let c = m(&[&[2, 4], &[3, 3]]);
        let r = equalizer_check(&c, &[int(1), int(0)], &halves(), &int(3)).unwrap();
        assert!(!r.equalizes);
        assert_eq!(r.violating_column, Some(0));
        assert!(!r.x_optimal);
        assert_eq!(r.column_values, vec![int(2), int(4)]);
    }

    #[test]
    fn column_shift_cases() {
        assert_eq!(
            column_shift(&m(&[&[1, 2], &[2, 1]]), &[int(1), int(2)]).unwrap(),
            m(&[&[2, 4], &[3, 3]])
        );
        let a = m(&[&[2, 0], &[0, 2]]);
        assert_eq!(column_shift(&a, &[int(0), int(0)]).unwrap(), a);
        assert_eq!(column_shift(&a, &[int(1), int(1)]).unwrap(), m(&[&[3, 1], &[1, 3]]));
        assert!(column_shift(&a, &[int(-1), int(0)]).is_err());
        assert!(column_shift(&a, &[int(1)]).is_err());
    }

    #[test]
    fn reduction_applies_when_the_shift_stays_cm() {
        let a = m(&[&[2, 1], &[1, 2]]);
        match shift_reduce(&a, &[int(1), int(1)]).unwrap() {
            ShiftReduction::Applicable { a_cm, delta, y, shifted_value } => {
                assert!(a_cm);
                assert_eq!(delta, rat(3, 2));
                assert_eq!(y, halves());
                assert_eq!(shifted_value, rat(5, 2));
            }
            other => panic!("expected applicable, got {other:?}"),
        }
        // Zero shift: delta is just the value of A.
        match shift_reduce(&a, &[int(0), int(0)]).unwrap() {
            ShiftReduction::Applicable { delta, shifted_value, .. } => {
                assert_eq!(delta, rat(3, 2));
                assert_eq!(shifted_value, rat(3, 2));
            }
            other => panic!("expected applicable, got {other:?}"),
        }
    }

    #[test]
    fn reduction_reports_inapplicable_not_a_refutation() {
        let a = m(&[&[1, 2], &[2, 1]]);
        match shift_reduce(&a, &[int(1), int(2)]).unwrap() {
            ShiftReduction::Inapplicable { reason } => {
                assert!(reason.contains("not completely mixed"), "got: {reason}");
            }
            other => panic!("expected inapplicable, got {other:?}"),
        }
        // A itself is still CM; the reduction just cannot see it.
        assert!(is_completely_mixed(&a).unwrap().completely_mixed);
    }

    #[test]
    fn reduction_rejects_bad_preconditions() {
        assert!(shift_reduce(&m(&[&[1, 2], &[3, 1]]), &[int(0), int(0)]).is_err());
        assert!(shift_reduce(&m(&[&[0, 2], &[2, 0]]), &[int(0), int(0)]).is_err());
        assert!(shift_reduce(&m(&[&[1, 2], &[2, 1]]), &[int(-1), int(0)]).is_err());
    }

    #[test]
    fn enumeration_guard_trips() {
        let big = vec![vec![int(0); 7]; 7];
        assert!(matches!(
            solve_matrix_game(&big),
            Err(GameError::MatrixTooLarge { .. })
        ));
    }

    #[test]
    fn vertices_satisfy_their_inequalities() {
        for sample in [
            m(&[&[2, 4], &[3, 3]]),
            m(&[&[0, 1], &[1, 0]]),
            m(&[&[1, -2, 3], &[4, 0, -1], &[-2, 2, 1]]),
            m(&[&[5, 1], &[2, 2], &[0, 4]]),
        ] {
            let s = solve_matrix_game(&sample).unwrap();
            for x in &s.p1_vertices {
                let cols = linalg::vec_mat(x, &sample);
                assert!(cols.iter().all(|c| *c >= s.value));
            }
            for y in &s.p2_vertices {
                let rows = linalg::mat_vec(&sample, y);
                assert!(rows.iter().all(|r| *r <= s.value));
            }
        }
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        fn small_matrix() -> impl Strategy<Value = Matrix> {
            (1usize..=3, 1usize..=3).prop_flat_map(|(r, c)| {
                proptest::collection::vec(
                    proptest::collection::vec(-6i64..=6, c),
                    r,
                )
                .prop_map(|rows| {
                    rows.into_iter()
                        .map(|row| row.into_iter().map(int).collect())
                        .collect::<Matrix>()
                })
            })
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(48))]

            #[test]
            fn scale_and_shift_move_the_value(mm in small_matrix()) {
                let v = game_value(&mm).unwrap();
                let scaled: Matrix = mm
                    .iter()
                    .map(|r| r.iter().map(|x| x * rat(3, 2) + int(5)).collect())
                    .collect();
                let sv = game_value(&scaled).unwrap();
                prop_assert_eq!(sv, &v * rat(3, 2) + int(5));
                let cm_before = is_completely_mixed(&mm).unwrap().completely_mixed;
                let cm_after = is_completely_mixed(&scaled).unwrap().completely_mixed;
                prop_assert_eq!(cm_before, cm_after);
            }

            #[test]
            fn vertex_payoffs_agree_with_the_value(mm in small_matrix()) {
                let s = solve_matrix_game(&mm).unwrap();
                // max over p1 vertices of the min column payoff = value = the
                // dual statement — exact LP duality seen through vertices.
                let best_min = s
                    .p1_vertices
                    .iter()
                    .map(|x| linalg::vec_mat(x, &mm).into_iter().min().unwrap())
                    .max()
                    .unwrap();
                prop_assert_eq!(&best_min, &s.value);
                let best_max = s
                    .p2_vertices
                    .iter()
                    .map(|y| linalg::mat_vec(&mm, y).into_iter().max().unwrap())
                    .min()
                    .unwrap();
                prop_assert_eq!(&best_max, &s.value);
            }

            #[test]
            fn equalizer_holds_when_minimizer_is_cm(mm in small_matrix()) {
                let s = solve_matrix_game(&mm).unwrap();
                let has_cm_minimizer = s
                    .p2_vertices
                    .iter()
                    .any(|y| y.iter().all(|p| p > &Rational::zero()));
                if has_cm_minimizer {
                    for x in &s.p1_vertices {
                        let r = equalizer_check(&mm, x, s.canonical_p2(), &s.value).unwrap();
                        prop_assert!(r.equalizes, "x = {:?} fails to equalize", x);
                    }
                }
            }
        }
    }
}
