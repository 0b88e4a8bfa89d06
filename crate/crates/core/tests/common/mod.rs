//! Oracles and generators shared by the integration suites.
//!
//! The oracles here deliberately avoid the library's own solvers: linear
//! systems go through a local Gaussian elimination, matrix-game values come
//! from exhaustive square-subgame certificates, and chain limits are checked
//! against floating-point empirical averages.

use cmstoch::linalg::Matrix;
use cmstoch::model::StochasticGame;
use cmstoch::rational::{int, rat, Rational};
use num_traits::{One, ToPrimitive, Zero};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Exact Gaussian elimination with partial pivoting; `None` on singular
/// systems.
pub fn solve_square(a: &[Vec<Rational>], b: &[Rational]) -> Option<Vec<Rational>> {
    let n = a.len();
    let mut m: Vec<Vec<Rational>> = a.to_vec();
    let mut rhs = b.to_vec();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !m[r][col].is_zero())?;
        m.swap(col, pivot);
        rhs.swap(col, pivot);
        let p = m[col][col].clone();
        for c in col..n {
            m[col][c] = &m[col][c] / &p;
        }
        rhs[col] = &rhs[col] / &p;
        for r in 0..n {
            if r == col || m[r][col].is_zero() {
                continue;
            }
            let factor = m[r][col].clone();
            for c in col..n {
                let delta = &factor * &m[col][c];
                m[r][c] = &m[r][c] - &delta;
            }
            let delta = &factor * &rhs[col];
            rhs[r] = &rhs[r] - &delta;
        }
    }
    Some(rhs)
}

fn subsets_of_size(n: usize, size: usize) -> Vec<Vec<usize>> {
    (0u32..(1 << n))
        .filter(|mask| mask.count_ones() as usize == size)
        .map(|mask| (0..n).filter(|i| mask & (1 << i) != 0).collect())
        .collect()
}

/// Matrix-game value via square-subgame enumeration: each kernel's candidate
/// is accepted only with a full sandwich certificate — a row mixture
/// securing at least `v` against every column and a column mixture capping
/// every row at `v`. Some square subgame always carries such a certificate.
pub fn oracle_matrix_value(m: &Matrix) -> Option<Rational> {
    let rows = m.len();
    let cols = m[0].len();
    for size in 1..=rows.min(cols) {
        for rowset in subsets_of_size(rows, size) {
            for colset in subsets_of_size(cols, size) {
                let Some((x, v)) = kernel_mixture(m, &rowset, &colset, true) else {
                    continue;
                };
                let Some((y, v2)) = kernel_mixture(m, &rowset, &colset, false) else {
                    continue;
                };
                if v != v2 {
                    continue;
                }
                let secures = (0..cols).all(|j| {
                    let mut total = Rational::zero();
                    for (c, &i) in rowset.iter().enumerate() {
                        total += &x[c] * &m[i][j];
                    }
                    total >= v
                });
                let caps = (0..rows).all(|i| {
                    let mut total = Rational::zero();
                    for (c, &j) in colset.iter().enumerate() {
                        total += &y[c] * &m[i][j];
                    }
                    total <= v
                });
                if secures && caps {
                    return Some(v);
                }
            }
        }
    }
    None
}

/// Solves the subgame kernel for one side: a nonnegative mixture over
/// `rowset` equalizing the `colset` columns at a common `v` (or the
/// transpose when `for_rows` is false).
fn kernel_mixture(
    m: &Matrix,
    rowset: &[usize],
    colset: &[usize],
    for_rows: bool,
) -> Option<(Vec<Rational>, Rational)> {
    let size = rowset.len();
    let n = size + 1;
    let mut a = vec![vec![Rational::zero(); n]; n];
    let mut b = vec![Rational::zero(); n];
    for eq in 0..size {
        for c in 0..size {
            a[eq][c] = if for_rows {
                m[rowset[c]][colset[eq]].clone()
            } else {
                m[rowset[eq]][colset[c]].clone()
            };
        }
        a[eq][size] = -Rational::one();
    }
    for c in 0..size {
        a[size][c] = Rational::one();
    }
    b[size] = Rational::one();
    let sol = solve_square(&a, &b)?;
    let v = sol[size].clone();
    let weights = sol[..size].to_vec();
    if weights.iter().any(|p| p < &Rational::zero()) {
        return None;
    }
    Some((weights, v))
}

pub fn mat_mul(a: &Matrix, b: &Matrix) -> Matrix {
    let n = a.len();
    let cols = b[0].len();
    (0..n)
        .map(|i| {
            (0..cols)
                .map(|j| {
                    let mut total = Rational::zero();
                    for (k, aik) in a[i].iter().enumerate() {
                        total += aik * &b[k][j];
                    }
                    total
                })
                .collect()
        })
        .collect()
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().expect("rationals at test scale fit in f64")
}

/// Empirical Cesàro average `(1/N) Σ_{t<N} Qᵗ` in floating point.
pub fn empirical_cesaro(q: &Matrix, steps: usize) -> Vec<Vec<f64>> {
    let k = q.len();
    let qf: Vec<Vec<f64>> = q.iter().map(|row| row.iter().map(to_f64).collect()).collect();
    let mut power = vec![vec![0.0; k]; k];
    for (i, row) in power.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    let mut acc = vec![vec![0.0; k]; k];
    for _ in 0..steps {
        for i in 0..k {
            for j in 0..k {
                acc[i][j] += power[i][j];
            }
        }
        let mut next = vec![vec![0.0; k]; k];
        for i in 0..k {
            for t in 0..k {
                let p = power[i][t];
                if p == 0.0 {
                    continue;
                }
                for j in 0..k {
                    next[i][j] += p * qf[t][j];
                }
            }
        }
        power = next;
    }
    let n = steps as f64;
    for row in &mut acc {
        for entry in row {
            *entry /= n;
        }
    }
    acc
}

/// Wraps a matrix game as a one-state stochastic game.
pub fn single_state(matrix: Matrix) -> StochasticGame {
    let m1 = matrix.len();
    let m2 = matrix[0].len();
    let transition = vec![vec![vec![vec![int(1)]; m2]; m1]];
    StochasticGame::new(vec![matrix], transition).unwrap()
}

/// Random matrix with entries `p/q`, `p ∈ [−12, 12]`, `q ∈ {1, 2, 3}`.
pub fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Matrix {
    (0..rows)
        .map(|_| {
            (0..cols)
                .map(|_| rat(rng.gen_range(-12..=12), rng.gen_range(1..=3)))
                .collect()
        })
        .collect()
}

/// Random player-2-controlled game: up to 3 states, up to 3 actions per
/// player, integer payoffs in `[−5, 5]`, exact rational transitions.
pub fn random_p2_game(rng: &mut ChaCha8Rng) -> StochasticGame {
    let k = rng.gen_range(1..=3);
    let mut payoff = Vec::with_capacity(k);
    let mut transition = Vec::with_capacity(k);
    for s in 0..k {
        let m1 = rng.gen_range(1..=3);
        let m2 = rng.gen_range(1..=3);
        payoff.push(
            (0..m1)
                .map(|_| (0..m2).map(|_| int(rng.gen_range(-5..=5))).collect::<Vec<_>>())
                .collect::<Vec<_>>(),
        );
        let dists: Vec<Vec<Rational>> =
            (0..m2).map(|_| random_distribution(rng, k, s)).collect();
        transition.push(vec![dists; m1]);
    }
    StochasticGame::new(payoff, transition).unwrap()
}

fn random_distribution(rng: &mut ChaCha8Rng, k: usize, fallback: usize) -> Vec<Rational> {
    let mut weights: Vec<i64> = (0..k).map(|_| rng.gen_range(0..=4)).collect();
    if weights.iter().all(|w| *w == 0) {
        weights[fallback] = 1;
    }
    let total: i64 = weights.iter().sum();
    weights.into_iter().map(|w| rat(w, total)).collect()
}

/// Random stochastic matrix with up to `max_k` states; half the rows are
/// drawn sparse so transient states, periodic cycles, and multiple closed
/// classes all occur.
pub fn random_stochastic(rng: &mut ChaCha8Rng, max_k: usize) -> Matrix {
    let k = rng.gen_range(1..=max_k);
    (0..k)
        .map(|s| {
            let dense = rng.gen_bool(0.5);
            let mut weights: Vec<i64> = (0..k)
                .map(|_| {
                    if dense || rng.gen_bool(0.5) {
                        rng.gen_range(1..=6)
                    } else {
                        0
                    }
                })
                .collect();
            if weights.iter().all(|w| *w == 0) {
                weights[s] = 1;
            }
            let total: i64 = weights.iter().sum();
            weights.into_iter().map(|w| rat(w, total)).collect::<Vec<_>>()
        })
        .collect()
}
