//! Dense exact linear algebra over rationals — just enough for the solvers.
//!
//! Matrices are row-major `Vec<Vec<Rational>>`. Everything is exact; pivots
//! are chosen deterministically (first nonzero), so identical inputs always
//! produce identical outputs.

use crate::rational::Rational;
use num_traits::{One, Zero};

pub type Matrix = Vec<Vec<Rational>>;

pub fn zeros(rows: usize, cols: usize) -> Matrix {
    vec![vec![Rational::zero(); cols]; rows]
}

pub fn identity(n: usize) -> Matrix {
    let mut m = zeros(n, n);
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = Rational::one();
    }
    m
}

pub fn dims(m: &Matrix) -> (usize, usize) {
    (m.len(), m.first().map_or(0, Vec::len))
}

pub fn transpose(m: &Matrix) -> Matrix {
    let (rows, cols) = dims(m);
    let mut t = zeros(cols, rows);
    for (i, row) in m.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            t[j][i] = v.clone();
        }
    }
    t
}

pub fn mat_mul(a: &Matrix, b: &Matrix) -> Matrix {
    let (ar, ac) = dims(a);
    let (br, bc) = dims(b);
    assert_eq!(ac, br, "matrix product shape mismatch: {ar}x{ac} * {br}x{bc}");
    let mut out = zeros(ar, bc);
    for i in 0..ar {
        for k in 0..ac {
            if a[i][k].is_zero() {
                continue;
            }
            for j in 0..bc {
                if !b[k][j].is_zero() {
                    out[i][j] += &a[i][k] * &b[k][j];
                }
            }
        }
    }
    out
}

pub fn mat_vec(m: &Matrix, v: &[Rational]) -> Vec<Rational> {
    let (rows, cols) = dims(m);
    assert_eq!(cols, v.len(), "matrix-vector shape mismatch");
    let mut out = vec![Rational::zero(); rows];
    for (i, row) in m.iter().enumerate() {
        for (j, x) in row.iter().enumerate() {
            if !x.is_zero() && !v[j].is_zero() {
                out[i] += x * &v[j];
            }
        }
    }
    out
}

pub fn vec_mat(v: &[Rational], m: &Matrix) -> Vec<Rational> {
    let (rows, cols) = dims(m);
    assert_eq!(rows, v.len(), "vector-matrix shape mismatch");
    let mut out = vec![Rational::zero(); cols];
    for (i, row) in m.iter().enumerate() {
        if v[i].is_zero() {
            continue;
        }
        for (j, x) in row.iter().enumerate() {
            if !x.is_zero() {
                out[j] += &v[i] * x;
            }
        }
    }
    out
}

pub fn vec_sub(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Largest absolute entry.
pub fn norm_inf(v: &[Rational]) -> Rational {
    v.iter().map(|x| if x < &Rational::zero() { -x } else { x.clone() }).max().unwrap_or_else(Rational::zero)
}

/// Exact determinant by fraction-preserving Gaussian elimination.
pub fn determinant(m: &Matrix) -> Rational {
    let (rows, cols) = dims(m);
    assert_eq!(rows, cols, "determinant of a non-square matrix");
    let mut a = m.clone();
    let mut det = Rational::one();
    for col in 0..rows {
        let pivot = match (col..rows).find(|&r| !a[r][col].is_zero()) {
            Some(p) => p,
            None => return Rational::zero(),
        };
        if pivot != col {
            a.swap(pivot, col);
            det = -det;
        }
        det *= a[col][col].clone();
        let inv = a[col][col].clone();
        for r in col + 1..rows {
            if a[r][col].is_zero() {
                continue;
            }
            let factor = &a[r][col] / &inv;
            for c in col..rows {
                let delta = &factor * &a[col][c];
                a[r][c] -= delta;
            }
        }
    }
    det
}

/// Sum of all cofactors `(-1)^(i+j) det(M with row i, col j removed)`.
pub fn cofactor_sum(m: &Matrix) -> Rational {
    let (n, cols) = dims(m);
    assert_eq!(n, cols, "cofactor sum of a non-square matrix");
    if n == 1 {
        return Rational::one();
    }
    let mut total = Rational::zero();
    for i in 0..n {
        for j in 0..n {
            let minor: Matrix = m
                .iter()
                .enumerate()
                .filter(|(r, _)| *r != i)
                .map(|(_, row)| {
                    row.iter().enumerate().filter(|(c, _)| *c != j).map(|(_, v)| v.clone()).collect()
                })
                .collect();
            let c = determinant(&minor);
            if (i + j) % 2 == 0 {
                total += c;
            } else {
                total -= c;
            }
        }
    }
    total
}

/// Outcome of solving `A x = b` exactly.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LinearSolve {
    Unique(Vec<Rational>),
    Underdetermined,
    Inconsistent,
}

/// Solves `A x = b` for a general (possibly non-square) `A` by reduced row
/// echelon form on the augmented matrix.
pub fn solve(a: &Matrix, b: &[Rational]) -> LinearSolve {
    let (rows, cols) = dims(a);
    assert_eq!(rows, b.len(), "solve: rhs length mismatch");
    let mut aug: Matrix = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();
    let mut pivot_cols = Vec::new();
    let mut pivot_row = 0;
    for col in 0..cols {
        let Some(p) = (pivot_row..rows).find(|&r| !aug[r][col].is_zero()) else {
            continue;
        };
        aug.swap(p, pivot_row);
        let inv = aug[pivot_row][col].clone();
        for c in col..=cols {
            aug[pivot_row][c] = &aug[pivot_row][c] / &inv;
        }
        for r in 0..rows {
            if r != pivot_row && !aug[r][col].is_zero() {
                let factor = aug[r][col].clone();
                for c in col..=cols {
                    let delta = &factor * &aug[pivot_row][c];
                    aug[r][c] -= delta;
                }
            }
        }
        pivot_cols.push(col);
        pivot_row += 1;
        if pivot_row == rows {
            break;
        }
    }
    for row in aug.iter().skip(pivot_row) {
        if !row[cols].is_zero() {
            return LinearSolve::Inconsistent;
        }
    }
    if pivot_cols.len() < cols {
        return LinearSolve::Underdetermined;
    }
    let mut x = vec![Rational::zero(); cols];
    for (r, &col) in pivot_cols.iter().enumerate() {
        x[col] = aug[r][cols].clone();
    }
    LinearSolve::Unique(x)
}
