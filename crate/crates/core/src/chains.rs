//! Exact Markov-chain limit machinery.
//!
//! The Cesàro limit `Q* = lim (1/(N+1)) Σ Qⁿ` exists for every finite
//! stochastic matrix even when powers oscillate, so it is computed
//! structurally: find the recurrent classes (strongly connected components
//! with no exit), solve each class's stationary distribution exactly, and
//! solve the transient absorption system. No power iteration anywhere.

use crate::linalg::{self, LinearSolve, Matrix};
use crate::model::GameError;
use crate::rational::Rational;
use num_traits::{One, Zero};
use petgraph::graph::DiGraph;

/// Recurrent/transient split of a stochastic matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainDecomposition {
    /// Recurrent classes, each sorted; classes ordered by smallest member.
    pub recurrent_classes: Vec<Vec<usize>>,
    /// Transient states, sorted.
    pub transient: Vec<usize>,
    /// For each state, the index of its recurrent class (None = transient).
    pub class_of: Vec<Option<usize>>,
}

/// The Cesàro limit matrix together with the decomposition it came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CesaroMatrix {
    matrix: Matrix,
    decomposition: ChainDecomposition,
}

impl CesaroMatrix {
    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn decomposition(&self) -> &ChainDecomposition {
        &self.decomposition
    }

    pub fn into_matrix(self) -> Matrix {
        self.matrix
    }
}

fn validate_stochastic(q: &Matrix) -> Result<usize, GameError> {
    let (rows, cols) = linalg::dims(q);
    if rows == 0 || rows != cols {
        return Err(GameError::Dimension(format!(
            "stochastic matrix must be square and nonempty, got {rows}x{cols}"
        )));
    }
    for (s, row) in q.iter().enumerate() {
        if row.iter().any(|p| p < &Rational::zero()) {
            return Err(GameError::Dimension(format!("negative entry in row {}", s + 1)));
        }
        if !row.iter().sum::<Rational>().is_one() {
            return Err(GameError::Dimension(format!("row {} does not sum to 1", s + 1)));
        }
    }
    Ok(rows)
}

/// Splits the chain into recurrent classes and transient states. A strongly
/// connected component is recurrent iff no edge leaves it.
pub fn decompose(q: &Matrix) -> Result<ChainDecomposition, GameError> {
    let k = validate_stochastic(q)?;
    let mut graph = DiGraph::<(), ()>::new();
    let nodes: Vec<_> = (0..k).map(|_| graph.add_node(())).collect();
    for s in 0..k {
        for t in 0..k {
            if !q[s][t].is_zero() {
                graph.add_edge(nodes[s], nodes[t], ());
            }
        }
    }
    let sccs = petgraph::algo::tarjan_scc(&graph);
    let mut recurrent_classes = Vec::new();
    let mut transient = Vec::new();
    for scc in sccs {
        let mut members: Vec<usize> = scc.iter().map(|n| n.index()).collect();
        members.sort_unstable();
        let closed = members.iter().all(|&s| {
            members.iter().map(|&t| q[s][t].clone()).sum::<Rational>().is_one()
        });
        if closed {
            recurrent_classes.push(members);
        } else {
            transient.extend(members);
        }
    }
    recurrent_classes.sort_by_key(|c| c[0]);
    transient.sort_unstable();
    let mut class_of = vec![None; k];
    for (idx, class) in recurrent_classes.iter().enumerate() {
        for &s in class {
            class_of[s] = Some(idx);
        }
    }
    Ok(ChainDecomposition { recurrent_classes, transient, class_of })
}

/// Stationary distribution of the chain restricted to one recurrent class
/// (irreducible, so it is unique and strictly positive).
fn class_stationary(q: &Matrix, class: &[usize]) -> Result<Vec<Rational>, GameError> {
    let n = class.len();
    // π Q_C = π plus Σπ = 1. (Q_Cᵀ − I) has rank n−1 on an irreducible
    // class, so dropping its first row and appending the normalization
    // leaves a nonsingular system.
    let mut system = Vec::with_capacity(n);
    let mut rhs = Vec::with_capacity(n);
    for r in 1..n {
        let mut row = Vec::with_capacity(n);
        for c in 0..n {
            let mut v = q[class[c]][class[r]].clone();
            if r == c {
                v -= Rational::one();
            }
            row.push(v);
        }
        system.push(row);
        rhs.push(Rational::zero());
    }
    system.push(vec![Rational::one(); n]);
    rhs.push(Rational::one());
    match linalg::solve(&system, &rhs) {
        LinearSolve::Unique(pi) => Ok(pi),
        other => Err(GameError::Internal(format!(
            "stationary system for an irreducible class was {other:?}"
        ))),
    }
}

/// The exact Cesàro limit `Q*`.
pub fn cesaro_limit(q: &Matrix) -> Result<CesaroMatrix, GameError> {
    let k = validate_stochastic(q)?;
    let decomposition = decompose(q)?;
    let mut limit = linalg::zeros(k, k);

    let mut stationary = Vec::with_capacity(decomposition.recurrent_classes.len());
    for class in &decomposition.recurrent_classes {
        let pi = class_stationary(q, class)?;
        for &s in class {
            for (c, &t) in class.iter().enumerate() {
                limit[s][t] = pi[c].clone();
            }
        }
        stationary.push(pi);
    }

    let transient = &decomposition.transient;
    if !transient.is_empty() {
        // Absorption probabilities a_k(t) into each class k solve
        // (I − Q_TT) a_k = Q_T→Ck · 1, one system per class.
        let n = transient.len();
        let mut i_minus_qtt = linalg::zeros(n, n);
        for (r, &s) in transient.iter().enumerate() {
            for (c, &t) in transient.iter().enumerate() {
                let mut v = -q[s][t].clone();
                if r == c {
                    v += Rational::one();
                }
                i_minus_qtt[r][c] = v;
            }
        }
        for (class_idx, class) in decomposition.recurrent_classes.iter().enumerate() {
            let rhs: Vec<Rational> = transient
                .iter()
                .map(|&s| class.iter().map(|&t| q[s][t].clone()).sum())
                .collect();
            let absorb = match linalg::solve(&i_minus_qtt, &rhs) {
                LinearSolve::Unique(a) => a,
                other => {
                    return Err(GameError::Internal(format!(
                        "absorption system for transient states was {other:?}"
                    )))
                }
            };
            let pi = &stationary[class_idx];
            for (r, &s) in transient.iter().enumerate() {
                if absorb[r].is_zero() {
                    continue;
                }
                for (c, &t) in class.iter().enumerate() {
                    limit[s][t] += &absorb[r] * &pi[c];
                }
            }
        }
    }

    Ok(CesaroMatrix { matrix: limit, decomposition })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    fn m(rows: &[&[Rational]]) -> Matrix {
        rows.iter().map(|r| r.to_vec()).collect()
    }

    #[test]
    fn identity_chain() {
        let q = linalg::identity(3);
        let star = cesaro_limit(&q).unwrap();
        assert_eq!(star.matrix(), &q);
        assert_eq!(star.decomposition().recurrent_classes.len(), 3);
    }

    #[test]
    fn periodic_chain_averages() {
        let q = m(&[&[int(0), int(1)], &[int(1), int(0)]]);
        let star = cesaro_limit(&q).unwrap();
        let half = rat(1, 2);
        assert_eq!(
            star.matrix(),
            &m(&[&[half.clone(), half.clone()], &[half.clone(), half]])
        );
    }

    #[test]
    fn transient_state_feeds_the_absorbing_one() {
        let q = m(&[&[int(0), int(1)], &[int(0), int(1)]]);
        let star = cesaro_limit(&q).unwrap();
        assert_eq!(star.matrix(), &q);
        let d = star.decomposition();
        assert_eq!(d.recurrent_classes, vec![vec![1]]);
        assert_eq!(d.transient, vec![0]);
        assert_eq!(d.class_of, vec![None, Some(0)]);
    }

    #[test]
    fn two_class_chain_with_split_absorption() {
        // State 0 splits between two absorbing states 1 and 2.
        let q = m(&[
            &[int(0), rat(1, 3), rat(2, 3)],
            &[int(0), int(1), int(0)],
            &[int(0), int(0), int(1)],
        ]);
        let star = cesaro_limit(&q).unwrap();
        assert_eq!(star.matrix()[0], vec![int(0), rat(1, 3), rat(2, 3)]);
    }

    #[test]
    fn projection_identities_hold() {
        let samples = vec![
            m(&[
                &[rat(1, 2), rat(1, 2), int(0)],
                &[rat(1, 4), rat(1, 4), rat(1, 2)],
                &[int(0), int(0), int(1)],
            ]),
            m(&[
                &[int(0), int(1), int(0), int(0)],
                &[int(1), int(0), int(0), int(0)],
                &[rat(1, 8), rat(1, 8), rat(1, 2), rat(1, 4)],
                &[int(0), int(0), int(0), int(1)],
            ]),
        ];
        for q in samples {
            let star = cesaro_limit(&q).unwrap().into_matrix();
            let qq = linalg::mat_mul(&star, &q);
            assert_eq!(qq, star, "Q*Q = Q*");
            let qq = linalg::mat_mul(&q, &star);
            assert_eq!(qq, star, "QQ* = Q*");
            let qq = linalg::mat_mul(&star, &star);
            assert_eq!(qq, star, "Q*Q* = Q*");
            for row in &star {
                assert!(row.iter().all(|p| *p >= int(0)));
                assert_eq!(row.iter().sum::<Rational>(), int(1));
            }
        }
    }

    #[test]
    fn rejects_non_stochastic_input() {
        assert!(cesaro_limit(&m(&[&[rat(1, 2), rat(1, 4)], &[int(0), int(1)]])).is_err());
        assert!(cesaro_limit(&m(&[&[int(1), int(0)]])).is_err());
        assert!(cesaro_limit(&m(&[&[rat(3, 2), rat(-1, 2)], &[int(0), int(1)]])).is_err());
    }
}
