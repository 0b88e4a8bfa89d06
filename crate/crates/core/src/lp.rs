//! Exact two-phase primal simplex over rationals.
//!
//! Bland's rule is used for both the entering and leaving choices, so the
//! method terminates on degenerate problems and, combined with exact
//! arithmetic, always returns the same optimal basic solution for the same
//! input. All variables are implicitly nonnegative; callers shift or split
//! free variables themselves.

use crate::rational::Rational;
use num_traits::{One, Zero};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rel {
    Le,
    Eq,
    Ge,
}

#[derive(Debug, Clone)]
pub struct Constraint {
    pub coeffs: Vec<Rational>,
    pub rel: Rel,
    pub rhs: Rational,
}

impl Constraint {
    pub fn le(coeffs: Vec<Rational>, rhs: Rational) -> Self {
        Constraint { coeffs, rel: Rel::Le, rhs }
    }
    pub fn eq(coeffs: Vec<Rational>, rhs: Rational) -> Self {
        Constraint { coeffs, rel: Rel::Eq, rhs }
    }
    pub fn ge(coeffs: Vec<Rational>, rhs: Rational) -> Self {
        Constraint { coeffs, rel: Rel::Ge, rhs }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Maximize,
    Minimize,
}

#[derive(Debug, Clone)]
pub struct LinearProgram {
    pub sense: Sense,
    pub objective: Vec<Rational>,
    pub constraints: Vec<Constraint>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LpSolution {
    pub x: Vec<Rational>,
    pub objective: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LpOutcome {
    Optimal(LpSolution),
    Infeasible,
    Unbounded,
}

struct Tableau {
    /// `rows x (cols + 1)`; the last column is the right-hand side.
    rows: Vec<Vec<Rational>>,
    basis: Vec<usize>,
    cols: usize,
}

impl Tableau {
    fn rhs(&self, r: usize) -> &Rational {
        &self.rows[r][self.cols]
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let inv = self.rows[row][col].clone();
        for v in self.rows[row].iter_mut() {
            *v = &*v / &inv;
        }
        for r in 0..self.rows.len() {
            if r == row || self.rows[r][col].is_zero() {
                continue;
            }
            let factor = self.rows[r][col].clone();
            for c in 0..=self.cols {
                let delta = &factor * &self.rows[row][c];
                self.rows[r][c] -= delta;
            }
        }
        self.basis[row] = col;
    }

    /// Reduced costs and objective value for maximizing `c`.
    fn objective_row(&self, c: &[Rational]) -> (Vec<Rational>, Rational) {
        let mut reduced: Vec<Rational> = c.to_vec();
        reduced.resize(self.cols, Rational::zero());
        let mut value = Rational::zero();
        for (r, &b) in self.basis.iter().enumerate() {
            if b < c.len() && !c[b].is_zero() {
                let cb = c[b].clone();
                for j in 0..self.cols {
                    let delta = &cb * &self.rows[r][j];
                    reduced[j] -= delta;
                }
                value += &cb * self.rhs(r);
            }
        }
        (reduced, value)
    }

    /// Runs simplex pivots maximizing `c`, restricted to entering columns
    /// `< allowed`. Returns `None` if unbounded.
    fn optimize(&mut self, c: &[Rational], allowed: usize) -> Option<(Vec<Rational>, Rational)> {
        loop {
            let (reduced, value) = self.objective_row(c);
            let enter = (0..allowed).find(|&j| reduced[j] > Rational::zero());
            let Some(enter) = enter else {
                return Some((reduced, value));
            };
            let mut leave: Option<usize> = None;
            let mut best: Option<Rational> = None;
            for r in 0..self.rows.len() {
                if self.rows[r][enter] <= Rational::zero() {
                    continue;
                }
                let ratio = self.rhs(r) / &self.rows[r][enter];
                let better = match &best {
                    None => true,
                    Some(b) => {
                        ratio < *b || (ratio == *b && self.basis[r] < self.basis[leave.unwrap()])
                    }
                };
                if better {
                    best = Some(ratio);
                    leave = Some(r);
                }
            }
            let Some(leave) = leave else {
                return None;
            };
            self.pivot(leave, enter);
        }
    }
}

/// Solves the program exactly. The returned point is a basic optimal solution
/// and is deterministic for a given input.
pub fn solve(lp: &LinearProgram) -> LpOutcome {
    let n = lp.objective.len();
    for c in &lp.constraints {
        assert_eq!(c.coeffs.len(), n, "constraint arity mismatch");
    }
    let m = lp.constraints.len();

    // Normalize right-hand sides to be nonnegative, then count columns:
    // original variables, one slack/surplus per inequality, one artificial
    // per equality or >= row.
    let mut normalized: Vec<Constraint> = lp.constraints.clone();
    for c in normalized.iter_mut() {
        if c.rhs < Rational::zero() {
            for v in c.coeffs.iter_mut() {
                *v = -&*v;
            }
            c.rhs = -&c.rhs;
            c.rel = match c.rel {
                Rel::Le => Rel::Ge,
                Rel::Ge => Rel::Le,
                Rel::Eq => Rel::Eq,
            };
        }
    }
    let slack_count = normalized.iter().filter(|c| c.rel != Rel::Eq).count();
    let art_count = normalized.iter().filter(|c| c.rel != Rel::Le).count();
    let cols = n + slack_count + art_count;

    let mut tab = Tableau { rows: Vec::with_capacity(m), basis: vec![0; m], cols };
    let mut next_slack = n;
    let mut next_art = n + slack_count;
    for (r, c) in normalized.iter().enumerate() {
        let mut row = vec![Rational::zero(); cols + 1];
        row[..n].clone_from_slice(&c.coeffs);
        row[cols] = c.rhs.clone();
        match c.rel {
            Rel::Le => {
                row[next_slack] = Rational::one();
                tab.basis[r] = next_slack;
                next_slack += 1;
            }
            Rel::Ge => {
                row[next_slack] = -Rational::one();
                next_slack += 1;
                row[next_art] = Rational::one();
                tab.basis[r] = next_art;
                next_art += 1;
            }
            Rel::Eq => {
                row[next_art] = Rational::one();
                tab.basis[r] = next_art;
                next_art += 1;
            }
        }
        tab.rows.push(row);
    }

    if art_count > 0 {
        // Phase 1: maximize minus the sum of artificials; feasible iff 0.
        let mut phase1 = vec![Rational::zero(); cols];
        for c in phase1.iter_mut().skip(n + slack_count) {
            *c = -Rational::one();
        }
        let Some((_, value)) = tab.optimize(&phase1, cols) else {
            unreachable!("phase 1 objective is bounded above by zero");
        };
        if !value.is_zero() {
            return LpOutcome::Infeasible;
        }
        // Pivot any artificial still in the basis out of it, or drop its row
        // as redundant.
        let mut r = 0;
        while r < tab.rows.len() {
            if tab.basis[r] >= n + slack_count {
                debug_assert!(tab.rhs(r).is_zero());
                match (0..n + slack_count).find(|&j| !tab.rows[r][j].is_zero()) {
                    Some(j) => tab.pivot(r, j),
                    None => {
                        tab.rows.remove(r);
                        tab.basis.remove(r);
                        continue;
                    }
                }
            }
            r += 1;
        }
        for row in tab.rows.iter_mut() {
            row.drain(n + slack_count..cols);
        }
        tab.cols = n + slack_count;
    }

    let mut objective: Vec<Rational> = lp.objective.clone();
    if lp.sense == Sense::Minimize {
        for c in objective.iter_mut() {
            *c = -&*c;
        }
    }
    let Some((_, value)) = tab.optimize(&objective, tab.cols) else {
        return LpOutcome::Unbounded;
    };
    let mut x = vec![Rational::zero(); n];
    for (r, &b) in tab.basis.iter().enumerate() {
        if b < n {
            x[b] = tab.rhs(r).clone();
        }
    }
    let objective = if lp.sense == Sense::Minimize { -value } else { value };
    LpOutcome::Optimal(LpSolution { x, objective })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    fn optimal(lp: &LinearProgram) -> LpSolution {
        match solve(lp) {
            LpOutcome::Optimal(s) => s,
            other => panic!("expected optimum, got {other:?}"),
        }
    }

    #[test]
    fn maximizes_with_le_rows() {
        let lp = LinearProgram {
            sense: Sense::Maximize,
            objective: vec![int(3), int(2)],
            constraints: vec![
                Constraint::le(vec![int(1), int(1)], int(4)),
                Constraint::le(vec![int(1), int(0)], int(2)),
            ],
        };
        let s = optimal(&lp);
        assert_eq!(s.objective, int(10));
        assert_eq!(s.x, vec![int(2), int(2)]);
    }

    #[test]
    fn minimizes_with_ge_rows() {
        let lp = LinearProgram {
            sense: Sense::Minimize,
            objective: vec![int(2), int(3)],
            constraints: vec![
                Constraint::ge(vec![int(1), int(1)], int(10)),
                Constraint::ge(vec![int(1), int(0)], int(2)),
            ],
        };
        let s = optimal(&lp);
        assert_eq!(s.objective, int(20));
        assert_eq!(s.x, vec![int(10), int(0)]);
    }

    #[test]
    fn handles_equalities_and_negative_rhs() {
        let lp = LinearProgram {
            sense: Sense::Maximize,
            objective: vec![int(1), int(1)],
            constraints: vec![
                Constraint::eq(vec![int(1), int(1)], int(1)),
                // Same as x0 - x1 <= 1/2 written with a negative rhs.
                Constraint::ge(vec![int(-1), int(1)], rat(-1, 2)),
            ],
        };
        let s = optimal(&lp);
        assert_eq!(s.objective, int(1));
        assert!(&s.x[0] - &s.x[1] <= rat(1, 2));
    }

    #[test]
    fn reports_infeasible() {
        let lp = LinearProgram {
            sense: Sense::Maximize,
            objective: vec![int(1)],
            constraints: vec![
                Constraint::ge(vec![int(1)], int(2)),
                Constraint::le(vec![int(1)], int(1)),
            ],
        };
        assert_eq!(solve(&lp), LpOutcome::Infeasible);
    }

    #[test]
    fn reports_unbounded() {
        let lp = LinearProgram {
            sense: Sense::Maximize,
            objective: vec![int(1), int(0)],
            constraints: vec![Constraint::ge(vec![int(1), int(1)], int(1))],
        };
        assert_eq!(solve(&lp), LpOutcome::Unbounded);
    }

    #[test]
    fn beale_degenerate_example_terminates() {
        // A classic cycling example for naive pivot rules; Bland's rule must
        // terminate at objective 1/20.
        let lp = LinearProgram {
            sense: Sense::Maximize,
            objective: vec![rat(3, 4), int(-150), rat(1, 50), int(-6)],
            constraints: vec![
                Constraint::le(vec![rat(1, 4), int(-60), rat(-1, 25), int(9)], int(0)),
                Constraint::le(vec![rat(1, 2), int(-90), rat(-1, 50), int(3)], int(0)),
                Constraint::le(vec![int(0), int(0), int(1), int(0)], int(1)),
            ],
        };
        let s = optimal(&lp);
        assert_eq!(s.objective, rat(1, 20));
        assert_eq!(s.x[2], int(1));
    }

    #[test]
    fn redundant_equalities_are_dropped() {
        let lp = LinearProgram {
            sense: Sense::Maximize,
            objective: vec![int(1), int(2)],
            constraints: vec![
                Constraint::eq(vec![int(1), int(1)], int(3)),
                Constraint::eq(vec![int(2), int(2)], int(6)),
                Constraint::le(vec![int(0), int(1)], int(2)),
            ],
        };
        let s = optimal(&lp);
        assert_eq!(s.objective, int(5));
        assert_eq!(s.x, vec![int(1), int(2)]);
    }

    #[test]
    fn zero_objective_acts_as_feasibility_probe() {
        let lp = LinearProgram {
            sense: Sense::Maximize,
            objective: vec![int(0), int(0)],
            constraints: vec![
                Constraint::eq(vec![int(1), int(1)], int(1)),
                Constraint::ge(vec![int(1), int(-1)], int(0)),
            ],
        };
        let s = optimal(&lp);
        assert_eq!(&s.x[0] + &s.x[1], int(1));
        assert!(s.x[0] >= s.x[1]);
        assert!(s.x.iter().all(|v| *v >= int(0)));
    }
}
