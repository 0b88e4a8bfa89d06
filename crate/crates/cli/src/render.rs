//! JSON rendering for library reports. Rationals travel as canonical
//! strings, states and actions as 1-based indices, matching the file
//! formats.

use cmstoch::average::UndiscountedVerification;
use cmstoch::cm::{
    BetaSweep, CertificationMethod, CmWitness, DiscountedCmReport, LimitStatus,
    NonzeroThresholdReport, SymmetricCmReport, UndiscountedCmReport, VanishingDiscountTrace,
};
use cmstoch::discounted::DiscountedSolution;
use cmstoch::linalg::Matrix;
use cmstoch::matrix_game::{CmCertificate, CmFailure, MatrixGameSolution, ShiftReduction};
use cmstoch::model::{Player, StationaryStrategy};
use cmstoch::rational::{format_rational, Rational};
use serde_json::{json, Value};

pub fn rational(r: &Rational) -> Value {
    Value::String(format_rational(r))
}

pub fn rationals(rs: &[Rational]) -> Value {
    Value::Array(rs.iter().map(rational).collect())
}

pub fn matrix(m: &Matrix) -> Value {
    Value::Array(m.iter().map(|row| rationals(row)).collect())
}

pub fn strategy(s: &StationaryStrategy) -> Value {
    Value::Array(s.rows().iter().map(|row| rationals(row)).collect())
}

fn player(p: Player) -> Value {
    match p {
        Player::One => json!("p1"),
        Player::Two => json!("p2"),
    }
}

fn failure(f: &CmFailure) -> Value {
    match f {
        CmFailure::NotSquare => json!("not-square"),
        CmFailure::P1NotUnique { vertices } => {
            json!(format!("p1-not-unique ({vertices} optimal vertices)"))
        }
        CmFailure::P2NotUnique { vertices } => {
            json!(format!("p2-not-unique ({vertices} optimal vertices)"))
        }
        CmFailure::P1ZeroCoordinate { index } => {
            json!(format!("p1-zero-coordinate (action {})", index + 1))
        }
        CmFailure::P2ZeroCoordinate { index } => {
            json!(format!("p2-zero-coordinate (action {})", index + 1))
        }
    }
}

pub fn certificate(c: &CmCertificate) -> Value {
    json!({
        "rows": c.rows,
        "cols": c.cols,
        "square": c.square,
        "p1_vertex_count": c.p1_vertex_count,
        "p2_vertex_count": c.p2_vertex_count,
        "p1_positive": c.p1_positive,
        "p2_positive": c.p2_positive,
        "completely_mixed": c.completely_mixed,
        "failure": c.failure.as_ref().map(failure),
    })
}

pub fn matrix_solution(sol: &MatrixGameSolution) -> Value {
    json!({
        "value": rational(&sol.value),
        "completely_mixed": sol.completely_mixed,
        "p1_vertices": sol.p1_vertices.iter().map(|v| rationals(v)).collect::<Vec<_>>(),
        "p2_vertices": sol.p2_vertices.iter().map(|v| rationals(v)).collect::<Vec<_>>(),
        "certificate": certificate(&sol.certificate),
    })
}

pub fn shift_reduction(r: &ShiftReduction) -> Value {
    match r {
        ShiftReduction::Applicable { a_cm, delta, y, shifted_value } => json!({
            "applicable": true,
            "a_completely_mixed": a_cm,
            "a_value": rational(delta),
            "shared_optimal": rationals(y),
            "shifted_value": rational(shifted_value),
        }),
        ShiftReduction::Inapplicable { reason } => json!({
            "applicable": false,
            "reason": reason,
        }),
    }
}

pub fn discounted_solution(sol: &DiscountedSolution) -> Value {
    json!({
        "beta": rational(&sol.beta),
        "values": rationals(&sol.values),
        "p1": strategy(&sol.p1),
        "p2": strategy(&sol.p2),
        "residual": rational(&sol.residual),
        "exact": sol.exact,
        "iterations": sol.iterations,
        "iteration_bound": sol.iteration_bound,
    })
}

pub fn verification(v: &UndiscountedVerification) -> Value {
    json!({
        "value": rationals(&v.value),
        "p1_best_response": rationals(&v.p1_best_response),
        "p2_best_response": rationals(&v.p2_best_response),
        "p1_gap": rationals(&v.p1_gap),
        "p2_gap": rationals(&v.p2_gap),
        "optimal": v.optimal,
    })
}

pub fn witness(w: &CmWitness) -> Value {
    json!({
        "player": player(w.player),
        "strategy": strategy(&w.strategy),
        "zero_coordinate": w.zero_coordinate.map(|(s, a)| json!({
            "state": s + 1,
            "action": a + 1,
        })),
    })
}

pub fn discounted_cm(report: &DiscountedCmReport) -> Value {
    json!({
        "beta": rational(&report.beta),
        "values": rationals(&report.solution.values),
        "completely_mixed": report.completely_mixed,
        "states": report.states.iter().map(|s| json!({
            "state": s.state + 1,
            "auxiliary": matrix(&s.auxiliary),
            "value": rational(&s.value),
            "completely_mixed": s.certificate.completely_mixed,
            "failure": s.certificate.failure.as_ref().map(failure),
        })).collect::<Vec<_>>(),
        "witness": report.witness.as_ref().map(witness),
    })
}

fn method(m: &CertificationMethod) -> Value {
    match m {
        CertificationMethod::LiteralPair => json!("literal-pair"),
        CertificationMethod::ReconstructedP1 => json!("reconstructed-p1"),
        CertificationMethod::ReconstructedPair => json!("reconstructed-pair"),
    }
}

pub fn trace(t: &VanishingDiscountTrace) -> Value {
    json!({
        "converged": t.converged,
        "strategies_settled": t.strategies_settled,
        "status": limit_status(&t.status),
        "points": t.points.iter().map(|p| json!({
            "beta": rational(&p.beta),
            "values": rationals(&p.values),
            "normalized": rationals(&p.normalized),
            "p1": strategy(&p.p1),
            "p2": strategy(&p.p2),
        })).collect::<Vec<_>>(),
    })
}

pub fn limit_status(status: &LimitStatus) -> Value {
    match status {
        LimitStatus::Certified { method: m, value, p1, p2, verification: v } => json!({
            "certified": true,
            "method": method(m),
            "value": rationals(value),
            "p1": strategy(p1),
            "p2": strategy(p2),
            "verification": verification(v),
        }),
        LimitStatus::Inconclusive { reason } => json!({
            "certified": false,
            "reason": reason,
        }),
    }
}

pub fn undiscounted_cm(report: &UndiscountedCmReport) -> Value {
    json!({
        "value": rationals(&report.value),
        "completely_mixed": report.completely_mixed,
        "p1": {
            "completely_mixed": report.p1_completely_mixed,
            "optimal": strategy(&report.p1_optimal),
            "witness": report.p1_witness.as_ref().map(witness),
        },
        "p2": {
            "completely_mixed": report.p2_completely_mixed,
            "optimal": strategy(&report.p2_optimal),
            "witness": report.p2_witness.as_ref().map(witness),
        },
        "verification": verification(&report.pair_verification),
        "trace": trace(&report.trace),
    })
}

pub fn sweep(s: &BetaSweep) -> Value {
    json!({
        "entries": s.entries.iter().map(|e| json!({
            "beta": rational(&e.beta),
            "completely_mixed": e.completely_mixed,
        })).collect::<Vec<_>>(),
        "cm_from": s.cm_from.as_ref().map(rational),
        "all_cm": s.all_cm,
    })
}

pub fn symmetric_cm(report: &SymmetricCmReport) -> Value {
    json!({
        "applicable": report.applicable,
        "symmetric": report.symmetric,
        "undiscounted_cm": report.undiscounted_cm,
        "per_state_cm": report.per_state_cm,
        "pass": report.pass,
    })
}

pub fn nonzero_threshold(report: &NonzeroThresholdReport) -> Value {
    json!({
        "grid": report.grid.iter().map(rational).collect::<Vec<_>>(),
        "per_state": report.per_state.iter().map(|s| json!({
            "state": s.state + 1,
            "v": rational(&s.v),
            "v_beta_nonzero": s.v_beta_nonzero,
            "threshold_index": s.threshold_index,
        })).collect::<Vec<_>>(),
        "converse_violations":
            report.converse_violations.iter().map(|s| s + 1).collect::<Vec<_>>(),
        "pass": report.pass,
    })
}
