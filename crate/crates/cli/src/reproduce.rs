//! Re-runs the bundled example games and compares the results against
//! their expected values. A pass/fail table goes to stderr; the full check
//! list lands in the report payload.

use std::fs;
use std::path::Path;

use cmstoch::cm::{self, CmOptions, Guard, UndiscountedCmReport};
use cmstoch::discounted::{auxiliary_matrix, solve_discounted_exact, Discount};
use cmstoch::fixtures::{self, Fixture, FixtureKind};
use cmstoch::format::{serialize_game, serialize_matrix};
use cmstoch::linalg::Matrix;
use cmstoch::matrix_game::{column_shift, game_value, shift_reduce, solve_matrix_game, ShiftReduction};
use cmstoch::model::StochasticGame;
use cmstoch::rational::{format_rational, int, rat, Rational};
use serde_json::{json, Value};

use crate::CliError;

pub struct Outcome {
    pub payload: Value,
    pub fingerprint_source: Vec<u8>,
    pub pass: bool,
}

struct Check {
    name: &'static str,
    pass: bool,
    detail: String,
}

fn check(name: &'static str, pass: bool, detail: impl Into<String>) -> Check {
    Check { name, pass, detail: detail.into() }
}

pub fn run(example: Option<&str>, emit: Option<&Path>) -> Result<Outcome, CliError> {
    let selected: Vec<Fixture> = match example {
        Some(name) => match fixtures::by_name(name) {
            Some(fixture) => vec![fixture],
            None => {
                let names: Vec<&str> = fixtures::all().iter().map(|f| f.name).collect();
                return Err(CliError::Input(format!(
                    "unknown example {name:?} (available: {})",
                    names.join(", ")
                )));
            }
        },
        None => fixtures::all(),
    };
    let options = CmOptions {
        schedule: cm::default_schedule(20),
        value_tol: cm::default_value_tol(),
        guard: Guard::from_env()?,
    };

    if let Some(dir) = emit {
        fs::create_dir_all(dir)
            .map_err(|e| CliError::Input(format!("{}: {e}", dir.display())))?;
    }

    let mut source = Vec::new();
    let mut reports = Vec::new();
    let mut emitted = Vec::new();
    let mut all_pass = true;
    eprintln!("{:<12} checks  result", "fixture");
    for fixture in &selected {
        let canonical = match &fixture.kind {
            FixtureKind::Game(game) => serialize_game(game),
            FixtureKind::MatrixPair { a, b } => matrix_pair_doc(a, b),
        };
        if let Some(dir) = emit {
            let file = format!("{}.json", fixture.name);
            fs::write(dir.join(&file), &canonical)
                .map_err(|e| CliError::Input(format!("{}: {e}", dir.display())))?;
            emitted.push(file);
        }
        source.extend_from_slice(canonical.as_bytes());
        source.push(b'\n');

        let checks = match (fixture.name, &fixture.kind) {
            ("shift-pair", FixtureKind::MatrixPair { a, b }) => shift_pair(a, b)?,
            ("absorbing", FixtureKind::Game(game)) => absorbing(game, &options)?,
            ("symmetric", FixtureKind::Game(game)) => symmetric(game, &options)?,
            ("three-state", FixtureKind::Game(game)) => three_state(game, &options)?,
            _ => {
                return Err(CliError::Internal(format!(
                    "no checks registered for fixture {}",
                    fixture.name
                )))
            }
        };
        let passed = checks.iter().filter(|c| c.pass).count();
        let pass = passed == checks.len();
        all_pass &= pass;
        eprintln!(
            "{:<12} {:>3}/{:<3}  {}",
            fixture.name,
            passed,
            checks.len(),
            if pass { "pass" } else { "FAIL" }
        );
        reports.push(json!({
            "fixture": fixture.name,
            "summary": fixture.summary,
            "pass": pass,
            "checks": checks.iter().map(|c| json!({
                "name": c.name,
                "pass": c.pass,
                "detail": c.detail,
            })).collect::<Vec<_>>(),
        }));
    }
    eprintln!("reproduce: {}", if all_pass { "pass" } else { "FAIL" });

    let mut payload = json!({ "fixtures": reports, "pass": all_pass });
    if emit.is_some() {
        payload["emitted"] = json!(emitted);
    }
    Ok(Outcome { payload, fingerprint_source: source, pass: all_pass })
}

fn matrix_pair_doc(a: &Matrix, b: &[Rational]) -> String {
    let doc = json!({
        "a": serde_json::from_str::<Value>(&serialize_matrix(a)).expect("matrix json"),
        "b": b.iter().map(format_rational).collect::<Vec<_>>(),
    });
    doc.to_string()
}

fn fmt_values(values: &[Rational]) -> String {
    let parts: Vec<String> = values.iter().map(format_rational).collect();
    format!("({})", parts.join(", "))
}

fn shift_pair(a: &Matrix, b: &[Rational]) -> Result<Vec<Check>, CliError> {
    let mut checks = Vec::new();
    let sol_a = solve_matrix_game(a)?;
    let uniform = vec![rat(1, 2), rat(1, 2)];
    checks.push(check(
        "base value 3/2",
        sol_a.value == rat(3, 2),
        format!("value {}", format_rational(&sol_a.value)),
    ));
    checks.push(check(
        "base completely mixed",
        sol_a.completely_mixed,
        format!("certificate flag {}", sol_a.completely_mixed),
    ));
    checks.push(check(
        "base optimal pair (1/2, 1/2)",
        *sol_a.canonical_p1() == uniform && *sol_a.canonical_p2() == uniform,
        format!(
            "p1 {}, p2 {}",
            fmt_values(sol_a.canonical_p1()),
            fmt_values(sol_a.canonical_p2())
        ),
    ));

    let shifted = column_shift(a, b)?;
    let sol_c = solve_matrix_game(&shifted)?;
    checks.push(check(
        "shifted value 3",
        sol_c.value == int(3),
        format!("value {}", format_rational(&sol_c.value)),
    ));
    checks.push(check(
        "shifted not completely mixed",
        !sol_c.completely_mixed,
        format!("certificate flag {}", sol_c.completely_mixed),
    ));

    let reduction = shift_reduce(a, b)?;
    checks.push(check(
        "reduction inapplicable for the breaking shift",
        matches!(&reduction, ShiftReduction::Inapplicable { .. }),
        match &reduction {
            ShiftReduction::Inapplicable { reason } => reason.clone(),
            ShiftReduction::Applicable { .. } => "unexpectedly applicable".into(),
        },
    ));

    let uniform_shift = vec![int(1), int(1)];
    let applied = shift_reduce(a, &uniform_shift)?;
    let consistent = match &applied {
        ShiftReduction::Applicable { a_cm, delta, y, shifted_value } => {
            let paid = uniform_shift
                .iter()
                .zip(y.iter())
                .fold(int(0), |acc, (bj, yj)| acc + bj * yj);
            *a_cm
                && *delta == sol_a.value
                && y == sol_a.canonical_p2()
                && delta.clone() + paid == *shifted_value
        }
        ShiftReduction::Inapplicable { .. } => false,
    };
    checks.push(check(
        "reduction applies under the uniform shift (1, 1)",
        consistent,
        "shifted value decomposes as value(A) plus the shift paid under the shared optimal",
    ));
    Ok(checks)
}

fn witnessed_zero(report: &UndiscountedCmReport) -> bool {
    let failing_witnessed = (report.p1_completely_mixed || report.p1_witness.is_some())
        && (report.p2_completely_mixed || report.p2_witness.is_some());
    let has_zero = report
        .p1_witness
        .iter()
        .chain(report.p2_witness.iter())
        .any(|w| w.zero_coordinate.is_some());
    failing_witnessed && has_zero
}

fn absorbing(game: &StochasticGame, options: &CmOptions) -> Result<Vec<Check>, CliError> {
    let mut checks = Vec::new();
    let beta = Discount::new(rat(1, 2))?;
    let sol = solve_discounted_exact(game, &beta)?;
    checks.push(check(
        "discounted values (5/2, 2) at beta 1/2",
        sol.values == vec![rat(5, 2), int(2)] && sol.exact,
        format!("values {}, exact {}", fmt_values(&sol.values), sol.exact),
    ));
    let aux = auxiliary_matrix(game, 0, &beta, &sol.values)?;
    checks.push(check(
        "auxiliary game [[1, 3], [4, 2]] at state 1",
        aux == vec![vec![int(1), int(3)], vec![int(4), int(2)]],
        format!("auxiliary {}", serialize_matrix(&aux)),
    ));
    let sweep = cm::beta_threshold_search(game, &cm::default_beta_grid())?;
    checks.push(check(
        "completely mixed at every grid beta",
        sweep.all_cm,
        format!("all_cm {}", sweep.all_cm),
    ));
    let undisc = cm::check_cm_undiscounted(game, options)?;
    checks.push(check(
        "limiting value (1, 1)",
        undisc.value == vec![int(1), int(1)],
        format!("value {}", fmt_values(&undisc.value)),
    ));
    checks.push(check(
        "undiscounted not completely mixed, zero coordinate witnessed",
        !undisc.completely_mixed && witnessed_zero(&undisc),
        format!("completely_mixed {}", undisc.completely_mixed),
    ));
    Ok(checks)
}

fn symmetric(game: &StochasticGame, options: &CmOptions) -> Result<Vec<Check>, CliError> {
    let mut checks = Vec::new();
    let grid = cm::default_beta_grid();
    let mut closed_form = true;
    for beta in &grid {
        let sol = solve_discounted_exact(game, beta)?;
        let expected = beta.complement().recip();
        if sol.values != vec![expected.clone(), expected] || !sol.exact {
            closed_form = false;
        }
    }
    checks.push(check(
        "values 1/(1 - beta) in both states across grid",
        closed_form,
        format!("{} grid points", grid.len()),
    ));
    let sweep = cm::beta_threshold_search(game, &grid)?;
    checks.push(check(
        "completely mixed at every grid beta",
        sweep.all_cm,
        format!("all_cm {}", sweep.all_cm),
    ));
    let undisc = cm::check_cm_undiscounted(game, options)?;
    checks.push(check(
        "undiscounted completely mixed",
        undisc.completely_mixed,
        format!("value {}", fmt_values(&undisc.value)),
    ));
    let sym = cm::verify_symmetric_cm(game, options)?;
    checks.push(check(
        "symmetric-case check passes",
        sym.applicable && sym.pass && sym.per_state_cm == vec![true, true],
        format!("applicable {}, pass {}", sym.applicable, sym.pass),
    ));
    Ok(checks)
}

fn three_state(game: &StochasticGame, options: &CmOptions) -> Result<Vec<Check>, CliError> {
    let mut checks = Vec::new();
    let trace = cm::vanishing_discount(game, options)?;
    let limit = vec![int(0), int(1), int(0)];
    checks.push(check(
        "limit value certified as (0, 1, 0)",
        trace.certified_value() == Some(&limit),
        match trace.certified_value() {
            Some(v) => format!("certified {}", fmt_values(v)),
            None => "not certified".into(),
        },
    ));
    let grid = cm::default_beta_grid();
    let mut aux_value_two = true;
    let mut state1_nonzero = true;
    for beta in &grid {
        let sol = solve_discounted_exact(game, beta)?;
        if sol.values[0] == int(0) {
            state1_nonzero = false;
        }
        let aux = auxiliary_matrix(game, 0, beta, &sol.values)?;
        if game_value(&aux)? != int(2) {
            aux_value_two = false;
        }
    }
    checks.push(check(
        "auxiliary value 2 at state 1 across grid",
        aux_value_two,
        "row 1 dominates row 2 in every auxiliary game at state 1, pinning its value at 2",
    ));
    checks.push(check(
        "discounted value nonzero at state 1 across grid",
        state1_nonzero,
        format!("{} grid points", grid.len()),
    ));
    let threshold = cm::verify_nonzero_threshold(game, &grid, options)?;
    checks.push(check(
        "nonzero-threshold check passes",
        threshold.pass,
        format!("pass {}", threshold.pass),
    ));
    checks.push(check(
        "converse violation recorded at state 1",
        threshold.converse_violations == vec![0],
        format!(
            "violations {:?}",
            threshold.converse_violations.iter().map(|s| s + 1).collect::<Vec<_>>()
        ),
    ));
    Ok(checks)
}
