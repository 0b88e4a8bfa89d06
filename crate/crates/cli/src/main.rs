//! `cmstoch` — exact analysis of zero-sum stochastic games whose
//! transitions depend only on player 2's action.
//!
//! Every command prints one JSON report to stdout: the echoed command, a
//! SHA-256 fingerprint of the canonicalized input, the library version, and
//! the result payload. Reports are byte-identical across runs on the same
//! input; timing goes to stderr. Exit codes: 0 success, 2 input error,
//! 3 size guard tripped, 4 analysis inconclusive.

mod render;
mod reproduce;

use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand};
use cmstoch::average::verify_optimal_undiscounted;
use cmstoch::cm::{self, CmOptions, Guard};
use cmstoch::discounted::{shapley_iterate, solve_discounted_exact, Discount};
use cmstoch::format::{
    parse_game, parse_matrix, parse_strategy, serialize_game, serialize_matrix,
    serialize_strategy, ParseError,
};
use cmstoch::matrix_game::{is_completely_mixed, shift_reduce, solve_matrix_game};
use cmstoch::model::{GameError, StochasticGame};
use cmstoch::rational::{format_rational, parse_rational, Rational};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

#[derive(Parser)]
#[command(name = "cmstoch", version, about = "Exact solver and complete-mixture analyzer for player-2-controlled stochastic games")]
struct Cli {
    /// Pretty-print the JSON report.
    #[arg(long, global = true)]
    pretty: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve a game exactly.
    #[command(subcommand)]
    Solve(SolveCommand),
    /// Matrix-game utilities.
    #[command(subcommand)]
    Matrix(MatrixCommand),
    /// Check a stationary strategy pair for limiting-average optimality.
    VerifyUndiscounted {
        /// Game file.
        game: PathBuf,
        /// Player 1 strategy file.
        #[arg(long)]
        f: PathBuf,
        /// Player 2 strategy file.
        #[arg(long)]
        g: PathBuf,
    },
    /// Decide complete mixing across discount factors, optionally in the
    /// limit.
    AnalyzeCm {
        /// Game file.
        game: PathBuf,
        /// Comma-separated increasing discount factors (default
        /// 1/2,3/4,9/10,99/100,999/1000).
        #[arg(long)]
        beta_grid: Option<String>,
        /// Also run the undiscounted analysis.
        #[arg(long)]
        undiscounted: bool,
        /// Schedule length for the vanishing-discount trace (default 20).
        #[arg(long)]
        schedule_n: Option<u32>,
        /// Convergence tolerance on normalized values (default 1/1024).
        #[arg(long)]
        tol: Option<String>,
    },
    /// Run the structural checks: the symmetric-payoff consequence and the
    /// nonzero-value threshold.
    VerifyTheorems {
        /// Game file.
        game: PathBuf,
        /// Comma-separated increasing discount factors (default
        /// 1/2,3/4,9/10,99/100,999/1000).
        #[arg(long)]
        beta_grid: Option<String>,
        /// Schedule length for the vanishing-discount trace (default 20).
        #[arg(long)]
        schedule_n: Option<u32>,
        /// Convergence tolerance on normalized values (default 1/1024).
        #[arg(long)]
        tol: Option<String>,
    },
    /// Re-run the bundled examples and compare against expected results.
    Reproduce {
        /// Run a single example by name.
        #[arg(long, conflicts_with = "all")]
        example: Option<String>,
        /// Run every example (the default when no name is given).
        #[arg(long)]
        all: bool,
        /// Write each example's canonical input file into this directory.
        #[arg(long, value_name = "DIR")]
        emit_fixtures: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum SolveCommand {
    /// Solve a matrix game given inline as JSON rows of rationals.
    Matrix {
        #[arg(long)]
        matrix: String,
    },
    /// Solve the beta-discounted game.
    Discounted {
        /// Game file.
        game: PathBuf,
        /// Discount factor in [0, 1), e.g. 1/2.
        #[arg(long)]
        beta: String,
        /// Run value iteration to this tolerance instead of solving exactly.
        #[arg(long)]
        tol: Option<String>,
    },
}

#[derive(Subcommand)]
enum MatrixCommand {
    /// Solve and print optimal vertices with the complete-mixture
    /// certificate.
    Solve {
        #[arg(long)]
        matrix: String,
    },
    /// Print only the complete-mixture certificate.
    CmCheck {
        #[arg(long)]
        matrix: String,
    },
    /// Reduce a symmetric positive matrix game against a column shift and
    /// report the shared optimal strategy.
    ShiftReduce {
        #[arg(long)]
        matrix: String,
        /// Nonnegative per-column shift as a JSON array of rationals.
        #[arg(long)]
        shift: String,
    },
}

#[derive(Debug)]
pub enum CliError {
    Input(String),
    Guard(String),
    Inconclusive(String),
    Internal(String),
}

impl CliError {
    fn kind(&self) -> &'static str {
        match self {
            CliError::Input(_) => "input",
            CliError::Guard(_) => "guard",
            CliError::Inconclusive(_) => "inconclusive",
            CliError::Internal(_) => "internal",
        }
    }

    fn code(&self) -> i32 {
        match self {
            CliError::Input(_) => 2,
            CliError::Guard(_) => 3,
            CliError::Inconclusive(_) | CliError::Internal(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Input(m)
            | CliError::Guard(m)
            | CliError::Inconclusive(m)
            | CliError::Internal(m) => m,
        }
    }
}

impl From<GameError> for CliError {
    fn from(err: GameError) -> Self {
        match err {
            GameError::GuardExceeded { .. } => CliError::Guard(err.to_string()),
            GameError::Inconclusive(_) => CliError::Inconclusive(err.to_string()),
            GameError::Internal(_) => CliError::Internal(err.to_string()),
            other => CliError::Input(other.to_string()),
        }
    }
}

impl From<ParseError> for CliError {
    fn from(err: ParseError) -> Self {
        CliError::Input(err.to_string())
    }
}

struct RunOutput {
    command: &'static str,
    fingerprint_source: Vec<u8>,
    payload: Value,
    failure: Option<CliError>,
}

impl RunOutput {
    fn ok(command: &'static str, source: impl Into<Vec<u8>>, payload: Value) -> Self {
        RunOutput { command, fingerprint_source: source.into(), payload, failure: None }
    }
}

fn main() {
    let cli = Cli::parse();
    let start = Instant::now();
    match run(&cli) {
        Ok(out) => {
            let report = json!({
                "command": out.command,
                "fingerprint": fingerprint(&out.fingerprint_source),
                "version": env!("CARGO_PKG_VERSION"),
                "payload": out.payload,
            });
            let text = if cli.pretty {
                serde_json::to_string_pretty(&report)
            } else {
                serde_json::to_string(&report)
            }
            .expect("report serialization");
            println!("{text}");
            eprintln!("elapsed_ms: {}", start.elapsed().as_millis());
            if let Some(err) = out.failure {
                fail(&err);
            }
        }
        Err(err) => {
            eprintln!("elapsed_ms: {}", start.elapsed().as_millis());
            fail(&err);
        }
    }
}

fn fail(err: &CliError) -> ! {
    eprintln!("{}", json!({ "error": err.message(), "kind": err.kind() }));
    std::process::exit(err.code())
}

fn fingerprint(source: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(source);
    hex::encode(hasher.finalize())
}

fn read_file(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn read_game(path: &Path) -> Result<StochasticGame, CliError> {
    Ok(parse_game(&read_file(path)?)?)
}

fn parse_flag_rational(flag: &str, text: &str) -> Result<Rational, CliError> {
    parse_rational(text).map_err(|e| CliError::Input(format!("--{flag}: {e}")))
}

fn parse_beta(text: &str) -> Result<Discount, CliError> {
    Ok(Discount::new(parse_flag_rational("beta", text)?)?)
}

fn parse_grid(text: Option<&str>) -> Result<Vec<Discount>, CliError> {
    match text {
        None => Ok(cm::default_beta_grid()),
        Some(csv) => csv
            .split(',')
            .map(|part| {
                let r = parse_rational(part.trim())
                    .map_err(|e| CliError::Input(format!("--beta-grid: {e}")))?;
                Ok(Discount::new(r)?)
            })
            .collect(),
    }
}

fn build_options(schedule_n: Option<u32>, tol: Option<&str>) -> Result<CmOptions, CliError> {
    let value_tol = match tol {
        Some(text) => parse_flag_rational("tol", text)?,
        None => cm::default_value_tol(),
    };
    Ok(CmOptions {
        schedule: cm::default_schedule(schedule_n.unwrap_or(20)),
        value_tol,
        guard: Guard::from_env()?,
    })
}

fn run(cli: &Cli) -> Result<RunOutput, CliError> {
    match &cli.command {
        Command::Solve(SolveCommand::Matrix { matrix }) => {
            let m = parse_matrix(matrix)?;
            let solution = solve_matrix_game(&m)?;
            Ok(RunOutput::ok(
                "solve matrix",
                serialize_matrix(&m),
                render::matrix_solution(&solution),
            ))
        }
        Command::Solve(SolveCommand::Discounted { game, beta, tol }) => {
            let g = read_game(game)?;
            let beta = parse_beta(beta)?;
            let solution = match tol {
                Some(text) => {
                    let tol = parse_flag_rational("tol", text)?;
                    shapley_iterate(&g, &beta, &tol)?
                }
                None => solve_discounted_exact(&g, &beta)?,
            };
            Ok(RunOutput::ok(
                "solve discounted",
                serialize_game(&g),
                render::discounted_solution(&solution),
            ))
        }
        Command::Matrix(MatrixCommand::Solve { matrix }) => {
            let m = parse_matrix(matrix)?;
            let solution = solve_matrix_game(&m)?;
            Ok(RunOutput::ok(
                "matrix solve",
                serialize_matrix(&m),
                render::matrix_solution(&solution),
            ))
        }
        Command::Matrix(MatrixCommand::CmCheck { matrix }) => {
            let m = parse_matrix(matrix)?;
            let certificate = is_completely_mixed(&m)?;
            Ok(RunOutput::ok(
                "matrix cm-check",
                serialize_matrix(&m),
                render::certificate(&certificate),
            ))
        }
        Command::Matrix(MatrixCommand::ShiftReduce { matrix, shift }) => {
            let m = parse_matrix(matrix)?;
            let entries: Vec<String> = serde_json::from_str(shift)
                .map_err(|e| CliError::Input(format!("--shift: {e}")))?;
            let b = entries
                .iter()
                .map(|s| parse_flag_rational("shift", s))
                .collect::<Result<Vec<_>, _>>()?;
            let reduction = shift_reduce(&m, &b)?;
            let source = format!(
                "{}\n{}\n",
                serialize_matrix(&m),
                serde_json::to_string(&b.iter().map(format_rational).collect::<Vec<_>>())
                    .expect("shift serialization")
            );
            Ok(RunOutput::ok(
                "matrix shift-reduce",
                source,
                render::shift_reduction(&reduction),
            ))
        }
        Command::VerifyUndiscounted { game, f, g } => {
            let gm = read_game(game)?;
            let fs = parse_strategy(&read_file(f)?)?;
            let gs = parse_strategy(&read_file(g)?)?;
            let verification = verify_optimal_undiscounted(&gm, &fs, &gs)?;
            let source = format!(
                "{}\n{}\n{}\n",
                serialize_game(&gm),
                serialize_strategy(&fs),
                serialize_strategy(&gs)
            );
            Ok(RunOutput::ok(
                "verify-undiscounted",
                source,
                render::verification(&verification),
            ))
        }
        Command::AnalyzeCm { game, beta_grid, undiscounted, schedule_n, tol } => {
            let g = read_game(game)?;
            let grid = parse_grid(beta_grid.as_deref())?;
            let sweep = cm::beta_threshold_search(&g, &grid)?;
            let mut per_beta = Vec::with_capacity(grid.len());
            for beta in &grid {
                per_beta.push(render::discounted_cm(&cm::check_cm_discounted(&g, beta)?));
            }
            let mut payload = json!({
                "sweep": render::sweep(&sweep),
                "per_beta": per_beta,
            });
            if *undiscounted {
                let options = build_options(*schedule_n, tol.as_deref())?;
                let report = cm::check_cm_undiscounted(&g, &options)?;
                payload["undiscounted"] = render::undiscounted_cm(&report);
            }
            Ok(RunOutput::ok("analyze-cm", serialize_game(&g), payload))
        }
        Command::VerifyTheorems { game, beta_grid, schedule_n, tol } => {
            let g = read_game(game)?;
            let grid = parse_grid(beta_grid.as_deref())?;
            let options = build_options(*schedule_n, tol.as_deref())?;
            let symmetric = cm::verify_symmetric_cm(&g, &options)?;
            let threshold = cm::verify_nonzero_threshold(&g, &grid, &options)?;
            let payload = json!({
                "symmetric_cm": render::symmetric_cm(&symmetric),
                "nonzero_threshold": render::nonzero_threshold(&threshold),
                "pass": symmetric.pass && threshold.pass,
            });
            Ok(RunOutput::ok("verify-theorems", serialize_game(&g), payload))
        }
        Command::Reproduce { example, all: _, emit_fixtures } => {
            let outcome = reproduce::run(example.as_deref(), emit_fixtures.as_deref())?;
            let failure = (!outcome.pass).then(|| {
                CliError::Inconclusive(
                    "reproduction checks failed; see the payload for details".into(),
                )
            });
            Ok(RunOutput {
                command: "reproduce",
                fingerprint_source: outcome.fingerprint_source,
                payload: outcome.payload,
                failure,
            })
        }
    }
}
