//! Exact analysis of two-player zero-sum stochastic games whose transitions
//! are controlled by a single player.
//!
//! Everything here runs over arbitrary-precision rationals: matrix games,
//! discounted solutions, limiting-average (undiscounted) verification, and
//! complete-mixing certificates are all computed and checked exactly, with no
//! floating point anywhere in a certification path.
//!
//! The main entry points:
//!
//! * [`format::parse_game`] reads a game from JSON; [`model::StochasticGame`]
//!   holds it and knows which player (if any) controls the transitions.
//! * [`matrix_game::solve_matrix_game`] solves a one-shot matrix game exactly,
//!   enumerates every optimal vertex for both players, and certifies whether
//!   the game is completely mixed.
//! * [`discounted::solve_discounted_exact`] computes the discounted value
//!   vector and optimal stationary strategies exactly for player-2-controlled
//!   games; [`discounted::shapley_iterate`] is the iterative alternative.
//! * [`average::verify_optimal_undiscounted`] certifies a stationary pair as
//!   limiting-average optimal via exact best responses on both sides.
//! * [`cm::check_cm_discounted`], [`cm::check_cm_undiscounted`], and
//!   [`cm::vanishing_discount`] analyze complete mixing and the small-discount
//!   limit, producing witnesses and certificates rather than bare booleans.

pub mod average;
pub mod chains;
pub mod cm;
pub mod discounted;
pub mod fixtures;
pub mod format;
pub mod linalg;
pub mod lp;
pub mod matrix_game;
pub mod model;
pub mod rational;
