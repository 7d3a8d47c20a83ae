//! Solvers for sequential N-player shooting games ("nuels").
//!
//! Players take turns in a fixed cyclic order; the player holding the move
//! must shoot at one live opponent and kills it with probability equal to
//! its marksmanship. The last survivor wins one unit. This crate computes
//! each player's winning probability from every state under a stationary
//! strategy profile ([`payoff::solve_nuel`]), the stationary deterministic
//! Nash equilibrium obtained by backward recursion over the number of
//! survivors ([`equilibrium::nash_compute`]), and Monte Carlo estimates of
//! the same quantities ([`montecarlo`]).

pub mod equilibrium;
pub mod error;
pub mod experiments;
pub mod io;
pub mod marksmanship;
pub mod montecarlo;
pub mod payoff;
pub mod profile;
pub mod state;
pub mod sweep;
pub mod transition;

pub use equilibrium::{best_response_check, nash_compute, nash_compute_with, EquilibriumResult, TieBreak};
pub use error::{NuelError, Result};
pub use marksmanship::Marksmanships;
pub use payoff::{solve_nuel, Method, PayoffTable, SolverConfig};
pub use profile::{StrategyProfile, TargetDistribution};
pub use state::{enumerate_states, GameState, Player, StateSpace, MAX_PLAYERS};
pub use transition::{transition_distribution, TransitionDistribution};
