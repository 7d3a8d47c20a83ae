//! Payoff tables under a fixed stationary profile.
//!
//! Payoffs are filled one survivor count at a time: terminal indicators and
//! closed-form duels first, then for every `K = 3..N` and every combination of
//! `K` live players the cyclic system of [`subsystem`], which only needs the
//! already-known `K - 1` level.

mod duel;
pub mod subsystem;

use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, NuelError, Result};
use crate::marksmanship::Marksmanships;
use crate::profile::StrategyProfile;
use crate::state::{masks_with_count, players_in, GameState, Player, StateSpace};

pub use duel::{duel_payoffs, DuelPayoffs};
pub use subsystem::{build_subsystem, iter_solve, solve_subsystem_exact, IterOutcome, LinearSubsystem};

/// How each cyclic system is solved.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    #[default]
    Exact,
    Iterative,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    /// Stop the iteration once no value moves by this much in one sweep.
    pub epsilon: f64,
    pub max_iterations: usize,
    pub method: Method,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            epsilon: 1e-12,
            max_iterations: 1_000_000,
            method: Method::Exact,
        }
    }
}

impl SolverConfig {
    pub fn iterative(epsilon: f64) -> Self {
        Self {
            epsilon,
            method: Method::Iterative,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.epsilon.is_nan() || self.epsilon <= 0.0 {
            return Err(invalid(format!("epsilon must be positive, got {}", self.epsilon)));
        }
        if self.max_iterations == 0 {
            return Err(invalid("max_iterations must be at least 1"));
        }
        Ok(())
    }
}

/// `V[n, s]`: probability that player `n` is the last survivor when play
/// starts in state `s`.
///
/// A table may be partial while it is being filled; [`PayoffTable::try_get`]
/// reports states that have not been solved yet.
#[derive(Debug, Clone)]
pub struct PayoffTable {
    space: Arc<StateSpace>,
    values: Vec<f64>,
    known: Vec<bool>,
}

impl PartialEq for PayoffTable {
    fn eq(&self, other: &Self) -> bool {
        self.space.n_players() == other.space.n_players()
            && self.values == other.values
            && self.known == other.known
    }
}

impl PayoffTable {
    pub fn empty(space: Arc<StateSpace>) -> Self {
        let len = space.len();
        let n = space.n_players();
        Self {
            space,
            values: vec![0.0; len * n],
            known: vec![false; len],
        }
    }

    pub fn space(&self) -> &Arc<StateSpace> {
        &self.space
    }

    pub fn n_players(&self) -> usize {
        self.space.n_players()
    }

    /// Payoffs of all players at `s`, entry `n - 1` for player `n`.
    pub fn row(&self, s: &GameState) -> &[f64] {
        let n = self.n_players();
        let i = self.space.index(s);
        &self.values[i * n..(i + 1) * n]
    }

    /// `V[player, s]`; zero for states not filled yet.
    pub fn get(&self, player: Player, s: &GameState) -> f64 {
        self.row(s)[player - 1]
    }

    /// `V[player, s]`, failing when `s` has not been solved.
    pub fn try_get(&self, player: Player, s: &GameState) -> Result<f64> {
        if !self.is_known(s) {
            return Err(NuelError::Inconsistent(format!("payoffs at {s} not computed yet")));
        }
        Ok(self.get(player, s))
    }

    pub fn is_known(&self, s: &GameState) -> bool {
        self.known[self.space.index(s)]
    }

    pub fn is_complete(&self) -> bool {
        self.known.iter().all(|k| *k)
    }

    pub fn set_row(&mut self, s: &GameState, row: &[f64]) -> Result<()> {
        let n = self.n_players();
        if row.len() != n {
            return Err(invalid(format!("expected {n} payoffs, got {}", row.len())));
        }
        let i = self.space.index(s);
        self.values[i * n..(i + 1) * n].copy_from_slice(row);
        self.known[i] = true;
        Ok(())
    }

    /// Known states with their payoff rows, canonical order.
    pub fn iter(&self) -> impl Iterator<Item = (&GameState, &[f64])> {
        let n = self.n_players();
        self.space
            .states()
            .iter()
            .zip(self.values.chunks(n))
            .zip(&self.known)
            .filter(|(_, k)| **k)
            .map(|(pair, _)| pair)
    }

    /// Largest `|sum_n V[n, s] - 1|` over known states.
    pub fn max_stochasticity_error(&self) -> f64 {
        self.iter()
            .map(|(_, row)| (row.iter().sum::<f64>() - 1.0).abs())
            .fold(0.0, f64::max)
    }

    /// Largest absolute difference to another table over known states.
    pub fn max_abs_diff(&self, other: &PayoffTable) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    fn clamp(&mut self) {
        for v in &mut self.values {
            *v = v.clamp(0.0, 1.0);
        }
    }
}

/// Per-level solve statistics.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LevelStats {
    pub survivors: usize,
    pub systems: usize,
    /// Largest iteration count of any system (0 for the exact method).
    pub max_iterations: usize,
    pub min_determinant: f64,
}

/// Terminal indicators and closed-form duels: every state with one or two
/// survivors.
pub fn seed_base_cases(space: Arc<StateSpace>, p: &Marksmanships) -> Result<PayoffTable> {
    let n = space.n_players();
    if p.n_players() != n {
        return Err(invalid("marksmanship vector does not match the game size"));
    }
    let mut table = PayoffTable::empty(space.clone());
    let mut row = vec![0.0; n];
    for s in space.states().iter().take_while(|s| s.alive_count() <= 2) {
        row.fill(0.0);
        if let Some(w) = s.winner() {
            row[w - 1] = 1.0;
        } else {
            let a = s.mover();
            let b = s.alive_opponents().next().expect("two survivors");
            let duel = duel_payoffs(p.of(a), p.of(b)).map_err(|_| NuelError::SingularSystem {
                combo: s.alive().collect(),
                determinant: 0.0,
            })?;
            row[a - 1] = duel.a_first;
            row[b - 1] = duel.b_first;
        }
        table.set_row(s, &row)?;
    }
    Ok(table)
}

/// Solves every combination of `survivors` live players, given all payoffs
/// with one survivor fewer. Combinations are independent and solved in
/// parallel.
pub fn solve_level(
    table: &mut PayoffTable,
    survivors: usize,
    p: &Marksmanships,
    profile: &StrategyProfile,
    cfg: &SolverConfig,
) -> Result<LevelStats> {
    let n = table.n_players();
    if survivors < 2 || survivors > n {
        return Err(invalid(format!("cannot solve level {survivors} of a {n}-player game")));
    }
    let masks = masks_with_count(n, survivors);
    let lower: &PayoffTable = table;
    let solved = masks
        .par_iter()
        .map(|&alive| solve_combination(alive, lower, p, profile, cfg))
        .collect::<Result<Vec<_>>>()?;

    let mut stats = LevelStats {
        survivors,
        systems: 0,
        max_iterations: 0,
        min_determinant: f64::INFINITY,
    };
    for combo in solved {
        stats.systems += combo.systems;
        stats.max_iterations = stats.max_iterations.max(combo.iterations);
        stats.min_determinant = stats.min_determinant.min(combo.determinant);
        for (s, row) in combo.rows {
            table.set_row(&s, &row)?;
        }
    }
    Ok(stats)
}

struct SolvedCombination {
    rows: Vec<(GameState, Vec<f64>)>,
    systems: usize,
    iterations: usize,
    determinant: f64,
}

fn solve_combination(
    alive: u32,
    lower: &PayoffTable,
    p: &Marksmanships,
    profile: &StrategyProfile,
    cfg: &SolverConfig,
) -> Result<SolvedCombination> {
    let n = lower.n_players();
    let players: Vec<Player> = players_in(alive).collect();
    let mut rows: Vec<(GameState, Vec<f64>)> = Vec::with_capacity(players.len());
    let mut iterations = 0;
    let mut determinant = f64::INFINITY;
    for &focus in &players {
        let sys = build_subsystem(alive, profile, p, lower, focus)?;
        determinant = sys.determinant();
        let z = match cfg.method {
            Method::Exact => solve_subsystem_exact(&sys)?,
            Method::Iterative => {
                let out = iter_solve(&sys, cfg)?;
                iterations = iterations.max(out.iterations);
                out.values
            }
        };
        if rows.is_empty() {
            rows = sys.states().iter().map(|s| (*s, vec![0.0; n])).collect();
        }
        for ((_, row), v) in rows.iter_mut().zip(z) {
            row[focus - 1] = v;
        }
    }
    Ok(SolvedCombination {
        rows,
        systems: players.len(),
        iterations,
        determinant,
    })
}

/// Full payoff table of the game under `profile`.
pub fn solve_nuel(p: &Marksmanships, profile: &StrategyProfile, cfg: &SolverConfig) -> Result<PayoffTable> {
    solve_nuel_with_stats(p, profile, cfg).map(|(t, _)| t)
}

/// As [`solve_nuel`], also returning statistics for levels `3..=N`.
pub fn solve_nuel_with_stats(
    p: &Marksmanships,
    profile: &StrategyProfile,
    cfg: &SolverConfig,
) -> Result<(PayoffTable, Vec<LevelStats>)> {
    cfg.validate()?;
    let space = profile.space().clone();
    let mut table = seed_base_cases(space, p)?;
    let stats = (3..=p.n_players())
        .map(|k| solve_level(&mut table, k, p, profile, cfg))
        .collect::<Result<Vec<_>>>()?;
    table.clamp();
    Ok((table, stats))
}

pub(crate) fn finish(table: &mut PayoffTable) {
    table.clamp();
}
