//! The cyclic payoff system of one live-player combination.
//!
//! With `K` players `n_1 < ... < n_K` alive, the `K` states `s_k` (mover
//! `n_k`) form a cycle under missed shots: `s_k -> s_{k+1}` and
//! `s_K -> s_1`. For a focus player the payoffs `Z_k` at those states satisfy
//!
//! ```text
//! Z_k - (1 - p_{n_k}) Z_{k+1} = A_k,   A_k = sum_i x_{s_k,i} p_{n_k} V(N_i(s_k))
//! ```
//!
//! where the kill successors `N_i(s_k)` have one player fewer and are already
//! solved.

use crate::error::{NuelError, Result};
use crate::marksmanship::Marksmanships;
use crate::profile::StrategyProfile;
use crate::state::{players_in, GameState, Player};

use super::{PayoffTable, SolverConfig};

/// Determinants at or below this magnitude are treated as singular.
pub const SINGULAR_DETERMINANT: f64 = 1e-14;
/// Maximum residual accepted from the elimination route.
pub const RESIDUAL_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct LinearSubsystem {
    players: Vec<Player>,
    states: Vec<GameState>,
    focus: Player,
    /// `c_k = 1 - p_{n_k}`, the superdiagonal (and corner) magnitudes.
    miss: Vec<f64>,
    rhs: Vec<f64>,
    determinant: f64,
}

impl LinearSubsystem {
    /// Assembles the system directly from its coefficients.
    pub fn from_parts(players: Vec<Player>, states: Vec<GameState>, focus: Player, miss: Vec<f64>, rhs: Vec<f64>) -> Self {
        let determinant = cycle_determinant(&miss);
        Self {
            players,
            states,
            focus,
            miss,
            rhs,
            determinant,
        }
    }

    pub fn order(&self) -> usize {
        self.rhs.len()
    }

    /// Live players of the combination, ascending.
    pub fn players(&self) -> &[Player] {
        &self.players
    }

    /// `s_1, ..., s_K`; `s_k` has mover `players()[k - 1]`.
    pub fn states(&self) -> &[GameState] {
        &self.states
    }

    pub fn focus(&self) -> Player {
        self.focus
    }

    pub fn miss_probabilities(&self) -> &[f64] {
        &self.miss
    }

    pub fn rhs(&self) -> &[f64] {
        &self.rhs
    }

    pub fn determinant(&self) -> f64 {
        self.determinant
    }

    /// Dense coefficient matrix, row-major.
    pub fn matrix(&self) -> Vec<Vec<f64>> {
        let k = self.order();
        (0..k)
            .map(|r| {
                let mut row = vec![0.0; k];
                row[r] += 1.0;
                row[(r + 1) % k] -= self.miss[r];
                row
            })
            .collect()
    }

    /// Largest absolute equation residual of `z`.
    pub fn residual(&self, z: &[f64]) -> f64 {
        let k = self.order();
        (0..k)
            .map(|r| (z[r] - self.miss[r] * z[(r + 1) % k] - self.rhs[r]).abs())
            .fold(0.0, f64::max)
    }

    fn check_nonsingular(&self) -> Result<()> {
        if self.determinant.abs() <= SINGULAR_DETERMINANT {
            return Err(NuelError::SingularSystem {
                combo: self.players.clone(),
                determinant: self.determinant,
            });
        }
        Ok(())
    }

    /// One Jacobi sweep `Z'_k = c_k Z_{k+1} + A_k`.
    pub fn sweep(&self, z: &[f64]) -> Vec<f64> {
        let k = self.order();
        (0..k)
            .map(|r| self.miss[r] * z[(r + 1) % k] + self.rhs[r])
            .collect()
    }

    /// Iterates of the fixed-point sweep starting from `init`, the first
    /// item being the result of one sweep.
    pub fn sweeps(&self, init: Vec<f64>) -> impl Iterator<Item = Vec<f64>> + '_ {
        let mut current = init;
        std::iter::from_fn(move || {
            current = self.sweep(&current);
            Some(current.clone())
        })
    }
}

/// `1 - prod_k c_k`, evaluated through logarithms so that small hit
/// probabilities do not cancel.
fn cycle_determinant(miss: &[f64]) -> f64 {
    let log_prod: f64 = miss.iter().map(|c| c.ln()).sum();
    -log_prod.exp_m1()
}

/// Builds the payoff system of `focus` over the states with survivors
/// `alive`, reading the one-fewer-survivor payoffs from `lower`.
pub fn build_subsystem(
    alive: u32,
    profile: &StrategyProfile,
    p: &Marksmanships,
    lower: &PayoffTable,
    focus: Player,
) -> Result<LinearSubsystem> {
    let n = profile.n_players();
    let players: Vec<Player> = players_in(alive).collect();
    if players.len() < 2 {
        return Err(NuelError::InvalidArgument(
            "a payoff system needs at least two live players".into(),
        ));
    }
    let mut states = Vec::with_capacity(players.len());
    let mut miss = Vec::with_capacity(players.len());
    let mut rhs = Vec::with_capacity(players.len());
    for &mover in &players {
        let s = GameState::new(n, mover, alive)?;
        let x = profile.get(&s).ok_or_else(|| {
            NuelError::Inconsistent(format!("profile has no action at {s}"))
        })?;
        let hit = p.of(mover);
        let mut a = 0.0;
        for (target, w) in x.iter() {
            let next = s.next_on_kill(target)?;
            a += w * hit * lower.try_get(focus, &next)?;
        }
        states.push(s);
        miss.push(1.0 - hit);
        rhs.push(a);
    }
    Ok(LinearSubsystem::from_parts(players, states, focus, miss, rhs))
}

/// Direct solution by elimination around the cycle, `O(K)`.
///
/// Unrolling `Z_k = A_k + c_k Z_{k+1}` once around the cycle gives
/// `D Z_1 = sum_k (c_1 ... c_{k-1}) A_k`; the remaining unknowns follow by
/// back-substitution from `Z_K` down to `Z_2`. If the residual check fails
/// a dense pivoted elimination is used instead.
pub fn solve_subsystem_exact(sys: &LinearSubsystem) -> Result<Vec<f64>> {
    sys.check_nonsingular()?;
    let k = sys.order();
    let mut weight = 1.0;
    let mut acc = 0.0;
    for r in 0..k {
        acc += weight * sys.rhs[r];
        weight *= sys.miss[r];
    }
    let mut z = vec![0.0; k];
    z[0] = acc / sys.determinant;
    for r in (1..k).rev() {
        let next = if r + 1 == k { z[0] } else { z[r + 1] };
        z[r] = sys.rhs[r] + sys.miss[r] * next;
    }
    if sys.residual(&z) <= RESIDUAL_TOLERANCE {
        return Ok(z);
    }
    let z = dense_solve(sys.matrix(), sys.rhs.clone()).ok_or_else(|| NuelError::SingularSystem {
        combo: sys.players.clone(),
        determinant: sys.determinant,
    })?;
    let residual = sys.residual(&z);
    if residual > RESIDUAL_TOLERANCE {
        return Err(NuelError::Inconsistent(format!(
            "residual {residual:e} for live players {:?}",
            sys.players
        )));
    }
    Ok(z)
}

/// Gaussian elimination with partial pivoting.
fn dense_solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[pivot][col].abs() <= SINGULAR_DETERMINANT {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            if f != 0.0 {
                let (upper, lower) = a.split_at_mut(row);
                for (x, y) in lower[0][col..].iter_mut().zip(&upper[col][col..]) {
                    *x -= f * y;
                }
                b[row] -= f * b[col];
            }
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let tail: f64 = (row + 1..n).map(|c| a[row][c] * x[c]).sum();
        x[row] = (b[row] - tail) / a[row][row];
    }
    Some(x)
}

/// Result of the fixed-point iteration.
#[derive(Debug, Clone, PartialEq)]
pub struct IterOutcome {
    pub values: Vec<f64>,
    pub iterations: usize,
}

/// Fixed-point iteration from the zero vector until the largest change of a
/// sweep drops below `cfg.epsilon`.
pub fn iter_solve(sys: &LinearSubsystem, cfg: &SolverConfig) -> Result<IterOutcome> {
    sys.check_nonsingular()?;
    let mut z = vec![0.0; sys.order()];
    let mut last_change = f64::INFINITY;
    for t in 1..=cfg.max_iterations {
        let next = sys.sweep(&z);
        last_change = next
            .iter()
            .zip(&z)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        z = next;
        if last_change < cfg.epsilon {
            return Ok(IterOutcome {
                values: z,
                iterations: t,
            });
        }
    }
    Err(NuelError::NonConvergence {
        iterations: cfg.max_iterations,
        last_change,
    })
}
