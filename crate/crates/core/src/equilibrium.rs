//! Stationary deterministic Nash equilibrium by backward recursion over the
//! number of survivors.
//!
//! With the payoffs of every `(K - 1)`-survivor state known, the mover of a
//! `K`-survivor state shoots the opponent whose removal leaves it the highest
//! payoff. Those targets only enter the right-hand side of the mover's own
//! equation, so the choice is a best response at every state of the level
//! simultaneously, whatever the other players do there.

use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{invalid, Result};
use crate::marksmanship::Marksmanships;
use crate::payoff::{self, seed_base_cases, solve_level, solve_nuel, LevelStats, PayoffTable, SolverConfig};
use crate::profile::{StrategyProfile, TargetDistribution};
use crate::state::{GameState, Player, StateSpace};

/// Continuation payoffs closer than this are treated as equal.
pub const TIE_TOLERANCE: f64 = 1e-12;

/// How to pick among targets with equal continuation payoff.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TieBreak {
    /// The tied target with the smallest player index.
    #[default]
    LowestIndex,
    /// The tied target that comes first in turn order after the mover.
    NextInTurn,
}

/// A state where several targets attain the best continuation payoff.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Tie {
    pub state: GameState,
    pub targets: Vec<Player>,
    pub chosen: Player,
}

#[derive(Debug, Clone)]
pub struct EquilibriumResult {
    pub p: Marksmanships,
    pub profile: StrategyProfile,
    pub payoffs: PayoffTable,
    pub ties: Vec<Tie>,
    pub tie_break: TieBreak,
    /// Solve statistics for survivor counts `3..=N`.
    pub levels: Vec<LevelStats>,
}

impl EquilibriumResult {
    pub fn n_players(&self) -> usize {
        self.p.n_players()
    }

    /// Target of `mover` when everybody is alive: the σ̂_n(s_n) row of the
    /// usual experiment tables.
    pub fn full_targets(&self) -> Vec<Player> {
        let n = self.n_players();
        (1..=n)
            .map(|m| {
                let s = GameState::all_alive(n, m).expect("valid state");
                self.profile.target(&s).expect("pure profile")
            })
            .collect()
    }

    /// Whether the marksmanships satisfy the assumptions under which the
    /// equilibrium is guaranteed (all strictly inside (0, 1)).
    pub fn is_strict(&self) -> bool {
        self.p.is_strict()
    }
}

fn space_for(p: &Marksmanships) -> Result<Arc<StateSpace>> {
    Ok(Arc::new(StateSpace::new(p.n_players())?))
}

/// The three-player rule: each mover shoots the opponent with the higher
/// marksmanship, the smaller index on equality.
pub fn strongest_opponent_profile(p: &Marksmanships) -> Result<StrategyProfile> {
    if p.n_players() != 3 {
        return Err(invalid("the strongest-opponent rule is defined for three players"));
    }
    StrategyProfile::pure_from_fn(space_for(p)?, |s| {
        s.alive_opponents()
            .fold(None::<Player>, |best, i| match best {
                Some(b) if p.of(b) >= p.of(i) => Some(b),
                _ => Some(i),
            })
            .expect("live opponent")
    })
}

/// Chooses a target at `s` from the solved `(K - 1)`-survivor payoffs.
/// Returns the target and the full tied set when it has several members.
fn best_target(s: &GameState, lower: &PayoffTable, tie_break: TieBreak) -> Result<(Player, Vec<Player>)> {
    let mover = s.mover();
    let scored = s
        .alive_opponents()
        .map(|i| Ok((i, lower.try_get(mover, &s.next_on_kill(i)?)?)))
        .collect::<Result<Vec<_>>>()?;
    let best = scored.iter().map(|(_, v)| *v).fold(f64::NEG_INFINITY, f64::max);
    let tied: Vec<Player> = scored
        .iter()
        .filter(|(_, v)| best - v <= TIE_TOLERANCE)
        .map(|(i, _)| *i)
        .collect();
    let n = s.n_players();
    let chosen = match tie_break {
        TieBreak::LowestIndex => tied[0],
        TieBreak::NextInTurn => *tied
            .iter()
            .min_by_key(|&&i| (i + n - mover) % n)
            .expect("nonempty"),
    };
    Ok((chosen, tied))
}

/// Equilibrium with the lowest-index tie-break.
pub fn nash_compute(p: &Marksmanships, cfg: &SolverConfig) -> Result<EquilibriumResult> {
    nash_compute_with(p, cfg, TieBreak::LowestIndex)
}

/// Backward recursion over survivor counts `3..=N`.
///
/// Marksmanships on the boundary of [0, 1] are accepted; the recursion then
/// either succeeds or fails with the singular combination and no partial
/// result.
pub fn nash_compute_with(p: &Marksmanships, cfg: &SolverConfig, tie_break: TieBreak) -> Result<EquilibriumResult> {
    cfg.validate()?;
    let space = space_for(p)?;
    let mut payoffs = seed_base_cases(space.clone(), p)?;
    let mut profile = StrategyProfile::shoot_next(space.clone());
    let mut ties = Vec::new();
    let mut levels = Vec::new();
    for k in 3..=p.n_players() {
        let level: Vec<GameState> = space
            .states()
            .iter()
            .filter(|s| s.alive_count() == k)
            .copied()
            .collect();
        for s in &level {
            let (chosen, tied) = best_target(s, &payoffs, tie_break)?;
            if tied.len() > 1 {
                ties.push(Tie {
                    state: *s,
                    targets: tied,
                    chosen,
                });
            }
            profile.set(s, TargetDistribution::pure(chosen))?;
        }
        levels.push(solve_level(&mut payoffs, k, p, &profile, cfg)?);
    }
    payoff::finish(&mut payoffs);
    Ok(EquilibriumResult {
        p: p.clone(),
        profile,
        payoffs,
        ties,
        tie_break,
        levels,
    })
}

/// A single-state deviation that raised the deviator's payoff somewhere.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub player: Player,
    pub state: GameState,
    pub target: Player,
    /// State where the gain is largest.
    pub witness: GameState,
    pub baseline: f64,
    pub deviated: f64,
}

impl Violation {
    pub fn gain(&self) -> f64 {
        self.deviated - self.baseline
    }
}

/// All eight pure stationary profiles of a three-player game.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExhaustiveScan {
    /// Targets of movers 1, 2, 3 at the all-alive states, one entry per
    /// profile that admits no profitable unilateral switch.
    pub equilibria: Vec<[Player; 3]>,
    /// Whether the profile under test is among them.
    pub confirmed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeviationReport {
    pub deviations_checked: usize,
    pub tolerance: f64,
    pub violations: Vec<Violation>,
    pub exhaustive: Option<ExhaustiveScan>,
}

impl DeviationReport {
    pub fn is_equilibrium(&self) -> bool {
        self.violations.is_empty() && self.exhaustive.as_ref().is_none_or(|e| e.confirmed)
    }
}

/// Default tolerance for [`best_response_check`].
pub const DEVIATION_TOLERANCE: f64 = 1e-9;

/// Re-solves the game for every single-state pure deviation of every player
/// and records any deviation that raises the deviator's payoff at some state
/// by more than `tolerance`. For three players the eight pure profiles are
/// also scanned exhaustively.
pub fn best_response_check(
    result: &EquilibriumResult,
    cfg: &SolverConfig,
    tolerance: f64,
) -> Result<DeviationReport> {
    let p = &result.p;
    let profile = &result.profile;
    let base = &result.payoffs;
    let candidates: Vec<(GameState, Player)> = profile
        .iter()
        .filter(|(s, _)| s.alive_count() >= 3)
        .flat_map(|(s, x)| {
            let current = x.as_pure();
            s.alive_opponents()
                .filter(move |t| Some(*t) != current)
                .map(move |t| (*s, t))
        })
        .collect();

    let violations = candidates
        .par_iter()
        .map(|&(s, t)| -> Result<Option<Violation>> {
            let mut deviated = profile.clone();
            deviated.set(&s, TargetDistribution::pure(t))?;
            let table = solve_nuel(p, &deviated, cfg)?;
            Ok(largest_gain(s.mover(), base, &table)
                .filter(|(_, gain)| *gain > tolerance)
                .map(|(witness, _)| Violation {
                    player: s.mover(),
                    state: s,
                    target: t,
                    witness,
                    baseline: base.get(s.mover(), &witness),
                    deviated: table.get(s.mover(), &witness),
                }))
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();

    let exhaustive = if p.n_players() == 3 {
        Some(exhaustive_truel_scan(p, profile, cfg, tolerance)?)
    } else {
        None
    };
    Ok(DeviationReport {
        deviations_checked: candidates.len(),
        tolerance,
        violations,
        exhaustive,
    })
}

fn largest_gain(player: Player, base: &PayoffTable, other: &PayoffTable) -> Option<(GameState, f64)> {
    base.iter()
        .map(|(s, row)| (*s, other.get(player, s) - row[player - 1]))
        .max_by(|a, b| a.1.total_cmp(&b.1))
}

fn truel_profile(space: &Arc<StateSpace>, targets: [Player; 3]) -> Result<StrategyProfile> {
    StrategyProfile::from_fn(space.clone(), |s| {
        let t = if s.alive_count() == 3 {
            targets[s.mover() - 1]
        } else {
            s.alive_opponents().next().expect("opponent")
        };
        Ok(TargetDistribution::pure(t))
    })
}

fn exhaustive_truel_scan(
    p: &Marksmanships,
    profile: &StrategyProfile,
    cfg: &SolverConfig,
    tolerance: f64,
) -> Result<ExhaustiveScan> {
    let space = profile.space();
    let options = |m: Player| -> [Player; 2] {
        let mut o = (1..=3).filter(|&i| i != m);
        [o.next().unwrap(), o.next().unwrap()]
    };
    let mut all = Vec::with_capacity(8);
    for a in options(1) {
        for b in options(2) {
            for c in options(3) {
                all.push([a, b, c]);
            }
        }
    }
    let tables = all
        .iter()
        .map(|t| solve_nuel(p, &truel_profile(space, *t)?, cfg))
        .collect::<Result<Vec<_>>>()?;
    let position = |t: &[Player; 3]| all.iter().position(|x| x == t).expect("listed");

    let equilibria: Vec<[Player; 3]> = all
        .iter()
        .enumerate()
        .filter(|(i, targets)| {
            (1..=3).all(|m| {
                let mut alt = **targets;
                alt[m - 1] = options(m).into_iter().find(|&o| o != targets[m - 1]).unwrap();
                largest_gain(m, &tables[*i], &tables[position(&alt)])
                    .is_none_or(|(_, gain)| gain <= tolerance)
            })
        })
        .map(|(_, t)| *t)
        .collect();
    let under_test = [1, 2, 3].map(|m| {
        profile
            .target(&GameState::all_alive(3, m).expect("valid"))
            .unwrap_or(0)
    });
    Ok(ExhaustiveScan {
        confirmed: equilibria.contains(&under_test),
        equilibria,
    })
}
