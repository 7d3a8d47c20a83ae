//! Monte Carlo play-outs of a stationary profile.
//!
//! Trials are grouped into fixed batches of [`BATCH_SIZE`]; batch `b` draws
//! from stream `b` of a ChaCha8 generator keyed by the user seed. Wins and
//! step counts are accumulated as integers, so an estimate depends only on
//! the seed and inputs, never on the number of threads.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{invalid, NuelError, Result};
use crate::marksmanship::Marksmanships;
use crate::payoff::PayoffTable;
use crate::profile::StrategyProfile;
use crate::state::{GameState, Player};

pub const DEFAULT_STEP_CAP: usize = 1_000_000;
pub const BATCH_SIZE: u64 = 4096;

/// The history of one play.
#[derive(Debug, Clone, PartialEq)]
pub struct GameTrace {
    pub states: Vec<GameState>,
    pub actions: Vec<Player>,
    pub winner: Player,
}

impl GameTrace {
    pub fn len(&self) -> usize {
        self.actions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.actions.is_empty()
    }

    /// One state per line in text form.
    pub fn dump(&self) -> String {
        self.states.iter().map(|s| format!("{s}\n")).collect()
    }
}

fn sample_target<R: Rng + ?Sized>(profile: &StrategyProfile, s: &GameState, rng: &mut R) -> Result<Player> {
    let x = profile
        .get(s)
        .ok_or_else(|| NuelError::Inconsistent(format!("no action at {s}")))?;
    if let Some(t) = x.as_pure() {
        return Ok(t);
    }
    let u: f64 = rng.random();
    let mut acc = 0.0;
    let mut last = 0;
    for (t, w) in x.iter() {
        acc += w;
        last = t;
        if u < acc {
            return Ok(t);
        }
    }
    Ok(last)
}

fn check_inputs(s0: &GameState, p: &Marksmanships, profile: &StrategyProfile) -> Result<()> {
    if p.n_players() != s0.n_players() || profile.n_players() != s0.n_players() {
        return Err(invalid("state, marksmanships and profile disagree on the game size"));
    }
    Ok(())
}

/// The generator behind [`estimate_payoffs`], on stream 0.
pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Plays one game from `s0` and records the full history.
pub fn simulate_game<R: Rng + ?Sized>(
    s0: GameState,
    p: &Marksmanships,
    profile: &StrategyProfile,
    rng: &mut R,
    step_cap: usize,
) -> Result<GameTrace> {
    check_inputs(&s0, p, profile)?;
    let mut states = vec![s0];
    let mut actions = Vec::new();
    let mut s = s0;
    while !s.is_terminal() {
        if actions.len() >= step_cap {
            return Err(NuelError::NonTermination {
                start: s0.to_string(),
                steps: step_cap,
            });
        }
        let target = sample_target(profile, &s, rng)?;
        let hit = rng.random::<f64>() < p.of(s.mover());
        s = if hit { s.next_on_kill(target)? } else { s.next_on_miss()? };
        actions.push(target);
        states.push(s);
    }
    let winner = s.winner().expect("terminal");
    Ok(GameTrace {
        states,
        actions,
        winner,
    })
}

/// Winner and number of shots, without keeping the history.
fn play_out<R: Rng + ?Sized>(
    s0: GameState,
    p: &Marksmanships,
    profile: &StrategyProfile,
    rng: &mut R,
    step_cap: usize,
) -> Result<(Player, u64)> {
    let mut s = s0;
    let mut steps = 0u64;
    while !s.is_terminal() {
        if steps as usize >= step_cap {
            return Err(NuelError::NonTermination {
                start: s0.to_string(),
                steps: step_cap,
            });
        }
        let target = sample_target(profile, &s, rng)?;
        let hit = rng.random::<f64>() < p.of(s.mover());
        s = if hit { s.next_on_kill(target)? } else { s.next_on_miss()? };
        steps += 1;
    }
    Ok((s.winner().expect("terminal"), steps))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EstimateReport {
    pub s0: GameState,
    pub trials: u64,
    pub seed: u64,
    /// Win frequency per player.
    pub means: Vec<f64>,
    /// `sqrt(mean (1 - mean) / trials)` per player.
    pub stderr: Vec<f64>,
    /// Average number of shots per game.
    pub mean_length: f64,
    /// Standard error of `mean_length`.
    pub length_stderr: f64,
}

impl EstimateReport {
    /// `(estimate - reference) / stderr` per player. A zero standard error
    /// yields 0 when the values agree to 1e-12 and infinity otherwise.
    pub fn deviations(&self, reference: &[f64]) -> Vec<f64> {
        self.means
            .iter()
            .zip(&self.stderr)
            .zip(reference)
            .map(|((m, se), r)| {
                let d = m - r;
                if *se > 0.0 {
                    d / se
                } else if d.abs() <= 1e-12 {
                    0.0
                } else {
                    d.signum() * f64::INFINITY
                }
            })
            .collect()
    }

    /// Deviations from the solver's payoffs at the starting state.
    pub fn deviations_from(&self, table: &PayoffTable) -> Vec<f64> {
        self.deviations(table.row(&self.s0))
    }

    /// True when every player lies within `k` standard errors of `reference`.
    pub fn agrees_within(&self, reference: &[f64], k: f64) -> bool {
        self.deviations(reference).iter().all(|d| d.abs() <= k)
    }
}

#[derive(Default)]
struct Tally {
    wins: Vec<u64>,
    steps: u64,
    steps_sq: u128,
}

impl Tally {
    fn merge(mut self, other: Tally) -> Tally {
        if self.wins.is_empty() {
            return other;
        }
        for (a, b) in self.wins.iter_mut().zip(other.wins) {
            *a += b;
        }
        self.steps += other.steps;
        self.steps_sq += other.steps_sq;
        self
    }
}

/// Estimates every player's winning probability from `s0` over `trials`
/// independent plays.
pub fn estimate_payoffs(
    s0: GameState,
    p: &Marksmanships,
    profile: &StrategyProfile,
    trials: u64,
    seed: u64,
) -> Result<EstimateReport> {
    estimate_payoffs_with_cap(s0, p, profile, trials, seed, DEFAULT_STEP_CAP)
}

pub fn estimate_payoffs_with_cap(
    s0: GameState,
    p: &Marksmanships,
    profile: &StrategyProfile,
    trials: u64,
    seed: u64,
    step_cap: usize,
) -> Result<EstimateReport> {
    if trials == 0 {
        return Err(invalid("at least one trial is required"));
    }
    check_inputs(&s0, p, profile)?;
    let n = s0.n_players();
    let batches = trials.div_ceil(BATCH_SIZE);
    let tally = (0..batches)
        .into_par_iter()
        .map(|b| -> Result<Tally> {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(b);
            let count = BATCH_SIZE.min(trials - b * BATCH_SIZE);
            let mut t = Tally {
                wins: vec![0; n],
                ..Tally::default()
            };
            for _ in 0..count {
                let (winner, steps) = play_out(s0, p, profile, &mut rng, step_cap)?;
                t.wins[winner - 1] += 1;
                t.steps += steps;
                t.steps_sq += (steps as u128) * (steps as u128);
            }
            Ok(t)
        })
        .try_reduce(Tally::default, |a, b| Ok(a.merge(b)))?;

    let tf = trials as f64;
    let means: Vec<f64> = tally.wins.iter().map(|&w| w as f64 / tf).collect();
    let stderr = means.iter().map(|m| (m * (1.0 - m) / tf).sqrt()).collect();
    let mean_length = tally.steps as f64 / tf;
    let var_length = (tally.steps_sq as f64 / tf - mean_length * mean_length).max(0.0);
    Ok(EstimateReport {
        s0,
        trials,
        seed,
        means,
        stderr,
        mean_length,
        length_stderr: (var_length / tf).sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::StateSpace;
    use std::sync::Arc;

    fn setup(p: &[f64]) -> (Marksmanships, StrategyProfile) {
        let m = Marksmanships::new(p.to_vec()).unwrap();
        let space = Arc::new(StateSpace::new(p.len()).unwrap());
        (m, StrategyProfile::uniform(space))
    }

    #[test]
    fn perfect_duel_ends_in_one_shot() {
        let (p, profile) = setup(&[1.0, 1.0]);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let s0: GameState = "111".parse().unwrap();
        let trace = simulate_game(s0, &p, &profile, &mut rng, DEFAULT_STEP_CAP).unwrap();
        assert_eq!(trace.winner, 1);
        assert_eq!(trace.len(), 1);
        assert_eq!(trace.states.len(), trace.len() + 1);
        assert_eq!(trace.dump(), "111\n010\n");
    }

    #[test]
    fn blind_players_hit_the_step_cap() {
        let (p, profile) = setup(&[0.0, 0.0]);
        let s0: GameState = "111".parse().unwrap();
        let err = estimate_payoffs_with_cap(s0, &p, &profile, 1, 0, 1000).unwrap_err();
        assert!(matches!(err, NuelError::NonTermination { steps: 1000, .. }));
    }

    #[test]
    fn single_trial_is_degenerate() {
        let (p, profile) = setup(&[0.4, 0.6, 0.5]);
        let s0 = GameState::all_alive(3, 1).unwrap();
        let r = estimate_payoffs(s0, &p, &profile, 1, 11).unwrap();
        assert!(r.means.iter().all(|m| *m == 0.0 || *m == 1.0));
        assert_eq!(r.means.iter().sum::<f64>(), 1.0);
        assert!(r.stderr.iter().all(|se| *se == 0.0));
        assert!(estimate_payoffs(s0, &p, &profile, 0, 11).is_err());
    }

    #[test]
    fn seed_determines_the_report() {
        let (p, profile) = setup(&[0.4, 0.6, 0.5]);
        let s0 = GameState::all_alive(3, 2).unwrap();
        let a = estimate_payoffs(s0, &p, &profile, 10_000, 5).unwrap();
        let b = estimate_payoffs(s0, &p, &profile, 10_000, 5).unwrap();
        let c = estimate_payoffs(s0, &p, &profile, 10_000, 6).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.means, c.means);
    }

    #[test]
    fn zero_stderr_deviation() {
        let (p, profile) = setup(&[1.0, 1.0]);
        let s0: GameState = "111".parse().unwrap();
        let r = estimate_payoffs(s0, &p, &profile, 10, 1).unwrap();
        assert_eq!(r.means, [1.0, 0.0]);
        assert_eq!(r.deviations(&[1.0, 0.0]), [0.0, 0.0]);
        assert!(r.deviations(&[0.9, 0.1])[0].is_infinite());
    }
}
