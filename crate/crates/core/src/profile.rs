//! Stationary strategy profiles: one target distribution per decision state.

use std::sync::Arc;

use crate::error::{invalid, Result};
use crate::state::{GameState, Player, StateSpace};

const SUM_TOLERANCE: f64 = 1e-9;

/// Probabilities over targets, stored sparsely as `(player, weight)` pairs
/// sorted by player with zero weights dropped.
#[derive(Debug, Clone, PartialEq)]
pub struct TargetDistribution {
    weights: Vec<(Player, f64)>,
}

impl TargetDistribution {
    /// All mass on one target.
    pub fn pure(target: Player) -> Self {
        Self {
            weights: vec![(target, 1.0)],
        }
    }

    /// From sparse pairs. Entries with zero weight are dropped and duplicate
    /// players are rejected.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (Player, f64)>) -> Result<Self> {
        let mut weights: Vec<(Player, f64)> = pairs.into_iter().filter(|(_, w)| *w != 0.0).collect();
        weights.sort_by_key(|(p, _)| *p);
        if weights.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(invalid("duplicate target in distribution"));
        }
        if let Some((p, w)) = weights.iter().find(|(_, w)| !(w.is_finite() && *w > 0.0)) {
            return Err(invalid(format!("weight {w} for target {p} is not a probability")));
        }
        Ok(Self { weights })
    }

    /// From a dense vector of `N` probabilities, entry `n - 1` for player `n`.
    pub fn from_dense(probs: &[f64]) -> Result<Self> {
        Self::from_pairs(probs.iter().enumerate().map(|(i, &w)| (i + 1, w)))
    }

    /// Equal weight on every live opponent of `s`.
    pub fn uniform(s: &GameState) -> Self {
        let opponents: Vec<Player> = s.alive_opponents().collect();
        let w = 1.0 / opponents.len() as f64;
        Self {
            weights: opponents.into_iter().map(|p| (p, w)).collect(),
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (Player, f64)> + '_ {
        self.weights.iter().copied()
    }

    pub fn weight(&self, player: Player) -> f64 {
        self.weights
            .iter()
            .find(|(p, _)| *p == player)
            .map_or(0.0, |(_, w)| *w)
    }

    /// The target when the distribution is degenerate.
    pub fn as_pure(&self) -> Option<Player> {
        match self.weights.as_slice() {
            [(p, w)] if *w == 1.0 => Some(*p),
            _ => None,
        }
    }

    pub fn to_dense(&self, n_players: usize) -> Vec<f64> {
        let mut out = vec![0.0; n_players];
        for (p, w) in self.iter() {
            out[p - 1] = w;
        }
        out
    }

    /// Checks the distribution only targets live opponents and sums to 1.
    pub fn check_admissible(&self, s: &GameState) -> Result<()> {
        if s.is_terminal() {
            return Err(invalid(format!("no action is taken in terminal state {s}")));
        }
        for (p, _) in self.iter() {
            if p == s.mover() || !s.is_alive(p) {
                return Err(invalid(format!(
                    "target {p} is not a live opponent in state {s}"
                )));
            }
        }
        let total: f64 = self.weights.iter().map(|(_, w)| w).sum();
        if (total - 1.0).abs() > SUM_TOLERANCE {
            return Err(invalid(format!(
                "target weights in state {s} sum to {total}, not 1"
            )));
        }
        Ok(())
    }
}

/// A stationary profile covering every decision state of one game size.
///
/// States with two survivors always carry the forced distribution on the
/// sole opponent.
#[derive(Debug, Clone)]
pub struct StrategyProfile {
    space: Arc<StateSpace>,
    actions: Vec<Option<TargetDistribution>>,
}

impl PartialEq for StrategyProfile {
    fn eq(&self, other: &Self) -> bool {
        self.space.n_players() == other.space.n_players() && self.actions == other.actions
    }
}

impl StrategyProfile {
    /// Builds a profile by asking `choose` for the distribution at every
    /// state with three or more survivors.
    pub fn from_fn<F>(space: Arc<StateSpace>, mut choose: F) -> Result<Self>
    where
        F: FnMut(&GameState) -> Result<TargetDistribution>,
    {
        let actions = space
            .states()
            .iter()
            .map(|s| match s.alive_count() {
                1 => Ok(None),
                2 => Ok(Some(forced(s))),
                _ => {
                    let d = choose(s)?;
                    d.check_admissible(s)?;
                    Ok(Some(d))
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { space, actions })
    }

    /// Every mover spreads its shot evenly over its opponents.
    pub fn uniform(space: Arc<StateSpace>) -> Self {
        Self::from_fn(space, |s| Ok(TargetDistribution::uniform(s)))
            .expect("uniform distributions are admissible")
    }

    /// Every mover shoots the next alive player in turn order.
    pub fn shoot_next(space: Arc<StateSpace>) -> Self {
        Self::from_fn(space, |s| {
            let next = s.next_on_miss()?.mover();
            Ok(TargetDistribution::pure(next))
        })
        .expect("next player is a live opponent")
    }

    /// Builds a pure profile from per-state targets.
    pub fn pure_from_fn<F>(space: Arc<StateSpace>, mut target: F) -> Result<Self>
    where
        F: FnMut(&GameState) -> Player,
    {
        Self::from_fn(space, |s| Ok(TargetDistribution::pure(target(s))))
    }

    pub fn space(&self) -> &Arc<StateSpace> {
        &self.space
    }

    pub fn n_players(&self) -> usize {
        self.space.n_players()
    }

    /// The distribution at a decision state, `None` at terminal states.
    pub fn get(&self, s: &GameState) -> Option<&TargetDistribution> {
        self.actions[self.space.index(s)].as_ref()
    }

    /// The pure target at `s`, if the distribution there is degenerate.
    pub fn target(&self, s: &GameState) -> Option<Player> {
        self.get(s).and_then(TargetDistribution::as_pure)
    }

    /// Replaces the distribution at one decision state.
    pub fn set(&mut self, s: &GameState, dist: TargetDistribution) -> Result<()> {
        dist.check_admissible(s)?;
        self.actions[self.space.index(s)] = Some(dist);
        Ok(())
    }

    /// True when every decision state has a degenerate distribution.
    pub fn is_pure(&self) -> bool {
        self.actions
            .iter()
            .flatten()
            .all(|d| d.as_pure().is_some())
    }

    /// Decision states paired with their distributions, canonical order.
    pub fn iter(&self) -> impl Iterator<Item = (&GameState, &TargetDistribution)> {
        self.space
            .states()
            .iter()
            .zip(&self.actions)
            .filter_map(|(s, a)| a.as_ref().map(|a| (s, a)))
    }
}

fn forced(s: &GameState) -> TargetDistribution {
    let opponent = s.alive_opponents().next().expect("two survivors");
    TargetDistribution::pure(opponent)
}
