use crate::error::{invalid, Result};
use crate::marksmanship::Marksmanships;
use crate::profile::TargetDistribution;
use crate::state::GameState;

/// Successor states of one turn with their probabilities.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionDistribution {
    entries: Vec<(GameState, f64)>,
}

impl TransitionDistribution {
    pub fn entries(&self) -> &[(GameState, f64)] {
        &self.entries
    }

    pub fn probability(&self, s: &GameState) -> f64 {
        self.entries
            .iter()
            .filter(|(t, _)| t == s)
            .map(|(_, w)| w)
            .sum()
    }

    pub fn total(&self) -> f64 {
        self.entries.iter().map(|(_, w)| w).sum()
    }
}

/// One turn from `s`: the mover misses with probability `1 - p_mover`,
/// otherwise kills target `n` with probability `x_n * p_mover`.
pub fn transition_distribution(
    s: &GameState,
    x: &TargetDistribution,
    p: &Marksmanships,
) -> Result<TransitionDistribution> {
    if p.n_players() != s.n_players() {
        return Err(invalid("marksmanship vector does not match the game size"));
    }
    x.check_admissible(s)?;
    let hit = p.of(s.mover());
    let mut entries = Vec::with_capacity(1 + s.alive_count());
    if hit < 1.0 {
        entries.push((s.next_on_miss()?, 1.0 - hit));
    }
    for (target, w) in x.iter() {
        let prob = w * hit;
        if prob > 0.0 {
            entries.push((s.next_on_kill(target)?, prob));
        }
    }
    Ok(TransitionDistribution { entries })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn st(s: &str) -> GameState {
        s.parse().unwrap()
    }

    #[test]
    fn duel_turn() {
        let p = Marksmanships::new(vec![0.3, 0.6]).unwrap();
        let d = transition_distribution(&st("111"), &TargetDistribution::pure(2), &p).unwrap();
        assert_eq!(d.probability(&st("010")), 0.3);
        assert_eq!(d.probability(&st("211")), 0.7);
        assert_eq!(d.entries().len(), 2);
    }

    #[test]
    fn perfect_shot_removes_the_miss_branch() {
        let p = Marksmanships::new(vec![1.0, 0.5, 0.5]).unwrap();
        let x = TargetDistribution::from_dense(&[0.0, 0.5, 0.5]).unwrap();
        let d = transition_distribution(&st("1111"), &x, &p).unwrap();
        assert_eq!(d.entries(), &[(st("3101"), 0.5), (st("2110"), 0.5)]);
    }

    #[test]
    fn pure_target_in_a_truel() {
        let p = Marksmanships::new(vec![0.9, 0.4, 0.4]).unwrap();
        let d = transition_distribution(&st("1111"), &TargetDistribution::pure(3), &p).unwrap();
        assert_eq!(d.probability(&st("2110")), 0.9);
        assert!((d.probability(&st("2111")) - 0.1).abs() < 1e-15);
        assert_eq!(d.entries().len(), 2);
    }

    #[test]
    fn rejects_inadmissible_targets() {
        let p = Marksmanships::new(vec![0.9, 0.4, 0.4]).unwrap();
        assert!(transition_distribution(&st("1111"), &TargetDistribution::pure(1), &p).is_err());
        assert!(transition_distribution(&st("0100"), &TargetDistribution::pure(2), &p).is_err());
    }
}
