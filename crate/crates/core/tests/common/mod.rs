#![allow(dead_code)]

use std::sync::Arc;

use rand::rngs::StdRng;
use rand::Rng;

use nuel_core::{Marksmanships, StateSpace, StrategyProfile, TargetDistribution};

/// Next live player after `from`, cyclically, by bit arithmetic.
pub fn next_alive(n: usize, mask: u32, from: usize) -> usize {
    (1..=n)
        .map(|d| (from - 1 + d) % n + 1)
        .find(|&q| mask >> (q - 1) & 1 == 1)
        .expect("someone alive")
}

/// `(mover, mask)` after the mover at `(mover, mask)` kills `victim`.
pub fn after_kill(n: usize, mover: usize, mask: u32, victim: usize) -> (usize, u32) {
    let rest = mask & !(1 << (victim - 1));
    if rest.count_ones() == 1 {
        (0, rest)
    } else {
        (next_alive(n, rest, mover), rest)
    }
}

pub fn random_p(rng: &mut StdRng, n: usize, lo: f64, hi: f64) -> Marksmanships {
    Marksmanships::new((0..n).map(|_| rng.random_range(lo..hi)).collect()).unwrap()
}

pub fn random_mixed(rng: &mut StdRng, n: usize) -> StrategyProfile {
    let space = Arc::new(StateSpace::new(n).unwrap());
    StrategyProfile::from_fn(space, |s| {
        let opponents: Vec<usize> = s.alive_opponents().collect();
        let w: Vec<f64> = opponents.iter().map(|_| rng.random_range(0.0..1.0)).collect();
        let total: f64 = w.iter().sum::<f64>().max(1e-300);
        TargetDistribution::from_pairs(opponents.into_iter().zip(w.into_iter().map(|x| x / total)))
    })
    .unwrap()
}
