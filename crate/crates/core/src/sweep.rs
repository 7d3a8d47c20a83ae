//! Equilibrium sweeps over a grid of marksmanships.

use std::fmt::Write as _;
use std::str::FromStr;

use rayon::prelude::*;

use crate::equilibrium::{nash_compute_with, TieBreak};
use crate::error::{invalid, NuelError, Result};
use crate::marksmanship::Marksmanships;
use crate::payoff::SolverConfig;
use crate::state::{check_player_count, enumerate_states, GameState, Player};

/// `player=start:stop:step`, both ends inclusive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Axis {
    pub player: Player,
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl Axis {
    pub fn values(&self) -> Vec<f64> {
        let count = ((self.stop - self.start) / self.step + 1e-9).floor() as usize + 1;
        (0..count)
            .map(|i| {
                let v = self.start + i as f64 * self.step;
                (v * 1e12).round() / 1e12
            })
            .collect()
    }
}

impl FromStr for Axis {
    type Err = NuelError;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || NuelError::Parse(format!("axis '{s}' is not player=start:stop:step"));
        let (player, range) = s.split_once('=').ok_or_else(bad)?;
        let parts: Vec<f64> = range
            .split(':')
            .map(|x| x.trim().parse::<f64>().map_err(|_| bad()))
            .collect::<Result<_>>()?;
        let [start, stop, step] = parts[..] else {
            return Err(bad());
        };
        Ok(Axis {
            player: player.trim().parse().map_err(|_| bad())?,
            start,
            stop,
            step,
        })
    }
}

/// Parses `player=value`.
pub fn parse_assignment(s: &str) -> Result<(Player, f64)> {
    let bad = || NuelError::Parse(format!("'{s}' is not player=value"));
    let (player, value) = s.split_once('=').ok_or_else(bad)?;
    Ok((
        player.trim().parse().map_err(|_| bad())?,
        value.trim().parse().map_err(|_| bad())?,
    ))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub n_players: usize,
    pub fixed: Vec<(Player, f64)>,
    pub axes: Vec<Axis>,
    /// States whose payoffs (for every player) become columns. Defaults to
    /// the all-alive states.
    pub payoff_states: Vec<GameState>,
    /// Emit a target column for every state with three or more survivors
    /// instead of only the all-alive states.
    pub all_targets: bool,
    pub tie_break: TieBreak,
}

impl SweepSpec {
    pub fn new(n_players: usize, fixed: Vec<(Player, f64)>, axes: Vec<Axis>) -> Result<Self> {
        check_player_count(n_players)?;
        let spec = Self {
            n_players,
            fixed,
            axes,
            payoff_states: (1..=n_players)
                .map(|m| GameState::all_alive(n_players, m))
                .collect::<Result<_>>()?,
            all_targets: false,
            tie_break: TieBreak::default(),
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.n_players;
        if self.axes.is_empty() || self.axes.len() > 2 {
            return Err(invalid("a sweep needs one or two varied players"));
        }
        let mut seen = vec![false; n];
        let players = self
            .fixed
            .iter()
            .map(|(p, _)| *p)
            .chain(self.axes.iter().map(|a| a.player));
        for p in players {
            if p == 0 || p > n {
                return Err(invalid(format!("player {p} out of range 1..={n}")));
            }
            if std::mem::replace(&mut seen[p - 1], true) {
                return Err(invalid(format!("player {p} assigned twice")));
            }
        }
        if let Some(p) = seen.iter().position(|s| !s) {
            return Err(invalid(format!("player {} is neither fixed nor varied", p + 1)));
        }
        for a in &self.axes {
            if !(a.start.is_finite() && a.stop.is_finite()) || a.step.is_nan() || a.step <= 0.0 || a.stop < a.start {
                return Err(invalid(format!("bad range for player {}", a.player)));
            }
        }
        if self.payoff_states.iter().any(|s| s.n_players() != n) {
            return Err(invalid("payoff state from a different game size"));
        }
        Ok(())
    }

    fn target_states(&self) -> Vec<GameState> {
        if self.all_targets {
            enumerate_states(self.n_players)
                .expect("validated size")
                .into_iter()
                .filter(|s| s.alive_count() >= 3)
                .collect()
        } else if self.n_players >= 3 {
            (1..=self.n_players)
                .map(|m| GameState::all_alive(self.n_players, m).expect("valid"))
                .collect()
        } else {
            Vec::new()
        }
    }

    /// Grid points in row-major order over the axes as given.
    pub fn grid(&self) -> Vec<Vec<f64>> {
        let mut base = vec![0.0; self.n_players];
        for (p, v) in &self.fixed {
            base[p - 1] = *v;
        }
        let mut points = vec![base];
        for axis in &self.axes {
            let values = axis.values();
            points = points
                .into_iter()
                .flat_map(|pt| {
                    values.iter().map(move |v| {
                        let mut q = pt.clone();
                        q[axis.player - 1] = *v;
                        q
                    })
                })
                .collect();
        }
        points
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub p: Vec<f64>,
    pub targets: Vec<Player>,
    pub payoffs: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub header: Vec<String>,
    pub target_states: Vec<GameState>,
    pub rows: Vec<SweepRow>,
}

impl SweepResult {
    pub fn to_csv(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for r in &self.rows {
            let cells: Vec<String> = r
                .p
                .iter()
                .map(|v| v.to_string())
                .chain(r.targets.iter().map(|t| t.to_string()))
                .chain(r.payoffs.iter().map(|v| v.to_string()))
                .collect();
            let _ = writeln!(out, "{}", cells.join(","));
        }
        out
    }

    /// Index of a named column.
    pub fn column(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }
}

/// Computes the equilibrium at every grid point. Points are solved in
/// parallel and returned in grid order.
pub fn run_sweep(spec: &SweepSpec, cfg: &SolverConfig) -> Result<SweepResult> {
    spec.validate()?;
    let n = spec.n_players;
    let target_states = spec.target_states();
    let mut header: Vec<String> = (1..=n).map(|i| format!("p{i}")).collect();
    header.extend(target_states.iter().map(|s| format!("target({s})")));
    for s in &spec.payoff_states {
        header.extend((1..=n).map(|i| format!("V{i}({s})")));
    }
    let rows = spec
        .grid()
        .into_par_iter()
        .map(|point| {
            let p = Marksmanships::new(point.clone())?;
            let eq = nash_compute_with(&p, cfg, spec.tie_break)?;
            let targets = target_states
                .iter()
                .map(|s| eq.profile.target(s).expect("pure"))
                .collect();
            let payoffs = spec
                .payoff_states
                .iter()
                .flat_map(|s| eq.payoffs.row(s).to_vec())
                .collect();
            Ok(SweepRow {
                p: point,
                targets,
                payoffs,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepResult {
        header,
        target_states,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn axis_parsing_and_values() {
        let a: Axis = "1=0.5:1.0:0.01".parse().unwrap();
        let v = a.values();
        assert_eq!(v.len(), 51);
        assert_eq!(v[0], 0.5);
        assert_eq!(v[50], 1.0);
        assert_eq!(v[20], 0.7);
        assert!("1=0.5:1.0".parse::<Axis>().is_err());
        assert!("x=0:1:0.1".parse::<Axis>().is_err());
    }

    #[test]
    fn spec_validation() {
        let a = Axis { player: 1, start: 0.1, stop: 0.9, step: 0.1 };
        assert!(SweepSpec::new(3, vec![(2, 1.0), (3, 1.0)], vec![a]).is_ok());
        assert!(SweepSpec::new(3, vec![(2, 1.0)], vec![a]).is_err());
        assert!(SweepSpec::new(3, vec![(1, 1.0), (2, 1.0), (3, 1.0)], vec![a]).is_err());
        assert!(SweepSpec::new(3, vec![(2, 1.0), (3, 1.0)], vec![]).is_err());
        let zero_step = Axis { step: 0.0, ..a };
        assert!(SweepSpec::new(3, vec![(2, 1.0), (3, 1.0)], vec![zero_step]).is_err());
    }

    #[test]
    fn grid_is_row_major() {
        let a = Axis { player: 1, start: 0.1, stop: 0.2, step: 0.1 };
        let b = Axis { player: 3, start: 0.5, stop: 0.7, step: 0.1 };
        let spec = SweepSpec::new(3, vec![(2, 0.9)], vec![a, b]).unwrap();
        let g = spec.grid();
        assert_eq!(g.len(), 6);
        assert_eq!(g[0], [0.1, 0.9, 0.5]);
        assert_eq!(g[1], [0.1, 0.9, 0.6]);
        assert_eq!(g[3], [0.2, 0.9, 0.5]);
    }
}
