//! Published experiment instances and their expected values.
//!
//! Expected payoffs are given at two decimals, so each computed cell must lie
//! within half a unit of the last digit of the published value.

use std::fmt::Write as _;

use serde::Serialize;

use crate::equilibrium::{nash_compute_with, EquilibriumResult, TieBreak};
use crate::error::{invalid, Result};
use crate::marksmanship::Marksmanships;
use crate::payoff::SolverConfig;
use crate::state::{GameState, Player};
use crate::sweep::{run_sweep, Axis, SweepResult, SweepRow, SweepSpec};

/// Half a unit in the second decimal.
pub const CELL_TOLERANCE: f64 = 0.005;
/// A full unit in the second decimal, for cells the published table
/// adjusted so that its row sums to one.
pub const WIDE_TOLERANCE: f64 = 0.01;
const ROUNDING_SLACK: f64 = 1e-12;

/// One published table: marksmanships, equilibrium targets at the all-alive
/// states, and payoff rows `V_n(s_k)` for some movers `k`.
#[derive(Debug, Clone, Copy)]
pub struct TableSpec {
    pub id: u8,
    pub title: &'static str,
    pub p: &'static [f64],
    pub targets: &'static [Player],
    /// `(mover k, [V_1, ..., V_N])` at state `k 1 ... 1`.
    pub payoffs: &'static [(Player, &'static [f64])],
    pub tie_break: TieBreak,
    /// `(mover k, player n)` cells checked at [`WIDE_TOLERANCE`].
    pub wide_cells: &'static [(Player, Player)],
}

pub const TABLES: [TableSpec; 9] = [
    TableSpec {
        id: 1,
        title: "Strongest player has the greatest expected payoff",
        p: &[0.90, 0.10, 0.20],
        targets: &[3, 1, 1],
        payoffs: &[
            (1, &[0.86, 0.12, 0.02]),
            (2, &[0.62, 0.18, 0.20]),
            (3, &[0.69, 0.16, 0.15]),
        ],
        tie_break: TieBreak::LowestIndex,
        // 0.6906, 0.1647, 0.1447 round to a row summing to 0.99.
        wide_cells: &[(3, 3)],
    },
    TableSpec {
        id: 2,
        title: "Strongest player does not have the greatest expected payoff",
        p: &[0.50, 0.70, 0.95],
        targets: &[3, 3, 2],
        payoffs: &[
            (1, &[0.37, 0.56, 0.07]),
            (2, &[0.56, 0.30, 0.14]),
            (3, &[0.50, 0.03, 0.47]),
        ],
        tie_break: TieBreak::LowestIndex,
        // 0.5057, 0.0280, 0.4663 round to a row summing to 1.01.
        wide_cells: &[(3, 1)],
    },
    TableSpec {
        id: 3,
        title: "Player who has the first move loses",
        p: &[1.00, 1.00, 1.00],
        targets: &[2, 3, 1],
        payoffs: &[
            (1, &[0.00, 0.00, 1.00]),
            (2, &[1.00, 0.00, 0.00]),
            (3, &[0.00, 1.00, 0.00]),
        ],
        // Every target is equally good here; the published profile has each
        // player shoot the next one in turn.
        tie_break: TieBreak::NextInTurn,
        wide_cells: &[],
    },
    TableSpec {
        id: 4,
        title: "Optimal strategy is to shoot at weakest player",
        p: &[0.70, 1.00, 1.00, 0.50],
        targets: &[4, 3, 4, 2],
        payoffs: &[(1, &[0.66, 0.23, 0.00, 0.11])],
        tie_break: TieBreak::LowestIndex,
        wide_cells: &[],
    },
    TableSpec {
        id: 5,
        title: "Circular shooting and team formation",
        p: &[0.80, 0.40, 0.85, 0.50],
        targets: &[4, 3, 1, 2],
        payoffs: &[],
        tie_break: TieBreak::LowestIndex,
        wide_cells: &[],
    },
    TableSpec {
        id: 6,
        title: "Another example of circular shooting and team formation",
        p: &[0.75, 0.25, 1.00, 0.50],
        targets: &[4, 3, 1, 2],
        payoffs: &[],
        tie_break: TieBreak::LowestIndex,
        wide_cells: &[],
    },
    TableSpec {
        id: 7,
        title: "Solidarity of the weakest players",
        p: &[0.05, 0.10, 0.15, 0.70],
        targets: &[4, 4, 4, 3],
        payoffs: &[
            (1, &[0.18, 0.20, 0.13, 0.49]),
            (2, &[0.18, 0.19, 0.12, 0.51]),
            (3, &[0.16, 0.18, 0.09, 0.57]),
            (4, &[0.14, 0.15, 0.04, 0.67]),
        ],
        tie_break: TieBreak::LowestIndex,
        wide_cells: &[],
    },
    TableSpec {
        id: 8,
        title: "Circular shooting with five players",
        p: &[0.25, 0.20, 0.10, 0.06, 0.04],
        targets: &[2, 3, 4, 5, 1],
        payoffs: &[],
        tie_break: TieBreak::LowestIndex,
        wide_cells: &[],
    },
    TableSpec {
        id: 9,
        title: "Circular shooting with seven players",
        p: &[0.40, 0.26, 0.18, 0.12, 0.08, 0.06, 0.04],
        targets: &[4, 1, 5, 6, 2, 7, 3],
        payoffs: &[],
        tie_break: TieBreak::LowestIndex,
        wide_cells: &[],
    },
];

pub fn table(id: u8) -> Result<&'static TableSpec> {
    TABLES
        .iter()
        .find(|t| t.id == id)
        .ok_or_else(|| invalid(format!("unknown table {id}; tables are numbered 1 to 9")))
}

impl TableSpec {
    pub fn marksmanships(&self) -> Marksmanships {
        Marksmanships::new(self.p.to_vec()).expect("published marksmanships are probabilities")
    }

    pub fn equilibrium(&self, cfg: &SolverConfig) -> Result<EquilibriumResult> {
        nash_compute_with(&self.marksmanships(), cfg, self.tie_break)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellCheck {
    pub label: String,
    pub computed: f64,
    pub expected: f64,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReproductionReport {
    pub name: String,
    pub title: String,
    pub cells: Vec<CellCheck>,
    pub pass: bool,
}

impl ReproductionReport {
    fn new(name: String, title: &str, cells: Vec<CellCheck>) -> Self {
        let pass = cells.iter().all(|c| c.pass);
        Self {
            name,
            title: title.to_string(),
            cells,
            pass,
        }
    }

    pub fn render(&self) -> String {
        let mut out = format!("{}: {}\n", self.name, self.title);
        for c in &self.cells {
            let _ = writeln!(
                out,
                "  {:<24} computed {:>9.4}  expected {:>6.2}  tol {:<6} {}",
                c.label,
                c.computed,
                c.expected,
                c.tolerance,
                if c.pass { "ok" } else { "MISMATCH" }
            );
        }
        let _ = writeln!(out, "{}: {}", self.name, if self.pass { "PASS" } else { "FAIL" });
        out
    }
}

fn exact_cell(label: String, computed: f64, expected: f64) -> CellCheck {
    CellCheck {
        label,
        computed,
        expected,
        tolerance: 0.0,
        pass: computed == expected,
    }
}

fn rounded_cell(label: String, computed: f64, expected: f64, tolerance: f64) -> CellCheck {
    CellCheck {
        label,
        computed,
        expected,
        tolerance,
        pass: (computed - expected).abs() <= tolerance + ROUNDING_SLACK,
    }
}

/// Recomputes a published table and compares every cell.
pub fn reproduce_table(id: u8, cfg: &SolverConfig) -> Result<ReproductionReport> {
    let spec = table(id)?;
    let eq = spec.equilibrium(cfg)?;
    let n = spec.p.len();
    let mut cells = Vec::new();
    for (m, (&got, &want)) in eq.full_targets().iter().zip(spec.targets).enumerate() {
        cells.push(exact_cell(format!("sigma_{}(s_{})", m + 1, m + 1), got as f64, want as f64));
    }
    for &(mover, row) in spec.payoffs {
        let s = GameState::all_alive(n, mover)?;
        for (i, &want) in row.iter().enumerate() {
            let got = eq.payoffs.get(i + 1, &s);
            let tolerance = if spec.wide_cells.contains(&(mover, i + 1)) {
                WIDE_TOLERANCE
            } else {
                CELL_TOLERANCE
            };
            cells.push(rounded_cell(format!("V_{}({s})", i + 1), got, want, tolerance));
        }
    }
    Ok(ReproductionReport::new(format!("table {id}"), spec.title, cells))
}

/// Player 1's payoff in the three-player game with two perfect shots, as
/// player 1's own marksmanship runs over [0.5, 1] in steps of 0.01.
pub fn figure4_sweep(cfg: &SolverConfig) -> Result<SweepResult> {
    let spec = SweepSpec::new(
        3,
        vec![(2, 1.0), (3, 1.0)],
        vec![Axis { player: 1, start: 0.5, stop: 1.0, step: 0.01 }],
    )?;
    run_sweep(&spec, cfg)
}

/// Checks that player 1's payoff at `1111` never increases along the
/// figure 4 sweep.
pub fn reproduce_figure4(cfg: &SolverConfig) -> Result<ReproductionReport> {
    let sweep = figure4_sweep(cfg)?;
    // The first payoff column is V1(1111).
    let cells = sweep
        .rows
        .windows(2)
        .map(|w| {
            let (a, b) = (w[0].payoffs[0], w[1].payoffs[0]);
            CellCheck {
                label: format!("V_1(1111) p1 {:.2}->{:.2}", w[0].p[0], w[1].p[0]),
                computed: b - a,
                expected: 0.0,
                tolerance: ROUNDING_SLACK,
                pass: b <= a + ROUNDING_SLACK,
            }
        })
        .collect();
    Ok(ReproductionReport::new(
        "figure 4".into(),
        "Player 1's payoff decreases with its marksmanship",
        cells,
    ))
}

/// Grid of the figure 5 surfaces: players 2 and 3 perfect, players 1 and 4
/// over 0.05..0.95 in steps of 0.05, targets at every state with three or
/// more survivors.
pub fn figure5_sweep(cfg: &SolverConfig) -> Result<SweepResult> {
    let axis = |player| Axis { player, start: 0.05, stop: 0.95, step: 0.05 };
    let mut spec = SweepSpec::new(4, vec![(2, 1.0), (3, 1.0)], vec![axis(1), axis(4)])?;
    spec.all_targets = true;
    spec.payoff_states = vec![GameState::all_alive(4, 1)?];
    run_sweep(&spec, cfg)
}

/// Linear extrapolation to the diagonal along an anti-diagonal line, from
/// the grid points half a step and one and a half steps away. Falls back to
/// the near point at the edge of the grid.
fn limit(near: &SweepRow, far: Option<&SweepRow>, column: usize) -> f64 {
    match far {
        Some(far) => 1.5 * near.payoffs[column] - 0.5 * far.payoffs[column],
        None => near.payoffs[column],
    }
}

/// Minimum payoff jump counted as a discontinuity across `p1 = p4`.
pub const FIGURE5_JUMP: f64 = 0.05;

/// Figure 5 crossing analysis.
///
/// Each anti-diagonal line of the grid crosses `p1 = p4` between the mirror
/// points `(a, b)` and `(b, a)` with `a`, `b` adjacent grid values. For each
/// such pair the equilibrium targets must differ at some state, and for at
/// least half of the pairs `V_1(11111)` or `V_4(11111)` must jump by at
/// least [`FIGURE5_JUMP`]. Each side's payoff is first extrapolated to the
/// diagonal, so the slope of the surface does not mask the jump.
pub fn reproduce_figure5(cfg: &SolverConfig) -> Result<ReproductionReport> {
    let sweep = figure5_sweep(cfg)?;
    let side = (sweep.rows.len() as f64).sqrt().round() as usize;
    let at = |i: usize, j: usize| &sweep.rows[i * side + j];
    let mut cells = Vec::new();
    let mut jumps = 0;
    for i in 0..side - 1 {
        let below = at(i + 1, i);
        let above = at(i, i + 1);
        let changed = below
            .targets
            .iter()
            .zip(&above.targets)
            .filter(|(a, b)| a != b)
            .count();
        cells.push(CellCheck {
            label: format!("targets (p1,p4)=({:.2},{:.2})|({:.2},{:.2})", below.p[0], below.p[3], above.p[0], above.p[3]),
            computed: changed as f64,
            expected: 1.0,
            tolerance: 0.0,
            pass: changed >= 1,
        });
        let far_below = (i >= 1 && i + 2 < side).then(|| at(i + 2, i - 1));
        let far_above = (i >= 1 && i + 2 < side).then(|| at(i - 1, i + 2));
        let jump = [0, 3]
            .into_iter()
            .map(|c| (limit(below, far_below, c) - limit(above, far_above, c)).abs())
            .fold(0.0, f64::max);
        if jump >= FIGURE5_JUMP {
            jumps += 1;
        }
    }
    let pairs = side - 1;
    cells.push(CellCheck {
        label: "pairs with payoff jump".into(),
        computed: jumps as f64,
        expected: (pairs as f64 / 2.0).ceil(),
        tolerance: 0.0,
        pass: 2 * jumps >= pairs,
    });
    Ok(ReproductionReport::new(
        "figure 5".into(),
        "Strategies switch across p1 = p4",
        cells,
    ))
}

pub fn reproduce_figure(id: u8, cfg: &SolverConfig) -> Result<ReproductionReport> {
    match id {
        4 => reproduce_figure4(cfg),
        5 => reproduce_figure5(cfg),
        _ => Err(invalid(format!("unknown figure {id}; figures are 4 and 5"))),
    }
}
