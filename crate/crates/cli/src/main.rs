//! `nuel`: solve, analyse and simulate N-player shooting games.
//!
//! Exit codes: 0 success, 1 a reproduction or `--check` mismatch, 2 bad
//! usage or unreadable input, 3 a computation error.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use nuel_core::experiments::{reproduce_figure, reproduce_table, table as published_table};
use nuel_core::io::{equilibrium_table, equilibrium_to_json, payoffs_to_csv, payoffs_to_json, profile_from_json};
use nuel_core::montecarlo::{estimate_payoffs, seeded_rng, simulate_game, DEFAULT_STEP_CAP};
use nuel_core::sweep::{parse_assignment, run_sweep, Axis, SweepSpec};
use nuel_core::{
    nash_compute_with, solve_nuel, GameState, Marksmanships, Method, NuelError, SolverConfig, StateSpace,
    StrategyProfile, TieBreak,
};

#[derive(Parser)]
#[command(name = "nuel", version, about = "Solver for N-player sequential shooting games")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Expected payoffs of every state under a stationary profile.
    Solve {
        #[command(flatten)]
        p: PArg,
        /// `equilibrium`, `uniform`, or a JSON profile file.
        #[arg(long, default_value = "equilibrium")]
        profile: String,
        #[command(flatten)]
        solver: SolverArgs,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Stationary deterministic Nash equilibrium.
    Equilibrium {
        #[command(flatten)]
        p: PArg,
        #[command(flatten)]
        solver: SolverArgs,
        #[arg(long, value_enum, default_value_t = EqFormat::Json)]
        format: EqFormat,
        /// Shorthand for `--format table`.
        #[arg(long)]
        table: bool,
        #[arg(long, value_enum, default_value_t = TieArg::Lowest)]
        tie_break: TieArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Monte Carlo estimate of the payoffs from one state.
    Simulate {
        #[command(flatten)]
        p: PArg,
        #[arg(long, default_value = "equilibrium")]
        profile: String,
        /// Starting state; defaults to everybody alive with player 1 to move.
        #[arg(long)]
        s0: Option<String>,
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Compare with the solver and report deviations in standard errors.
        #[arg(long)]
        check: bool,
        /// Write the state sequence of one game played with `--seed`.
        #[arg(long)]
        trace: Option<PathBuf>,
        #[command(flatten)]
        solver: SolverArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Equilibria over a grid of marksmanships, as CSV.
    Sweep {
        /// Number of players; inferred from `--fix` and `--vary` if omitted.
        #[arg(long)]
        n: Option<usize>,
        /// Fixed marksmanships, `player=value`.
        #[arg(long, value_delimiter = ',')]
        fix: Vec<String>,
        /// Varied marksmanship, `player=start:stop:step`; at most twice.
        #[arg(long, required = true)]
        vary: Vec<String>,
        /// Target columns for every state with three or more survivors.
        #[arg(long)]
        all_targets: bool,
        /// States whose payoffs become columns; defaults to the all-alive states.
        #[arg(long, value_delimiter = ',')]
        states: Vec<String>,
        #[arg(long, value_enum, default_value_t = TieArg::Lowest)]
        tie_break: TieArg,
        #[command(flatten)]
        solver: SolverArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Recompute a published table (1 to 9) or figure (4 or 5).
    Reproduce {
        #[arg(long, conflicts_with = "figure", required_unless_present = "figure")]
        table: Option<u8>,
        #[arg(long)]
        figure: Option<u8>,
    },
}

#[derive(clap::Args)]
struct PArg {
    /// Marksmanships `p_1,...,p_N`.
    #[arg(long = "p", value_delimiter = ',', required = true, allow_hyphen_values = true)]
    p: Vec<f64>,
}

#[derive(clap::Args)]
struct SolverArgs {
    #[arg(long, value_enum, default_value_t = MethodArg::Exact)]
    method: MethodArg,
    /// Stopping threshold of the iterative method.
    #[arg(long, default_value_t = 1e-12)]
    eps: f64,
    #[arg(long, default_value_t = 1_000_000)]
    max_iter: usize,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Exact,
    Iter,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum EqFormat {
    Json,
    Table,
}

#[derive(Clone, Copy, ValueEnum)]
enum TieArg {
    Lowest,
    Next,
}

impl From<TieArg> for TieBreak {
    fn from(t: TieArg) -> Self {
        match t {
            TieArg::Lowest => TieBreak::LowestIndex,
            TieArg::Next => TieBreak::NextInTurn,
        }
    }
}

enum Failure {
    Usage(String),
    Compute(NuelError),
    Mismatch(String),
}

impl From<NuelError> for Failure {
    fn from(e: NuelError) -> Self {
        Failure::Compute(e)
    }
}

type CliResult<T> = Result<T, Failure>;

fn usage<T>(r: Result<T, NuelError>) -> CliResult<T> {
    r.map_err(|e| Failure::Usage(e.to_string()))
}

impl SolverArgs {
    fn config(&self) -> CliResult<SolverConfig> {
        let cfg = SolverConfig {
            epsilon: self.eps,
            max_iterations: self.max_iter,
            method: match self.method {
                MethodArg::Exact => Method::Exact,
                MethodArg::Iter => Method::Iterative,
            },
        };
        usage(cfg.validate())?;
        Ok(cfg)
    }
}

impl PArg {
    fn marksmanships(&self) -> CliResult<Marksmanships> {
        usage(Marksmanships::new(self.p.clone()))
    }
}

fn read_json(path: &Path) -> CliResult<Value> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

/// Resolves `--profile`. A file may hold a bare profile or the output of
/// `nuel equilibrium`, whose `targets` member is a profile.
fn load_profile(source: &str, p: &Marksmanships, cfg: &SolverConfig) -> CliResult<StrategyProfile> {
    let space = || usage(StateSpace::new(p.n_players())).map(Arc::new);
    let profile = match source {
        "equilibrium" if p.n_players() == 2 => StrategyProfile::shoot_next(space()?),
        "equilibrium" => nash_compute_with(p, cfg, TieBreak::default())?.profile,
        "uniform" => StrategyProfile::uniform(space()?),
        path => {
            let v = read_json(Path::new(path))?;
            let v = v.get("targets").cloned().unwrap_or(v);
            usage(profile_from_json(&v))?
        }
    };
    if profile.n_players() != p.n_players() {
        return Err(Failure::Usage(format!(
            "profile is for {} players, --p gives {}",
            profile.n_players(),
            p.n_players()
        )));
    }
    Ok(profile)
}

fn emit(out: &Option<PathBuf>, text: &str) -> CliResult<()> {
    match out {
        Some(path) => fs::write(path, text)
            .map_err(|e| Failure::Compute(NuelError::InvalidArgument(format!("{}: {e}", path.display())))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json values serialize");
    s.push('\n');
    s
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Solve {
            p,
            profile,
            solver,
            format,
            out,
        } => {
            let p = p.marksmanships()?;
            let cfg = solver.config()?;
            let profile = load_profile(&profile, &p, &cfg)?;
            let table = solve_nuel(&p, &profile, &cfg)?;
            let text = match format {
                Format::Json => pretty(&payoffs_to_json(&table)),
                Format::Csv => payoffs_to_csv(&table),
            };
            emit(&out, &text)
        }
        Command::Equilibrium {
            p,
            solver,
            format,
            table,
            tie_break,
            out,
        } => {
            let p = p.marksmanships()?;
            let cfg = solver.config()?;
            let eq = nash_compute_with(&p, &cfg, tie_break.into())?;
            let text = if table || matches!(format, EqFormat::Table) {
                equilibrium_table(&eq)
            } else {
                pretty(&equilibrium_to_json(&eq))
            };
            emit(&out, &text)
        }
        Command::Simulate {
            p,
            profile,
            s0,
            trials,
            seed,
            check,
            trace,
            solver,
            out,
        } => {
            let p = p.marksmanships()?;
            let cfg = solver.config()?;
            let n = p.n_players();
            let s0 = match s0 {
                Some(text) => usage(text.parse::<GameState>())?,
                None => usage(GameState::all_alive(n, 1))?,
            };
            if s0.n_players() != n {
                return Err(Failure::Usage(format!("state {s0} is not a {n}-player state")));
            }
            let profile = load_profile(&profile, &p, &cfg)?;
            if let Some(path) = &trace {
                let game = simulate_game(s0, &p, &profile, &mut seeded_rng(seed), DEFAULT_STEP_CAP)?;
                emit(&Some(path.clone()), &game.dump())?;
            }
            let report = estimate_payoffs(s0, &p, &profile, trials, seed)?;
            let mut v = serde_json::to_value(&report).expect("report serializes");
            let mut within = true;
            if check {
                let table = solve_nuel(&p, &profile, &cfg)?;
                let dev = report.deviations_from(&table);
                within = dev.iter().all(|d| d.abs() <= 4.0);
                v["solver"] = json!(table.row(&s0));
                v["deviation_se"] = json!(dev.iter().map(|d| if d.is_finite() { json!(d) } else { json!(d.to_string()) }).collect::<Vec<_>>());
                v["within_4se"] = json!(within);
            }
            emit(&out, &pretty(&v))?;
            if within {
                Ok(())
            } else {
                Err(Failure::Mismatch("estimate deviates from the solver by more than 4 standard errors".into()))
            }
        }
        Command::Sweep {
            n,
            fix,
            vary,
            all_targets,
            states,
            tie_break,
            solver,
            out,
        } => {
            let cfg = solver.config()?;
            let fixed = usage(fix.iter().map(|s| parse_assignment(s)).collect::<Result<Vec<_>, _>>())?;
            let axes = usage(vary.iter().map(|s| s.parse::<Axis>()).collect::<Result<Vec<_>, _>>())?;
            let n = n.unwrap_or(fixed.len() + axes.len());
            let mut spec = usage(SweepSpec::new(n, fixed, axes))?;
            spec.all_targets = all_targets;
            spec.tie_break = tie_break.into();
            if !states.is_empty() {
                spec.payoff_states = usage(states.iter().map(|s| s.parse()).collect::<Result<Vec<_>, _>>())?;
            }
            usage(spec.validate())?;
            let result = run_sweep(&spec, &cfg)?;
            emit(&out, &result.to_csv())
        }
        Command::Reproduce { table, figure } => {
            let cfg = SolverConfig::default();
            let report = match (table, figure) {
                (Some(id), _) => {
                    usage(published_table(id))?;
                    reproduce_table(id, &cfg)?
                }
                (None, Some(4 | 5)) => reproduce_figure(figure.expect("matched"), &cfg)?,
                (None, Some(id)) => return Err(Failure::Usage(format!("unknown figure {id}; figures are 4 and 5"))),
                (None, None) => unreachable!("clap requires one of --table and --figure"),
            };
            print!("{}", report.render());
            if report.pass {
                Ok(())
            } else {
                Err(Failure::Mismatch(format!("{} does not match", report.name)))
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Mismatch(msg)) => {
            eprintln!("nuel: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("nuel: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Compute(e)) => {
            eprintln!("nuel: {e}");
            ExitCode::from(3)
        }
    }
}
