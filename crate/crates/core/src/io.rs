//! JSON and CSV forms of payoff tables, profiles and equilibria.
//!
//! States are keyed by their text form (`21110`, or `[m|b...]` beyond nine
//! players). Floating point values are written in shortest round-trip form,
//! so reading an emitted file reproduces the table bit for bit.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::sync::Arc;

use serde_json::{json, Map, Value};

use crate::equilibrium::EquilibriumResult;
use crate::error::{NuelError, Result};
use crate::payoff::PayoffTable;
use crate::profile::{StrategyProfile, TargetDistribution};
use crate::state::{GameState, StateSpace};

fn parse_err(msg: impl Into<String>) -> NuelError {
    NuelError::Parse(msg.into())
}

/// `{"<state>": [V_1, ..., V_N], ...}` in canonical state order.
pub fn payoffs_to_json(table: &PayoffTable) -> Value {
    let map: Map<String, Value> = table
        .iter()
        .map(|(s, row)| (s.to_string(), json!(row)))
        .collect();
    Value::Object(map)
}

pub fn payoffs_from_json(value: &Value) -> Result<PayoffTable> {
    let map = value
        .as_object()
        .ok_or_else(|| parse_err("payoff table must be a JSON object"))?;
    let mut rows = Vec::with_capacity(map.len());
    for (key, v) in map {
        let s: GameState = key.parse()?;
        let row = v
            .as_array()
            .ok_or_else(|| parse_err(format!("payoffs for {key} must be an array")))?
            .iter()
            .map(|x| x.as_f64().ok_or_else(|| parse_err(format!("non-numeric payoff for {key}"))))
            .collect::<Result<Vec<f64>>>()?;
        rows.push((s, row));
    }
    table_from_rows(rows)
}

fn table_from_rows(rows: Vec<(GameState, Vec<f64>)>) -> Result<PayoffTable> {
    let n = rows
        .first()
        .map(|(s, _)| s.n_players())
        .ok_or_else(|| parse_err("empty payoff table"))?;
    let space = Arc::new(StateSpace::new(n)?);
    let mut table = PayoffTable::empty(space);
    for (s, row) in rows {
        if s.n_players() != n {
            return Err(parse_err(format!("state {s} does not belong to a {n}-player game")));
        }
        table.set_row(&s, &row)?;
    }
    Ok(table)
}

/// `state,player,value` rows with a header line.
pub fn payoffs_to_csv(table: &PayoffTable) -> String {
    let mut out = String::from("state,player,value\n");
    for (s, row) in table.iter() {
        for (i, v) in row.iter().enumerate() {
            let _ = writeln!(out, "{s},{},{v}", i + 1);
        }
    }
    out
}

pub fn payoffs_from_csv(text: &str) -> Result<PayoffTable> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h.trim() == "state,player,value" => {}
        _ => return Err(parse_err("missing header 'state,player,value'")),
    }
    let mut rows: Vec<(GameState, Vec<f64>)> = Vec::new();
    for (lineno, line) in lines.enumerate().filter(|(_, l)| !l.trim().is_empty()) {
        let bad = || parse_err(format!("line {}: '{line}'", lineno + 2));
        let mut fields = line.split(',');
        let (Some(s), Some(player), Some(value), None) = (fields.next(), fields.next(), fields.next(), fields.next()) else {
            return Err(bad());
        };
        let s: GameState = s.parse()?;
        let player: usize = player.trim().parse().map_err(|_| bad())?;
        let value: f64 = value.trim().parse().map_err(|_| bad())?;
        if player == 0 || player > s.n_players() {
            return Err(bad());
        }
        if rows.last().is_none_or(|(last, _)| *last != s) {
            rows.push((s, vec![0.0; s.n_players()]));
        }
        rows.last_mut().expect("pushed").1[player - 1] = value;
    }
    table_from_rows(rows)
}

/// Pure targets as integers, mixed distributions as dense arrays.
pub fn profile_to_json(profile: &StrategyProfile) -> Value {
    let n = profile.n_players();
    let map: Map<String, Value> = profile
        .iter()
        .map(|(s, x)| {
            let v = match x.as_pure() {
                Some(t) => json!(t),
                None => json!(x.to_dense(n)),
            };
            (s.to_string(), v)
        })
        .collect();
    Value::Object(map)
}

/// Reads a profile keyed by state text. Every state with three or more
/// survivors must be present; two-survivor states may be omitted.
pub fn profile_from_json(value: &Value) -> Result<StrategyProfile> {
    let map = value
        .as_object()
        .ok_or_else(|| parse_err("profile must be a JSON object"))?;
    let mut entries = HashMap::with_capacity(map.len());
    for (key, v) in map {
        let s: GameState = key.parse()?;
        let dist = match v {
            Value::Number(t) => {
                let t = t
                    .as_u64()
                    .filter(|t| *t >= 1)
                    .ok_or_else(|| parse_err(format!("bad target for {key}")))?;
                TargetDistribution::pure(t as usize)
            }
            Value::Array(xs) => {
                let probs = xs
                    .iter()
                    .map(|x| x.as_f64().ok_or_else(|| parse_err(format!("bad weight for {key}"))))
                    .collect::<Result<Vec<f64>>>()?;
                if probs.len() != s.n_players() {
                    return Err(parse_err(format!(
                        "{key} needs {} weights, got {}",
                        s.n_players(),
                        probs.len()
                    )));
                }
                TargetDistribution::from_dense(&probs)?
            }
            _ => return Err(parse_err(format!("bad action for {key}"))),
        };
        entries.insert(s, dist);
    }
    let n = entries
        .keys()
        .next()
        .map(|s| s.n_players())
        .ok_or_else(|| parse_err("empty profile"))?;
    if entries.keys().any(|s| s.n_players() != n) {
        return Err(parse_err("profile mixes game sizes"));
    }
    let space = Arc::new(StateSpace::new(n)?);
    StrategyProfile::from_fn(space, |s| {
        entries
            .remove(s)
            .ok_or_else(|| parse_err(format!("profile has no entry for state {s}")))
    })
}

/// `{"p", "targets", "payoffs", "ties", "tie_break", "strict"}`.
pub fn equilibrium_to_json(eq: &EquilibriumResult) -> Value {
    let targets: Map<String, Value> = eq
        .profile
        .iter()
        .map(|(s, x)| (s.to_string(), json!(x.as_pure())))
        .collect();
    let ties: Vec<Value> = eq
        .ties
        .iter()
        .map(|t| json!({"state": t.state.to_string(), "targets": t.targets, "chosen": t.chosen}))
        .collect();
    json!({
        "p": eq.p.as_slice(),
        "targets": targets,
        "payoffs": payoffs_to_json(&eq.payoffs),
        "ties": ties,
        "tie_break": eq.tie_break,
        "strict": eq.is_strict(),
    })
}

/// The layout of the experiment tables: a header of player numbers, then
/// the rows `p_n`, `sigma_n(s_n)` and `V_n(s_k)` for each all-alive state
/// `s_k`, values at two decimals.
pub fn equilibrium_table(eq: &EquilibriumResult) -> String {
    let n = eq.n_players();
    let join = |cells: Vec<String>| cells.join(",");
    let mut out = String::new();
    let _ = writeln!(out, "n,{}", join((1..=n).map(|i| i.to_string()).collect()));
    let _ = writeln!(out, "p_n,{}", join(eq.p.as_slice().iter().map(|v| format!("{v:.2}")).collect()));
    let _ = writeln!(
        out,
        "sigma_n(s_n),{}",
        join(eq.full_targets().iter().map(|t| t.to_string()).collect())
    );
    for k in 1..=n {
        let s = GameState::all_alive(n, k).expect("valid state");
        let _ = writeln!(
            out,
            "V_n({s}),{}",
            join(eq.payoffs.row(&s).iter().map(|v| format!("{v:.2}")).collect())
        );
    }
    out
}
