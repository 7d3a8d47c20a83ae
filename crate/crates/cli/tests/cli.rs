use std::fs;
use std::process::{Command, Output};

use serde_json::Value;

fn nuel(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nuel"))
        .args(args)
        .output()
        .expect("run nuel")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn json(out: &Output) -> Value {
    assert_eq!(code(out), 0, "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("json output")
}

fn row(v: &Value, state: &str) -> Vec<f64> {
    v[state]
        .as_array()
        .unwrap_or_else(|| panic!("no row {state}"))
        .iter()
        .map(|x| x.as_f64().unwrap())
        .collect()
}

fn round2(xs: &[f64]) -> Vec<f64> {
    xs.iter().map(|x| (x * 100.0).round() / 100.0).collect()
}

fn targets(eq: &Value, n: usize) -> Vec<u64> {
    (1..=n)
        .map(|m| {
            let s = format!("{m}{}", "1".repeat(n));
            eq["targets"][&s].as_u64().unwrap()
        })
        .collect()
}

#[test]
fn solve_table1_equilibrium() {
    let v = json(&nuel(&["solve", "--p", "0.9,0.1,0.2", "--profile", "equilibrium"]));
    assert_eq!(round2(&row(&v, "1111")), [0.86, 0.12, 0.02]);
}

#[test]
fn solve_iterative_duel() {
    let v = json(&nuel(&["solve", "--p", "0.5,0.5", "--method", "iter", "--eps", "1e-12"]));
    let r = row(&v, "111");
    assert!((r[0] - 2.0 / 3.0).abs() < 1e-11);
    assert!((r[1] - 1.0 / 3.0).abs() < 1e-11);
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(code(&nuel(&["solve", "--p", "0.5"])), 2);
    assert_eq!(code(&nuel(&["solve", "--p", "0.5,x"])), 2);
    assert_eq!(code(&nuel(&["solve", "--p", "0.5,1.5"])), 2);
    assert_eq!(code(&nuel(&["solve", "--p", "0.5,0.5", "--eps", "0"])), 2);
    assert_eq!(code(&nuel(&["solve", "--p", "0.5,0.5", "--profile", "/no/such/file"])), 2);
    assert_eq!(code(&nuel(&["frobnicate"])), 2);
    assert_eq!(code(&nuel(&["reproduce", "--table", "10"])), 2);
    assert_eq!(code(&nuel(&["reproduce", "--figure", "3"])), 2);
    assert_eq!(code(&nuel(&["sweep", "--n", "3", "--fix", "2=1", "--vary", "1=0.5:1:0.1"])), 2);
    assert_eq!(code(&nuel(&["simulate", "--p", "0.5,0.5", "--s0", "1111"])), 2);
}

#[test]
fn computation_errors_exit_3() {
    let out = nuel(&["simulate", "--p", "0,0", "--trials", "1"]);
    assert_eq!(code(&out), 3);
    assert!(String::from_utf8_lossy(&out.stderr).contains("did not terminate"));
    assert_eq!(code(&nuel(&["solve", "--p", "0,0"])), 3);
}

#[test]
fn equilibrium_examples() {
    let eq = json(&nuel(&["equilibrium", "--p", "0.8,0.4,0.85,0.5"]));
    assert_eq!(targets(&eq, 4), [4, 3, 1, 2]);
    let eq = json(&nuel(&["equilibrium", "--p", "0.75,0.25,1.0,0.5"]));
    assert_eq!(targets(&eq, 4), [4, 3, 1, 2]);
}

#[test]
fn zugzwang_tie_breaks() {
    let eq = json(&nuel(&["equilibrium", "--p", "1,1,1", "--tie-break", "next"]));
    assert_eq!(targets(&eq, 3), [2, 3, 1]);
    assert_eq!(row(&eq["payoffs"], "1111"), [0.0, 0.0, 1.0]);

    let eq = json(&nuel(&["equilibrium", "--p", "1,1,1"]));
    assert_eq!(targets(&eq, 3), [2, 1, 1]);
    assert_eq!(row(&eq["payoffs"], "1111"), [0.0, 0.0, 1.0]);
    assert_eq!(eq["ties"].as_array().unwrap().len(), 3);
    assert_eq!(eq["strict"], false);
}

#[test]
fn equilibrium_table_layout() {
    let out = nuel(&["equilibrium", "--p", "0.9,0.1,0.2", "--table"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(
        text,
        "n,1,2,3\np_n,0.90,0.10,0.20\nsigma_n(s_n),3,1,1\nV_n(1111),0.86,0.12,0.02\n\
         V_n(2111),0.62,0.18,0.20\nV_n(3111),0.69,0.16,0.14\n"
    );
}

#[test]
fn simulate_examples() {
    let r = json(&nuel(&["simulate", "--p", "1,1", "--trials", "10", "--seed", "1"]));
    assert_eq!(r["means"], serde_json::json!([1.0, 0.0]));
    assert_eq!(r["s0"], "111");
    assert_eq!(r["trials"], 10);

    let r = json(&nuel(&["simulate", "--p", "0.5,0.7,0.95", "--trials", "200000", "--seed", "7", "--check"]));
    assert_eq!(r["within_4se"], true);
    assert_eq!(r["deviation_se"].as_array().unwrap().len(), 3);
}

#[test]
fn simulate_is_deterministic_and_writes_a_trace() {
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("trace.txt");
    let args = ["simulate", "--p", "0.4,0.6,0.5", "--trials", "5000", "--seed", "9", "--s0", "2111"];
    let a = nuel(&args);
    let mut with_trace = args.to_vec();
    with_trace.extend(["--trace", trace.to_str().unwrap()]);
    let b = nuel(&with_trace);
    assert_eq!(a.stdout, b.stdout);
    let lines: Vec<String> = fs::read_to_string(&trace).unwrap().lines().map(String::from).collect();
    assert_eq!(lines[0], "2111");
    assert!(lines.last().unwrap().starts_with('0'));
}

#[test]
fn solve_round_trips_through_profile_files() {
    let dir = tempfile::tempdir().unwrap();
    let eq_path = dir.path().join("eq.json");
    let p = "0.8,0.4,0.85,0.5";
    assert_eq!(code(&nuel(&["equilibrium", "--p", p, "--out", eq_path.to_str().unwrap()])), 0);
    let eq: Value = serde_json::from_str(&fs::read_to_string(&eq_path).unwrap()).unwrap();

    let direct = json(&nuel(&["solve", "--p", p]));
    let from_file = json(&nuel(&["solve", "--p", p, "--profile", eq_path.to_str().unwrap()]));
    assert_eq!(direct, from_file);
    assert_eq!(direct, eq["payoffs"]);

    let mixed = dir.path().join("mixed.json");
    fs::write(&mixed, r#"{"1111": [0, 0.5, 0.5], "2111": 3, "3111": [0.25, 0.75, 0]}"#).unwrap();
    let v = json(&nuel(&["solve", "--p", "0.3,0.6,0.9", "--profile", mixed.to_str().unwrap()]));
    let r = row(&v, "1111");
    assert!((r.iter().sum::<f64>() - 1.0).abs() < 1e-12);

    assert_eq!(code(&nuel(&["solve", "--p", "0.3,0.6,0.9,0.5", "--profile", mixed.to_str().unwrap()])), 2);
}

#[test]
fn csv_output_matches_json() {
    let v = json(&nuel(&["solve", "--p", "0.3,0.6,0.9", "--profile", "uniform"]));
    let out = nuel(&["solve", "--p", "0.3,0.6,0.9", "--profile", "uniform", "--format", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("state,player,value"));
    let mut count = 0;
    for line in lines {
        let f: Vec<&str> = line.split(',').collect();
        let player: usize = f[1].parse().unwrap();
        let value: f64 = f[2].parse().unwrap();
        assert_eq!(row(&v, f[0])[player - 1], value);
        count += 1;
    }
    assert_eq!(count, 12 * 3);
}

#[test]
fn sweep_csv() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("fig4.csv");
    let out = nuel(&[
        "sweep", "--fix", "2=1,3=1", "--vary", "1=0.5:1.0:0.01", "--out", path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let text = fs::read_to_string(&path).unwrap();
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let col = header.iter().position(|h| *h == "V1(1111)").unwrap();
    let v1: Vec<f64> = lines.map(|l| l.split(',').nth(col).unwrap().parse().unwrap()).collect();
    assert_eq!(v1.len(), 51);
    assert!(v1.windows(2).all(|w| w[1] <= w[0] + 1e-12));
}

#[test]
fn single_point_sweep_equals_equilibrium() {
    let out = nuel(&["sweep", "--fix", "2=0.4,3=0.85,4=0.5", "--vary", "1=0.8:0.8:0.1", "--states", "11111"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    let cells: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    let eq = json(&nuel(&["equilibrium", "--p", "0.8,0.4,0.85,0.5"]));
    let t: Vec<u64> = cells[4..8].iter().map(|c| c.parse().unwrap()).collect();
    assert_eq!(t, targets(&eq, 4));
    let v: Vec<f64> = cells[8..12].iter().map(|c| c.parse().unwrap()).collect();
    assert_eq!(v, row(&eq["payoffs"], "11111"));
}

#[test]
fn reproduce_commands() {
    for k in ["3", "4", "8"] {
        let out = nuel(&["reproduce", "--table", k]);
        assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stdout));
    }
    let text = String::from_utf8(nuel(&["reproduce", "--table", "4"]).stdout).unwrap();
    assert!(text.contains("table 4: PASS"));
    assert_eq!(code(&nuel(&["reproduce", "--figure", "4"])), 0);
}
