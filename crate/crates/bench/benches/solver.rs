use std::hint::black_box;
use std::sync::Arc;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use nuel_core::montecarlo::estimate_payoffs;
use nuel_core::{nash_compute, solve_nuel, GameState, Marksmanships, SolverConfig, StateSpace, StrategyProfile};

fn marksmanships(n: usize) -> Marksmanships {
    Marksmanships::new((0..n).map(|i| 0.15 + 0.7 * i as f64 / n as f64).collect()).unwrap()
}

fn solve(c: &mut Criterion) {
    let mut group = c.benchmark_group("solve_nuel");
    for n in [4, 8, 12] {
        let p = marksmanships(n);
        let profile = StrategyProfile::uniform(Arc::new(StateSpace::new(n).unwrap()));
        for (name, cfg) in [("exact", SolverConfig::default()), ("iterative", SolverConfig::iterative(1e-12))] {
            group.bench_with_input(BenchmarkId::new(name, n), &n, |b, _| {
                b.iter(|| solve_nuel(black_box(&p), &profile, &cfg).unwrap())
            });
        }
    }
    group.finish();
}

fn equilibrium(c: &mut Criterion) {
    let mut group = c.benchmark_group("nash_compute");
    for n in [3, 6, 10] {
        let p = marksmanships(n);
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, _| {
            b.iter(|| nash_compute(black_box(&p), &SolverConfig::default()).unwrap())
        });
    }
    group.finish();
}

fn simulate(c: &mut Criterion) {
    let p = marksmanships(4);
    let eq = nash_compute(&p, &SolverConfig::default()).unwrap();
    let s0 = GameState::all_alive(4, 1).unwrap();
    c.bench_function("estimate_payoffs/4x100k", |b| {
        b.iter(|| estimate_payoffs(s0, &p, &eq.profile, 100_000, black_box(1)).unwrap())
    });
}

criterion_group!(benches, solve, equilibrium, simulate);
criterion_main!(benches);
