mod common;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use common::{random_mixed, random_p};
use nuel_core::montecarlo::estimate_payoffs;
use nuel_core::{nash_compute, solve_nuel, GameState, SolverConfig};

#[test]
fn estimates_agree_with_the_solver() {
    let mut rng = StdRng::seed_from_u64(81);
    let cfg = SolverConfig::default();
    for i in 0..20 {
        let n = 3 + i % 3;
        let p = random_p(&mut rng, n, 0.1, 0.95);
        let profile = random_mixed(&mut rng, n);
        let table = solve_nuel(&p, &profile, &cfg).unwrap();
        let s0 = GameState::all_alive(n, rng.random_range(1..=n)).unwrap();
        let r = estimate_payoffs(s0, &p, &profile, 100_000, i as u64).unwrap();
        assert!(r.agrees_within(table.row(&s0), 4.0), "{:?} vs {:?}", r.means, table.row(&s0));
        assert!((r.means.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }
}

#[test]
fn mean_length_is_bounded_by_the_weakest_shot() {
    let mut rng = StdRng::seed_from_u64(82);
    for n in 2..=6 {
        let p = random_p(&mut rng, n, 0.2, 0.9);
        let profile = random_mixed(&mut rng, n);
        let s0 = GameState::all_alive(n, 1).unwrap();
        let r = estimate_payoffs(s0, &p, &profile, 20_000, 3).unwrap();
        let bound = (n - 1) as f64 / p.min();
        assert!(r.mean_length <= bound + 4.0 * r.length_stderr, "{} > {bound}", r.mean_length);
        assert!(r.mean_length >= (n - 1) as f64);
    }
}

#[test]
fn thread_count_does_not_change_the_estimate() {
    let p = nuel_core::Marksmanships::new(vec![0.3, 0.5, 0.7, 0.9]).unwrap();
    let eq = nash_compute(&p, &SolverConfig::default()).unwrap();
    let s0 = GameState::all_alive(4, 2).unwrap();
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| estimate_payoffs(s0, &p, &eq.profile, 50_000, 17).unwrap())
    };
    assert_eq!(run(1), run(4));
}
