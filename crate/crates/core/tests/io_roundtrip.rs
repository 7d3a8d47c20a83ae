mod common;

use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::SeedableRng;

use common::{random_mixed, random_p};
use nuel_core::io::{
    equilibrium_to_json, payoffs_from_csv, payoffs_from_json, payoffs_to_csv, payoffs_to_json, profile_from_json,
    profile_to_json,
};
use nuel_core::{nash_compute, solve_nuel, SolverConfig};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn tables_and_profiles_round_trip(n in 2usize..=5, seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let p = random_p(&mut rng, n, 0.05, 0.95);
        let profile = random_mixed(&mut rng, n);
        let table = solve_nuel(&p, &profile, &SolverConfig::default()).unwrap();

        let text = serde_json::to_string(&payoffs_to_json(&table)).unwrap();
        let back = payoffs_from_json(&serde_json::from_str(&text).unwrap()).unwrap();
        prop_assert_eq!(&back, &table);

        let back = payoffs_from_csv(&payoffs_to_csv(&table)).unwrap();
        prop_assert_eq!(&back, &table);

        let text = serde_json::to_string(&profile_to_json(&profile)).unwrap();
        let reread = profile_from_json(&serde_json::from_str(&text).unwrap()).unwrap();
        let again = solve_nuel(&p, &reread, &SolverConfig::default()).unwrap();
        prop_assert_eq!(again, table);
    }
}

#[test]
fn equilibrium_targets_are_a_profile() {
    let p = nuel_core::Marksmanships::new(vec![0.8, 0.4, 0.85, 0.5]).unwrap();
    let eq = nash_compute(&p, &SolverConfig::default()).unwrap();
    let v = equilibrium_to_json(&eq);
    assert_eq!(profile_from_json(&v["targets"]).unwrap(), eq.profile);
    assert_eq!(payoffs_from_json(&v["payoffs"]).unwrap(), eq.payoffs);
    assert_eq!(v["tie_break"], "lowest-index");
}
