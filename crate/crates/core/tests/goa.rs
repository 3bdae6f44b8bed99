use std::convert::Infallible;

use goa_ids::optimizer::{self, move_positions, update_c, FeatureMask, GoaConfig, Swarm};
use goa_ids::seed::rng_from;
use proptest::prelude::*;

#[test]
fn two_grasshoppers_in_one_dimension_match_hand_evaluation() {
    let cfg = GoaConfig {
        population_size: 2,
        dim: 1,
        ..GoaConfig::default()
    };
    let mut swarm = Swarm::init(&cfg, &mut rng_from(0));
    swarm.members[0].position = vec![0.2];
    swarm.members[1].position = vec![0.7];
    swarm.best_position = vec![0.6];
    let c = 0.5;
    move_positions(&mut swarm, c, &cfg);

    // s(0.5) with f = 0.5, l = 1.5
    let s = 0.5 * (-0.5f64 / 1.5).exp() - (-0.5f64).exp();
    // c · c · (ub − lb)/2 · s(|Δ|) · Δ/d, with d = |Δ| = 0.5 in one dimension
    let expected0 = 0.5 * 0.5 * 0.5 * s * 1.0 + 0.6;
    let expected1 = 0.5 * 0.5 * 0.5 * s * -1.0 + 0.6;
    assert!((swarm.members[0].position[0] - expected0).abs() < 1e-9);
    assert!((swarm.members[1].position[0] - expected1).abs() < 1e-9);
    // s(0.5) < 0: the pair repels, so the left member ends left of the target
    assert!(swarm.members[0].position[0] < 0.6);
}

#[test]
fn moved_positions_are_clamped() {
    let cfg = GoaConfig {
        population_size: 2,
        dim: 1,
        ..GoaConfig::default()
    };
    let mut swarm = Swarm::init(&cfg, &mut rng_from(0));
    swarm.members[0].position = vec![0.0];
    swarm.members[1].position = vec![0.01];
    swarm.best_position = vec![0.0];
    move_positions(&mut swarm, 1.0, &cfg);
    assert_eq!(swarm.members[0].position[0], 0.0);
}

#[test]
fn c_endpoints_are_exact() {
    for (c_max, c_min, tmax) in [(1.0, 1e-5, 40), (2.0, 0.1, 7), (0.9, 0.3, 1)] {
        let cfg = GoaConfig {
            c_max,
            c_min,
            max_iterations: tmax,
            ..GoaConfig::default()
        };
        assert_eq!(update_c(0, &cfg), c_max);
        assert_eq!(update_c(tmax, &cfg), c_min);
    }
}

#[test]
fn history_is_monotone_on_random_objectives() {
    for k in 0..100u64 {
        // a random linear weighting of the bits plus a seeded hash jitter
        let mut rng = rng_from(k);
        let weights: Vec<f64> = (0..41)
            .map(|_| rand::Rng::gen_range(&mut rng, -1.0..1.0))
            .collect();
        let objective = |m: &FeatureMask| -> Result<f64, Infallible> {
            let lin: f64 = m.selected().iter().map(|&i| weights[i]).sum();
            let h = goa_ids::seed::derive_seed(k, &m.to_bitstring());
            Ok(lin + (h % 1000) as f64 * 1e-3)
        };
        let cfg = GoaConfig {
            seed: k,
            max_iterations: 10,
            fitness_delta_stop: 0.0,
            ..GoaConfig::default()
        };
        let out = optimizer::run(&objective, &cfg).unwrap();
        assert_eq!(out.history.len(), 10);
        for w in out.history.windows(2) {
            assert!(w[1].best_fitness >= w[0].best_fitness, "objective {k}");
        }
        assert_eq!(out.best_fitness, out.history.last().unwrap().best_fitness);
        assert_eq!(out.best_fitness, objective(&out.best_mask).unwrap());
    }
}

#[test]
fn zero_mutation_runs_are_reproducible() {
    let objective = |m: &FeatureMask| -> Result<f64, Infallible> {
        Ok(m.popcount() as f64 / 41.0 - if m.get(3) { 0.5 } else { 0.0 })
    };
    let cfg = GoaConfig {
        seed: 9,
        swap_prob: 0.0,
        reversion_prob: 0.0,
        ..GoaConfig::default()
    };
    let a = optimizer::run(&objective, &cfg).unwrap();
    let b = optimizer::run(&objective, &cfg).unwrap();
    assert_eq!(a, b);
}

#[test]
fn delta_rule_stops_a_flat_objective_at_the_second_iteration() {
    let flat = |_: &FeatureMask| -> Result<f64, Infallible> { Ok(1.0) };
    let out = optimizer::run(&flat, &GoaConfig::default()).unwrap();
    assert_eq!(out.history.len(), 2);
    assert_eq!(out.stop, optimizer::StopReason::FitnessDelta);
}

#[test]
fn objective_errors_carry_the_mask() {
    let failing = |m: &FeatureMask| -> Result<f64, String> {
        if m.get(0) {
            Err("boom".into())
        } else {
            Ok(0.0)
        }
    };
    match optimizer::run(&failing, &GoaConfig::default()) {
        Err(optimizer::RunError::Objective { mask, source }) => {
            assert!(mask.get(0));
            assert_eq!(source, "boom");
        }
        other => panic!("expected an objective error, got {other:?}"),
    }
}

#[test]
fn popcount_objective_improves_on_the_initial_swarm() {
    let popcount = |m: &FeatureMask| -> Result<f64, Infallible> { Ok(m.popcount() as f64 / 41.0) };
    for seed in 0..5 {
        let cfg = GoaConfig {
            seed,
            fitness_delta_stop: 0.0,
            ..GoaConfig::default()
        };
        let out = optimizer::run(&popcount, &cfg).unwrap();
        // 30 random masks rarely exceed 28 bits; the run must get well past that
        assert!(
            out.best_mask.popcount() >= 30,
            "seed {seed}: {}",
            out.best_mask
        );
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn emitted_mask_is_never_empty(seed in any::<u64>(), pop in 2usize..12, dim in 1usize..20) {
        let sparse = |m: &FeatureMask| -> Result<f64, Infallible> { Ok(-(m.popcount() as f64)) };
        let cfg = GoaConfig { seed, population_size: pop, dim, max_iterations: 5, ..GoaConfig::default() };
        let out = optimizer::run(&sparse, &cfg).unwrap();
        prop_assert!(out.best_mask.has_any());
        prop_assert_eq!(out.best_mask.len(), dim);
        prop_assert!(out.history.len() <= 5);
        prop_assert!(out.best_position.iter().all(|x| (0.0..=1.0).contains(x)));
    }
}
