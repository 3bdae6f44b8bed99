use goa_ids::dataset::Dataset;
use goa_ids::optimizer::FeatureMask;
use goa_ids::seed::rng_from;
use goa_ids::selection::{
    fitness, fitness_from_predictions, fitness_value, project_features, SelectionError,
};
use goa_ids::SvmConfig;
use proptest::prelude::*;
use rand::Rng;

#[test]
fn formula_matches_independent_arithmetic() {
    let mut rng = rng_from(3);
    for _ in 0..1_000 {
        let r_tp: f64 = rng.gen();
        let r_e: f64 = rng.gen();
        let n_f = rng.gen_range(1..=41usize);
        let expected = r_tp + 1.0 - r_e + 1.0 - n_f as f64 / 41.0;
        assert!((fitness_value(r_tp, r_e, n_f, 41) - expected).abs() < 1e-12);
        if n_f < 41 {
            assert!(fitness_value(r_tp, r_e, n_f + 1, 41) < fitness_value(r_tp, r_e, n_f, 41));
        }
    }
}

#[test]
fn perfect_predictions_score_by_feature_count_alone() {
    let mask =
        FeatureMask::from_bitstring(&format!("{}{}", "1".repeat(10), "0".repeat(31))).unwrap();
    let truth = [0, 1, 2, 0, 3];
    let b = fitness_from_predictions(&mask, &truth, &truth, 0).unwrap();
    assert_eq!((b.r_tp, b.r_e, b.n_f), (1.0, 0.0, 10));
    assert!((b.fitness - (3.0 - 10.0 / 41.0)).abs() < 1e-12);
}

#[test]
fn confusion_between_attack_classes_is_not_an_error() {
    let mask = FeatureMask::all(41);
    let b = fitness_from_predictions(&mask, &[1, 2, 0], &[2, 1, 0], 0).unwrap();
    assert_eq!((b.r_tp, b.r_e), (1.0, 0.0));
}

#[test]
fn all_normal_validation_is_flagged() {
    let mask = FeatureMask::all(41);
    let b = fitness_from_predictions(&mask, &[0, 0], &[0, 1], 0).unwrap();
    assert!(b.degenerate_tp);
    assert_eq!(b.r_tp, 0.0);
    assert_eq!(b.r_e, 0.5);
}

#[test]
fn empty_and_misshapen_masks_are_rejected() {
    let data = Dataset::from_rows(
        &[vec![0.0, 1.0], vec![1.0, 0.0]],
        vec![0, 1],
        vec!["a".into(), "b".into()],
    )
    .unwrap();
    assert_eq!(
        project_features(&data, &FeatureMask::none(2)),
        Err(SelectionError::EmptyMask)
    );
    assert!(matches!(
        project_features(&data, &FeatureMask::all(3)),
        Err(SelectionError::MaskLength {
            mask: 3,
            features: 2
        })
    ));
    let p = project_features(&data, &FeatureMask::from_bitstring("01").unwrap()).unwrap();
    assert_eq!(p.values(), &[1.0, 0.0]);
}

fn toy(seed: u64, n: usize) -> Dataset {
    // column 0 carries the class, columns 1..6 are noise
    let mut rng = rng_from(seed);
    let mut rows = Vec::new();
    let mut labels = Vec::new();
    for i in 0..n {
        let label = i % 2;
        let mut row = vec![label as f64 * 0.8 + rng.gen_range(0.0..0.2)];
        row.extend((0..5).map(|_| rng.gen::<f64>()));
        rows.push(row);
        labels.push(label);
    }
    Dataset::from_rows(&rows, labels, vec!["Normal".into(), "Attack".into()]).unwrap()
}

#[test]
fn fitness_is_a_pure_function_of_its_inputs() {
    let train = toy(1, 60);
    let valid = toy(2, 30);
    let mask = FeatureMask::from_bitstring("100100").unwrap();
    let a = fitness(&mask, &train, &valid, &SvmConfig::default(), 5, 0).unwrap();
    let b = fitness(&mask, &train, &valid, &SvmConfig::default(), 5, 0).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.r_e, 0.0);
    let noise = FeatureMask::from_bitstring("011111").unwrap();
    let c = fitness(&noise, &train, &valid, &SvmConfig::default(), 5, 0).unwrap();
    assert!(c.fitness < a.fitness);
}

proptest! {
    #[test]
    fn fitness_stays_in_range(r_tp in 0.0f64..=1.0, r_e in 0.0f64..=1.0, n_f in 1usize..=41) {
        let f = fitness_value(r_tp, r_e, n_f, 41);
        prop_assert!((0.0..3.0).contains(&f));
    }
}
