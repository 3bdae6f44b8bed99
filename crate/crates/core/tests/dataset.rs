use goa_ids::dataset::{
    apply_normalize, encode, fit_encoding, fit_normalize, k_fold_indices, map_label, parse_kdd_str,
    AttackClass, DatasetError, FEATURE_NAMES,
};
use goa_ids::synthetic;
use proptest::prelude::*;

const LINE: &str = "0,tcp,ftp_data,SF,491,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,2,2,0.00,0.00,0.00,0.00,1.00,0.00,0.00,150,25,0.17,0.03,0.17,0.00,0.00,0.00,0.05,0.00,normal,20";

#[test]
fn parses_a_real_format_line() {
    let recs = parse_kdd_str(&format!("{LINE}\n\n")).unwrap();
    assert_eq!(recs.len(), 1);
    assert_eq!(recs[0].fields.len(), FEATURE_NAMES.len());
    assert_eq!(recs[0].label, "normal");
    assert_eq!(recs[0].difficulty, Some(20));
    assert_eq!(recs[0].to_line(), LINE);
}

#[test]
fn parse_errors_name_the_line() {
    let text = format!("{LINE}\n0,tcp,short\n");
    match parse_kdd_str(&text) {
        Err(DatasetError::Parse { line, .. }) => assert_eq!(line, 2),
        other => panic!("expected a parse error, got {other:?}"),
    }
}

#[test]
fn labels_map_to_the_five_categories() {
    assert_eq!(map_label("normal").unwrap(), AttackClass::Normal);
    assert_eq!(map_label("neptune").unwrap(), AttackClass::Dos);
    assert_eq!(map_label("satan").unwrap(), AttackClass::Probe);
    assert_eq!(map_label("buffer_overflow").unwrap(), AttackClass::U2r);
    assert_eq!(map_label("guess_passwd").unwrap(), AttackClass::R2l);
    assert!(matches!(
        map_label("not_an_attack"),
        Err(DatasetError::UnknownLabel(_))
    ));
    for (name, _) in synthetic::TRAIN_LABEL_COUNTS {
        assert!(map_label(name).is_ok(), "{name}");
    }
}

#[test]
fn encoding_is_stable_and_round_trips() {
    let recs = synthetic::generate(500, 1);
    let table = fit_encoding(&recs).unwrap();
    assert_eq!(table, fit_encoding(&recs).unwrap());
    assert_eq!(table.categorical_columns(), vec![1, 2, 3]);
    for r in &recs {
        for &c in &[1usize, 2, 3] {
            let code = table.code(c, &r.fields[c]).unwrap();
            assert_eq!(table.decode(c, code), Some(r.fields[c].as_str()));
        }
    }
    let unseen = table.code(1, "never-seen").unwrap();
    assert_eq!(table.decode(1, unseen), None);

    let data = encode(&recs, &table).unwrap();
    assert_eq!(data.n_rows(), 500);
    assert_eq!(data.n_features(), 41);
    assert_eq!(data.class_names().len(), 5);
}

#[test]
fn normalization_uses_training_statistics_only() {
    let recs = synthetic::generate(400, 2);
    let table = fit_encoding(&recs[..300]).unwrap();
    let train = encode(&recs[..300], &table).unwrap();
    let test = encode(&recs[300..], &table).unwrap();
    let stats = fit_normalize(&train);
    let tn = apply_normalize(&train, &stats).unwrap();
    let te = apply_normalize(&test, &stats).unwrap();
    assert!(tn.values().iter().all(|v| (0.0..=1.0).contains(v)));
    assert!(te.values().iter().all(|v| (0.0..=1.0).contains(v)));
    // reapplying the same statistics is a no-op, mixing statistics is refused
    assert_eq!(apply_normalize(&tn, &stats).unwrap(), tn);
    let other = fit_normalize(&test);
    if other != stats {
        assert!(matches!(
            apply_normalize(&tn, &other),
            Err(DatasetError::AlreadyNormalized)
        ));
    }
}

#[test]
fn synthetic_label_mix_follows_the_training_file() {
    let recs = synthetic::generate(125_973, 3);
    for (name, count) in synthetic::TRAIN_LABEL_COUNTS {
        assert_eq!(
            recs.iter().filter(|r| r.label == name).count(),
            count,
            "{name}"
        );
    }
    assert_eq!(synthetic::generate(1_000, 9), synthetic::generate(1_000, 9));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn folds_partition_rows_and_keep_class_shares(
        labels in prop::collection::vec(0usize..5, 20..300),
        k in 2usize..8,
        seed in any::<u64>(),
    ) {
        let kf = k_fold_indices(&labels, 5, k, seed).unwrap();
        prop_assert_eq!(kf.folds.len(), k);
        let mut all: Vec<usize> = kf.folds.iter().flat_map(|f| f.test.clone()).collect();
        all.sort_unstable();
        prop_assert_eq!(all, (0..labels.len()).collect::<Vec<_>>());
        for f in &kf.folds {
            prop_assert_eq!(f.train.len() + f.test.len(), labels.len());
            prop_assert!(f.train.iter().all(|i| !f.test.contains(i)));
        }
        for class in 0..5 {
            let counts: Vec<usize> = kf.folds.iter()
                .map(|f| f.test.iter().filter(|&&i| labels[i] == class).count())
                .collect();
            let (lo, hi) = (counts.iter().min().unwrap(), counts.iter().max().unwrap());
            prop_assert!(hi - lo <= 1, "class {} spread {:?}", class, counts);
        }
    }
}
