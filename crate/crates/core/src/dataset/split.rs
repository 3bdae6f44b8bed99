use rand::seq::SliceRandom;

use super::DatasetError;
use crate::seed::rng_from;

/// Index-based train/test partition of one fold.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fold {
    pub train: Vec<usize>,
    pub test: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KFolds {
    pub folds: Vec<Fold>,
    /// One entry per class with fewer rows than folds.
    pub warnings: Vec<String>,
}

fn indices_by_class(labels: &[usize], n_classes: usize) -> Vec<Vec<usize>> {
    let mut by_class = vec![Vec::new(); n_classes];
    for (i, &l) in labels.iter().enumerate() {
        by_class[l].push(i);
    }
    by_class
}

/// Largest-remainder allocation of `n` slots proportional to `counts`.
fn allocate(counts: &[usize], n: usize) -> Vec<usize> {
    let total: usize = counts.iter().sum();
    let mut alloc: Vec<usize> = counts.iter().map(|&c| c * n / total).collect();
    let mut remainders: Vec<(usize, usize)> = counts
        .iter()
        .enumerate()
        .map(|(i, &c)| ((c * n) % total, i))
        .collect();
    // largest remainder first, lowest class index on ties
    remainders.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
    let short = n - alloc.iter().sum::<usize>();
    for &(_, i) in remainders.iter().take(short) {
        alloc[i] += 1;
    }
    alloc
}

/// Picks `n` row indices so that each class keeps its share to within one row.
///
/// Returned indices are sorted ascending.
pub fn stratified_subsample_indices(
    labels: &[usize],
    n_classes: usize,
    n: usize,
    seed: u64,
) -> Result<Vec<usize>, DatasetError> {
    if n == 0 {
        return Err(DatasetError::Split(
            "subsample size must be positive".into(),
        ));
    }
    if n > labels.len() {
        return Err(DatasetError::Split(format!(
            "subsample of {n} requested from {} rows",
            labels.len()
        )));
    }
    let mut rng = rng_from(seed);
    let mut by_class = indices_by_class(labels, n_classes);
    let counts: Vec<usize> = by_class.iter().map(Vec::len).collect();
    let alloc = allocate(&counts, n);
    let mut picked = Vec::with_capacity(n);
    for (members, take) in by_class.iter_mut().zip(alloc) {
        members.shuffle(&mut rng);
        picked.extend_from_slice(&members[..take]);
    }
    picked.sort_unstable();
    Ok(picked)
}

/// Splits rows per class into (train, holdout) with `holdout_fraction` of each
/// class held out, rounding to nearest. A class never loses all its training rows.
pub fn stratified_split_indices(
    labels: &[usize],
    n_classes: usize,
    holdout_fraction: f64,
    seed: u64,
) -> Result<(Vec<usize>, Vec<usize>), DatasetError> {
    if !(0.0..1.0).contains(&holdout_fraction) {
        return Err(DatasetError::Split(format!(
            "holdout fraction {holdout_fraction} outside [0,1)"
        )));
    }
    let mut rng = rng_from(seed);
    let mut train = Vec::new();
    let mut holdout = Vec::new();
    for mut members in indices_by_class(labels, n_classes) {
        members.shuffle(&mut rng);
        let mut h = (members.len() as f64 * holdout_fraction).round() as usize;
        if h == members.len() && h > 0 {
            h -= 1;
        }
        holdout.extend_from_slice(&members[..h]);
        train.extend_from_slice(&members[h..]);
    }
    train.sort_unstable();
    holdout.sort_unstable();
    Ok((train, holdout))
}

/// Stratified k-fold partition.
///
/// Each class is shuffled and dealt round-robin over the folds, continuing
/// from where the previous class stopped, so fold sizes differ by at most one.
/// Classes with fewer than `k` rows are spread as far as they go and reported
/// in [`KFolds::warnings`].
pub fn k_fold_indices(
    labels: &[usize],
    n_classes: usize,
    k: usize,
    seed: u64,
) -> Result<KFolds, DatasetError> {
    if k < 2 {
        return Err(DatasetError::Split(format!(
            "k = {k}; need at least 2 folds"
        )));
    }
    if labels.len() < k {
        return Err(DatasetError::Split(format!(
            "{} rows cannot fill {k} folds",
            labels.len()
        )));
    }
    let mut rng = rng_from(seed);
    let mut tests = vec![Vec::new(); k];
    let mut warnings = Vec::new();
    let mut next = 0;
    for (class, mut members) in indices_by_class(labels, n_classes).into_iter().enumerate() {
        if !members.is_empty() && members.len() < k {
            warnings.push(format!(
                "class {class} has {} rows for {k} folds; some test folds will lack it",
                members.len()
            ));
        }
        members.shuffle(&mut rng);
        for i in members {
            tests[next].push(i);
            next = (next + 1) % k;
        }
    }
    for w in &warnings {
        log::warn!("{w}");
    }
    let n = labels.len();
    let folds = tests
        .into_iter()
        .map(|mut test| {
            test.sort_unstable();
            let mut in_test = vec![false; n];
            for &i in &test {
                in_test[i] = true;
            }
            let train = (0..n).filter(|&i| !in_test[i]).collect();
            Fold { train, test }
        })
        .collect();
    Ok(KFolds { folds, warnings })
}
