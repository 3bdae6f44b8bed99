use std::fmt::Write as _;

use sha2::{Digest, Sha256};

use super::{Dataset, DatasetError};

/// Per-feature min and max fitted on training rows.
#[derive(Debug, Clone, PartialEq)]
pub struct NormStats {
    pub min: Vec<f64>,
    pub max: Vec<f64>,
}

impl NormStats {
    /// Scales one value of `feature` into [0,1], clipping out-of-range inputs.
    pub fn scale(&self, feature: usize, v: f64) -> f64 {
        let (lo, hi) = (self.min[feature], self.max[feature]);
        if hi <= lo {
            return 0.0;
        }
        ((v - lo) / (hi - lo)).clamp(0.0, 1.0)
    }

    pub(crate) fn fingerprint(&self) -> u64 {
        let mut h = Sha256::new();
        for (lo, hi) in self.min.iter().zip(&self.max) {
            h.update(lo.to_bits().to_le_bytes());
            h.update(hi.to_bits().to_le_bytes());
        }
        let d = h.finalize();
        u64::from_le_bytes(d[..8].try_into().expect("digest length"))
    }

    pub fn to_key_value(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "norm.features={}", self.min.len());
        for (i, (lo, hi)) in self.min.iter().zip(&self.max).enumerate() {
            let _ = writeln!(out, "feature.{i}.min={lo}");
            let _ = writeln!(out, "feature.{i}.max={hi}");
        }
        out
    }
}

/// Fits min-max statistics. An empty dataset yields all-zero bounds.
pub fn fit_normalize(dataset: &Dataset) -> NormStats {
    let d = dataset.n_features();
    if dataset.n_rows() == 0 {
        return NormStats {
            min: vec![0.0; d],
            max: vec![0.0; d],
        };
    }
    let mut min = vec![f64::INFINITY; d];
    let mut max = vec![f64::NEG_INFINITY; d];
    for row in dataset.rows() {
        for (j, &v) in row.iter().enumerate() {
            min[j] = min[j].min(v);
            max[j] = max[j].max(v);
        }
    }
    NormStats { min, max }
}

/// Applies min-max scaling with clipping to [0,1].
///
/// Applying the same statistics to an already normalized dataset returns it
/// unchanged; applying different statistics to it is an error.
pub fn apply_normalize(dataset: &Dataset, stats: &NormStats) -> Result<Dataset, DatasetError> {
    if stats.min.len() != dataset.n_features() || stats.max.len() != dataset.n_features() {
        return Err(DatasetError::Shape(format!(
            "stats cover {} features, dataset has {}",
            stats.min.len(),
            dataset.n_features()
        )));
    }
    let fp = stats.fingerprint();
    match dataset.normalized_by() {
        Some(prev) if prev == fp => return Ok(dataset.clone()),
        Some(_) => return Err(DatasetError::AlreadyNormalized),
        None => {}
    }
    let d = dataset.n_features();
    let values = dataset
        .values()
        .iter()
        .enumerate()
        .map(|(i, &v)| stats.scale(i % d, v))
        .collect();
    Ok(dataset.with_values(values, Some(fp)))
}
