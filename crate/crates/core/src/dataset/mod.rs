//! Record ingestion and preprocessing.

mod encoding;
mod kdd;
mod labels;
mod normalize;
mod split;

use thiserror::Error;

pub use encoding::{encode, fit_encoding, ColumnCoding, EncodingTable};
pub use kdd::{parse_kdd, parse_kdd_str, RawRecord, FEATURE_NAMES};
pub use labels::{category_table_version, known_labels, map_label, AttackClass};
pub use normalize::{apply_normalize, fit_normalize, NormStats};
pub use split::{
    k_fold_indices, stratified_split_indices, stratified_subsample_indices, Fold, KFolds,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DatasetError {
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("i/o error: {0}")]
    Io(String),
    #[error("unmapped attack label {0:?}")]
    UnknownLabel(String),
    #[error("record {row}, column {column}: value {value:?} is not numeric")]
    NonNumeric {
        row: usize,
        column: usize,
        value: String,
    },
    #[error("no records to fit on")]
    Empty,
    #[error("invalid shape: {0}")]
    Shape(String),
    #[error("invalid split request: {0}")]
    Split(String),
    #[error("dataset is already normalized with different statistics")]
    AlreadyNormalized,
}

/// Dense row-major feature matrix with one class index per row.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    values: Vec<f64>,
    n_features: usize,
    labels: Vec<usize>,
    class_names: Vec<String>,
    normalized_by: Option<u64>,
}

impl Dataset {
    pub fn new(
        values: Vec<f64>,
        n_features: usize,
        labels: Vec<usize>,
        class_names: Vec<String>,
    ) -> Result<Self, DatasetError> {
        if n_features == 0 {
            return Err(DatasetError::Shape("zero feature columns".into()));
        }
        if values.len() != labels.len() * n_features {
            return Err(DatasetError::Shape(format!(
                "{} values cannot form {} rows of {n_features} features",
                values.len(),
                labels.len()
            )));
        }
        if let Some(&bad) = labels.iter().find(|&&l| l >= class_names.len()) {
            return Err(DatasetError::Shape(format!(
                "label {bad} out of range for {} classes",
                class_names.len()
            )));
        }
        Ok(Self {
            values,
            n_features,
            labels,
            class_names,
            normalized_by: None,
        })
    }

    /// Builds a dataset from row vectors.
    pub fn from_rows(
        rows: &[Vec<f64>],
        labels: Vec<usize>,
        class_names: Vec<String>,
    ) -> Result<Self, DatasetError> {
        let n_features = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != n_features) {
            return Err(DatasetError::Shape("ragged rows".into()));
        }
        Self::new(rows.concat(), n_features, labels, class_names)
    }

    pub fn n_rows(&self) -> usize {
        self.labels.len()
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn n_classes(&self) -> usize {
        self.class_names.len()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.n_features..(i + 1) * self.n_features]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.values.chunks_exact(self.n_features)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn class_names(&self) -> &[String] {
        &self.class_names
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized_by.is_some()
    }

    /// Row count per class index.
    pub fn class_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.n_classes()];
        for &l in &self.labels {
            counts[l] += 1;
        }
        counts
    }

    /// Materializes the rows at `indices`, in the given order.
    pub fn select(&self, indices: &[usize]) -> Dataset {
        let mut values = Vec::with_capacity(indices.len() * self.n_features);
        let mut labels = Vec::with_capacity(indices.len());
        for &i in indices {
            values.extend_from_slice(self.row(i));
            labels.push(self.labels[i]);
        }
        Dataset {
            values,
            n_features: self.n_features,
            labels,
            class_names: self.class_names.clone(),
            normalized_by: self.normalized_by,
        }
    }

    /// Keeps the columns whose flag is set, in original order.
    pub fn select_columns(&self, keep: &[bool]) -> Result<Dataset, DatasetError> {
        if keep.len() != self.n_features {
            return Err(DatasetError::Shape(format!(
                "column selector has {} entries for {} features",
                keep.len(),
                self.n_features
            )));
        }
        let cols: Vec<usize> = (0..self.n_features).filter(|&c| keep[c]).collect();
        if cols.is_empty() {
            return Err(DatasetError::Shape("no columns selected".into()));
        }
        let mut values = Vec::with_capacity(self.n_rows() * cols.len());
        for row in self.rows() {
            values.extend(cols.iter().map(|&c| row[c]));
        }
        Ok(Dataset {
            values,
            n_features: cols.len(),
            labels: self.labels.clone(),
            class_names: self.class_names.clone(),
            normalized_by: self.normalized_by,
        })
    }

    /// Stratified subsample of `n` rows; see [`stratified_subsample_indices`].
    pub fn stratified_subsample(&self, n: usize, seed: u64) -> Result<Dataset, DatasetError> {
        let idx = stratified_subsample_indices(&self.labels, self.n_classes(), n, seed)?;
        Ok(self.select(&idx))
    }

    /// Stratified k-fold partition; see [`k_fold_indices`].
    pub fn k_folds(&self, k: usize, seed: u64) -> Result<KFolds, DatasetError> {
        k_fold_indices(&self.labels, self.n_classes(), k, seed)
    }

    pub(crate) fn with_values(&self, values: Vec<f64>, normalized_by: Option<u64>) -> Dataset {
        Dataset {
            values,
            n_features: self.n_features,
            labels: self.labels.clone(),
            class_names: self.class_names.clone(),
            normalized_by,
        }
    }

    pub(crate) fn normalized_by(&self) -> Option<u64> {
        self.normalized_by
    }
}
