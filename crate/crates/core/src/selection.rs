//! Wrapper fitness: score a feature mask by training and validating an SVM.
//!
//! The score rewards attack recall, penalizes error, and prefers smaller
//! feature sets:
//!
//! ```text
//! fitness = R_tp + (1 − R_E) + (1 − N_F / D)
//! ```
//!
//! where `D` is the full feature count (41 for NSL-KDD). R_tp and R_E come
//! from a two-class table with every attack class pooled as positive and the
//! normal class as negative.

use std::collections::HashMap;
use std::sync::Mutex;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::classifier::{train_ova, SvmConfig, SvmError};
use crate::dataset::{Dataset, DatasetError};
use crate::evaluation::{pooled_confusion, ConfusionCounts, EvalError};
use crate::optimizer::{FeatureMask, Objective};
use crate::seed::derive_seed_bytes;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SelectionError {
    #[error("feature mask selects no features")]
    EmptyMask,
    #[error("mask has {mask} bits but the dataset has {features} features")]
    MaskLength { mask: usize, features: usize },
    #[error("error rate undefined for an empty confusion table")]
    EmptyConfusion,
    #[error(transparent)]
    Dataset(#[from] DatasetError),
    #[error(transparent)]
    Svm(#[from] SvmError),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitnessBreakdown {
    pub r_tp: f64,
    pub r_e: f64,
    pub n_f: usize,
    pub total_features: usize,
    pub fitness: f64,
    /// Set when the validation rows held no positives, so `r_tp` was taken as 0.
    pub degenerate_tp: bool,
}

/// `r_tp + (1 − r_e) + (1 − n_f/total_features)`.
pub fn fitness_value(r_tp: f64, r_e: f64, n_f: usize, total_features: usize) -> f64 {
    r_tp + (1.0 - r_e) + (1.0 - n_f as f64 / total_features as f64)
}

impl FitnessBreakdown {
    pub fn new(r_tp: f64, r_e: f64, n_f: usize, total_features: usize) -> Self {
        Self {
            r_tp,
            r_e,
            n_f,
            total_features,
            fitness: fitness_value(r_tp, r_e, n_f, total_features),
            degenerate_tp: false,
        }
    }

    /// `mask,r_tp,r_e,n_f,fitness` trace line.
    pub fn trace_line(&self, mask: &FeatureMask) -> String {
        format!(
            "{},{},{},{},{}",
            mask.to_bitstring(),
            self.r_tp,
            self.r_e,
            self.n_f,
            self.fitness
        )
    }
}

/// Keeps the masked columns, in original order.
pub fn project_features(dataset: &Dataset, mask: &FeatureMask) -> Result<Dataset, SelectionError> {
    if mask.len() != dataset.n_features() {
        return Err(SelectionError::MaskLength {
            mask: mask.len(),
            features: dataset.n_features(),
        });
    }
    if !mask.has_any() {
        return Err(SelectionError::EmptyMask);
    }
    Ok(dataset.select_columns(mask.bits())?)
}

/// TP/(TP+FN), with `(0, true)` when there are no positives.
pub fn rate_tp(c: &ConfusionCounts) -> (f64, bool) {
    match c.tpr_checked() {
        Some(v) => (v, false),
        None => (0.0, true),
    }
}

/// (FP+FN)/total.
pub fn error_rate(c: &ConfusionCounts) -> Result<f64, SelectionError> {
    if c.total() == 0 {
        return Err(SelectionError::EmptyConfusion);
    }
    Ok((c.fp + c.fn_) as f64 / c.total() as f64)
}

/// Fitness from already computed validation predictions.
pub fn fitness_from_predictions(
    mask: &FeatureMask,
    truth: &[usize],
    predicted: &[usize],
    negative_class: usize,
) -> Result<FitnessBreakdown, SelectionError> {
    if !mask.has_any() {
        return Err(SelectionError::EmptyMask);
    }
    let confusion = pooled_confusion(truth, predicted, negative_class)?;
    let (r_tp, degenerate_tp) = rate_tp(&confusion);
    let r_e = error_rate(&confusion)?;
    let mut out = FitnessBreakdown::new(r_tp, r_e, mask.popcount(), mask.len());
    out.degenerate_tp = degenerate_tp;
    Ok(out)
}

/// Trains a one-vs-all SVM on the masked training rows and scores the masked
/// validation rows. The SVM seed is derived from `run_seed` and the mask, so
/// the result depends only on the inputs.
pub fn fitness(
    mask: &FeatureMask,
    train: &Dataset,
    validation: &Dataset,
    svm: &SvmConfig,
    run_seed: u64,
    negative_class: usize,
) -> Result<FitnessBreakdown, SelectionError> {
    let train_p = project_features(train, mask)?;
    let valid_p = project_features(validation, mask)?;
    let cfg = SvmConfig {
        seed: derive_seed_bytes(run_seed, mask.to_bitstring().as_bytes()),
        ..svm.clone()
    };
    let model = train_ova(&train_p, &cfg)?;
    let predicted = model.predict_all(&valid_p)?;
    fitness_from_predictions(mask, valid_p.labels(), &predicted, negative_class)
}

/// [`fitness`] packaged as an optimizer objective, with a per-mask cache and
/// an optional evaluation trace.
pub struct WrapperObjective<'a> {
    train: &'a Dataset,
    validation: &'a Dataset,
    svm: SvmConfig,
    run_seed: u64,
    negative_class: usize,
    cache: Mutex<HashMap<FeatureMask, FitnessBreakdown>>,
    trace: Option<Mutex<Vec<String>>>,
}

impl<'a> WrapperObjective<'a> {
    pub fn new(
        train: &'a Dataset,
        validation: &'a Dataset,
        svm: SvmConfig,
        run_seed: u64,
        negative_class: usize,
    ) -> Self {
        Self {
            train,
            validation,
            svm,
            run_seed,
            negative_class,
            cache: Mutex::new(HashMap::new()),
            trace: None,
        }
    }

    pub fn with_trace(mut self) -> Self {
        self.trace = Some(Mutex::new(Vec::new()));
        self
    }

    pub fn breakdown(&self, mask: &FeatureMask) -> Result<FitnessBreakdown, SelectionError> {
        if let Some(hit) = self.cache.lock().expect("cache lock").get(mask) {
            return Ok(hit.clone());
        }
        let b = fitness(
            mask,
            self.train,
            self.validation,
            &self.svm,
            self.run_seed,
            self.negative_class,
        )?;
        if let Some(trace) = &self.trace {
            trace.lock().expect("trace lock").push(b.trace_line(mask));
        }
        self.cache
            .lock()
            .expect("cache lock")
            .insert(mask.clone(), b.clone());
        Ok(b)
    }

    /// Distinct masks evaluated so far.
    pub fn distinct_evaluations(&self) -> usize {
        self.cache.lock().expect("cache lock").len()
    }

    /// Trace lines sorted by mask, so the output is independent of thread timing.
    pub fn trace_lines(&self) -> Vec<String> {
        let mut lines = self
            .trace
            .as_ref()
            .map(|t| t.lock().expect("trace lock").clone())
            .unwrap_or_default();
        lines.sort();
        lines
    }
}

impl Objective for WrapperObjective<'_> {
    type Error = SelectionError;

    fn evaluate(&self, mask: &FeatureMask) -> Result<f64, SelectionError> {
        self.breakdown(mask).map(|b| b.fitness)
    }
}
