use std::collections::BTreeMap;
use std::sync::Mutex;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::metrics::{macro_report, MetricsReport, Rates, METRIC_NAMES};
use crate::classifier::{train_ova, SvmConfig, SvmError};
use crate::dataset::{
    apply_normalize, encode, fit_encoding, fit_normalize, k_fold_indices, map_label,
    stratified_split_indices, AttackClass, DatasetError, RawRecord,
};
use crate::optimizer::{self, FeatureMask, GoaConfig, RunError, StopReason};
use crate::seed::derive_seed;
use crate::selection::{project_features, SelectionError, WrapperObjective};

pub const CV_REPORT_FORMAT: &str = "goa-ids-cv-report/1";

pub const TNR_NOTE: &str = "tnr is computed as tn/(tn+fp), the complement of fpr, not tn/(tp+fn)";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvConfig {
    pub k: usize,
    pub goa: GoaConfig,
    /// Final per-fold classifier.
    pub svm: SvmConfig,
    /// Epochs for the classifier trained inside the fitness function.
    pub fitness_epochs: usize,
    /// Share of each training fold held out to score masks.
    pub validation_fraction: f64,
    pub seed: u64,
}

impl Default for CvConfig {
    fn default() -> Self {
        Self {
            k: 10,
            goa: GoaConfig::default(),
            svm: SvmConfig::default(),
            fitness_epochs: 5,
            validation_fraction: 0.2,
            seed: 0,
        }
    }
}

/// Pipeline stages that consume rows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Stage {
    Encoding,
    Normalization,
    FitnessTraining,
    FitnessValidation,
    FinalTraining,
    Testing,
}

/// Receives the original record indices each stage of each fold touches.
pub trait ProvenanceSink: Sync {
    fn record(&self, fold: usize, stage: Stage, rows: &[usize]);
}

/// In-memory [`ProvenanceSink`].
#[derive(Debug, Default)]
pub struct ProvenanceLog {
    entries: Mutex<Vec<(usize, Stage, Vec<usize>)>>,
}

impl ProvenanceLog {
    pub fn entries(&self) -> Vec<(usize, Stage, Vec<usize>)> {
        let mut e = self.entries.lock().expect("provenance lock").clone();
        e.sort();
        e
    }
}

impl ProvenanceSink for ProvenanceLog {
    fn record(&self, fold: usize, stage: Stage, rows: &[usize]) {
        self.entries
            .lock()
            .expect("provenance lock")
            .push((fold, stage, rows.to_vec()));
    }
}

#[derive(Debug, Error)]
pub enum CvError {
    #[error("invalid cross-validation configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Dataset(#[from] DatasetError),
    #[error(transparent)]
    Selection(#[from] SelectionError),
    #[error(transparent)]
    Svm(#[from] SvmError),
    #[error("fitness evaluation failed on mask {mask}: {source}")]
    Fitness {
        mask: FeatureMask,
        source: SelectionError,
    },
    #[error("fold {fold}: {source}")]
    Fold {
        fold: usize,
        #[source]
        source: Box<CvError>,
    },
}

impl From<RunError<SelectionError>> for CvError {
    fn from(e: RunError<SelectionError>) -> Self {
        match e {
            RunError::Config(m) => CvError::Config(m),
            RunError::Objective { mask, source } => CvError::Fitness { mask, source },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanStd {
    pub mean: f64,
    /// Sample standard deviation (zero for a single fold).
    pub std: f64,
}

impl MeanStd {
    pub fn of(values: &[f64]) -> Self {
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let std = if values.len() > 1 {
            (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
        } else {
            0.0
        };
        Self { mean, std }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldReport {
    pub fold: usize,
    pub train_rows: usize,
    pub test_rows: usize,
    pub mask: FeatureMask,
    pub popcount: usize,
    pub selected_fitness: f64,
    /// Fitness of the all-features mask on the same validation split.
    pub all_features_fitness: f64,
    pub goa_iterations: usize,
    pub goa_stop: StopReason,
    pub distinct_masks_evaluated: usize,
    pub metrics: MetricsReport,
    #[serde(skip)]
    pub wall_time_secs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvReport {
    pub format: String,
    pub k: usize,
    pub folds: Vec<FoldReport>,
    pub macro_summary: BTreeMap<String, MeanStd>,
    pub pooled_summary: BTreeMap<String, MeanStd>,
    pub warnings: Vec<String>,
    pub notes: Vec<String>,
    /// Free-form provenance added by callers (tool version, config digest).
    pub metadata: BTreeMap<String, String>,
}

impl CvReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn wall_times(&self) -> Vec<f64> {
        self.folds.iter().map(|f| f.wall_time_secs).collect()
    }
}

fn summarize(
    folds: &[FoldReport],
    pick: impl Fn(&FoldReport) -> Option<&Rates>,
) -> BTreeMap<String, MeanStd> {
    METRIC_NAMES
        .iter()
        .filter_map(|&m| {
            let vals: Vec<f64> = folds
                .iter()
                .filter_map(|f| pick(f).and_then(|r| r.get(m)))
                .collect();
            (!vals.is_empty()).then(|| (m.to_string(), MeanStd::of(&vals)))
        })
        .collect()
}

/// Stratified k-fold evaluation of the full pipeline.
///
/// Per fold: fit the encoding and normalization on the training rows only,
/// select features with the grasshopper swarm scored on an internal
/// validation split of those rows, train the final one-vs-all SVM on all
/// training rows under the selected mask, and evaluate on the held-out rows.
/// Folds run in parallel; the result does not depend on scheduling.
pub fn cross_validate(
    records: &[RawRecord],
    config: &CvConfig,
    provenance: Option<&dyn ProvenanceSink>,
) -> Result<CvReport, CvError> {
    if config.k < 2 {
        return Err(CvError::Config(format!(
            "k = {}; need at least 2",
            config.k
        )));
    }
    if !(0.0..1.0).contains(&config.validation_fraction) || config.validation_fraction == 0.0 {
        return Err(CvError::Config(format!(
            "validation fraction {} outside (0,1)",
            config.validation_fraction
        )));
    }
    if config.fitness_epochs == 0 {
        return Err(CvError::Config("fitness_epochs must be at least 1".into()));
    }
    config.goa.validate().map_err(CvError::Config)?;
    config.svm.validate()?;

    let labels: Vec<usize> = records
        .iter()
        .map(|r| map_label(&r.label).map(AttackClass::index))
        .collect::<Result<_, _>>()?;
    let kf = k_fold_indices(
        &labels,
        AttackClass::ALL.len(),
        config.k,
        derive_seed(config.seed, "folds"),
    )?;

    let folds: Vec<FoldReport> = kf
        .folds
        .par_iter()
        .enumerate()
        .map(|(i, fold)| {
            run_fold(i, &fold.train, &fold.test, records, config, provenance).map_err(|e| {
                CvError::Fold {
                    fold: i,
                    source: Box::new(e),
                }
            })
        })
        .collect::<Result<_, _>>()?;

    Ok(CvReport {
        format: CV_REPORT_FORMAT.to_string(),
        k: config.k,
        macro_summary: summarize(&folds, |f| Some(&f.metrics.macro_avg)),
        pooled_summary: summarize(&folds, |f| f.metrics.pooled.as_ref().map(|p| &p.rates)),
        folds,
        warnings: kf.warnings,
        notes: vec![TNR_NOTE.to_string()],
        metadata: BTreeMap::new(),
    })
}

fn run_fold(
    fold: usize,
    train_idx: &[usize],
    test_idx: &[usize],
    records: &[RawRecord],
    config: &CvConfig,
    provenance: Option<&dyn ProvenanceSink>,
) -> Result<FoldReport, CvError> {
    let started = Instant::now();
    let note = |stage: Stage, rows: &[usize]| {
        if let Some(p) = provenance {
            p.record(fold, stage, rows);
        }
    };
    let fold_seed = derive_seed(config.seed, &format!("fold-{fold}"));
    let normal = AttackClass::Normal.index();

    let train_records: Vec<RawRecord> = train_idx.iter().map(|&i| records[i].clone()).collect();
    let test_records: Vec<RawRecord> = test_idx.iter().map(|&i| records[i].clone()).collect();

    let mut table = fit_encoding(&train_records)?;
    table.set_fitted_on(format!("fold {fold} training rows"));
    note(Stage::Encoding, train_idx);
    let train_raw = encode(&train_records, &table)?;
    let test_raw = encode(&test_records, &table)?;

    let stats = fit_normalize(&train_raw);
    note(Stage::Normalization, train_idx);
    let train = apply_normalize(&train_raw, &stats)?;
    let test = apply_normalize(&test_raw, &stats)?;

    let (fit_local, valid_local) = stratified_split_indices(
        train.labels(),
        train.n_classes(),
        config.validation_fraction,
        derive_seed(fold_seed, "validation"),
    )?;
    let to_orig = |local: &[usize]| -> Vec<usize> { local.iter().map(|&j| train_idx[j]).collect() };
    note(Stage::FitnessTraining, &to_orig(&fit_local));
    note(Stage::FitnessValidation, &to_orig(&valid_local));
    let fit_train = train.select(&fit_local);
    let fit_valid = train.select(&valid_local);

    let fitness_svm = SvmConfig {
        epochs: config.fitness_epochs,
        ..config.svm.clone()
    };
    let objective = WrapperObjective::new(
        &fit_train,
        &fit_valid,
        fitness_svm,
        derive_seed(fold_seed, "fitness"),
        normal,
    );
    let goa = GoaConfig {
        seed: derive_seed(fold_seed, "goa"),
        dim: train.n_features(),
        ..config.goa.clone()
    };
    let outcome = optimizer::run(&objective, &goa)?;
    let all_features_fitness = objective
        .breakdown(&FeatureMask::all(train.n_features()))?
        .fitness;

    let mask = outcome.best_mask.clone();
    let train_p = project_features(&train, &mask)?;
    let test_p = project_features(&test, &mask)?;
    let final_svm = SvmConfig {
        seed: derive_seed(fold_seed, "final-svm"),
        ..config.svm.clone()
    };
    note(Stage::FinalTraining, train_idx);
    let model = train_ova(&train_p, &final_svm)?.with_mask(mask.clone());
    note(Stage::Testing, test_idx);
    let predicted = model.predict_all(&test_p)?;
    let metrics = macro_report(
        test_p.labels(),
        &predicted,
        test_p.class_names(),
        Some(normal),
    )
    .map_err(SelectionError::from)?;

    Ok(FoldReport {
        fold,
        train_rows: train_idx.len(),
        test_rows: test_idx.len(),
        popcount: mask.popcount(),
        mask,
        selected_fitness: outcome.best_fitness,
        all_features_fitness,
        goa_iterations: outcome.history.len(),
        goa_stop: outcome.stop,
        distinct_masks_evaluated: objective.distinct_evaluations(),
        metrics,
        wall_time_secs: started.elapsed().as_secs_f64(),
    })
}
