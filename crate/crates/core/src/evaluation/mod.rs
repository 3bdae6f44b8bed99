//! Confusion accounting, rates, and cross-validation.
//!
//! Rates follow the usual one-vs-rest definitions. The true negative rate is
//! TN/(TN+FP), so that FPR + TNR = 1 whenever there are negatives.

mod cv;
mod metrics;

use thiserror::Error;

pub use cv::{
    cross_validate, CvConfig, CvError, CvReport, FoldReport, MeanStd, ProvenanceLog,
    ProvenanceSink, Stage, CV_REPORT_FORMAT, TNR_NOTE,
};
pub use metrics::{
    confusion_per_class, macro_report, pooled_confusion, ClassMetrics, ConfusionCounts,
    MetricsReport, PooledMetrics, Rates, METRIC_NAMES,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EvalError {
    #[error("truth has {0} entries but predictions have {1}")]
    LengthMismatch(usize, usize),
    #[error("no samples to evaluate")]
    Empty,
    #[error("class index {0} outside the class list")]
    UnknownClass(usize),
}
