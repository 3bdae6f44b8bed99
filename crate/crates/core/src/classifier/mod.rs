//! Linear soft-margin SVM and the one-vs-all multiclass reduction.

mod ova;
mod svm;

use thiserror::Error;

pub use ova::{argmax_first, train_ova, SvmModel, MODEL_FORMAT};
pub use svm::{objective, train_binary, train_binary_traced, Hyperplane, SvmConfig, TrainTrace};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SvmError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("training data contains a single class")]
    SingleClass,
    #[error("training data is empty")]
    Empty,
    #[error("margin undefined for a zero weight vector")]
    ZeroNorm,
    #[error("need at least two classes present, found {0}")]
    TooFewClasses(usize),
    #[error("invalid SVM configuration: {0}")]
    Config(String),
    #[error("model artifact: {0}")]
    Format(String),
}
