//! Two-phase intrusion detection over NSL-KDD style connection records.
//!
//! Phase one selects a feature subset with a binary Grasshopper Optimization
//! Algorithm wrapped around a linear SVM; phase two classifies with a
//! one-vs-all linear SVM restricted to the selected features.
//!
//! Module map:
//!
//! * [`dataset`]: parsing, categorical encoding, min-max normalization, label
//!   mapping, stratified subsampling and k-fold splitting.
//! * [`optimizer`]: the grasshopper swarm with its binary adapter.
//! * [`classifier`]: soft-margin linear SVM trained by stochastic subgradient
//!   descent and the one-vs-all reduction.
//! * [`selection`]: the wrapper fitness tying the two together.
//! * [`evaluation`]: confusion accounting, rates and cross-validation.

pub mod classifier;
pub mod dataset;
pub mod evaluation;
pub mod optimizer;
pub mod seed;
pub mod selection;
pub mod synthetic;

pub use classifier::{Hyperplane, SvmConfig, SvmError, SvmModel};
pub use dataset::{AttackClass, Dataset, DatasetError, EncodingTable, NormStats, RawRecord};
pub use evaluation::{ConfusionCounts, CvConfig, CvReport, MetricsReport};
pub use optimizer::{FeatureMask, GoaConfig, RunOutcome};
pub use selection::FitnessBreakdown;

/// Number of features in an NSL-KDD connection record.
pub const NUM_FEATURES: usize = 41;
