use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::svm::{train_binary, Hyperplane, SvmConfig};
use super::SvmError;
use crate::dataset::Dataset;
use crate::optimizer::FeatureMask;
use crate::seed::derive_seed;

pub const MODEL_FORMAT: &str = "goa-ids-svm-model/1";

/// One hyperplane per class; a class absent from the training data has no
/// plane and never wins the argmax.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SvmModel {
    pub format: String,
    pub classes: Vec<String>,
    /// Feature mask the model was trained under, over the full feature space.
    pub mask: FeatureMask,
    pub planes: Vec<Option<Hyperplane>>,
}

/// Index of the largest value, lowest index on ties.
pub fn argmax_first(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = i;
        }
    }
    best
}

/// Trains one binary SVM per class present in `data` (target class +1,
/// everything else −1). Planes train in parallel, each with its own seed
/// derived from the config seed and the class index.
pub fn train_ova(data: &Dataset, config: &SvmConfig) -> Result<SvmModel, SvmError> {
    config.validate()?;
    let counts = data.class_counts();
    let present = counts.iter().filter(|&&c| c > 0).count();
    if present < 2 {
        return Err(SvmError::TooFewClasses(present));
    }
    let rows: Vec<&[f64]> = data.rows().collect();
    let planes = (0..data.n_classes())
        .into_par_iter()
        .map(|class| {
            if counts[class] == 0 {
                return Ok(None);
            }
            let targets: Vec<bool> = data.labels().iter().map(|&l| l == class).collect();
            let cfg = SvmConfig {
                seed: derive_seed(config.seed, &format!("class-{class}")),
                ..config.clone()
            };
            train_binary(&rows, &targets, &cfg).map(Some)
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(SvmModel {
        format: MODEL_FORMAT.to_string(),
        classes: data.class_names().to_vec(),
        mask: FeatureMask::all(data.n_features()),
        planes,
    })
}

impl SvmModel {
    pub fn with_mask(mut self, mask: FeatureMask) -> Self {
        self.mask = mask;
        self
    }

    /// Input dimension expected by [`SvmModel::predict`].
    pub fn dim(&self) -> usize {
        self.planes
            .iter()
            .flatten()
            .map(Hyperplane::dim)
            .next()
            .unwrap_or(0)
    }

    /// Per-class decision values; absent classes score `-inf`.
    pub fn decisions(&self, x: &[f64]) -> Result<Vec<f64>, SvmError> {
        if x.len() != self.dim() {
            return Err(SvmError::DimensionMismatch {
                expected: self.dim(),
                found: x.len(),
            });
        }
        Ok(self
            .planes
            .iter()
            .map(|p| match p {
                Some(p) => p.decision_unchecked(x),
                None => f64::NEG_INFINITY,
            })
            .collect())
    }

    /// Class index with the highest decision value.
    pub fn predict(&self, x: &[f64]) -> Result<usize, SvmError> {
        Ok(argmax_first(&self.decisions(x)?))
    }

    /// Predicts a row from the full feature space, projecting it by the mask.
    pub fn predict_full(&self, x: &[f64]) -> Result<usize, SvmError> {
        if x.len() != self.mask.len() {
            return Err(SvmError::DimensionMismatch {
                expected: self.mask.len(),
                found: x.len(),
            });
        }
        let projected: Vec<f64> = self.mask.selected().into_iter().map(|i| x[i]).collect();
        self.predict(&projected)
    }

    pub fn predict_all(&self, data: &Dataset) -> Result<Vec<usize>, SvmError> {
        data.rows().map(|x| self.predict(x)).collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("model serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, SvmError> {
        let model: SvmModel =
            serde_json::from_str(text).map_err(|e| SvmError::Format(e.to_string()))?;
        if model.format != MODEL_FORMAT {
            return Err(SvmError::Format(format!(
                "unsupported model format {:?}",
                model.format
            )));
        }
        if model.planes.len() != model.classes.len() {
            return Err(SvmError::Format(
                "plane count differs from class count".into(),
            ));
        }
        let dim = model.dim();
        if model.planes.iter().flatten().any(|p| p.dim() != dim) || dim != model.mask.popcount() {
            return Err(SvmError::Format("inconsistent plane dimensions".into()));
        }
        Ok(model)
    }
}
