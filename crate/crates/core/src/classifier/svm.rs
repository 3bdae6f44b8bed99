use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::SvmError;
use crate::seed::rng_from;

/// Separating hyperplane with decision value `w·x − b`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Hyperplane {
    pub w: Vec<f64>,
    pub b: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SvmConfig {
    /// Soft-margin trade-off; the regularizer weight is `1/(C·n)`.
    pub c: f64,
    pub epochs: usize,
    /// Initial step size. Step `t` is `eta0 / (1 + λ·eta0·t)`.
    pub eta0: f64,
    pub seed: u64,
}

impl Default for SvmConfig {
    fn default() -> Self {
        Self {
            c: 1.0,
            epochs: 20,
            eta0: 1.0,
            seed: 0,
        }
    }
}

impl SvmConfig {
    pub fn validate(&self) -> Result<(), SvmError> {
        if !(self.c > 0.0) || !self.c.is_finite() {
            return Err(SvmError::Config(format!("C = {} must be positive", self.c)));
        }
        if self.epochs < 1 {
            return Err(SvmError::Config("epochs must be at least 1".into()));
        }
        if !(self.eta0 > 0.0) || !self.eta0.is_finite() {
            return Err(SvmError::Config(format!(
                "eta0 = {} must be positive",
                self.eta0
            )));
        }
        Ok(())
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

impl Hyperplane {
    pub fn zeros(dim: usize) -> Self {
        Self {
            w: vec![0.0; dim],
            b: 0.0,
        }
    }

    pub fn dim(&self) -> usize {
        self.w.len()
    }

    /// `w·x − b`.
    pub fn decision(&self, x: &[f64]) -> Result<f64, SvmError> {
        if x.len() != self.w.len() {
            return Err(SvmError::DimensionMismatch {
                expected: self.w.len(),
                found: x.len(),
            });
        }
        Ok(self.decision_unchecked(x))
    }

    pub(crate) fn decision_unchecked(&self, x: &[f64]) -> f64 {
        dot(&self.w, x) - self.b
    }

    pub fn norm(&self) -> f64 {
        dot(&self.w, &self.w).sqrt()
    }

    /// Distance between the two supporting hyperplanes, `2/|w|`.
    pub fn margin(&self) -> Result<f64, SvmError> {
        let n = self.norm();
        if n == 0.0 {
            return Err(SvmError::ZeroNorm);
        }
        Ok(2.0 / n)
    }
}

/// Regularized hinge objective `λ/2·|w|² + mean(max(0, 1 − y(w·x − b)))`.
pub fn objective(plane: &Hyperplane, rows: &[&[f64]], targets: &[bool], lambda: f64) -> f64 {
    let hinge: f64 = rows
        .iter()
        .zip(targets)
        .map(|(x, &t)| {
            let y = if t { 1.0 } else { -1.0 };
            (1.0 - y * plane.decision_unchecked(x)).max(0.0)
        })
        .sum();
    0.5 * lambda * dot(&plane.w, &plane.w) + hinge / rows.len() as f64
}

/// Trace of one binary training run.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainTrace {
    /// Objective of the running iterate at the end of each epoch.
    pub epoch_objective: Vec<f64>,
    /// Objective of the returned (averaged) hyperplane.
    pub final_objective: f64,
}

/// Trains a soft-margin linear SVM by stochastic subgradient descent.
///
/// `targets[i]` is `true` for the +1 side. The returned plane averages the
/// iterates of the second half of training; the bias is not regularized.
pub fn train_binary(
    rows: &[&[f64]],
    targets: &[bool],
    config: &SvmConfig,
) -> Result<Hyperplane, SvmError> {
    train_binary_traced(rows, targets, config).map(|(p, _)| p)
}

pub fn train_binary_traced(
    rows: &[&[f64]],
    targets: &[bool],
    config: &SvmConfig,
) -> Result<(Hyperplane, TrainTrace), SvmError> {
    config.validate()?;
    if rows.len() != targets.len() {
        return Err(SvmError::DimensionMismatch {
            expected: rows.len(),
            found: targets.len(),
        });
    }
    if rows.is_empty() {
        return Err(SvmError::Empty);
    }
    let pos = targets.iter().filter(|&&t| t).count();
    if pos == 0 || pos == targets.len() {
        return Err(SvmError::SingleClass);
    }
    let dim = rows[0].len();
    if let Some(r) = rows.iter().find(|r| r.len() != dim) {
        return Err(SvmError::DimensionMismatch {
            expected: dim,
            found: r.len(),
        });
    }

    let n = rows.len();
    let lambda = 1.0 / (config.c * n as f64);
    let mut rng = rng_from(config.seed);
    let mut order: Vec<usize> = (0..n).collect();
    let mut plane = Hyperplane::zeros(dim);
    let mut avg = Hyperplane::zeros(dim);
    let mut averaged = 0usize;
    let average_from = config.epochs / 2;
    let mut step = 0u64;
    let mut epoch_objective = Vec::with_capacity(config.epochs);

    for epoch in 0..config.epochs {
        order.shuffle(&mut rng);
        for &i in &order {
            step += 1;
            let eta = config.eta0 / (1.0 + lambda * config.eta0 * step as f64);
            let y = if targets[i] { 1.0 } else { -1.0 };
            let x = rows[i];
            let violated = y * plane.decision_unchecked(x) < 1.0;
            let shrink = 1.0 - eta * lambda;
            for (wj, &xj) in plane.w.iter_mut().zip(x) {
                *wj *= shrink;
                if violated {
                    *wj += eta * y * xj;
                }
            }
            if violated {
                plane.b -= eta * y;
            }
            if epoch >= average_from {
                averaged += 1;
                let k = 1.0 / averaged as f64;
                for (a, &wj) in avg.w.iter_mut().zip(&plane.w) {
                    *a += (wj - *a) * k;
                }
                avg.b += (plane.b - avg.b) * k;
            }
        }
        epoch_objective.push(objective(&plane, rows, targets, lambda));
    }
    let final_objective = objective(&avg, rows, targets, lambda);
    Ok((
        avg,
        TrainTrace {
            epoch_objective,
            final_objective,
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn decision_is_affine() {
        let p = Hyperplane {
            w: vec![1.0, 0.0],
            b: 0.0,
        };
        assert_eq!(p.decision(&[3.0, 7.0]).unwrap(), 3.0);
        let q = Hyperplane {
            w: vec![2.0, 1.0],
            b: 1.0,
        };
        // x = (1, 0) sits on the +1 supporting plane
        assert_eq!(q.decision(&[1.0, 0.0]).unwrap(), 1.0);
        assert_eq!(Hyperplane::zeros(2).decision(&[4.0, -9.0]).unwrap(), 0.0);
        assert!(matches!(
            p.decision(&[1.0]),
            Err(SvmError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn margin_values() {
        let m = |w: Vec<f64>| Hyperplane { w, b: 0.0 }.margin();
        assert_eq!(m(vec![2.0, 0.0]).unwrap(), 1.0);
        assert_eq!(m(vec![1.0, 0.0]).unwrap(), 2.0);
        assert_relative_eq!(m(vec![3.0, 4.0]).unwrap(), 0.4);
        assert_eq!(m(vec![0.0, 0.0]), Err(SvmError::ZeroNorm));
    }

    #[test]
    fn single_class_rejected() {
        let rows: Vec<&[f64]> = vec![&[1.0], &[2.0]];
        assert_eq!(
            train_binary(&rows, &[true, true], &SvmConfig::default()),
            Err(SvmError::SingleClass)
        );
    }

    #[test]
    fn two_point_toy() {
        let a = [-1.0, 0.0];
        let b = [1.0, 0.0];
        let rows: Vec<&[f64]> = vec![&a, &b];
        let plane = train_binary(&rows, &[false, true], &SvmConfig::default()).unwrap();
        assert!((plane.margin().unwrap() - 2.0).abs() < 0.2, "{plane:?}");
        assert!(plane.b.abs() < 0.1);
        assert!(plane.w[1].abs() < 1e-12);

        let neg = train_binary(&rows, &[true, false], &SvmConfig::default()).unwrap();
        assert_eq!(neg.w, plane.w.iter().map(|v| -v).collect::<Vec<_>>());
        assert_eq!(neg.b, -plane.b);
    }

    #[test]
    fn objective_decreases() {
        let pts: Vec<[f64; 2]> = (0..40)
            .map(|i| {
                let t = i as f64 * 0.37;
                [
                    t.sin() * 2.0,
                    t.cos() * 2.0 + if i % 2 == 0 { 1.5 } else { -1.5 },
                ]
            })
            .collect();
        let rows: Vec<&[f64]> = pts.iter().map(|p| p.as_slice()).collect();
        let targets: Vec<bool> = (0..40).map(|i| i % 2 == 0).collect();
        let (_, trace) = train_binary_traced(&rows, &targets, &SvmConfig::default()).unwrap();
        assert!(trace.final_objective <= trace.epoch_objective[0]);
    }
}
