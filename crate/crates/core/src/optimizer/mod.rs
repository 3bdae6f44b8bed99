//! Grasshopper Optimization Algorithm with a binary adapter.
//!
//! Positions live in a box (the unit cube by default). Each iteration moves
//! every grasshopper with the social interaction rule, binarizes positions at
//! the box midpoint, optionally applies SWAP and Reversion mutations to the
//! masks, and evaluates the masks with a caller-supplied objective that is
//! maximized.

mod mask;
mod swarm;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use mask::{binarize, reversion_mutation, swap_mutation, FeatureMask};
pub use swarm::{
    move_positions, s_social, update_c, update_positions, Grasshopper, Swarm, MIN_PAIR_DISTANCE,
};

use crate::seed::rng_from;
use crate::NUM_FEATURES;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GoaConfig {
    pub population_size: usize,
    pub dim: usize,
    pub max_iterations: usize,
    /// Stop once two consecutive best-fitness values differ by less than this.
    /// Zero disables the rule.
    pub fitness_delta_stop: f64,
    pub c_max: f64,
    pub c_min: f64,
    /// Attraction intensity `f` of the social kernel.
    pub s_f: f64,
    /// Attractive length scale `l` of the social kernel.
    pub s_l: f64,
    pub swap_prob: f64,
    pub reversion_prob: f64,
    /// Per-dimension `(lb, ub)`; empty means the unit interval everywhere.
    pub bounds: Vec<(f64, f64)>,
    pub seed: u64,
}

impl Default for GoaConfig {
    fn default() -> Self {
        Self {
            population_size: 30,
            dim: NUM_FEATURES,
            max_iterations: 40,
            fitness_delta_stop: 0.001,
            c_max: 1.0,
            c_min: 1e-5,
            s_f: 0.5,
            s_l: 1.5,
            swap_prob: 0.1,
            reversion_prob: 0.1,
            bounds: Vec::new(),
            seed: 0,
        }
    }
}

impl GoaConfig {
    pub fn resolved_bounds(&self) -> Vec<(f64, f64)> {
        if self.bounds.is_empty() {
            vec![(0.0, 1.0); self.dim]
        } else {
            self.bounds.clone()
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.population_size < 2 {
            return Err(format!(
                "population_size = {}; need at least 2",
                self.population_size
            ));
        }
        if self.dim == 0 {
            return Err("dim must be positive".into());
        }
        if self.max_iterations < 1 {
            return Err("max_iterations must be at least 1".into());
        }
        if !(self.c_min < self.c_max) {
            return Err(format!(
                "c_min ({}) must be below c_max ({})",
                self.c_min, self.c_max
            ));
        }
        for (name, p) in [
            ("swap_prob", self.swap_prob),
            ("reversion_prob", self.reversion_prob),
        ] {
            if !(0.0..=1.0).contains(&p) {
                return Err(format!("{name} = {p} outside [0,1]"));
            }
        }
        if !(self.fitness_delta_stop >= 0.0) {
            return Err("fitness_delta_stop must be non-negative".into());
        }
        if !self.bounds.is_empty() {
            if self.bounds.len() != self.dim {
                return Err(format!(
                    "{} bounds for {} dimensions",
                    self.bounds.len(),
                    self.dim
                ));
            }
            if let Some(b) = self.bounds.iter().find(|(lb, ub)| !(lb < ub)) {
                return Err(format!("empty bound interval {b:?}"));
            }
        }
        Ok(())
    }
}

/// Fitness to maximize over feature masks.
///
/// Implementations must be pure functions of the mask (plus shared immutable
/// data); evaluations within one iteration run in parallel.
pub trait Objective: Sync {
    type Error: Send;

    fn evaluate(&self, mask: &FeatureMask) -> Result<f64, Self::Error>;
}

impl<F, E> Objective for F
where
    F: Fn(&FeatureMask) -> Result<f64, E> + Sync,
    E: Send,
{
    type Error = E;

    fn evaluate(&self, mask: &FeatureMask) -> Result<f64, E> {
        self(mask)
    }
}

#[derive(Debug, Error)]
pub enum RunError<E> {
    #[error("invalid optimizer configuration: {0}")]
    Config(String),
    #[error("objective failed on mask {mask}")]
    Objective { mask: FeatureMask, source: E },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub iteration: usize,
    pub c: f64,
    pub best_fitness: f64,
    pub best_popcount: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    MaxIterations,
    FitnessDelta,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunOutcome {
    pub best_mask: FeatureMask,
    pub best_fitness: f64,
    pub best_position: Vec<f64>,
    pub history: Vec<IterationRecord>,
    pub stop: StopReason,
    pub evaluations: usize,
}

impl RunOutcome {
    /// History as CSV with header `iteration,c,best_fitness,best_popcount`.
    pub fn history_csv(&self) -> String {
        let mut out = String::from("iteration,c,best_fitness,best_popcount\n");
        for r in &self.history {
            out.push_str(&format!(
                "{},{},{},{}\n",
                r.iteration, r.c, r.best_fitness, r.best_popcount
            ));
        }
        out
    }
}

fn evaluate_swarm<O: Objective>(
    swarm: &mut Swarm,
    objective: &O,
) -> Result<usize, RunError<O::Error>> {
    let results: Vec<Result<f64, O::Error>> = swarm
        .members
        .par_iter()
        .map(|g| objective.evaluate(&g.mask))
        .collect();
    let mut fitness = Vec::with_capacity(results.len());
    for (g, r) in swarm.members.iter().zip(results) {
        match r {
            Ok(f) => fitness.push(f),
            Err(source) => {
                return Err(RunError::Objective {
                    mask: g.mask.clone(),
                    source,
                })
            }
        }
    }
    swarm.absorb(&fitness);
    Ok(fitness.len())
}

fn delta_stop(history: &[f64], threshold: f64) -> bool {
    match history {
        [.., prev, last] => (last - prev).abs() < threshold,
        _ => false,
    }
}

/// Binary feature selection run.
///
/// Stops after `max_iterations` iterations or as soon as two consecutive
/// best-fitness values differ by less than `fitness_delta_stop`, whichever
/// comes first. The best solution is never lost, so the recorded history is
/// non-decreasing.
pub fn run<O: Objective>(
    objective: &O,
    config: &GoaConfig,
) -> Result<RunOutcome, RunError<O::Error>> {
    config.validate().map_err(RunError::Config)?;
    let bounds = config.resolved_bounds();
    let mut rng = rng_from(config.seed);
    let mut swarm = Swarm::init(config, &mut rng);
    let mut evaluations = evaluate_swarm(&mut swarm, objective)?;
    let mut history = Vec::with_capacity(config.max_iterations);
    let mut bests = Vec::with_capacity(config.max_iterations);
    let mut stop = StopReason::MaxIterations;

    for t in 1..=config.max_iterations {
        let c = update_c(t, config);
        update_positions(&mut swarm, c, config, &mut rng);
        for g in &mut swarm.members {
            let mut mutated = false;
            if rng.gen::<f64>() < config.swap_prob {
                g.mask = swap_mutation(&g.mask, &mut rng);
                mutated = true;
            }
            if rng.gen::<f64>() < config.reversion_prob {
                g.mask = reversion_mutation(&g.mask, &mut rng);
                g.mask.repair(&mut rng);
                mutated = true;
            }
            if mutated {
                g.mask.write_back(&mut g.position, &bounds);
            }
        }
        evaluations += evaluate_swarm(&mut swarm, objective)?;
        swarm.iteration = t;
        history.push(IterationRecord {
            iteration: t,
            c,
            best_fitness: swarm.best_fitness,
            best_popcount: swarm.best_mask.popcount(),
        });
        bests.push(swarm.best_fitness);
        if t < config.max_iterations && delta_stop(&bests, config.fitness_delta_stop) {
            stop = StopReason::FitnessDelta;
            break;
        }
    }

    Ok(RunOutcome {
        best_mask: swarm.best_mask,
        best_fitness: swarm.best_fitness,
        best_position: swarm.best_position,
        history,
        stop,
        evaluations,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContinuousOutcome {
    pub best_position: Vec<f64>,
    pub best_value: f64,
    /// Best value after initialization, then after every iteration.
    pub history: Vec<f64>,
}

/// Plain continuous GOA (no binarization, no mutations), maximizing `f`.
pub fn run_continuous<F>(f: F, config: &GoaConfig) -> Result<ContinuousOutcome, String>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    config.validate()?;
    let mut rng = rng_from(config.seed);
    let mut swarm = Swarm::init(config, &mut rng);
    let score = |s: &Swarm| -> Vec<f64> { s.members.par_iter().map(|g| f(&g.position)).collect() };
    let values = score(&swarm);
    swarm.absorb(&values);
    let mut history = vec![swarm.best_fitness];
    for t in 1..=config.max_iterations {
        let c = update_c(t, config);
        move_positions(&mut swarm, c, config);
        let values = score(&swarm);
        swarm.absorb(&values);
        history.push(swarm.best_fitness);
        if t < config.max_iterations && delta_stop(&history[1..], config.fitness_delta_stop) {
            break;
        }
    }
    Ok(ContinuousOutcome {
        best_position: swarm.best_position,
        best_value: swarm.best_fitness,
        history,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::convert::Infallible;

    fn popcount(mask: &FeatureMask) -> Result<f64, Infallible> {
        Ok(mask.popcount() as f64 / mask.len() as f64)
    }

    #[test]
    fn single_iteration_history() {
        let cfg = GoaConfig {
            max_iterations: 1,
            ..GoaConfig::default()
        };
        let out = run(&popcount, &cfg).unwrap();
        assert_eq!(out.history.len(), 1);
        assert_eq!(out.stop, StopReason::MaxIterations);
        assert_eq!(out.evaluations, 60);
    }

    #[test]
    fn delta_rule() {
        assert!(delta_stop(&[1.0, 1.0005], 0.001));
        assert!(!delta_stop(&[1.0, 1.002], 0.001));
        assert!(!delta_stop(&[1.0], 0.001));
        assert!(!delta_stop(&[1.0, 1.0], 0.0));
    }

    #[test]
    fn stops_on_small_improvement() {
        // Constant objective: the second iteration repeats the first best.
        let cfg = GoaConfig::default();
        let out = run(&|_: &FeatureMask| Ok::<_, Infallible>(1.0), &cfg).unwrap();
        assert_eq!(out.history.len(), 2);
        assert_eq!(out.stop, StopReason::FitnessDelta);
    }

    #[test]
    fn objective_error_carries_mask() {
        let cfg = GoaConfig::default();
        let err = run(
            &|m: &FeatureMask| -> Result<f64, String> { Err(m.to_bitstring()) },
            &cfg,
        )
        .unwrap_err();
        match err {
            RunError::Objective { mask, source } => assert_eq!(mask.to_bitstring(), source),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn rejects_bad_config() {
        let cfg = GoaConfig {
            c_min: 2.0,
            ..GoaConfig::default()
        };
        assert!(matches!(run(&popcount, &cfg), Err(RunError::Config(_))));
        let cfg = GoaConfig {
            population_size: 1,
            ..GoaConfig::default()
        };
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn history_csv_shape() {
        let cfg = GoaConfig {
            max_iterations: 3,
            fitness_delta_stop: 0.0,
            ..GoaConfig::default()
        };
        let out = run(&popcount, &cfg).unwrap();
        let csv = out.history_csv();
        assert_eq!(csv.lines().count(), 4);
        assert!(csv.starts_with("iteration,c,best_fitness,best_popcount\n1,"));
    }
}
