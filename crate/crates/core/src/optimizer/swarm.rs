use rand::Rng;

use super::mask::{binarize, FeatureMask};
use super::GoaConfig;

/// Pairs closer than this are left out of the interaction sum.
pub const MIN_PAIR_DISTANCE: f64 = 1e-12;

/// Social interaction kernel `f·e^(−r/l) − e^(−r)`: repulsive at short range,
/// weakly attractive at long range.
pub fn s_social(r: f64, f: f64, l: f64) -> f64 {
    f * (-r / l).exp() - (-r).exp()
}

/// Linearly decaying coefficient: `c_max` at `t = 0`, `c_min` at `t = max_iterations`.
pub fn update_c(t: usize, config: &GoaConfig) -> f64 {
    // Interpolated form of c_max − t·(c_max − c_min)/tmax; exact at both ends.
    let frac = t as f64 / config.max_iterations as f64;
    config.c_max * (1.0 - frac) + config.c_min * frac
}

#[derive(Debug, Clone, PartialEq)]
pub struct Grasshopper {
    pub position: Vec<f64>,
    pub mask: FeatureMask,
    pub fitness: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Swarm {
    pub members: Vec<Grasshopper>,
    /// Position of the best solution found so far.
    pub best_position: Vec<f64>,
    pub best_mask: FeatureMask,
    /// `-inf` until the first evaluation.
    pub best_fitness: f64,
    pub iteration: usize,
    pub c: f64,
}

impl Swarm {
    /// Uniform random positions inside the bounds, binarized.
    pub fn init<R: Rng + ?Sized>(config: &GoaConfig, rng: &mut R) -> Swarm {
        let bounds = config.resolved_bounds();
        let members: Vec<Grasshopper> = (0..config.population_size)
            .map(|_| {
                let mut position: Vec<f64> = bounds
                    .iter()
                    .map(|&(lb, ub)| lb + (ub - lb) * rng.gen::<f64>())
                    .collect();
                let mask = binarize_synced(&mut position, &bounds, rng);
                Grasshopper {
                    position,
                    mask,
                    fitness: None,
                }
            })
            .collect();
        let best_position = members[0].position.clone();
        let best_mask = members[0].mask.clone();
        Swarm {
            members,
            best_position,
            best_mask,
            best_fitness: f64::NEG_INFINITY,
            iteration: 0,
            c: config.c_max,
        }
    }

    /// Records evaluated fitness values and updates the best solution.
    /// Only a strictly better value replaces the incumbent.
    pub fn absorb(&mut self, fitness: &[f64]) {
        for (g, &f) in self.members.iter_mut().zip(fitness) {
            g.fitness = Some(f);
            if f > self.best_fitness {
                self.best_fitness = f;
                self.best_position.clone_from(&g.position);
                self.best_mask.clone_from(&g.mask);
            }
        }
    }
}

/// Binarizes and, if the empty-mask repair fired, writes the repaired bit
/// back so the position and mask stay consistent.
pub(crate) fn binarize_synced<R: Rng + ?Sized>(
    position: &mut [f64],
    bounds: &[(f64, f64)],
    rng: &mut R,
) -> FeatureMask {
    let mask = binarize(position, bounds, rng);
    for (d, x) in position.iter_mut().enumerate() {
        let (lb, ub) = bounds[d];
        if mask.get(d) && *x < 0.5 * (lb + ub) {
            *x = ub;
        }
    }
    mask
}

/// Synchronous position update: every member moves according to the positions
/// of all others from the previous step, pulled toward the best solution, then
/// clamped to the bounds. Masks are not touched.
pub fn move_positions(swarm: &mut Swarm, c: f64, config: &GoaConfig) {
    let bounds = config.resolved_bounds();
    let old: Vec<Vec<f64>> = swarm.members.iter().map(|g| g.position.clone()).collect();
    let dim = bounds.len();
    for (i, g) in swarm.members.iter_mut().enumerate() {
        let xi = &old[i];
        let mut social = vec![0.0; dim];
        for (j, xj) in old.iter().enumerate() {
            if j == i {
                continue;
            }
            let dist = xi
                .iter()
                .zip(xj)
                .map(|(a, b)| (b - a) * (b - a))
                .sum::<f64>()
                .sqrt();
            if dist < MIN_PAIR_DISTANCE {
                continue;
            }
            for d in 0..dim {
                let (lb, ub) = bounds[d];
                let delta = xj[d] - xi[d];
                social[d] +=
                    c * 0.5 * (ub - lb) * s_social(delta.abs(), config.s_f, config.s_l) * delta
                        / dist;
            }
        }
        for d in 0..dim {
            let (lb, ub) = bounds[d];
            g.position[d] = (c * social[d] + swarm.best_position[d]).clamp(lb, ub);
        }
        g.fitness = None;
    }
    swarm.c = c;
}

/// [`move_positions`] followed by re-binarization of every member.
pub fn update_positions<R: Rng + ?Sized>(
    swarm: &mut Swarm,
    c: f64,
    config: &GoaConfig,
    rng: &mut R,
) {
    move_positions(swarm, c, config);
    let bounds = config.resolved_bounds();
    for g in &mut swarm.members {
        g.mask = binarize_synced(&mut g.position, &bounds, rng);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed::rng_from;
    use approx::assert_abs_diff_eq;

    #[test]
    fn social_kernel_values() {
        assert_eq!(s_social(0.0, 0.5, 1.5), -0.5);
        // 0.5·e^(−2/3) − e^(−1), evaluated independently
        assert_abs_diff_eq!(s_social(1.0, 0.5, 1.5), -0.111_170_7, epsilon = 1e-6);
        assert_abs_diff_eq!(s_social(800.0, 0.5, 1.5), 0.0, epsilon = 1e-200);
    }

    #[test]
    fn c_schedule() {
        let cfg = GoaConfig::default();
        assert_eq!(update_c(0, &cfg), cfg.c_max);
        assert_eq!(update_c(cfg.max_iterations, &cfg), cfg.c_min);
        assert_abs_diff_eq!(update_c(20, &cfg), 0.500005, epsilon = 1e-12);
        for t in 0..cfg.max_iterations {
            assert!(update_c(t + 1, &cfg) < update_c(t, &cfg));
        }
    }

    #[test]
    fn init_is_seeded_and_bounded() {
        let cfg = GoaConfig::default();
        let a = Swarm::init(&cfg, &mut rng_from(11));
        let b = Swarm::init(&cfg, &mut rng_from(11));
        assert_eq!(a, b);
        assert_eq!(a.members.len(), 30);
        for g in &a.members {
            assert_eq!(g.position.len(), 41);
            assert!(g.position.iter().all(|x| (0.0..=1.0).contains(x)));
            assert!(g.fitness.is_none());
        }
    }

    #[test]
    fn init_sets_about_half_the_bits() {
        let cfg = GoaConfig {
            population_size: 400,
            ..GoaConfig::default()
        };
        let swarm = Swarm::init(&cfg, &mut rng_from(3));
        let ones: usize = swarm.members.iter().map(|g| g.mask.popcount()).sum();
        let frac = ones as f64 / (400.0 * 41.0);
        // binomial sd ≈ 0.0039 at 16,400 draws
        assert!((frac - 0.5).abs() < 0.02, "{frac}");
    }

    #[test]
    fn collapsed_swarm_is_a_fixed_point() {
        let cfg = GoaConfig {
            population_size: 5,
            dim: 3,
            ..GoaConfig::default()
        };
        let mut rng = rng_from(1);
        let mut swarm = Swarm::init(&cfg, &mut rng);
        let p = vec![0.2, 0.7, 0.9];
        for g in &mut swarm.members {
            g.position = p.clone();
        }
        swarm.best_position = p.clone();
        update_positions(&mut swarm, 0.8, &cfg, &mut rng);
        for g in &swarm.members {
            assert_eq!(g.position, p);
        }
    }
}
