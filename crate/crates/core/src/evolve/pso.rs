use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::Bounds;
use crate::rng;
use crate::{Error, Result};

/// Global-best PSO settings. The defaults are the constriction-equivalent
/// values w = 0.729, c1 = c2 = 1.49445.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PsoConfig {
    pub swarm_size: usize,
    /// Number of swarm evaluations, the initial one included.
    pub iterations: usize,
    pub inertia: f64,
    pub cognitive: f64,
    pub social: f64,
    /// Velocity cap as a fraction of each dimension's width.
    pub velocity_cap: f64,
    pub seed: u64,
}

impl Default for PsoConfig {
    fn default() -> Self {
        PsoConfig {
            swarm_size: 30,
            iterations: 100,
            inertia: 0.729,
            cognitive: 1.49445,
            social: 1.49445,
            velocity_cap: 0.2,
            seed: 0,
        }
    }
}

impl PsoConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidConfig(m.to_string()));
        if self.swarm_size < 2 {
            return bad("swarm_size must be at least 2");
        }
        if self.iterations < 1 {
            return bad("iterations must be at least 1");
        }
        if !(0.0..=1.0).contains(&self.inertia) {
            return bad("inertia must lie in [0, 1]");
        }
        if !(self.cognitive > 0.0 && self.social > 0.0) {
            return bad("cognitive and social coefficients must be positive");
        }
        if !(self.velocity_cap > 0.0) {
            return bad("velocity_cap must be positive");
        }
        Ok(())
    }

    pub fn evaluations(&self) -> usize {
        self.swarm_size * self.iterations
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PsoResult {
    pub best_position: Vec<f64>,
    pub best_value: f64,
    /// Global best after each iteration; non-increasing.
    pub trace: Vec<f64>,
    pub evaluations: usize,
}

#[derive(Debug, Clone)]
pub(crate) struct Particle {
    pub position: Vec<f64>,
    pub velocity: Vec<f64>,
    pub best_position: Vec<f64>,
}

pub(crate) fn velocity_caps(bounds: &Bounds, fraction: f64) -> Vec<f64> {
    (0..bounds.dim()).map(|i| fraction * bounds.width(i)).collect()
}

pub(crate) fn init_particle(bounds: &Bounds, vmax: &[f64], rng: &mut rng::Rng) -> Particle {
    let position: Vec<f64> = (0..bounds.dim())
        .map(|i| bounds.lo[i] + rng.random::<f64>() * bounds.width(i))
        .collect();
    let velocity = vmax
        .iter()
        .map(|v| (2.0 * rng.random::<f64>() - 1.0) * v)
        .collect();
    Particle {
        best_position: position.clone(),
        position,
        velocity,
    }
}

/// One velocity/position step toward `guide`, clamping to the box and
/// zeroing the velocity component that hit a wall.
pub(crate) fn step(
    p: &mut Particle,
    guide: &[f64],
    bounds: &Bounds,
    vmax: &[f64],
    cfg: &PsoConfig,
    rng: &mut rng::Rng,
) {
    for i in 0..p.position.len() {
        let r1: f64 = rng.random();
        let r2: f64 = rng.random();
        let x = p.position[i];
        let mut v = cfg.inertia * p.velocity[i]
            + cfg.cognitive * r1 * (p.best_position[i] - x)
            + cfg.social * r2 * (guide[i] - x);
        v = v.clamp(-vmax[i], vmax[i]);
        let mut nx = x + v;
        if nx < bounds.lo[i] {
            nx = bounds.lo[i];
            v = 0.0;
        } else if nx > bounds.hi[i] {
            nx = bounds.hi[i];
            v = 0.0;
        }
        p.position[i] = nx;
        p.velocity[i] = v;
    }
}

fn sanitize(v: f64) -> f64 {
    if v.is_nan() {
        f64::INFINITY
    } else {
        v
    }
}

/// Minimise `objective` over the box. Evaluations within an iteration run
/// in parallel; updates are applied in particle order, so the result is a
/// pure function of the inputs and `config.seed`.
pub fn pso_minimize<F>(objective: F, bounds: &Bounds, config: &PsoConfig) -> Result<PsoResult>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    bounds.validate()?;
    config.validate()?;
    let mut rng = rng::substream(config.seed, "pso");
    let vmax = velocity_caps(bounds, config.velocity_cap);
    let mut swarm: Vec<Particle> = (0..config.swarm_size)
        .map(|_| init_particle(bounds, &vmax, &mut rng))
        .collect();

    let evaluate = |swarm: &[Particle]| -> Vec<f64> {
        swarm
            .par_iter()
            .map(|p| sanitize(objective(&p.position)))
            .collect()
    };

    let mut values = evaluate(&swarm);
    let mut best_values = values.clone();
    let mut g = argmin(&best_values);
    let mut best_position = swarm[g].position.clone();
    let mut best_value = best_values[g];
    let mut trace = vec![best_value];
    let mut evaluations = config.swarm_size;

    for _ in 1..config.iterations {
        for p in swarm.iter_mut() {
            step(p, &best_position, bounds, &vmax, config, &mut rng);
        }
        values = evaluate(&swarm);
        evaluations += config.swarm_size;
        for (k, p) in swarm.iter_mut().enumerate() {
            if values[k] < best_values[k] {
                best_values[k] = values[k];
                p.best_position.clone_from(&p.position);
            }
        }
        g = argmin(&best_values);
        if best_values[g] < best_value {
            best_value = best_values[g];
            best_position = swarm[g].best_position.clone();
        }
        trace.push(best_value);
    }

    Ok(PsoResult {
        best_position,
        best_value,
        trace,
        evaluations,
    })
}

fn argmin(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, v) in values.iter().enumerate() {
        if *v < values[best] {
            best = i;
        }
    }
    best
}
