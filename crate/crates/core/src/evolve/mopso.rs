//! Multi-objective PSO with an external Pareto archive.
//!
//! Each particle follows its personal best and a leader drawn from the
//! archive by a binary tournament on crowding distance (the less crowded
//! of two random members wins). After moving, a particle may be perturbed by
//! uniform resampling of one coordinate (turbulence), and is then repaired
//! onto the feasible set.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::pareto::dominates_unchecked;
use super::pso::{init_particle, step, velocity_caps};
use super::{ArchiveMember, ConstraintSpec, ParetoArchive, PsoConfig};
use crate::rng;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MopsoConfig {
    pub pso: PsoConfig,
    pub archive_capacity: usize,
    pub mutation_probability: f64,
}

impl Default for MopsoConfig {
    fn default() -> Self {
        MopsoConfig {
            pso: PsoConfig::default(),
            archive_capacity: 100,
            mutation_probability: 0.1,
        }
    }
}

impl MopsoConfig {
    pub fn validate(&self) -> Result<()> {
        self.pso.validate()?;
        if !(0.0..=1.0).contains(&self.mutation_probability) {
            return Err(Error::InvalidConfig(
                "mutation_probability must lie in [0, 1]".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MopsoResult {
    pub archive: ParetoArchive,
    pub evaluations: usize,
}

fn tournament(crowding: &[f64], rng: &mut rng::Rng) -> usize {
    let a = rng.random_range(0..crowding.len());
    let b = rng.random_range(0..crowding.len());
    if crowding[b] > crowding[a] {
        b
    } else {
        a
    }
}

/// Minimise a vector of `k ≥ 2` objectives over the constrained box.
pub fn mopso_minimize<F>(
    objectives: F,
    constraints: &ConstraintSpec,
    config: &MopsoConfig,
) -> Result<MopsoResult>
where
    F: Fn(&[f64]) -> Vec<f64> + Sync,
{
    constraints.validate()?;
    config.validate()?;
    let cfg = &config.pso;
    let bounds = &constraints.bounds;
    let mut rng = rng::substream(cfg.seed, "mopso");
    let vmax = velocity_caps(bounds, cfg.velocity_cap);

    let mut swarm: Vec<_> = (0..cfg.swarm_size)
        .map(|_| {
            let mut p = init_particle(bounds, &vmax, &mut rng);
            p.position = constraints.repair(&p.position);
            p.best_position.clone_from(&p.position);
            p
        })
        .collect();

    let evaluate = |positions: Vec<&[f64]>| -> Vec<Vec<f64>> {
        positions.par_iter().map(|x| objectives(x)).collect()
    };

    let mut values = evaluate(swarm.iter().map(|p| p.position.as_slice()).collect());
    let k = values[0].len();
    if k < 2 {
        return Err(Error::InvalidConfig(format!(
            "need at least two objectives, got {k}"
        )));
    }
    if config.archive_capacity < 2 * k {
        return Err(Error::InvalidConfig(format!(
            "archive capacity {} below 2 × {k} objectives",
            config.archive_capacity
        )));
    }
    let mut archive = ParetoArchive::new(config.archive_capacity);
    let mut best_values = values.clone();
    for (p, v) in swarm.iter().zip(&values) {
        archive.insert(ArchiveMember {
            position: p.position.clone(),
            objectives: v.clone(),
        });
    }
    let mut evaluations = cfg.swarm_size;

    for _ in 1..cfg.iterations {
        let crowding = archive.crowding();
        for p in swarm.iter_mut() {
            if archive.is_empty() {
                let own = p.best_position.clone();
                step(p, &own, bounds, &vmax, cfg, &mut rng);
            } else {
                let leader = archive.members[tournament(&crowding, &mut rng)].position.clone();
                step(p, &leader, bounds, &vmax, cfg, &mut rng);
            }
            if rng.random::<f64>() < config.mutation_probability {
                let i = rng.random_range(0..bounds.dim());
                p.position[i] = bounds.lo[i] + rng.random::<f64>() * bounds.width(i);
            }
            p.position = constraints.repair(&p.position);
        }
        values = evaluate(swarm.iter().map(|p| p.position.as_slice()).collect());
        evaluations += cfg.swarm_size;
        for (idx, p) in swarm.iter_mut().enumerate() {
            let v = &values[idx];
            archive.insert(ArchiveMember {
                position: p.position.clone(),
                objectives: v.clone(),
            });
            let coin: f64 = rng.random();
            let replace = if dominates_unchecked(v, &best_values[idx]) {
                true
            } else if dominates_unchecked(&best_values[idx], v) {
                false
            } else {
                coin < 0.5
            };
            if replace && v.iter().all(|x| x.is_finite()) {
                best_values[idx] = v.clone();
                p.best_position.clone_from(&p.position);
            }
        }
    }

    Ok(MopsoResult {
        archive,
        evaluations,
    })
}
