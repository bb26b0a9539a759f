//! Particle swarm optimisation, single- and multi-objective.

mod bounds;
mod copyrolysis;
mod mopso;
mod pareto;
mod pso;

pub use bounds::{Bounds, ConstraintSpec, RepairRule, REPAIR_TOLERANCE};
pub use copyrolysis::{
    default_constraints, optimize_copyrolysis, CopyrolysisReport, ParetoSolution,
};
pub use mopso::{mopso_minimize, MopsoConfig, MopsoResult};
pub use pareto::{crowding_distance, dominates, hypervolume_2d, ArchiveMember, ParetoArchive};
pub use pso::{pso_minimize, PsoConfig, PsoResult};
