//! Three-objective search over the 20 raw inputs: maximise oil while
//! minimising char and syngas, all predicted through a trained bundle.

use serde::{Deserialize, Serialize};

use super::{mopso_minimize, Bounds, ConstraintSpec, MopsoConfig, ParetoArchive, RepairRule};
use crate::models::TrainedBundle;
use crate::Result;

/// Objective vector used when a prediction fails.
const FAILED_PREDICTION: f64 = 1e6;

/// Composition rules on the raw input layout: each CHNSO group capped at 100,
/// each proximate triple summing to exactly 100.
pub fn default_constraints(bounds: Bounds) -> Result<ConstraintSpec> {
    ConstraintSpec::new(
        bounds,
        vec![
            RepairRule::CapSum {
                indices: (0..5).collect(),
                max: 100.0,
            },
            RepairRule::SumTo {
                indices: (5..8).collect(),
                target: 100.0,
            },
            RepairRule::CapSum {
                indices: (8..13).collect(),
                max: 100.0,
            },
            RepairRule::SumTo {
                indices: (13..16).collect(),
                target: 100.0,
            },
        ],
    )
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParetoSolution {
    pub inputs: Vec<f64>,
    /// Oil, char, syngas in percent.
    pub yields: [f64; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CopyrolysisReport {
    pub archive: ParetoArchive,
    /// Archive members in original units, highest oil first.
    pub solutions: Vec<ParetoSolution>,
    pub evaluations: usize,
}

impl CopyrolysisReport {
    pub fn best_oil(&self) -> Option<&ParetoSolution> {
        self.solutions.first()
    }
}

pub fn optimize_copyrolysis(
    bundle: &TrainedBundle,
    constraints: &ConstraintSpec,
    config: &MopsoConfig,
) -> Result<CopyrolysisReport> {
    bundle.check()?;
    bundle.predict_raw(&bundle.input_median)?;
    let objectives = |x: &[f64]| match bundle.predict_raw(x) {
        Ok([oil, char, syngas]) => vec![-oil, char, syngas],
        Err(_) => vec![FAILED_PREDICTION; 3],
    };
    let result = mopso_minimize(objectives, constraints, config)?;
    let mut solutions: Vec<ParetoSolution> = result
        .archive
        .members
        .iter()
        .map(|m| ParetoSolution {
            inputs: m.position.clone(),
            yields: [-m.objectives[0], m.objectives[1], m.objectives[2]],
        })
        .collect();
    solutions.sort_by(|a, b| b.yields[0].total_cmp(&a.yields[0]));
    Ok(CopyrolysisReport {
        archive: result.archive,
        solutions,
        evaluations: result.evaluations,
    })
}
