use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Pareto dominance for minimisation: `a` is no worse everywhere and
/// strictly better somewhere.
pub fn dominates(a: &[f64], b: &[f64]) -> Result<bool> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            expected: a.len(),
            got: b.len(),
        });
    }
    Ok(dominates_unchecked(a, b))
}

pub(crate) fn dominates_unchecked(a: &[f64], b: &[f64]) -> bool {
    let mut strictly = false;
    for (x, y) in a.iter().zip(b) {
        if x > y {
            return false;
        }
        if x < y {
            strictly = true;
        }
    }
    strictly
}

/// Crowding distance of each objective vector. Per objective, the extreme
/// members get +∞ and interior members accumulate the gap between their
/// neighbours divided by the objective's range.
pub fn crowding_distance(objectives: &[Vec<f64>]) -> Vec<f64> {
    let n = objectives.len();
    let mut distance = vec![0.0; n];
    if n <= 2 {
        return vec![f64::INFINITY; n];
    }
    let k = objectives[0].len();
    for m in 0..k {
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| objectives[a][m].total_cmp(&objectives[b][m]).then(a.cmp(&b)));
        let lo = objectives[order[0]][m];
        let hi = objectives[order[n - 1]][m];
        distance[order[0]] = f64::INFINITY;
        distance[order[n - 1]] = f64::INFINITY;
        let range = hi - lo;
        if range <= 0.0 {
            continue;
        }
        for w in 1..n - 1 {
            let i = order[w];
            if distance[i].is_finite() {
                distance[i] += (objectives[order[w + 1]][m] - objectives[order[w - 1]][m]) / range;
            }
        }
    }
    distance
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArchiveMember {
    pub position: Vec<f64>,
    pub objectives: Vec<f64>,
}

/// Bounded set of mutually non-dominated solutions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParetoArchive {
    pub capacity: usize,
    pub members: Vec<ArchiveMember>,
}

impl ParetoArchive {
    pub fn new(capacity: usize) -> Self {
        ParetoArchive {
            capacity: capacity.max(1),
            members: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn objectives(&self) -> Vec<Vec<f64>> {
        self.members.iter().map(|m| m.objectives.clone()).collect()
    }

    pub fn crowding(&self) -> Vec<f64> {
        crowding_distance(&self.objectives())
    }

    /// Insert unless some member dominates or equals the candidate; drop the
    /// members it dominates; evict the most crowded interior member when over
    /// capacity. Returns whether the candidate entered.
    pub fn insert(&mut self, candidate: ArchiveMember) -> bool {
        if candidate.objectives.iter().any(|v| !v.is_finite()) {
            return false;
        }
        let c = candidate.objectives.clone();
        if self
            .members
            .iter()
            .any(|m| m.objectives == c || dominates_unchecked(&m.objectives, &c))
        {
            return false;
        }
        self.members
            .retain(|m| !dominates_unchecked(&c, &m.objectives));
        self.members.push(candidate);
        while self.members.len() > self.capacity {
            let crowding = self.crowding();
            let victim = crowding
                .iter()
                .enumerate()
                .filter(|(_, d)| d.is_finite())
                .min_by(|a, b| a.1.total_cmp(b.1))
                .map(|(i, _)| i);
            match victim {
                Some(i) => {
                    self.members.remove(i);
                }
                // every member is an extreme; capacity below 2k objectives
                None => {
                    self.members.pop();
                }
            }
        }
        self.members.iter().any(|m| m.objectives == c)
    }

    /// Every pair checked: no member dominates another.
    pub fn is_mutually_non_dominated(&self) -> bool {
        self.members.iter().enumerate().all(|(i, a)| {
            self.members
                .iter()
                .enumerate()
                .all(|(j, b)| i == j || !dominates_unchecked(&a.objectives, &b.objectives))
        })
    }
}

/// Area dominated by a two-objective point set and bounded by `reference`.
pub fn hypervolume_2d(points: &[Vec<f64>], reference: [f64; 2]) -> f64 {
    let mut pts: Vec<(f64, f64)> = points
        .iter()
        .filter(|p| p[0] < reference[0] && p[1] < reference[1])
        .map(|p| (p[0], p[1]))
        .collect();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    let mut area = 0.0;
    let mut ceiling = reference[1];
    for (x, y) in pts {
        if y < ceiling {
            area += (reference[0] - x) * (ceiling - y);
            ceiling = y;
        }
    }
    area
}
