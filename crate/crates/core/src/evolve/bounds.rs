use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Absolute tolerance used to decide that a sum rule already holds.
pub const REPAIR_TOLERANCE: f64 = 1e-9;

/// Box constraints, one `(lo, hi)` pair per dimension.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl Bounds {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        let b = Bounds { lo, hi };
        b.validate()?;
        Ok(b)
    }

    pub fn uniform(dim: usize, lo: f64, hi: f64) -> Result<Self> {
        Bounds::new(vec![lo; dim], vec![hi; dim])
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn validate(&self) -> Result<()> {
        if self.lo.len() != self.hi.len() {
            return Err(Error::InvalidBounds(format!(
                "{} lower vs {} upper bounds",
                self.lo.len(),
                self.hi.len()
            )));
        }
        if self.lo.is_empty() {
            return Err(Error::InvalidBounds("zero-dimensional search space".into()));
        }
        for (i, (l, h)) in self.lo.iter().zip(&self.hi).enumerate() {
            if !(l.is_finite() && h.is_finite() && l <= h) {
                return Err(Error::InvalidBounds(format!("dimension {i}: [{l}, {h}]")));
            }
        }
        Ok(())
    }

    pub fn width(&self, i: usize) -> f64 {
        self.hi[i] - self.lo[i]
    }

    pub fn clamp(&self, x: &mut [f64]) {
        for (i, v) in x.iter_mut().enumerate() {
            *v = v.clamp(self.lo[i], self.hi[i]);
        }
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.iter()
            .enumerate()
            .all(|(i, v)| *v >= self.lo[i] && *v <= self.hi[i])
    }
}

/// Sum rules over groups of coordinates, enforced after clamping.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum RepairRule {
    /// Rescale the group so it sums to `target`.
    SumTo { indices: Vec<usize>, target: f64 },
    /// Rescale the group down when it sums above `max`.
    CapSum { indices: Vec<usize>, max: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstraintSpec {
    pub bounds: Bounds,
    pub rules: Vec<RepairRule>,
}

impl ConstraintSpec {
    pub fn new(bounds: Bounds, rules: Vec<RepairRule>) -> Result<Self> {
        let spec = ConstraintSpec { bounds, rules };
        spec.validate()?;
        Ok(spec)
    }

    pub fn unconstrained(bounds: Bounds) -> Self {
        ConstraintSpec {
            bounds,
            rules: Vec::new(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.bounds.validate()?;
        let mut seen = vec![false; self.bounds.dim()];
        for rule in &self.rules {
            let (indices, lo_needed, hi_needed) = match rule {
                RepairRule::SumTo { indices, target } => (indices, *target, Some(*target)),
                RepairRule::CapSum { indices, max } => (indices, *max, None),
            };
            for &i in indices {
                if i >= seen.len() || seen[i] {
                    return Err(Error::InvalidBounds(format!(
                        "repair rule index {i} out of range or shared between rules"
                    )));
                }
                seen[i] = true;
            }
            let lo: f64 = indices.iter().map(|&i| self.bounds.lo[i]).sum();
            let hi: f64 = indices.iter().map(|&i| self.bounds.hi[i]).sum();
            if lo > lo_needed + REPAIR_TOLERANCE {
                return Err(Error::InvalidBounds(format!(
                    "lower bounds of {indices:?} sum to {lo}, above {lo_needed}"
                )));
            }
            if let Some(t) = hi_needed {
                if hi < t - REPAIR_TOLERANCE {
                    return Err(Error::InvalidBounds(format!(
                        "upper bounds of {indices:?} sum to {hi}, below {t}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Clamp to the bounds, then apply every rule. Points that already
    /// satisfy everything are returned unchanged, so repair is idempotent.
    pub fn repair(&self, position: &[f64]) -> Vec<f64> {
        let mut x = position.to_vec();
        self.bounds.clamp(&mut x);
        for rule in &self.rules {
            match rule {
                RepairRule::SumTo { indices, target } => {
                    let sum: f64 = indices.iter().map(|&i| x[i]).sum();
                    if (sum - target).abs() > REPAIR_TOLERANCE {
                        self.rescale(&mut x, indices, *target);
                    }
                }
                RepairRule::CapSum { indices, max } => {
                    let sum: f64 = indices.iter().map(|&i| x[i]).sum();
                    if sum > max + REPAIR_TOLERANCE {
                        self.rescale(&mut x, indices, *max);
                    }
                }
            }
        }
        x
    }

    pub fn is_feasible(&self, x: &[f64]) -> bool {
        self.bounds.contains(x)
            && self.rules.iter().all(|rule| match rule {
                RepairRule::SumTo { indices, target } => {
                    (indices.iter().map(|&i| x[i]).sum::<f64>() - target).abs()
                        <= REPAIR_TOLERANCE
                }
                RepairRule::CapSum { indices, max } => {
                    indices.iter().map(|&i| x[i]).sum::<f64>() <= max + REPAIR_TOLERANCE
                }
            })
    }

    /// Find `s ≥ 0` with `Σ clamp(s·v_i, lo_i, hi_i) = target` and write the
    /// clamped values back. Plain proportional scaling when no bound binds.
    fn rescale(&self, x: &mut [f64], indices: &[usize], target: f64) {
        let mut v: Vec<f64> = indices.iter().map(|&i| x[i]).collect();
        if v.iter().all(|e| *e <= 0.0) {
            v.iter_mut().for_each(|e| *e = 1.0);
        }
        let lo: Vec<f64> = indices.iter().map(|&i| self.bounds.lo[i]).collect();
        let hi: Vec<f64> = indices.iter().map(|&i| self.bounds.hi[i]).collect();
        let total = |s: f64| -> f64 {
            v.iter()
                .zip(lo.iter().zip(&hi))
                .map(|(e, (l, h))| (s * e).clamp(*l, *h))
                .sum()
        };
        let sum: f64 = v.iter().sum();
        let proportional = target / sum;
        let fits = v
            .iter()
            .zip(lo.iter().zip(&hi))
            .all(|(e, (l, h))| {
                let s = e * proportional;
                s >= *l && s <= *h
            });
        let scale = if fits {
            proportional
        } else {
            let mut a = 0.0;
            let mut b = proportional.max(1.0);
            while total(b) < target && b < 1e12 {
                b *= 2.0;
            }
            for _ in 0..200 {
                let mid = 0.5 * (a + b);
                if total(mid) < target {
                    a = mid;
                } else {
                    b = mid;
                }
            }
            0.5 * (a + b)
        };
        let mut out: Vec<f64> = v
            .iter()
            .zip(lo.iter().zip(&hi))
            .map(|(e, (l, h))| (e * scale).clamp(*l, *h))
            .collect();
        if (out.iter().sum::<f64>() - target).abs() > REPAIR_TOLERANCE {
            // zero entries cannot grow by scaling; fall back to a uniform shift
            let shifted = |shift: f64| -> f64 {
                out.iter()
                    .zip(lo.iter().zip(&hi))
                    .map(|(e, (l, h))| (e + shift).clamp(*l, *h))
                    .sum()
            };
            let span: f64 = hi.iter().zip(&lo).map(|(h, l)| h - l).sum::<f64>() + target.abs();
            let (mut a, mut b) = (-span, span);
            for _ in 0..200 {
                let mid = 0.5 * (a + b);
                if shifted(mid) < target {
                    a = mid;
                } else {
                    b = mid;
                }
            }
            let shift = 0.5 * (a + b);
            for (k, e) in out.iter_mut().enumerate() {
                *e = (*e + shift).clamp(lo[k], hi[k]);
            }
        }
        for (k, &i) in indices.iter().enumerate() {
            x[i] = out[k];
        }
    }
}
