use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::rng;
use crate::{Error, Result};

/// Disjoint test partitions covering `0..n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldPlan {
    pub n: usize,
    pub seed: u64,
    pub partitions: Vec<Vec<usize>>,
}

/// Seeded shuffle of `0..n`, then a contiguous split; the first `n mod k`
/// folds take one extra index.
pub fn make_folds(n: usize, k: usize, seed: u64) -> Result<FoldPlan> {
    if k < 2 || k > n {
        return Err(Error::InvalidK { k, n });
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng::substream(seed, "folds"));
    let (base, extra) = (n / k, n % k);
    let mut partitions = Vec::with_capacity(k);
    let mut start = 0;
    for f in 0..k {
        let size = base + usize::from(f < extra);
        partitions.push(order[start..start + size].to_vec());
        start += size;
    }
    Ok(FoldPlan {
        n,
        seed,
        partitions,
    })
}

impl FoldPlan {
    pub fn k(&self) -> usize {
        self.partitions.len()
    }

    pub fn test_indices(&self, fold: usize) -> &[usize] {
        &self.partitions[fold]
    }

    /// Every index outside `fold`, ascending.
    pub fn train_indices(&self, fold: usize) -> Vec<usize> {
        let mut held = vec![false; self.n];
        for &i in &self.partitions[fold] {
            held[i] = true;
        }
        (0..self.n).filter(|&i| !held[i]).collect()
    }

    /// Relabel indices through `map` (old index → new index).
    pub fn remap(&self, map: &[usize]) -> FoldPlan {
        FoldPlan {
            n: self.n,
            seed: self.seed,
            partitions: self
                .partitions
                .iter()
                .map(|p| p.iter().map(|&i| map[i]).collect())
                .collect(),
        }
    }

    /// Hex SHA-256 of the partitions.
    pub fn fingerprint(&self) -> String {
        let json = serde_json::to_vec(&self.partitions).expect("plan serialises");
        Sha256::digest(&json).iter().map(|b| format!("{b:02x}")).collect()
    }
}
