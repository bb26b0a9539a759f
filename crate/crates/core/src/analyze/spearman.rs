use serde::{Deserialize, Serialize};

use crate::dataset::{require_training, CoPyrolysisRecord, Field};
use crate::{Error, Result};

/// 1-based ranks with ties sharing the mean of their positions.
pub fn average_ranks(x: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..x.len()).collect();
    order.sort_by(|&a, &b| x[a].total_cmp(&x[b]));
    let mut ranks = vec![0.0; x.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && x[order[end]] == x[order[start]] {
            end += 1;
        }
        // positions start+1 ..= end
        let rank = (start + 1 + end) as f64 / 2.0;
        for &i in &order[start..end] {
            ranks[i] = rank;
        }
        start = end;
    }
    ranks
}

pub fn pearson(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch(a.len(), b.len()));
    }
    if a.len() < 2 {
        return Err(Error::TooFewRows {
            needed: 2,
            got: a.len(),
        });
    }
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        sab += (x - ma) * (y - mb);
        saa += (x - ma) * (x - ma);
        sbb += (y - mb) * (y - mb);
    }
    if saa == 0.0 || sbb == 0.0 {
        return Err(Error::ConstantInput);
    }
    Ok((sab / (saa * sbb).sqrt()).clamp(-1.0, 1.0))
}

/// Pearson correlation of average ranks.
pub fn spearman(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch(x.len(), y.len()));
    }
    if x.len() < 2 {
        return Err(Error::TooFewRows {
            needed: 2,
            got: x.len(),
        });
    }
    if x.iter().all(|v| *v == x[0]) || y.iter().all(|v| *v == y[0]) {
        return Err(Error::ConstantInput);
    }
    pearson(&average_ranks(x), &average_ranks(y))
}

/// Spearman correlations over the raw inputs and yields. Entries involving
/// a constant column are `None`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationMatrix {
    pub labels: Vec<String>,
    pub values: Vec<Vec<Option<f64>>>,
}

impl CorrelationMatrix {
    pub fn get(&self, a: &str, b: &str) -> Option<f64> {
        let i = self.labels.iter().position(|l| l == a)?;
        let j = self.labels.iter().position(|l| l == b)?;
        self.values[i][j]
    }

    /// Labelled CSV; undefined entries are written as `NA`.
    pub fn to_csv(&self) -> String {
        let mut out = format!("variable,{}\n", self.labels.join(","));
        for (label, row) in self.labels.iter().zip(&self.values) {
            out.push_str(label);
            for v in row {
                out.push(',');
                match v {
                    Some(x) => out.push_str(&x.to_string()),
                    None => out.push_str("NA"),
                }
            }
            out.push('\n');
        }
        out
    }
}

pub fn correlation_matrix(records: &[CoPyrolysisRecord]) -> Result<CorrelationMatrix> {
    require_training(records)?;
    if records.len() < 3 {
        return Err(Error::TooFewRows {
            needed: 3,
            got: records.len(),
        });
    }
    let fields: Vec<Field> = Field::all().collect();
    let ranks: Vec<Option<Vec<f64>>> = fields
        .iter()
        .map(|f| {
            let col: Vec<f64> = records
                .iter()
                .map(|r| f.get(r).expect("yields checked"))
                .collect();
            (!col.iter().all(|v| *v == col[0])).then(|| average_ranks(&col))
        })
        .collect();
    let m = fields.len();
    let mut values = vec![vec![None; m]; m];
    for i in 0..m {
        for j in i..m {
            let v = match (&ranks[i], &ranks[j]) {
                (Some(_), Some(_)) if i == j => Some(1.0),
                (Some(a), Some(b)) => pearson(a, b).ok(),
                _ => None,
            };
            values[i][j] = v;
            values[j][i] = v;
        }
    }
    Ok(CorrelationMatrix {
        labels: fields.iter().map(|f| f.name().to_string()).collect(),
        values,
    })
}
