//! Co-pyrolysis experiment records.
//!
//! A record holds the ultimate (CHNSO) and proximate (volatile matter, fixed
//! carbon, ash) analysis of one biomass and one polymer feedstock, the
//! operating conditions of the run, and optionally the measured product
//! yields. All quantities are mass percent or SI-ish process units (°C,
//! °C/min, min).
//!
//! The CSV layout carries 20 input columns (8 + 8 compositional, 4 operating).

mod csv_io;
mod summary;
mod synth;

pub use csv_io::{load_csv, load_csv_path, scan_csv, scan_csv_path, write_csv, CsvScan, CSV_HEADER};
pub use summary::{quantile, summarize, QuantileSummary};
pub use synth::{generator_yields, synthesize_dataset, SynthTruth, PLANTED};

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Number of raw input columns of a record.
pub const RAW_INPUTS: usize = 20;

pub const COMPOSITION_FIELDS: [&str; 8] = ["c", "h", "n", "s", "o", "vm", "fc", "ash"];

pub const RAW_INPUT_NAMES: [&str; RAW_INPUTS] = [
    "biomass_c",
    "biomass_h",
    "biomass_n",
    "biomass_s",
    "biomass_o",
    "biomass_vm",
    "biomass_fc",
    "biomass_ash",
    "polymer_c",
    "polymer_h",
    "polymer_n",
    "polymer_s",
    "polymer_o",
    "polymer_vm",
    "polymer_fc",
    "polymer_ash",
    "blend_pct",
    "temp_c",
    "heat_rate_c_min",
    "time_min",
];

pub const YIELD_NAMES: [&str; 3] = ["oil_yield", "char_yield", "syngas_yield"];

/// Ultimate plus proximate analysis of one feedstock, mass percent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeedstockComposition {
    pub c: f64,
    pub h: f64,
    pub n: f64,
    pub s: f64,
    pub o: f64,
    pub volatile_matter: f64,
    pub fixed_carbon: f64,
    pub ash: f64,
}

impl FeedstockComposition {
    /// Columns in CSV order: C, H, N, S, O, VM, FC, ash.
    pub fn to_array(&self) -> [f64; 8] {
        [
            self.c,
            self.h,
            self.n,
            self.s,
            self.o,
            self.volatile_matter,
            self.fixed_carbon,
            self.ash,
        ]
    }

    pub fn from_array(v: [f64; 8]) -> Self {
        FeedstockComposition {
            c: v[0],
            h: v[1],
            n: v[2],
            s: v[3],
            o: v[4],
            volatile_matter: v[5],
            fixed_carbon: v[6],
            ash: v[7],
        }
    }

    pub fn ultimate_sum(&self) -> f64 {
        self.c + self.h + self.n + self.s + self.o
    }

    pub fn proximate_sum(&self) -> f64 {
        self.volatile_matter + self.fixed_carbon + self.ash
    }

    /// Check the composition invariants. `prefix` names the feedstock in errors.
    pub fn validate(&self, row: usize, prefix: &str) -> Result<()> {
        for (name, value) in COMPOSITION_FIELDS.iter().zip(self.to_array()) {
            if !(0.0..=100.0).contains(&value) {
                return Err(Error::RangeViolation {
                    row,
                    field: format!("{prefix}_{name}"),
                    value,
                    reason: "must lie in [0, 100]".into(),
                });
            }
        }
        let ult = self.ultimate_sum();
        if !(ult > 0.0 && ult <= 105.0) {
            return Err(Error::RangeViolation {
                row,
                field: format!("{prefix}_chnso_sum"),
                value: ult,
                reason: "C+H+N+S+O must lie in (0, 105]".into(),
            });
        }
        let prox = self.proximate_sum();
        if !(90.0..=105.0).contains(&prox) {
            return Err(Error::RangeViolation {
                row,
                field: format!("{prefix}_proximate_sum"),
                value: prox,
                reason: "VM+FC+ash must lie in [90, 105]".into(),
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OperatingConditions {
    /// Percent of biomass in the blend.
    pub blending_pct: f64,
    /// °C
    pub temperature: f64,
    /// °C/min
    pub heating_rate: f64,
    /// min
    pub reaction_time: f64,
}

impl OperatingConditions {
    pub fn validate(&self, row: usize) -> Result<()> {
        if !(0.0..=100.0).contains(&self.blending_pct) {
            return Err(Error::RangeViolation {
                row,
                field: "blend_pct".into(),
                value: self.blending_pct,
                reason: "must lie in [0, 100]".into(),
            });
        }
        for (field, value) in [
            ("temp_c", self.temperature),
            ("heat_rate_c_min", self.heating_rate),
            ("time_min", self.reaction_time),
        ] {
            if !(value > 0.0 && value.is_finite()) {
                return Err(Error::RangeViolation {
                    row,
                    field: field.into(),
                    value,
                    reason: "must be positive".into(),
                });
            }
        }
        Ok(())
    }
}

/// Product yields, mass percent of feed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProductYields {
    pub oil: f64,
    pub char: f64,
    pub syngas: f64,
}

impl ProductYields {
    pub fn to_array(&self) -> [f64; 3] {
        [self.oil, self.char, self.syngas]
    }

    pub fn from_array(v: [f64; 3]) -> Self {
        ProductYields {
            oil: v[0],
            char: v[1],
            syngas: v[2],
        }
    }

    pub fn validate(&self, row: usize) -> Result<()> {
        for (field, value) in YIELD_NAMES.iter().zip(self.to_array()) {
            if !(0.0..=100.0).contains(&value) {
                return Err(Error::RangeViolation {
                    row,
                    field: (*field).into(),
                    value,
                    reason: "must lie in [0, 100]".into(),
                });
            }
        }
        let total = self.oil + self.char + self.syngas;
        if total > 105.0 {
            return Err(Error::RangeViolation {
                row,
                field: "yield_sum".into(),
                value: total,
                reason: "oil+char+syngas must not exceed 105".into(),
            });
        }
        Ok(())
    }
}

/// One experiment row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoPyrolysisRecord {
    pub id: String,
    pub biomass: FeedstockComposition,
    pub polymer: FeedstockComposition,
    pub conditions: OperatingConditions,
    pub yields: Option<ProductYields>,
}

impl CoPyrolysisRecord {
    /// The 20 raw inputs in CSV column order.
    pub fn raw_inputs(&self) -> [f64; RAW_INPUTS] {
        let mut out = [0.0; RAW_INPUTS];
        out[..8].copy_from_slice(&self.biomass.to_array());
        out[8..16].copy_from_slice(&self.polymer.to_array());
        out[16] = self.conditions.blending_pct;
        out[17] = self.conditions.temperature;
        out[18] = self.conditions.heating_rate;
        out[19] = self.conditions.reaction_time;
        out
    }

    /// Inverse of [`raw_inputs`](Self::raw_inputs); no validation.
    pub fn from_raw_inputs(id: impl Into<String>, v: &[f64]) -> Self {
        let mut b = [0.0; 8];
        let mut p = [0.0; 8];
        b.copy_from_slice(&v[..8]);
        p.copy_from_slice(&v[8..16]);
        CoPyrolysisRecord {
            id: id.into(),
            biomass: FeedstockComposition::from_array(b),
            polymer: FeedstockComposition::from_array(p),
            conditions: OperatingConditions {
                blending_pct: v[16],
                temperature: v[17],
                heating_rate: v[18],
                reaction_time: v[19],
            },
            yields: None,
        }
    }

    pub fn validate(&self, row: usize) -> Result<()> {
        self.biomass.validate(row, "biomass")?;
        self.polymer.validate(row, "polymer")?;
        self.conditions.validate(row)?;
        if let Some(y) = &self.yields {
            y.validate(row)?;
        }
        Ok(())
    }

    /// Yields, or an error naming the record when absent.
    pub fn require_yields(&self) -> Result<ProductYields> {
        self.yields.ok_or_else(|| Error::MissingYields(self.id.clone()))
    }
}

/// Reject record lists that cannot be used for training.
pub fn require_training(records: &[CoPyrolysisRecord]) -> Result<()> {
    if records.is_empty() {
        return Err(Error::EmptyDataset);
    }
    for r in records {
        r.require_yields()?;
    }
    Ok(())
}

/// Selects one numeric column of a record, for summaries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Field {
    Input(usize),
    Yield(usize),
}

impl Field {
    pub fn parse(name: &str) -> Option<Field> {
        if let Some(i) = RAW_INPUT_NAMES.iter().position(|n| *n == name) {
            return Some(Field::Input(i));
        }
        YIELD_NAMES.iter().position(|n| *n == name).map(Field::Yield)
    }

    pub fn name(&self) -> &'static str {
        match *self {
            Field::Input(i) => RAW_INPUT_NAMES[i],
            Field::Yield(i) => YIELD_NAMES[i],
        }
    }

    pub fn all() -> impl Iterator<Item = Field> {
        (0..RAW_INPUTS)
            .map(Field::Input)
            .chain((0..3).map(Field::Yield))
    }

    pub fn get(&self, record: &CoPyrolysisRecord) -> Option<f64> {
        match *self {
            Field::Input(i) => Some(record.raw_inputs()[i]),
            Field::Yield(i) => record.yields.map(|y| y.to_array()[i]),
        }
    }
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;

    pub fn record(id: &str, blend: f64) -> CoPyrolysisRecord {
        CoPyrolysisRecord {
            id: id.into(),
            biomass: FeedstockComposition {
                c: 48.0,
                h: 6.0,
                n: 0.5,
                s: 0.1,
                o: 45.4,
                volatile_matter: 78.0,
                fixed_carbon: 17.0,
                ash: 5.0,
            },
            polymer: FeedstockComposition {
                c: 85.6,
                h: 14.4,
                n: 0.0,
                s: 0.0,
                o: 0.0,
                volatile_matter: 99.5,
                fixed_carbon: 0.3,
                ash: 0.2,
            },
            conditions: OperatingConditions {
                blending_pct: blend,
                temperature: 500.0,
                heating_rate: 10.0,
                reaction_time: 30.0,
            },
            yields: Some(ProductYields {
                oil: 55.0,
                char: 20.0,
                syngas: 25.0,
            }),
        }
    }
}
