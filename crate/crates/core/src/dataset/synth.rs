//! Synthetic co-pyrolysis data with a known yield surface.
//!
//! Inputs are drawn uniformly inside literature-observed ranges:
//!
//! | field | biomass | polymer |
//! |-------|---------|---------|
//! | C | 34.1–79.8 | 38.3–92.4 |
//! | H | 2.2–7.5 | 4.0–14.4 |
//! | N | 0–4.5 | 0–1.0 |
//! | S | 0–1.0 | 0–0.5 |
//! | O | 100 − (C+H+N+S) | max(0, 100 − (C+H+N+S)) |
//! | VM | 60–97 | 60.7–100 |
//! | ash | 0.07–15 | 0–5 |
//! | FC | max(0, 100 − VM − ash) | same |
//!
//! When C+H+N+S exceeds 100 the four are scaled to sum 100 (O = 0). The
//! proximate triple is rescaled to sum 100. Blending is U(0, 100) %,
//! temperature U(350, 1100) °C, heating rate U(5, 100) °C/min and reaction
//! time U(10, 120) min.
//!
//! Yields are a fixed function of the constructed feature vector `z`
//! (see [`crate::featurize::construct_features`]) through three projections:
//!
//! - `t = (z[32] − 725) / 375`, scaled temperature
//! - `b = (Σ_{j<5} z[j] − Σ_{j<5} z[8+j]) / 10⁴`, signed biomass dominance
//! - `p = z[9] / 1500`, blend-weighted polymer hydrogen
//!
//! ```text
//! oil    = 75 − 8 (t − t*)² − 20 (b + 0.5)² − 30 (p − 0.45)²
//! char   = (100 − oil) · (0.50 − 0.35 t)
//! syngas = 100 − oil − char
//! ```
//!
//! with `t* = (570 − 725) / 375`. Oil therefore peaks at exactly 75 % for a
//! 570 °C run with 25 % biomass (unit CHNSO sums) and 9 % polymer hydrogen;
//! see [`PLANTED`]. Heating rate and reaction time do not affect yields.
//! Since `t` and `b` lie in [−1, 1] and `p` in [0, 0.96], noise-free oil
//! stays above 6 and the char share of the remainder within [0.15, 0.85].
//! Noise of standard deviation `100 · noise_sd` yield points is added to each
//! yield, which is then clipped to [0, 100] and renormalised to sum 100.

use rand::Rng;
use rand_distr::{Distribution, Normal};

use super::{CoPyrolysisRecord, FeedstockComposition, OperatingConditions, ProductYields};
use crate::featurize::construct_features;
use crate::rng;

/// Location and height of the oil-yield maximum of the generator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SynthTruth {
    pub temperature: f64,
    pub blending_pct: f64,
    pub polymer_h: f64,
    pub oil: f64,
}

pub const PLANTED: SynthTruth = SynthTruth {
    temperature: 570.0,
    blending_pct: 25.0,
    polymer_h: 9.0,
    oil: 75.0,
};

/// Noise-free generator yields for a record (yields field ignored).
pub fn generator_yields(record: &CoPyrolysisRecord) -> ProductYields {
    let z = construct_features(record);
    let t = (z[32] - 725.0) / 375.0;
    let b = ((0..5).map(|j| z[j]).sum::<f64>() - (0..5).map(|j| z[8 + j]).sum::<f64>()) / 1e4;
    let p = z[9] / 1500.0;
    let t_star = (PLANTED.temperature - 725.0) / 375.0;
    let oil = PLANTED.oil
        - 8.0 * (t - t_star).powi(2)
        - 20.0 * (b + 0.5).powi(2)
        - 30.0 * (p - 0.45).powi(2);
    let char = (100.0 - oil) * (0.50 - 0.35 * t);
    let syngas = 100.0 - oil - char;
    ProductYields { oil, char, syngas }
}

fn ultimate(rng: &mut rng::Rng, c: (f64, f64), h: (f64, f64), n: (f64, f64), s: (f64, f64)) -> [f64; 5] {
    let mut v = [
        rng.random_range(c.0..=c.1),
        rng.random_range(h.0..=h.1),
        rng.random_range(n.0..=n.1),
        rng.random_range(s.0..=s.1),
        0.0,
    ];
    let partial: f64 = v[..4].iter().sum();
    if partial > 100.0 {
        for x in &mut v[..4] {
            *x *= 100.0 / partial;
        }
    } else {
        v[4] = 100.0 - partial;
    }
    v
}

fn proximate(rng: &mut rng::Rng, vm: (f64, f64), ash: (f64, f64)) -> [f64; 3] {
    let vm = rng.random_range(vm.0..=vm.1);
    let ash = rng.random_range(ash.0..=ash.1);
    let fc = (100.0 - vm - ash).max(0.0);
    let total = vm + fc + ash;
    [vm * 100.0 / total, fc * 100.0 / total, ash * 100.0 / total]
}

fn composition(u: [f64; 5], p: [f64; 3]) -> FeedstockComposition {
    FeedstockComposition::from_array([u[0], u[1], u[2], u[3], u[4], p[0], p[1], p[2]])
}

/// Draw `n` records. A pure function of its arguments.
pub fn synthesize_dataset(n: usize, seed: u64, noise_sd: f64) -> Vec<CoPyrolysisRecord> {
    let mut inputs_rng = rng::substream(seed, "synth.inputs");
    let mut noise_rng = rng::substream(seed, "synth.noise");
    let noise = Normal::new(0.0, 100.0 * noise_sd.max(0.0)).expect("finite sd");
    let width = n.to_string().len().max(4);
    (0..n)
        .map(|i| {
            let r = &mut inputs_rng;
            let biomass = composition(
                ultimate(r, (34.1, 79.8), (2.2, 7.5), (0.0, 4.5), (0.0, 1.0)),
                proximate(r, (60.0, 97.0), (0.07, 15.0)),
            );
            let polymer = composition(
                ultimate(r, (38.3, 92.4), (4.0, 14.4), (0.0, 1.0), (0.0, 0.5)),
                proximate(r, (60.7, 100.0), (0.0, 5.0)),
            );
            let conditions = OperatingConditions {
                blending_pct: r.random_range(0.0..=100.0),
                temperature: r.random_range(350.0..=1100.0),
                heating_rate: r.random_range(5.0..=100.0),
                reaction_time: r.random_range(10.0..=120.0),
            };
            let mut record = CoPyrolysisRecord {
                id: format!("synth-{:0width$}", i + 1),
                biomass,
                polymer,
                conditions,
                yields: None,
            };
            let mut y = generator_yields(&record);
            if noise_sd > 0.0 {
                let mut v = y.to_array();
                for x in &mut v {
                    *x = (*x + noise.sample(&mut noise_rng)).clamp(0.0, 100.0);
                }
                let total: f64 = v.iter().sum();
                if total > 0.0 {
                    for x in &mut v {
                        *x = (*x * 100.0 / total).min(100.0);
                    }
                }
                y = ProductYields::from_array(v);
            }
            record.yields = Some(y);
            record
        })
        .collect()
}
