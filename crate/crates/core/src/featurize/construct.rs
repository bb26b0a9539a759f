use crate::dataset::{CoPyrolysisRecord, COMPOSITION_FIELDS};
use crate::linalg::Matrix;

/// Width of the constructed feature vector: four blocks of eight
/// composition columns plus three operating columns.
pub const FEATURES: usize = 35;

/// Blend-weighted feature vector of one record.
///
/// With `a` the biomass percentage, `x` the biomass composition and `y` the
/// polymer composition (C, H, N, S, O, VM, FC, ash; mass %):
///
/// | columns | value |
/// |---------|-------|
/// | 0..8    | `a·x` |
/// | 8..16   | `(100−a)·y` |
/// | 16..24  | `(a·x)² · (100−a)·y` |
/// | 24..32  | `a·x · ((100−a)·y)²` |
/// | 32..35  | temperature, heating rate, reaction time |
///
/// At `a = 0` every block with an `a·x` factor vanishes, and at `a = 100`
/// every block with a `(100−a)·y` factor vanishes.
pub fn construct_features(record: &CoPyrolysisRecord) -> [f64; FEATURES] {
    let a = record.conditions.blending_pct;
    let x = record.biomass.to_array();
    let y = record.polymer.to_array();
    let mut z = [0.0; FEATURES];
    for j in 0..8 {
        let bx = a * x[j];
        let py = (100.0 - a) * y[j];
        z[j] = bx;
        z[8 + j] = py;
        z[16 + j] = bx * bx * py;
        z[24 + j] = bx * py * py;
    }
    z[32] = record.conditions.temperature;
    z[33] = record.conditions.heating_rate;
    z[34] = record.conditions.reaction_time;
    z
}

pub fn construct_matrix(records: &[CoPyrolysisRecord]) -> Matrix {
    let rows: Vec<[f64; FEATURES]> = records.iter().map(construct_features).collect();
    Matrix::from_fn(rows.len(), FEATURES, |i, j| rows[i][j])
}

pub fn feature_labels() -> Vec<String> {
    let mut labels = Vec::with_capacity(FEATURES);
    for block in ["lin_biomass", "lin_polymer", "cross_sq_biomass", "cross_sq_polymer"] {
        for f in COMPOSITION_FIELDS {
            labels.push(format!("{block}_{f}"));
        }
    }
    labels.extend(["temp_c", "heat_rate_c_min", "time_min"].map(String::from));
    labels
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{fixtures::record, FeedstockComposition};
    use proptest::prelude::*;

    #[test]
    fn labels_cover_all_columns() {
        let labels = feature_labels();
        assert_eq!(labels.len(), FEATURES);
        assert_eq!(labels[0], "lin_biomass_c");
        assert_eq!(labels[15], "lin_polymer_ash");
        assert_eq!(labels[16], "cross_sq_biomass_c");
        assert_eq!(labels[31], "cross_sq_polymer_ash");
        assert_eq!(labels[34], "time_min");
    }

    #[test]
    fn zero_blend_keeps_polymer_only() {
        let z = construct_features(&record("a", 0.0));
        assert!(z[..8].iter().chain(&z[16..32]).all(|v| *v == 0.0));
        assert!(z[8..16].iter().any(|v| *v != 0.0));
        assert_eq!(&z[32..], &[500.0, 10.0, 30.0]);
    }

    #[test]
    fn full_blend_keeps_biomass_only() {
        let z = construct_features(&record("a", 100.0));
        assert!(z[8..32].iter().all(|v| *v == 0.0));
        assert!(z[..8].iter().any(|v| *v != 0.0));
    }

    #[test]
    fn unit_composition_half_blend() {
        let mut r = record("a", 50.0);
        r.biomass = FeedstockComposition::from_array([1.0; 8]);
        r.polymer = FeedstockComposition::from_array([1.0; 8]);
        let z = construct_features(&r);
        for j in 0..8 {
            assert_eq!(
                (z[j], z[8 + j], z[16 + j], z[24 + j]),
                (50.0, 50.0, 125000.0, 125000.0)
            );
        }
    }

    proptest! {
        #[test]
        fn borderline_blocks_vanish(
            x in prop::array::uniform8(0.0f64..100.0),
            y in prop::array::uniform8(0.0f64..100.0),
            full in any::<bool>(),
        ) {
            let mut r = record("p", if full { 100.0 } else { 0.0 });
            r.biomass = FeedstockComposition::from_array(x);
            r.polymer = FeedstockComposition::from_array(y);
            let z = construct_features(&r);
            let zero_block = if full { &z[8..16] } else { &z[0..8] };
            prop_assert!(zero_block.iter().all(|v| *v == 0.0));
            prop_assert!(z[16..32].iter().all(|v| *v == 0.0));
        }
    }
}
