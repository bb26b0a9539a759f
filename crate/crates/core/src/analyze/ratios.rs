use serde::{Deserialize, Serialize};

use crate::dataset::FeedstockComposition;
use crate::{Error, Result};

/// Standard atomic weights, g/mol.
pub const ATOMIC_MASS_C: f64 = 12.011;
pub const ATOMIC_MASS_H: f64 = 1.008;
pub const ATOMIC_MASS_N: f64 = 14.007;
pub const ATOMIC_MASS_S: f64 = 32.06;
pub const ATOMIC_MASS_O: f64 = 15.999;

/// Molar ratios for a van Krevelen plot.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VanKrevelenPoint {
    pub o_c: f64,
    pub n_c: f64,
    /// `(H − 2O − 3N − 2S) / C` over moles.
    pub h_c_eff: f64,
}

pub fn molar_ratios(comp: &FeedstockComposition) -> Result<VanKrevelenPoint> {
    if !(comp.c > 0.0) {
        return Err(Error::ZeroCarbon);
    }
    let c = comp.c / ATOMIC_MASS_C;
    let h = comp.h / ATOMIC_MASS_H;
    let n = comp.n / ATOMIC_MASS_N;
    let s = comp.s / ATOMIC_MASS_S;
    let o = comp.o / ATOMIC_MASS_O;
    Ok(VanKrevelenPoint {
        o_c: o / c,
        n_c: n / c,
        h_c_eff: (h - 2.0 * o - 3.0 * n - 2.0 * s) / c,
    })
}
