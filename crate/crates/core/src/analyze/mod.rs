//! Descriptive analytics: rank correlations, elemental ratios and response
//! surfaces.

mod contour;
mod ratios;
mod spearman;

pub use contour::{contour_grid, AxisSpec, ContourGrid};
pub use ratios::{molar_ratios, VanKrevelenPoint, ATOMIC_MASS_C, ATOMIC_MASS_H, ATOMIC_MASS_N, ATOMIC_MASS_O, ATOMIC_MASS_S};
pub use spearman::{average_ranks, correlation_matrix, pearson, spearman, CorrelationMatrix};
