use serde::{Deserialize, Serialize};

use super::{chunked, EmpiricalMeasure};
use crate::bitreg::{encode, BitString};
use crate::error::{Error, Result};
use crate::series::{bridge_h, Params};

/// The occupation measure of `x ↦ H(ξ, x)` on a grid, with the `L²` norm
/// of its histogram density at two resolutions.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OccupationReport {
    /// Histogram over `[min, max]` of the grid values.
    pub measure: EmpiricalMeasure,
    pub l2_norm: f64,
    /// `L²` norm with twice as many bins.
    pub refined_l2_norm: f64,
    /// `refined_l2_norm / l2_norm`; close to 1 for a square-integrable density.
    pub stability_ratio: f64,
    pub min: f64,
    pub max: f64,
}

/// `H(ξ, j/grid)` for `j < grid`.
pub fn occupation_values(xi: &BitString, p: &Params, grid: u64) -> Result<Vec<f64>> {
    if grid < 2 {
        return Err(Error::Domain(format!("grid {grid} must be at least 2")));
    }
    let log2 = grid.trailing_zeros();
    let exact = grid.is_power_of_two() && log2 <= p.depth;
    let parts = chunked(grid, |range| {
        range
            .map(|j| {
                let x = if exact {
                    BitString::from_index(u128::from(j), log2)?
                } else {
                    encode(j as f64 / grid as f64, p.depth)?
                };
                Ok(bridge_h(xi, &x, p).value)
            })
            .collect::<Result<Vec<f64>>>()
    });
    let mut out = Vec::with_capacity(grid as usize);
    for part in parts {
        out.extend(part?);
    }
    Ok(out)
}

/// Occupation histogram with `bins` bins and its refinement diagnostic.
pub fn occupation_local_time(xi: &BitString, p: &Params, grid: u64, bins: usize) -> Result<OccupationReport> {
    let values = occupation_values(xi, p, grid)?;
    occupation_report(&values, bins)
}

/// Occupation histogram of precomputed grid values.
pub fn occupation_report(values: &[f64], bins: usize) -> Result<OccupationReport> {
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !(min < max) {
        return Err(Error::Domain("occupation values are constant".into()));
    }
    let n = values.len() as u64;
    let measure = EmpiricalMeasure::from_values(values, n, 0, min, max, bins)?;
    let refined = EmpiricalMeasure::from_values(values, n, 0, min, max, 2 * bins)?;
    let l2_norm = measure.density_l2();
    let refined_l2_norm = refined.density_l2();
    Ok(OccupationReport {
        measure,
        l2_norm,
        refined_l2_norm,
        stability_ratio: refined_l2_norm / l2_norm,
        min,
        max,
    })
}
