use serde::{Deserialize, Serialize};

use super::sampling::{
    chi_samples_in, chi_support, rho_samples_in, rho_support, Restriction, SampleSet, FAMILY_CHI,
    FAMILY_CHI_RESTRICTED, FAMILY_RHO, FAMILY_RHO_RESTRICTED,
};
use crate::error::{Error, Result};
use crate::series::Params;

/// Half-open interval `(a, b]`.
pub type Interval = (f64, f64);

/// Sixteen intervals tiling `(−L, L]`, refined geometrically towards 0.
pub fn standard_intervals(half_width: f64) -> Vec<Interval> {
    let scales = [1.0, 0.5, 0.25, 0.125, 0.0625, 0.03125, 1.0 / 64.0, 1.0 / 256.0];
    let mut points: Vec<f64> = scales.iter().map(|s| -s * half_width).collect();
    points.push(0.0);
    points.extend(scales.iter().rev().map(|s| s * half_width));
    points.windows(2).map(|w| (w[0], w[1])).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TelescopeRow {
    pub a: f64,
    pub b: f64,
    /// Mass of `(a, b]` under the full law.
    pub lhs: f64,
    /// `Σ_{m<terms} 2^{-m} · restricted mass of c^{-m}(a, b]`.
    pub rhs: f64,
    pub discrepancy: f64,
    pub se_lhs: f64,
    pub se_rhs: f64,
    /// `2^{-terms} + 3 sqrt(se_lhs² + se_rhs²)`.
    pub slack: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TelescopeReport {
    pub dilation: f64,
    pub terms: u32,
    pub n_samples: u64,
    pub restriction: Restriction,
    pub rows: Vec<TelescopeRow>,
}

impl TelescopeReport {
    pub fn all_pass(&self) -> bool {
        self.rows.iter().all(|r| r.passed)
    }

    /// Largest `discrepancy / slack` over the rows.
    pub fn worst_ratio(&self) -> f64 {
        self.rows.iter().map(|r| r.discrepancy / r.slack).fold(0.0, f64::max)
    }
}

/// Compares `full(A)` against `Σ_{m<terms} 2^{-m} restricted(c^{-m} A)`,
/// where the restricted sample was drawn independently of the full one.
pub fn telescope_check_with(
    full: &SampleSet,
    restricted: &SampleSet,
    dilation: f64,
    intervals: &[Interval],
    terms: u32,
    restriction: Restriction,
) -> Result<TelescopeReport> {
    if terms == 0 {
        return Err(Error::Domain("need at least one telescoping term".into()));
    }
    if full.n_total != restricted.n_total {
        return Err(Error::Domain("both sides must use the same number of draws".into()));
    }
    let n = full.n_total as f64;
    let rows = intervals
        .iter()
        .map(|&(a, b)| {
            let lhs = full.mass_in(a, b);
            let mut sum = 0.0;
            let mut sum_sq = 0.0;
            for &d in &restricted.values {
                let mut f = 0.0;
                let mut v = d;
                let mut w = 1.0;
                for _ in 0..terms {
                    if a < v && v <= b {
                        f += w;
                    }
                    v *= dilation;
                    w *= 0.5;
                }
                sum += f;
                sum_sq += f * f;
            }
            let rhs = sum / n;
            let var = (sum_sq / n - rhs * rhs).max(0.0);
            let se_lhs = full.stderr(lhs);
            let se_rhs = (var / n).sqrt();
            let slack = 0.5f64.powi(terms as i32) + 3.0 * (se_lhs * se_lhs + se_rhs * se_rhs).sqrt();
            let discrepancy = (lhs - rhs).abs();
            TelescopeRow { a, b, lhs, rhs, discrepancy, se_lhs, se_rhs, slack, passed: discrepancy <= slack }
        })
        .collect();
    Ok(TelescopeReport { dilation, terms, n_samples: full.n_total, restriction, rows })
}

/// `ρ(A) = Σ 2^{-m} ρ̂(κ^{-m} A)` with `ρ̂` restricted by `r`.
pub fn rho_telescope(
    p: &Params,
    intervals: &[Interval],
    n: u64,
    seed: u64,
    terms: u32,
    r: Restriction,
) -> Result<TelescopeReport> {
    let full = rho_samples_in(p, n, seed, FAMILY_RHO, Restriction::Full)?;
    let part = rho_samples_in(p, n, seed, FAMILY_RHO_RESTRICTED, r)?;
    telescope_check_with(&full, &part, p.kappa, intervals, terms, r)
}

/// `χ(A) = Σ 2^{-m} χ̂(γ^{-m} A)` with `χ̂` restricted by `r`.
pub fn chi_telescope(
    p: &Params,
    intervals: &[Interval],
    n: u64,
    seed: u64,
    terms: u32,
    r: Restriction,
) -> Result<TelescopeReport> {
    let full = chi_samples_in(p, n, seed, FAMILY_CHI, Restriction::Full)?;
    let part = chi_samples_in(p, n, seed, FAMILY_CHI_RESTRICTED, r)?;
    telescope_check_with(&full, &part, p.gamma, intervals, terms, r)
}

/// The `ρ` telescoping identity, restricting to pairs whose leading digits
/// differ. That set has mass 1/2, which makes the weights sum to one.
pub fn telescope_rho_check(p: &Params, intervals: &[Interval], n: u64, seed: u64, terms: u32) -> Result<TelescopeReport> {
    rho_telescope(p, intervals, n, seed, terms, Restriction::LeadingDigit)
}

/// The `χ` telescoping identity, restricted like [`telescope_rho_check`].
pub fn telescope_chi_check(p: &Params, intervals: &[Interval], n: u64, seed: u64, terms: u32) -> Result<TelescopeReport> {
    chi_telescope(p, intervals, n, seed, terms, Restriction::LeadingDigit)
}

/// Sixteen intervals over the support of `ρ`.
pub fn rho_intervals(p: &Params) -> Vec<Interval> {
    standard_intervals(rho_support(p))
}

/// Sixteen intervals over the support of `χ`.
pub fn chi_intervals(p: &Params) -> Vec<Interval> {
    standard_intervals(chi_support(p))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn intervals_tile_the_support() {
        let iv = standard_intervals(4.0);
        assert_eq!(iv.len(), 16);
        assert_eq!(iv[0].0, -4.0);
        assert_eq!(iv[15].1, 4.0);
        for w in iv.windows(2) {
            assert_eq!(w[0].1, w[1].0);
        }
    }
}
