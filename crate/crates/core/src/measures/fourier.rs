use std::f64::consts::PI;
use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use super::CHUNK;
use crate::error::{Error, Result};
use crate::series::fmt_f64;

/// `|φ(u)|²` of an empirical law on a symmetric grid, with its running
/// trapezoid integral from `−u_max`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CharFunctionTable {
    pub u_grid: Vec<f64>,
    pub phi_sq: Vec<f64>,
    pub cumulative: Vec<f64>,
    pub n_samples: u64,
}

/// The frequency `π·bins/range` resolved by a histogram of `bins` bins
/// over an interval of length `range`.
///
/// Samples spread over `range` have `|φ|²` band-limited to `[−range, range]`
/// in the dual variable, so a grid step of `π/range` samples it without
/// aliasing; `2·bins + 1` grid points then reach exactly this `u_max`.
pub fn nyquist_u_max(range: f64, bins: usize) -> f64 {
    PI * bins as f64 / range
}

/// Sums `Σ_s exp(i u_j s)` for `u_j = jΔ`, `j = 0..=h`, by rotating a phasor
/// per sample. Four samples advance together to hide multiply latency.
fn accumulate(samples: &[f64], step: f64, h: usize) -> (Vec<f64>, Vec<f64>) {
    let mut re = vec![0.0; h + 1];
    let mut im = vec![0.0; h + 1];
    for group in samples.chunks(4) {
        let mut zr = [0.0; 4];
        let mut zi = [0.0; 4];
        let mut wr = [1.0; 4];
        let mut wi = [0.0; 4];
        for (k, &s) in group.iter().enumerate() {
            zr[k] = 1.0;
            let (sin, cos) = (step * s).sin_cos();
            wr[k] = cos;
            wi[k] = sin;
        }
        for j in 0..=h {
            re[j] += (zr[0] + zr[1]) + (zr[2] + zr[3]);
            im[j] += (zi[0] + zi[1]) + (zi[2] + zi[3]);
            for k in 0..4 {
                let r = zr[k] * wr[k] - zi[k] * wi[k];
                zi[k] = zr[k] * wi[k] + zi[k] * wr[k];
                zr[k] = r;
            }
        }
    }
    (re, im)
}

/// Empirical `|φ(u)|² = |mean exp(iu·s)|²` on `2⌊grid_points/2⌋ + 1`
/// equally spaced points of `[−u_max, u_max]` (the grid always contains 0).
pub fn char_function(samples: &[f64], u_max: f64, grid_points: usize) -> Result<CharFunctionTable> {
    if samples.is_empty() {
        return Err(Error::Domain("characteristic function of an empty sample".into()));
    }
    if !(u_max > 0.0) || grid_points < 2 {
        return Err(Error::Domain(format!(
            "need u_max > 0 and at least 2 grid points, got {u_max}, {grid_points}"
        )));
    }
    let h = grid_points / 2;
    let step = u_max / h as f64;
    let chunk = CHUNK as usize;
    let chunks: Vec<&[f64]> = samples.chunks(chunk).collect();
    #[cfg(feature = "parallel")]
    let parts: Vec<(Vec<f64>, Vec<f64>)> = {
        use rayon::prelude::*;
        chunks.par_iter().map(|c| accumulate(c, step, h)).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let parts: Vec<(Vec<f64>, Vec<f64>)> = chunks.iter().map(|c| accumulate(c, step, h)).collect();
    let mut re = vec![0.0; h + 1];
    let mut im = vec![0.0; h + 1];
    for (pr, pi) in &parts {
        for j in 0..=h {
            re[j] += pr[j];
            im[j] += pi[j];
        }
    }
    let n = samples.len() as f64;
    let half: Vec<f64> = re
        .iter()
        .zip(&im)
        .map(|(r, i)| ((r / n).powi(2) + (i / n).powi(2)).min(1.0))
        .collect();
    let u_grid: Vec<f64> = (0..=2 * h).map(|j| (j as f64 - h as f64) * step).collect();
    let phi_sq: Vec<f64> = (0..=2 * h).map(|j| half[j.abs_diff(h)]).collect();
    let mut cumulative = Vec::with_capacity(phi_sq.len());
    let mut acc = 0.0;
    cumulative.push(0.0);
    for w in phi_sq.windows(2) {
        acc += 0.5 * (w[0] + w[1]) * step;
        cumulative.push(acc);
    }
    Ok(CharFunctionTable { u_grid, phi_sq, cumulative, n_samples: samples.len() as u64 })
}

impl CharFunctionTable {
    pub fn u_max(&self) -> f64 {
        *self.u_grid.last().expect("nonempty grid")
    }

    /// `∫_{−u_max}^{u_max} |φ|²`.
    pub fn total(&self) -> f64 {
        *self.cumulative.last().expect("nonempty grid")
    }

    /// Parseval estimate of `∫ f²` for the underlying density.
    pub fn l2_estimate(&self) -> f64 {
        self.total() / (2.0 * std::f64::consts::PI)
    }

    /// Cumulative integral at `u`, linear between grid points.
    fn cumulative_at(&self, u: f64) -> f64 {
        let g = &self.u_grid;
        if u <= g[0] {
            return 0.0;
        }
        if u >= self.u_max() {
            return self.total();
        }
        let k = g.partition_point(|&v| v <= u) - 1;
        let t = (u - g[k]) / (g[k + 1] - g[k]);
        self.cumulative[k] + t * (self.cumulative[k + 1] - self.cumulative[k])
    }

    /// Share of the total integral carried by `|u| ≥ u_from`.
    pub fn tail_fraction(&self, u_from: f64) -> f64 {
        let inner = self.cumulative_at(u_from) - self.cumulative_at(-u_from);
        (self.total() - inner) / self.total()
    }

    /// Share carried by the last decade `u_max/10 ≤ |u| ≤ u_max`.
    pub fn final_decade_fraction(&self) -> f64 {
        self.tail_fraction(self.u_max() / 10.0)
    }

    /// Writes `u,phi_sq,cumulative` rows.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "u,phi_sq,cumulative")?;
        for ((u, p), c) in self.u_grid.iter().zip(&self.phi_sq).zip(&self.cumulative) {
            writeln!(w, "{},{},{}", fmt_f64(*u), fmt_f64(*p), fmt_f64(*c))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn origin_is_exactly_one() {
        let t = char_function(&[0.3, -1.2, 2.5, 0.01, 0.7], 50.0, 101).unwrap();
        assert_eq!(t.phi_sq[50], 1.0);
        assert_eq!(t.u_grid[50], 0.0);
        assert!(t.phi_sq.iter().all(|&v| (0.0..=1.0).contains(&v)));
        assert!(t.cumulative.windows(2).all(|w| w[1] >= w[0]));
    }

    #[test]
    fn point_mass_has_unit_modulus() {
        let t = char_function(&[0.75; 9], 100.0, 201).unwrap();
        assert!(t.phi_sq.iter().all(|&v| (v - 1.0).abs() < 1e-12));
    }

    #[test]
    fn matches_direct_evaluation() {
        let s = [0.1, 0.4, -0.3, 0.9, 0.2, -0.8, 0.05];
        let t = char_function(&s, 30.0, 61).unwrap();
        for (u, p) in t.u_grid.iter().zip(&t.phi_sq) {
            let (mut re, mut im) = (0.0, 0.0);
            for v in s {
                re += (u * v).cos();
                im += (u * v).sin();
            }
            let direct = (re * re + im * im) / (s.len() * s.len()) as f64;
            assert!((p - direct).abs() < 1e-12);
        }
    }

    #[test]
    fn empty_sample_is_an_error() {
        assert!(char_function(&[], 1.0, 11).is_err());
    }
}
