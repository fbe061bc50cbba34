use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::fmt_f64;

/// A histogram of sample mass over uniform bins.
///
/// Mass is `count / n_samples`; samples excluded by a restriction count in
/// `n_samples` but land in no bin, so the total mass can be below one.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalMeasure {
    pub bin_edges: Vec<f64>,
    pub mass: Vec<f64>,
    pub counts: Vec<u64>,
    pub n_samples: u64,
    pub seed: u64,
    /// Largest per-bin binomial standard error `sqrt(p(1−p)/n)`.
    pub stderr_bound: f64,
}

impl EmpiricalMeasure {
    /// Bins `values` uniformly over `[lo, hi]`. Values outside the interval
    /// by more than rounding are an error, never clipped.
    pub fn from_values(values: &[f64], n_samples: u64, seed: u64, lo: f64, hi: f64, bins: usize) -> Result<Self> {
        if bins == 0 {
            return Err(Error::Domain("need at least one bin".into()));
        }
        if n_samples == 0 || (values.len() as u64) > n_samples {
            return Err(Error::Domain(format!(
                "{} values cannot come from {n_samples} samples",
                values.len()
            )));
        }
        if !(lo < hi) {
            return Err(Error::Domain(format!("empty binning range [{lo}, {hi}]")));
        }
        let slop = 16.0 * f64::EPSILON * lo.abs().max(hi.abs());
        let width = (hi - lo) / bins as f64;
        let mut counts = vec![0u64; bins];
        for &v in values {
            if !(v >= lo - slop && v <= hi + slop) {
                return Err(Error::OutOfSupport { value: v, lo, hi });
            }
            let idx = (((v - lo) / width).floor().max(0.0) as usize).min(bins - 1);
            counts[idx] += 1;
        }
        Ok(Self::from_counts(counts, n_samples, seed, lo, hi))
    }

    /// Builds from per-bin counts over uniform bins on `[lo, hi]`.
    pub fn from_counts(counts: Vec<u64>, n_samples: u64, seed: u64, lo: f64, hi: f64) -> Self {
        let bins = counts.len();
        let width = (hi - lo) / bins as f64;
        let bin_edges = (0..=bins)
            .map(|i| if i == bins { hi } else { lo + width * i as f64 })
            .collect();
        let n = n_samples as f64;
        let mass: Vec<f64> = counts.iter().map(|&c| c as f64 / n).collect();
        let stderr_bound = mass
            .iter()
            .map(|&p| (p * (1.0 - p) / n).sqrt())
            .fold(0.0, f64::max);
        Self { bin_edges, mass, counts, n_samples, seed, stderr_bound }
    }

    pub fn bins(&self) -> usize {
        self.mass.len()
    }

    pub fn total_mass(&self) -> f64 {
        self.counts.iter().sum::<u64>() as f64 / self.n_samples as f64
    }

    /// `Σ f̂² Δx` for the histogram density `f̂ = mass / Δx`.
    pub fn density_l2(&self) -> f64 {
        self.mass
            .iter()
            .zip(self.bin_edges.windows(2))
            .map(|(&m, e)| m * m / (e[1] - e[0]))
            .sum()
    }

    /// Writes `bin_left,bin_right,mass` rows.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "bin_left,bin_right,mass")?;
        for (m, e) in self.mass.iter().zip(self.bin_edges.windows(2)) {
            writeln!(w, "{},{},{}", fmt_f64(e[0]), fmt_f64(e[1]), fmt_f64(*m))?;
        }
        Ok(())
    }
}
