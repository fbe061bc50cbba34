use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{chunked, EmpiricalMeasure};
use crate::bitreg::{self, BitString};
use crate::error::{Error, Result};
use crate::series::{stable_s, takagi, Params};

/// Independent per-sample random streams derived from one seed.
///
/// The key is `(seed, family)`; sample `i` reads ChaCha stream `i` under
/// that key, so any subset of samples can be drawn in any order.
#[derive(Clone, Debug)]
pub struct SampleStreams {
    base: ChaCha8Rng,
}

impl SampleStreams {
    pub fn new(seed: u64, family: u64) -> Self {
        let mut key = [0u8; 32];
        key[..8].copy_from_slice(&seed.to_le_bytes());
        key[8..16].copy_from_slice(&family.to_le_bytes());
        Self { base: ChaCha8Rng::from_seed(key) }
    }

    pub fn rng(&self, index: u64) -> ChaCha8Rng {
        let mut r = self.base.clone();
        r.set_stream(index);
        r
    }
}

/// Uniform random expansion with `depth` digits.
pub fn random_bits<R: RngCore>(rng: &mut R, depth: u32) -> BitString {
    let hi = u128::from(rng.next_u64()) << 64;
    let word = if depth > 64 { hi | u128::from(rng.next_u64()) } else { hi };
    BitString::from_word(word, depth.min(bitreg::MAX_DEPTH)).expect("depth within capacity")
}

/// Which part of the source space contributes mass.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Restriction {
    /// Every sample.
    Full,
    /// Pairs more than 1/2 apart.
    Separated,
    /// Pairs whose leading digits differ.
    LeadingDigit,
}

impl Restriction {
    fn admits(self, a: &BitString, b: &BitString) -> bool {
        match self {
            Restriction::Full => true,
            Restriction::Separated => a.word().abs_diff(b.word()) > 1u128 << 127,
            Restriction::LeadingDigit => a.bit(1) != b.bit(1),
        }
    }
}

/// Values of the admitted samples, in sample order, out of `n_total` draws.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleSet {
    pub values: Vec<f64>,
    pub n_total: u64,
    pub seed: u64,
}

impl SampleSet {
    /// Fraction of all draws with value in `(a, b]`.
    pub fn mass_in(&self, a: f64, b: f64) -> f64 {
        self.values.iter().filter(|&&v| a < v && v <= b).count() as f64 / self.n_total as f64
    }

    /// Fraction of all draws with `|value| < b`.
    pub fn mass_within(&self, b: f64) -> f64 {
        self.values.iter().filter(|&&v| v.abs() < b).count() as f64 / self.n_total as f64
    }

    pub fn total_mass(&self) -> f64 {
        self.values.len() as f64 / self.n_total as f64
    }

    /// Binomial standard error of a mass estimate `m`.
    pub fn stderr(&self, m: f64) -> f64 {
        (m * (1.0 - m) / self.n_total as f64).sqrt()
    }

    pub fn histogram(&self, lo: f64, hi: f64, bins: usize) -> Result<EmpiricalMeasure> {
        EmpiricalMeasure::from_values(&self.values, self.n_total, self.seed, lo, hi, bins)
    }
}

pub(crate) const FAMILY_SBR: u64 = 1;
pub(crate) const FAMILY_RHO: u64 = 2;
pub(crate) const FAMILY_RHO_RESTRICTED: u64 = 3;
pub(crate) const FAMILY_CHI: u64 = 4;
pub(crate) const FAMILY_CHI_RESTRICTED: u64 = 5;

fn draw<F>(n: u64, seed: u64, family: u64, f: F) -> Result<SampleSet>
where
    F: Fn(&mut ChaCha8Rng) -> Option<f64> + Sync + Send,
{
    if n == 0 {
        return Err(Error::Domain("need at least one sample".into()));
    }
    let streams = SampleStreams::new(seed, family);
    let parts = chunked(n, |range| {
        range
            .filter_map(|i| f(&mut streams.rng(i)))
            .collect::<Vec<f64>>()
    });
    Ok(SampleSet { values: parts.concat(), n_total: n, seed })
}

/// Half-width `κ/(1−κ)` of the support of `S`.
pub fn sbr_support(p: &Params) -> f64 {
    p.s_max()
}

/// Half-width `2κ/(1−κ)` of the support of `ρ`.
pub fn rho_support(p: &Params) -> f64 {
    2.0 * p.s_max()
}

/// Half-width `1/(2(1−γ)) + κ/(1−κ)` of the support of `χ`.
pub fn chi_support(p: &Params) -> f64 {
    0.5 / (1.0 - p.gamma) + p.s_max()
}

/// `S(ξ)` for `n` uniform `ξ`.
pub fn sbr_samples(p: &Params, n: u64, seed: u64) -> Result<SampleSet> {
    draw(n, seed, FAMILY_SBR, |rng| Some(stable_s(&random_bits(rng, p.depth), p).value))
}

pub(crate) fn rho_samples_in(p: &Params, n: u64, seed: u64, family: u64, r: Restriction) -> Result<SampleSet> {
    draw(n, seed, family, |rng| {
        let xi = random_bits(rng, p.depth);
        let eta = random_bits(rng, p.depth);
        // x is drawn to mirror the three-coordinate definition; S ignores it.
        let _x = random_bits(rng, p.depth);
        r.admits(&xi, &eta)
            .then(|| stable_s(&xi, p).value - stable_s(&eta, p).value)
    })
}

pub(crate) fn chi_samples_in(p: &Params, n: u64, seed: u64, family: u64, r: Restriction) -> Result<SampleSet> {
    draw(n, seed, family, |rng| {
        let xi = random_bits(rng, p.depth);
        let x = random_bits(rng, p.depth);
        let y = random_bits(rng, p.depth);
        r.admits(&x, &y).then(|| {
            let gap = if x.word() >= y.word() {
                bitreg::fixed_to_f64(x.word() - y.word())
            } else {
                -bitreg::fixed_to_f64(y.word() - x.word())
            };
            takagi(&x, p).value - takagi(&y, p).value + gap * stable_s(&xi, p).value
        })
    })
}

/// `S(ξ) − S(η)` for `n` uniform triples `(x, ξ, η)`, admitted by `r`.
pub fn rho_samples(p: &Params, n: u64, seed: u64, r: Restriction) -> Result<SampleSet> {
    rho_samples_in(p, n, seed, FAMILY_RHO, r)
}

/// `H(ξ, x) − H(ξ, y)` for `n` uniform triples `(x, y, ξ)`, admitted by `r`.
pub fn chi_samples(p: &Params, n: u64, seed: u64, r: Restriction) -> Result<SampleSet> {
    chi_samples_in(p, n, seed, FAMILY_CHI, r)
}

/// Histogram of the SBR marginal over its support.
pub fn sample_sbr_marginal(p: &Params, n: u64, seed: u64, bins: usize) -> Result<EmpiricalMeasure> {
    let l = sbr_support(p);
    sbr_samples(p, n, seed)?.histogram(-l, l, bins)
}

/// Histogram of `ρ`, or of a restriction of it.
pub fn sample_rho(p: &Params, n: u64, seed: u64, bins: usize, r: Restriction) -> Result<EmpiricalMeasure> {
    let l = rho_support(p);
    rho_samples(p, n, seed, r)?.histogram(-l, l, bins)
}

/// Histogram of `χ`, or of a restriction of it.
pub fn sample_chi(p: &Params, n: u64, seed: u64, bins: usize, r: Restriction) -> Result<EmpiricalMeasure> {
    let l = chi_support(p);
    chi_samples(p, n, seed, r)?.histogram(-l, l, bins)
}
