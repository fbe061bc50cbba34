//! Jump times of pairs of expansions and the telescoped representations of
//! `S`- and `H`-differences built on them.
//!
//! Signs follow the convention of [`crate::series`]. Under it,
//!
//! * `S(ξ) − S(η) = 2 Σ_ℓ κ^{τ_ℓ+1} (1 − 2ξ̄_{−τ_ℓ})`,
//! * `H(ξ,y) − H(ξ,x) = Σ_ℓ (2ȳ_{σ_ℓ} − 1) γ^{σ_ℓ} [S(ζ_ℓ) − 2κ·frac(2^{σ_ℓ} x)]`,
//!
//! where `ζ_ℓ = B₁^{−σ_ℓ}(ξ, ỹ_ℓ)` and `ỹ_ℓ` is `y` cut after digit `σ_ℓ`
//! with that digit cleared. The expansion of `ζ_ℓ` is therefore
//! `0, ȳ_{σ_ℓ−1}, …, ȳ_1` followed by the digits of `ξ`.

use serde::{Deserialize, Serialize};

use crate::bitreg::{self, BitString, Phase, MAX_DEPTH};
use crate::error::{Error, Result};
use crate::series::{rounding, stable_s, Params, SeriesValue};

/// Increasing list of positions, exhaustive below `complete_to`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct JumpTimes {
    pub times: Vec<u32>,
    pub complete_to: u32,
}

impl JumpTimes {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// The `ℓ`-th time, 1-indexed.
    pub fn get(&self, ell: usize) -> Option<u32> {
        ell.checked_sub(1).and_then(|i| self.times.get(i).copied())
    }
}

fn same_depth(a: &BitString, b: &BitString) -> Result<()> {
    if a.depth() == b.depth() {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "expansions of depths {} and {} cannot be compared",
            a.depth(),
            b.depth()
        )))
    }
}

/// Set digit positions of a register, 1-indexed.
fn ones_of(word: u128) -> Vec<u32> {
    let mut out = Vec::with_capacity(word.count_ones() as usize);
    let mut w = word;
    while w != 0 {
        let lz = w.leading_zeros();
        out.push(lz + 1);
        w &= !(1u128 << (127 - lz));
    }
    out
}

/// Disagreement times `τ` of `ξ` and `η`, 0-indexed (`τ = 0` is `ξ̄₀`).
pub fn tau_times(xi: &BitString, eta: &BitString) -> Result<JumpTimes> {
    same_depth(xi, eta)?;
    Ok(JumpTimes {
        times: ones_of(xi.word() ^ eta.word()).into_iter().map(|k| k - 1).collect(),
        complete_to: xi.depth(),
    })
}

/// Jump bookkeeping for a pair `(x, y)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SigmaAlpha {
    /// Disagreement positions, 1-indexed.
    pub sigma: JumpTimes,
    /// Positions where both digits are 1, 1-indexed.
    pub alpha: JumpTimes,
    /// `R_ℓ`: the number of `α`'s not exceeding `σ_ℓ`.
    pub r: Vec<usize>,
}

pub fn sigma_alpha_times(x: &BitString, y: &BitString) -> Result<SigmaAlpha> {
    same_depth(x, y)?;
    let sigma = ones_of(x.word() ^ y.word());
    let alpha = ones_of(x.word() & y.word());
    let r = sigma.iter().map(|&s| alpha.partition_point(|&a| a <= s)).collect();
    Ok(SigmaAlpha {
        sigma: JumpTimes { times: sigma, complete_to: x.depth() + 1 },
        alpha: JumpTimes { times: alpha, complete_to: x.depth() + 1 },
        r,
    })
}

/// The digit conditions equivalent to `y > x + 1/2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MacroscopicWitness {
    pub sigma1_is_one: bool,
    pub x1_is_zero: bool,
    pub y1_is_one: bool,
    pub y_sigma2_is_one: bool,
    pub x_sigma2_is_zero: bool,
}

impl MacroscopicWitness {
    pub fn new(x: &BitString, y: &BitString) -> Result<Self> {
        let sa = sigma_alpha_times(x, y)?;
        let sigma2 = sa.sigma.get(2);
        Ok(Self {
            sigma1_is_one: sa.sigma.get(1) == Some(1),
            x1_is_zero: x.depth() >= 1 && x.bit(1) == 0,
            y1_is_one: y.bit(1) == 1,
            y_sigma2_is_one: sigma2.is_some_and(|s| y.bit(s) == 1),
            x_sigma2_is_zero: sigma2.is_some_and(|s| x.bit(s) == 0),
        })
    }

    pub fn holds(&self) -> bool {
        self.sigma1_is_one
            && self.x1_is_zero
            && self.y1_is_one
            && self.y_sigma2_is_one
            && self.x_sigma2_is_zero
    }
}

/// `S(ξ) − S(η) = 2 Σ_{τ_ℓ < m} κ^{τ_ℓ+1} (1 − 2ξ̄_{−τ_ℓ})`, `m = min(N, depth)`.
///
/// This is the negative of the printed form `2 Σ κ^{τ_ℓ+1} (−1)^{1−ξ̄_{−τ_ℓ}}`.
pub fn s_diff_rep(xi: &BitString, eta: &BitString, p: &Params) -> Result<SeriesValue> {
    let taus = tau_times(xi, eta)?;
    let m = p.truncation.min(xi.depth());
    let mut sum = 0.0;
    let mut abs_sum = 0.0;
    for &tau in taus.times.iter().take_while(|&&t| t < m) {
        let w = 2.0 * p.kappa.powi(tau as i32 + 1);
        sum += if xi.bit(tau + 1) == 1 { -w } else { w };
        abs_sum += w;
    }
    let tail = 2.0 * p.kappa.powi(m as i32 + 1) / (1.0 - p.kappa);
    Ok(SeriesValue::new(sum, tail + rounding(m, abs_sum)))
}

/// `S(ξ) = κ/(1−κ) − 2 Σ_{τ⁰_ℓ < m} κ^{τ⁰_ℓ+1}`, the jump times taken
/// against `η = 0`.
pub fn s_oneterm_rep(xi: &BitString, p: &Params) -> SeriesValue {
    let m = p.truncation.min(xi.depth());
    let mut sum = 0.0;
    for tau in ones_of(xi.word()).into_iter().map(|k| k - 1).take_while(|&t| t < m) {
        sum += 2.0 * p.kappa.powi(tau as i32 + 1);
    }
    let s0 = p.s_max();
    let tail = 2.0 * p.kappa.powi(m as i32 + 1) / (1.0 - p.kappa);
    SeriesValue::new(s0 - sum, tail + rounding(m + 1, s0 + sum))
}

/// Signed, exactly formed difference `decode(y) − decode(x)`.
fn exact_gap(x: &BitString, y: &BitString) -> f64 {
    let (a, b) = (y.word(), x.word());
    if a >= b {
        bitreg::fixed_to_f64(a - b)
    } else {
        -bitreg::fixed_to_f64(b - a)
    }
}

/// `frac(2^σ x)` for the digits of `x` past position `σ`.
fn frac_shift(x: &BitString, sigma: u32) -> f64 {
    let w = if sigma >= 128 { 0 } else { x.word() << sigma };
    bitreg::fixed_to_f64(w)
}

/// Bound on the σ-terms beyond the cut, when the cut is below the depth.
fn sigma_cut_tail(depth: u32, cut: u32, p: &Params) -> f64 {
    if cut < depth {
        p.s_max() * p.gamma.powi(cut as i32 + 1) / (1.0 - p.gamma)
    } else {
        0.0
    }
}

/// `H(ξ,y) − H(ξ,x)` from the σ-representation, summed over `σ ≤ min(depth, N)`.
///
/// Each `S(ζ_ℓ)` argument is built with an explicit backward baker iterate.
/// Fails when `ζ_ℓ` would not fit in a register.
pub fn h_diff_rep(xi: &BitString, x: &BitString, y: &BitString, p: &Params) -> Result<SeriesValue> {
    let sa = sigma_alpha_times(x, y)?;
    let cut = x.depth().min(p.truncation);
    let mut sum = 0.0;
    let mut abs_sum = 0.0;
    let mut tails = 0.0;
    for &sigma in sa.sigma.times.iter().take_while(|&&s| s <= cut) {
        let y_cut = y.prefix(sigma).with_bit(sigma, 0)?;
        let zeta = Phase::new(*xi, y_cut).baker_k(-(sigma as i32))?.xi;
        let trunc = (p.truncation + sigma).min(MAX_DEPTH);
        let s = stable_s(&zeta, &p.resized(trunc, MAX_DEPTH)?);
        let g = p.gamma.powi(sigma as i32);
        let bracket = s.value - 2.0 * p.kappa * frac_shift(x, sigma);
        let term = if y.bit(sigma) == 1 { g * bracket } else { -g * bracket };
        sum += term;
        abs_sum += term.abs();
        tails += g * s.tail_bound;
    }
    let tail = sigma_cut_tail(x.depth(), cut, p) + tails + rounding(cut + 1, abs_sum);
    Ok(SeriesValue::new(sum, tail))
}

/// One term `(2ȳ_σ − 1) γ^σ [κ/(1−κ) − 2κ^{σ+1} Σ_{k<σ, ȳ_k=1} κ^{−k} − 2κ·frac(2^σ x)]`
/// of the ξ-free part of the H-difference.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct JTerm {
    pub sigma: u32,
    pub sign: f64,
    pub bracket: f64,
    pub term: f64,
}

/// All terms of the ξ-free series with `σ ≤ cut`.
pub fn j_terms(x: &BitString, y: &BitString, cut: u32, p: &Params) -> Result<Vec<JTerm>> {
    same_depth(x, y)?;
    let s_max = p.s_max();
    let k = p.kappa;
    let mut out = Vec::new();
    // acc = Σ_{k<σ, ȳ_k=1} κ^{σ+1−k}, updated one digit at a time.
    let mut acc = 0.0;
    let mut g = 1.0;
    for sigma in 1..=cut.min(x.depth()) {
        g *= p.gamma;
        if x.bit(sigma) != y.bit(sigma) {
            let bracket = s_max - 2.0 * acc - 2.0 * k * frac_shift(x, sigma);
            let sign = if y.bit(sigma) == 1 { 1.0 } else { -1.0 };
            out.push(JTerm { sigma, sign, bracket, term: sign * g * bracket });
        }
        acc = k * acc + if y.bit(sigma) == 1 { k * k } else { 0.0 };
    }
    Ok(out)
}

/// The H-difference split into its ξ-free series and the drift term.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HDiffSplit {
    /// `Σ_ℓ (2ȳ_{σ_ℓ} − 1) γ^{σ_ℓ} [...]`; equals `H(0,y) − H(0,x)`.
    pub j_term: SeriesValue,
    /// `(y − x)(S(ξ) − S(0))`.
    pub drift: SeriesValue,
    pub total: SeriesValue,
}

/// `H(ξ,y) − H(ξ,x) = J(x, y) + (y − x)(S(ξ) − S(0))`.
pub fn h_diff_simple_rep(xi: &BitString, x: &BitString, y: &BitString, p: &Params) -> Result<HDiffSplit> {
    let cut = x.depth().min(p.truncation);
    let terms = j_terms(x, y, cut, p)?;
    let sum: f64 = terms.iter().map(|t| t.term).sum();
    let abs_sum: f64 = terms.iter().map(|t| t.term.abs()).sum();
    let j_term = SeriesValue::new(
        sum,
        sigma_cut_tail(x.depth(), cut, p) + rounding(2 * cut + 2, abs_sum + p.s_max()),
    );
    let zero = BitString::zeros(xi.depth())?;
    let drift = s_diff_rep(xi, &zero, p)? * exact_gap(x, y);
    Ok(HDiffSplit { j_term, drift, total: j_term + drift })
}

/// Cap `(κ/(1−κ))(3 + κ − 2κ^{2(⌊(σ_ℓ−σ_N−2)/2⌋+1)})/(1+κ)` on a single
/// bracket `κ/(1−κ) + 2κ^{σ_ℓ} Σ_{p≤R_ℓ} κ^{−α_p}` when `σ_i = i` for `i ≤ N`.
pub fn per_term_cap(sigma_ell: u32, sigma_n: u32, kappa: f64) -> f64 {
    let gap = i64::from(sigma_ell) - i64::from(sigma_n) - 2;
    let e = 2 * (gap.div_euclid(2) + 1);
    kappa / (1.0 - kappa) * (3.0 + kappa - 2.0 * kappa.powi(e as i32)) / (1.0 + kappa)
}

/// The bracket `κ/(1−κ) + 2κ^{σ_ℓ} Σ_{p≤R_ℓ} κ^{−α_p}` in its printed
/// `x∧y` form, for checking [`per_term_cap`].
pub fn meet_bracket(sa: &SigmaAlpha, ell: usize, kappa: f64) -> Option<f64> {
    let sigma = sa.sigma.get(ell)?;
    let r = sa.r[ell - 1];
    let s: f64 = sa.alpha.times[..r]
        .iter()
        .map(|&a| kappa.powi(sigma as i32 - a as i32))
        .sum();
    Some(kappa / (1.0 - kappa) + 2.0 * s)
}

/// Bound `(γ^{σ_ℓ}/(1−γ)) (κ/(1−κ)) (3+κ)/(1+κ)` on the tail of the
/// ξ-free series from index `ℓ` on, valid when `σ_i = i` for `i ≤ n_prefix`
/// and `ℓ > n_prefix`.
pub fn remainder_bound(sigma: &JumpTimes, ell: usize, n_prefix: usize, p: &Params) -> Result<f64> {
    if ell <= n_prefix {
        return Err(Error::Domain(format!("need ell > N, got ell = {ell}, N = {n_prefix}")));
    }
    for i in 1..=n_prefix {
        if sigma.get(i) != Some(i as u32) {
            return Err(Error::Domain(format!(
                "jump times do not start with 1..={n_prefix}: {:?}",
                sigma.times
            )));
        }
    }
    let s_ell = sigma
        .get(ell)
        .ok_or_else(|| Error::Domain(format!("ell = {ell} beyond the {} known jumps", sigma.len())))?;
    let k = p.kappa;
    Ok(p.gamma.powi(s_ell as i32) / (1.0 - p.gamma) * k / (1.0 - k) * (3.0 + k) / (1.0 + k))
}
