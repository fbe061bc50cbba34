//! Certified truncations of the Takagi series `T`, the stable-manifold
//! series `S`, its companion `G`, and the bridge function `H`.
//!
//! Every evaluator returns a [`SeriesValue`]: a partial sum together with a
//! radius that covers both the geometric tail and floating-point rounding.
//!
//! Sign convention: `Φ′ = +1` on `[0, 1/2)` and `-1` on `[1/2, 1)`, and
//! `S(ξ) = Σ_{n≥1} κⁿ Φ′(B₂ⁿ(ξ, x)) = Σ_{n≥1} κⁿ (1 − 2ξ̄_{1−n})`.
//! Under this convention `H(ξ, x) = T(x) + x·S(ξ)`.

use std::io::{self, Write};
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::bitreg::{self, decode, BitString, Phase, MAX_DEPTH};
use crate::error::{Error, Result};

/// Default series truncation.
pub const DEFAULT_TRUNCATION: u32 = 48;
/// Default register depth for sampled points.
pub const DEFAULT_DEPTH: u32 = 64;

/// Relative rounding allowance for an `n`-term sum of magnitude `abs_sum`.
pub(crate) fn rounding(n_terms: u32, abs_sum: f64) -> f64 {
    4.0 * (f64::from(n_terms) + 2.0) * f64::EPSILON * abs_sum
}

/// Roughness parameter and truncation settings.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Params {
    pub gamma: f64,
    pub kappa: f64,
    pub truncation: u32,
    pub depth: u32,
}

impl Params {
    pub fn new(gamma: f64, truncation: u32, depth: u32) -> Result<Self> {
        if !(gamma > 0.5 && gamma < 1.0) {
            return Err(Error::Domain(format!("gamma {gamma} outside (1/2, 1)")));
        }
        Self::checked(gamma, 0.5 / gamma, truncation, depth)
    }

    /// Parametrize by `κ = 1/(2γ)` instead, keeping `κ` exact.
    pub fn from_kappa(kappa: f64, truncation: u32, depth: u32) -> Result<Self> {
        if !(kappa > 0.5 && kappa < 1.0) {
            return Err(Error::Domain(format!("kappa {kappa} outside (1/2, 1)")));
        }
        Self::checked(0.5 / kappa, kappa, truncation, depth)
    }

    /// `γ` with the default truncation and depth.
    pub fn with_gamma(gamma: f64) -> Result<Self> {
        Self::new(gamma, DEFAULT_TRUNCATION, DEFAULT_DEPTH)
    }

    fn checked(gamma: f64, kappa: f64, truncation: u32, depth: u32) -> Result<Self> {
        if truncation == 0 {
            return Err(Error::Domain("truncation must be positive".into()));
        }
        if depth < truncation || depth > MAX_DEPTH {
            return Err(Error::Domain(format!(
                "depth {depth} must satisfy truncation {truncation} <= depth <= {MAX_DEPTH}"
            )));
        }
        Ok(Self { gamma, kappa, truncation, depth })
    }

    /// Same parameter, different truncation and depth.
    pub fn resized(&self, truncation: u32, depth: u32) -> Result<Self> {
        Self::checked(self.gamma, self.kappa, truncation, depth)
    }

    /// `sup |S| = κ/(1−κ)`.
    pub fn s_max(&self) -> f64 {
        self.kappa / (1.0 - self.kappa)
    }
}

/// A truncated series value with a certified error radius.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesValue {
    pub value: f64,
    pub tail_bound: f64,
}

impl SeriesValue {
    pub fn new(value: f64, tail_bound: f64) -> Self {
        Self { value, tail_bound }
    }

    pub fn exact(value: f64) -> Self {
        Self { value, tail_bound: 0.0 }
    }

    /// Whether `v` lies inside the certified interval.
    pub fn contains(&self, v: f64) -> bool {
        (self.value - v).abs() <= self.tail_bound
    }

    /// Whether the two certified intervals intersect.
    pub fn agrees_with(&self, other: &SeriesValue) -> bool {
        (self.value - other.value).abs() <= self.tail_bound + other.tail_bound
    }
}

impl Add for SeriesValue {
    type Output = SeriesValue;
    fn add(self, rhs: SeriesValue) -> SeriesValue {
        let value = self.value + rhs.value;
        SeriesValue::new(value, self.tail_bound + rhs.tail_bound + f64::EPSILON * value.abs())
    }
}

impl Sub for SeriesValue {
    type Output = SeriesValue;
    fn sub(self, rhs: SeriesValue) -> SeriesValue {
        self + (-rhs)
    }
}

impl Neg for SeriesValue {
    type Output = SeriesValue;
    fn neg(self) -> SeriesValue {
        SeriesValue::new(-self.value, self.tail_bound)
    }
}

impl Mul<f64> for SeriesValue {
    type Output = SeriesValue;
    fn mul(self, c: f64) -> SeriesValue {
        let value = self.value * c;
        SeriesValue::new(value, self.tail_bound * c.abs() + f64::EPSILON * value.abs())
    }
}

/// `T(x) = Σ_{n=0..N} γⁿ Φ(2ⁿx)`, with `Φ` evaluated exactly on the register.
pub fn takagi(x: &BitString, p: &Params) -> SeriesValue {
    let n_max = p.truncation;
    let mut sum = 0.0;
    let mut abs_sum = 0.0;
    let mut g = 1.0;
    let word = x.word();
    for n in 0..=n_max.min(x.depth().saturating_sub(1)) {
        let shifted = word << n;
        let phi = if shifted >> 127 == 0 { shifted } else { shifted.wrapping_neg() };
        let term = g * bitreg::fixed_to_f64(phi);
        sum += term;
        abs_sum += term;
        g *= p.gamma;
    }
    let tail = 0.5 * p.gamma.powi(n_max as i32 + 1) / (1.0 - p.gamma);
    SeriesValue::new(sum, tail + rounding(n_max + 1, abs_sum))
}

/// `S(ξ) = Σ_{n=1..m} κⁿ (1 − 2ξ̄_{1−n})` with `m = min(N, depth)`.
pub fn stable_s(xi: &BitString, p: &Params) -> SeriesValue {
    let m = p.truncation.min(xi.depth());
    let word = xi.word();
    let mut sum = 0.0;
    let mut abs_sum = 0.0;
    let mut k = p.kappa;
    for n in 1..=m {
        let term = if (word >> (128 - n)) & 1 == 0 { k } else { -k };
        sum += term;
        abs_sum += k;
        k *= p.kappa;
    }
    let tail = p.kappa.powi(m as i32 + 1) / (1.0 - p.kappa);
    SeriesValue::new(sum, tail + rounding(m, abs_sum))
}

/// `S` evaluated from its definition `Σ κⁿ Φ′(B₂ⁿ(ξ, x))` by actually
/// iterating the baker map on `(ξ, x)`. Used to confirm that `S` does not
/// depend on `x`.
pub fn stable_s_direct(xi: &BitString, x: &BitString, p: &Params) -> Result<SeriesValue> {
    let phase = Phase::new(*xi, x.prefix(MAX_DEPTH.saturating_sub(p.truncation)));
    let m = p.truncation.min(xi.depth());
    let mut sum = 0.0;
    let mut abs_sum = 0.0;
    for n in 1..=m {
        let k = p.kappa.powi(n as i32);
        sum += k * phase.baker_k(n as i32)?.x.phi_prime();
        abs_sum += k;
    }
    let tail = p.kappa.powi(m as i32 + 1) / (1.0 - p.kappa);
    Ok(SeriesValue::new(sum, tail + rounding(m, abs_sum)))
}

/// Error of `decode` on registers deeper than the `f64` mantissa.
fn decode_error(x: &BitString) -> f64 {
    if x.depth() > 53 {
        f64::EPSILON / 2.0
    } else {
        0.0
    }
}

/// `H(ξ, x) = T(x) + x·S(ξ)` in closed form.
pub fn bridge_h(xi: &BitString, x: &BitString, p: &Params) -> SeriesValue {
    let t = takagi(x, p);
    let s = stable_s(xi, p);
    let xv = decode(x);
    let value = t.value + xv * s.value;
    let tail = t.tail_bound
        + xv * s.tail_bound
        + decode_error(x) * (s.value.abs() + s.tail_bound)
        + 2.0 * f64::EPSILON * (t.value.abs() + (xv * s.value).abs());
    SeriesValue::new(value, tail)
}

fn fixed_diff(a: u128, b: u128) -> f64 {
    if a >= b {
        bitreg::fixed_to_f64(a - b)
    } else {
        -bitreg::fixed_to_f64(b - a)
    }
}

/// The two-sided series `Σ_{n∈ℤ} γⁿ [Φ(B₂^{-n}(ξ, x)) − Φ(B₂^{-n}(ξ, 0))]`
/// summed over `|n| ≤ N` by iterating the baker map in both directions.
///
/// Each bracket is formed exactly in fixed point before scaling, so the
/// large weights `γ^{-k}` never amplify rounding. Independent of
/// [`bridge_h`] and used as its oracle.
pub fn bridge_h_series(xi: &BitString, x: &BitString, p: &Params) -> Result<SeriesValue> {
    let n_max = p.truncation;
    let zero = BitString::zeros(x.depth())?;
    let with_x = Phase::new(*xi, *x);
    let with_zero = Phase::new(*xi, zero);
    let budget = with_x.valid_forward().min(with_x.valid_backward());
    if budget < n_max {
        return Err(Error::Precision(format!(
            "two-sided series needs {n_max} steps each way, registers allow {budget}"
        )));
    }
    let mut sum = 0.0;
    let mut abs_sum = 0.0;
    // n >= 0: B^{-n} contracts ξ and expands x.
    let mut g = 1.0;
    for n in 0..=n_max as i32 {
        let a = with_x.baker_k(-n)?.x.phi_fixed();
        let b = with_zero.baker_k(-n)?.x.phi_fixed();
        let term = g * fixed_diff(a, b);
        sum += term;
        abs_sum += term.abs();
        g *= p.gamma;
    }
    // n = -k < 0: weights γ^{-k} = (2κ)^k.
    let mut w = 1.0;
    for k in 1..=n_max as i32 {
        w *= 2.0 * p.kappa;
        let a = with_x.baker_k(k)?.x.phi_fixed();
        let b = with_zero.baker_k(k)?.x.phi_fixed();
        let term = w * fixed_diff(a, b);
        sum += term;
        abs_sum += term.abs();
    }
    let tail = 0.5 * p.gamma.powi(n_max as i32 + 1) / (1.0 - p.gamma)
        + p.kappa.powi(n_max as i32 + 1) / (1.0 - p.kappa);
    Ok(SeriesValue::new(sum, tail + rounding(2 * n_max + 1, abs_sum)))
}

/// `G(ξ, x) = Σ_{n∈ℤ} κ^{-n} [Φ′(B₂^{-n}(ξ, x)) − Φ′(B₂^{-n}(0, x))]`.
///
/// Terms with `n ≥ 0` vanish identically (`B₂^{-n}` ignores ξ), so only
/// `n = -1..-N` are summed, each through an explicit baker iterate.
pub fn g_series(xi: &BitString, x: &BitString, p: &Params) -> Result<SeriesValue> {
    let m = p.truncation.min(xi.depth());
    let room = MAX_DEPTH.saturating_sub(m);
    let with_xi = Phase::new(*xi, x.prefix(room));
    let with_zero = Phase::new(BitString::zeros(xi.depth())?, x.prefix(room));
    let mut sum = 0.0;
    let mut abs_sum = 0.0;
    for k in 1..=m as i32 {
        let w = p.kappa.powi(k);
        let a = with_xi.baker_k(k)?.x.phi_prime();
        let b = with_zero.baker_k(k)?.x.phi_prime();
        let term = w * (a - b);
        sum += term;
        abs_sum += term.abs();
    }
    let tail = 2.0 * p.kappa.powi(m as i32 + 1) / (1.0 - p.kappa);
    Ok(SeriesValue::new(sum, tail + rounding(m, abs_sum)))
}

/// `g(x) = Σ_{m≥0} κ^m [Φ′((1+x)/2^{m+1}) − Φ′(x/2^{m+1})]`.
///
/// Under the convention of this crate the value is `-2` for every `x`:
/// the `m = 0` bracket is `(-1) − (+1)` and all later brackets vanish.
pub fn g_function(x: &BitString, p: &Params) -> SeriesValue {
    let n_max = p.truncation;
    // Φ′ reads only the leading digit, so x may be cut to fit the register.
    let x = x.prefix(MAX_DEPTH - n_max - 1);
    let one = BitString::ones(1).expect("depth 1");
    let upper = one.concat(&x).expect("fits");
    let lower = BitString::zeros(1).expect("depth 1").concat(&x).expect("fits");
    let mut sum = 0.0;
    let mut abs_sum = 0.0;
    for m in 0..=n_max {
        let pad = BitString::zeros(m).expect("m < capacity");
        let a = pad.concat(&upper).expect("fits").phi_prime();
        let b = pad.concat(&lower).expect("fits").phi_prime();
        let term = p.kappa.powi(m as i32) * (a - b);
        sum += term;
        abs_sum += term.abs();
    }
    let tail = 2.0 * p.kappa.powi(n_max as i32 + 1) / (1.0 - p.kappa);
    SeriesValue::new(sum, tail + rounding(n_max + 1, abs_sum))
}

/// One identity check: an observed residual and the certified bound it
/// must not exceed.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Residual {
    pub residual: f64,
    pub bound: f64,
}

impl Residual {
    pub fn between(lhs: SeriesValue, rhs: SeriesValue) -> Self {
        Self {
            residual: (lhs.value - rhs.value).abs(),
            bound: lhs.tail_bound + rhs.tail_bound,
        }
    }

    pub fn holds(&self) -> bool {
        self.residual <= self.bound
    }
}

/// Residuals of the one-step scaling identities at a point `(ξ, x)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingReport {
    /// `S(B(ξ,x)) = 2γ S(ξ,x) − Φ′(B₂(ξ,x))`.
    pub s_scaling: Residual,
    /// `G(B⁻¹(ξ,x)) − G(B⁻¹(η,x)) = κ [G(ξ,x) − G(η,x)]` with `η` the
    /// complement of `ξ`.
    pub g_scaling: Residual,
    /// `H(B(ξ,x)) = γ H(ξ,x) + (ξ̄₀/2)(1 + S(2ξ mod 1))`.
    pub h_scaling: Residual,
    /// `T(B₂(ξ,x)) = Φ(B₂(ξ,x)) + γ T(x)`.
    pub attractor: Residual,
}

impl ScalingReport {
    pub fn all_hold(&self) -> bool {
        self.s_scaling.holds() && self.g_scaling.holds() && self.h_scaling.holds() && self.attractor.holds()
    }
}

/// Evaluates the scaling identities at `(ξ, x)`. Needs one baker step of
/// budget in each direction.
pub fn scaling_checks(xi: &BitString, x: &BitString, p: &Params) -> Result<ScalingReport> {
    let phase = Phase::new(*xi, *x);
    let fwd = phase.baker_k(1)?;
    let bwd = phase.baker_k(-1)?;

    let s_lhs = stable_s(&fwd.xi, p);
    let s_rhs = stable_s(xi, p) * (2.0 * p.gamma) - SeriesValue::exact(fwd.x.phi_prime());
    let s_scaling = Residual::between(s_lhs, s_rhs);

    let eta = xi.complement();
    let bwd_eta = Phase::new(eta, *x).baker_k(-1)?;
    let g_lhs = g_series(&bwd.xi, &bwd.x, p)? - g_series(&bwd_eta.xi, &bwd_eta.x, p)?;
    let g_rhs = (g_series(xi, x, p)? - g_series(&eta, x, p)?) * p.kappa;
    let g_scaling = Residual::between(g_lhs, g_rhs);

    let h_lhs = bridge_h(&fwd.xi, &fwd.x, p);
    let lead = f64::from(xi.bit(1));
    let h_rhs = bridge_h(xi, x, p) * p.gamma
        + (SeriesValue::exact(1.0) + stable_s(&fwd.xi, p)) * (lead / 2.0);
    let h_scaling = Residual::between(h_lhs, h_rhs);

    let t_lhs = takagi(&fwd.x, p);
    let phi = bitreg::fixed_to_f64(fwd.x.phi_fixed());
    let t_rhs = SeriesValue::exact(phi) + takagi(x, p) * p.gamma;
    let attractor = Residual::between(t_lhs, t_rhs);

    Ok(ScalingReport { s_scaling, g_scaling, h_scaling, attractor })
}

/// Defect of the undifferenced identity `G(B⁻¹(ξ,x)) = κ G(ξ,x)`, i.e.
/// `G(B⁻¹(ξ,x)) − κ G(ξ,x)`. It equals `−2κ x̄₁`, so the identity holds
/// only when the leading digit of `x` is 0.
pub fn g_scaling_defect(xi: &BitString, x: &BitString, p: &Params) -> Result<SeriesValue> {
    let bwd = Phase::new(*xi, *x).baker_k(-1)?;
    Ok(g_series(&bwd.xi, &bwd.x, p)? - g_series(xi, x, p)? * p.kappa)
}

/// Least-squares fit of `log₂ max_{|x−y|=2^{-k}} |T(x) − T(y)|` against `−k`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HoelderFit {
    pub slope: f64,
    pub expected: f64,
    pub scales: Vec<u32>,
    pub log2_increments: Vec<f64>,
}

/// Estimates the Hölder exponent of `T` from increments on the dyadic grid
/// of `2^grid_log2` points, over scales `k ∈ k_min..=k_max`.
pub fn hoelder_fit(p: &Params, grid_log2: u32, k_min: u32, k_max: u32) -> Result<HoelderFit> {
    if grid_log2 == 0 || grid_log2 > 24 || k_min == 0 || k_min > k_max || k_max > grid_log2 {
        return Err(Error::Domain(format!(
            "need 1 <= k_min <= k_max <= grid_log2 <= 24, got {k_min}, {k_max}, {grid_log2}"
        )));
    }
    let n = 1usize << grid_log2;
    let p = p.resized(p.truncation.max(grid_log2), p.depth.max(grid_log2))?;
    // T is 1-periodic, so the grid wraps around.
    let values: Vec<f64> = (0..n)
        .map(|j| Ok(takagi(&BitString::from_index(j as u128, grid_log2)?, &p).value))
        .collect::<Result<_>>()?;
    let scales: Vec<u32> = (k_min..=k_max).collect();
    let log2_increments: Vec<f64> = scales
        .iter()
        .map(|&k| {
            let step = n >> k;
            let max = (0..n)
                .map(|j| (values[(j + step) % n] - values[j]).abs())
                .fold(0.0, f64::max);
            max.log2()
        })
        .collect();
    let xs: Vec<f64> = scales.iter().map(|&k| -f64::from(k)).collect();
    let slope = least_squares_slope(&xs, &log2_increments);
    Ok(HoelderFit {
        slope,
        expected: p.gamma.ln() / 0.5f64.ln(),
        scales,
        log2_increments,
    })
}

fn least_squares_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

/// One sample of the curve `x ↦ (T(x), H(ξ,x), S(ξ))`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub x: f64,
    pub t: f64,
    pub h: f64,
    pub s: f64,
}

/// Evaluates the curve at `x = j/points` for `j < points`.
pub fn curve(xi: &BitString, p: &Params, points: usize) -> Result<Vec<CurvePoint>> {
    if points == 0 {
        return Err(Error::Domain("need at least one curve point".into()));
    }
    let s = stable_s(xi, p).value;
    (0..points)
        .map(|j| {
            let xv = j as f64 / points as f64;
            let x = bitreg::encode(xv, p.depth)?;
            Ok(CurvePoint {
                x: xv,
                t: takagi(&x, p).value,
                h: bridge_h(xi, &x, p).value,
                s,
            })
        })
        .collect()
}

/// Formats a float with 17 significant digits.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// Writes curve rows as CSV with header `x,T,H,S`.
pub fn write_curve_csv<W: Write>(mut w: W, rows: &[CurvePoint]) -> io::Result<()> {
    writeln!(w, "x,T,H,S")?;
    for r in rows {
        writeln!(w, "{},{},{},{}", fmt_f64(r.x), fmt_f64(r.t), fmt_f64(r.h), fmt_f64(r.s))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bs(s: &str) -> BitString {
        s.parse().unwrap()
    }

    #[test]
    fn params_validation() {
        assert!(Params::new(0.5, 48, 64).is_err());
        assert!(Params::new(1.0, 48, 64).is_err());
        assert!(Params::new(0.6, 0, 64).is_err());
        assert!(Params::new(0.6, 65, 64).is_err());
        let p = Params::from_kappa(0.65, 48, 64).unwrap();
        assert_eq!(p.kappa, 0.65);
        assert!((p.gamma * p.kappa - 0.5).abs() <= f64::EPSILON);
    }

    #[test]
    fn series_value_arithmetic_widens_bounds() {
        let a = SeriesValue::new(1.0, 0.1);
        let b = SeriesValue::new(0.5, 0.2);
        let d = a - b;
        assert_eq!(d.value, 0.5);
        assert!(d.tail_bound >= 0.3);
        assert!((a * -2.0).tail_bound >= 0.2);
    }

    #[test]
    fn g_function_is_minus_two() {
        let p = Params::with_gamma(0.6).unwrap();
        for s in ["01", "0", "1111", "1010101"] {
            assert!(g_function(&bs(s), &p).contains(-2.0));
            assert_eq!(g_function(&bs(s), &p).value, -2.0);
        }
    }

    #[test]
    fn fmt_has_seventeen_digits() {
        assert_eq!(fmt_f64(0.1), "1.0000000000000001e-1");
        assert_eq!(fmt_f64(-2.0), "-2.0000000000000000e0");
    }
}
