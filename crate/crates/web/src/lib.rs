//! WebAssembly bindings for the browser demo.
//!
//! Each export returns a flat `Float64Array` so the page can draw it without
//! any deserialisation. The plain Rust functions behind them are public and
//! tested natively.

use takagi_core::measures::{occupation_local_time, sample_sbr_marginal, EmpiricalMeasure};
use takagi_core::series::curve;
use takagi_core::{BitString, Params};
use wasm_bindgen::prelude::*;

const DEPTH: u32 = 64;
const TRUNCATION: u32 = 48;
const MAX_SAMPLES: u32 = 2_000_000;
const MAX_GRID_LOG2: u32 = 20;

/// Parses a binary digit string for ξ, zero-padded to the register depth.
pub fn parse_xi(digits: &str) -> Result<BitString, String> {
    let b: BitString = digits.trim().parse().map_err(|e| format!("ξ digits: {e}"))?;
    if b.depth() > DEPTH {
        return Err(format!("ξ has {} digits, at most {DEPTH} are used", b.depth()));
    }
    BitString::from_word(b.word(), DEPTH).map_err(|e| e.to_string())
}

fn params(gamma: f64) -> Result<Params, String> {
    Params::new(gamma, TRUNCATION, DEPTH).map_err(|e| e.to_string())
}

/// `[x, T(x), H(ξ, x)]` triples on `points` uniform grid points.
pub fn curve_points(gamma: f64, xi: &str, points: u32) -> Result<Vec<f64>, String> {
    let p = params(gamma)?;
    let rows = curve(&parse_xi(xi)?, &p, points as usize).map_err(|e| e.to_string())?;
    Ok(rows.iter().flat_map(|r| [r.x, r.t, r.h]).collect())
}

/// `[lo, hi, mass…]` for a histogram.
fn flatten(m: &EmpiricalMeasure, extra: &[f64]) -> Vec<f64> {
    let (lo, hi) = (m.bin_edges[0], m.bin_edges[m.bins()]);
    [lo, hi].iter().chain(extra).chain(&m.mass).copied().collect()
}

/// Histogram of the invariant measure's stable coordinate: `[lo, hi, mass…]`.
pub fn sbr_histogram(kappa: f64, samples: u32, seed: u32, bins: u32) -> Result<Vec<f64>, String> {
    if samples == 0 || samples > MAX_SAMPLES {
        return Err(format!("samples must be in 1..={MAX_SAMPLES}"));
    }
    let p = Params::from_kappa(kappa, TRUNCATION, DEPTH).map_err(|e| e.to_string())?;
    let m = sample_sbr_marginal(&p, u64::from(samples), u64::from(seed), bins as usize).map_err(|e| e.to_string())?;
    Ok(flatten(&m, &[]))
}

/// Occupation histogram of `x ↦ H(ξ, x)` on `2^grid_log2` points:
/// `[lo, hi, stability_ratio, mass…]`.
pub fn occupation_histogram(gamma: f64, xi: &str, grid_log2: u32, bins: u32) -> Result<Vec<f64>, String> {
    if !(1..=MAX_GRID_LOG2).contains(&grid_log2) {
        return Err(format!("grid exponent must be in 1..={MAX_GRID_LOG2}"));
    }
    let p = params(gamma)?;
    let r = occupation_local_time(&parse_xi(xi)?, &p, 1 << grid_log2, bins as usize).map_err(|e| e.to_string())?;
    Ok(flatten(&r.measure, &[r.stability_ratio]))
}

#[wasm_bindgen(js_name = curve)]
pub fn curve_js(gamma: f64, xi: &str, points: u32) -> Result<Vec<f64>, JsError> {
    curve_points(gamma, xi, points).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = sbrHistogram)]
pub fn sbr_histogram_js(kappa: f64, samples: u32, seed: u32, bins: u32) -> Result<Vec<f64>, JsError> {
    sbr_histogram(kappa, samples, seed, bins).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = occupation)]
pub fn occupation_js(gamma: f64, xi: &str, grid_log2: u32, bins: u32) -> Result<Vec<f64>, JsError> {
    occupation_histogram(gamma, xi, grid_log2, bins).map_err(|e| JsError::new(&e))
}
