mod common;

use common::{all, bs, random_bits, rng};
use proptest::prelude::*;
use takagi_core::bitreg::{decode, encode, phi, BitString};
use takagi_core::series::{
    bridge_h, bridge_h_series, curve, g_function, g_scaling_defect, hoelder_fit, scaling_checks,
    stable_s, stable_s_direct, takagi, write_curve_csv, Params,
};

const GAMMAS: [f64; 5] = [0.55, 0.6, 0.668, 0.75, 0.9];

fn p(gamma: f64) -> Params {
    Params::with_gamma(gamma).unwrap()
}

/// Plain f64 evaluation of Σ γⁿ Φ(2ⁿx), exact for short dyadic x.
fn takagi_oracle(x: f64, gamma: f64, terms: i32) -> f64 {
    (0..=terms).map(|n| gamma.powi(n) * phi(2f64.powi(n) * x)).sum()
}

#[test]
fn takagi_examples() {
    let q = p(0.6);
    let zero = BitString::zeros(64).unwrap();
    assert_eq!(takagi(&zero, &q).value, 0.0);
    assert!(takagi(&zero, &q).contains(0.0));
    assert_eq!(takagi(&encode(0.5, 64).unwrap(), &q).value, 0.5);
    // 2^-3 ((2γ)^3 − 1)/(2γ − 1) at γ = 0.75.
    let t = takagi(&encode(0.125, 64).unwrap(), &p(0.75));
    assert!((t.value - 0.59375).abs() < 1e-15);
    assert!(t.contains(0.59375));
}

#[test]
fn takagi_closed_form_at_powers_of_two() {
    for &g in &GAMMAS {
        for k in 1..20 {
            let x = encode(2f64.powi(-k), 64).unwrap();
            let closed = 2f64.powi(-k) * ((2.0 * g).powi(k) - 1.0) / (2.0 * g - 1.0);
            assert!(takagi(&x, &p(g)).contains(closed), "γ={g} k={k}");
        }
    }
}

#[test]
fn takagi_matches_float_oracle() {
    let mut r = rng(1);
    for &g in &GAMMAS {
        for _ in 0..1000 {
            let x = random_bits(&mut r, 40);
            let t = takagi(&x, &p(g));
            assert!(t.contains(takagi_oracle(decode(&x), g, 48)) || (t.value - takagi_oracle(decode(&x), g, 48)).abs() < 1e-13);
        }
    }
}

#[test]
fn stable_s_examples() {
    let q = Params::from_kappa(0.625, 48, 64).unwrap();
    let l = 0.625 / 0.375;
    assert!(stable_s(&BitString::zeros(64).unwrap(), &q).contains(l));
    assert!(stable_s(&BitString::ones(64).unwrap(), &q).contains(-l));
    let half = encode(0.5, 64).unwrap();
    assert!(stable_s(&half, &q).contains(l - 2.0 * 0.625));
}

#[test]
fn s_does_not_depend_on_x() {
    let mut r = rng(2);
    for &g in &GAMMAS {
        let q = p(g);
        for _ in 0..200 {
            let xi = random_bits(&mut r, 64);
            let a = stable_s_direct(&xi, &random_bits(&mut r, 64), &q).unwrap();
            let b = stable_s_direct(&xi, &random_bits(&mut r, 64), &q).unwrap();
            assert_eq!(a.value, b.value);
            assert!((a.value - stable_s(&xi, &q).value).abs() <= 1e-14);
        }
    }
}

#[test]
fn bridge_examples() {
    let q = p(0.6);
    let zero = BitString::zeros(64).unwrap();
    let ones = BitString::ones(64).unwrap();
    let half = encode(0.5, 64).unwrap();
    assert!(bridge_h(&zero, &zero, &q).contains(0.0));
    assert_eq!(bridge_h_series(&ones, &zero, &q).unwrap().value, 0.0);
    // H = T + x S: 1/2 + 5/2 and 1/2 − 5/2.
    assert!(bridge_h(&zero, &half, &q).contains(3.0));
    assert!(bridge_h(&ones, &half, &q).contains(-2.0));
    assert!(bridge_h_series(&zero, &half, &q).unwrap().contains(3.0));
    assert!(bridge_h_series(&ones, &half, &q).unwrap().contains(-2.0));
}

#[test]
fn series_oracle_agrees_with_closed_form() {
    let mut r = rng(3);
    for &g in &GAMMAS {
        let q = p(g);
        for _ in 0..1000 {
            let xi = random_bits(&mut r, 64);
            let x = random_bits(&mut r, 64);
            let a = bridge_h(&xi, &x, &q);
            let b = bridge_h_series(&xi, &x, &q).unwrap();
            assert!(a.agrees_with(&b), "γ={g}: {a:?} vs {b:?}");
        }
    }
}

#[test]
fn series_oracle_refuses_short_registers() {
    let q = p(0.6);
    let short = BitString::zeros(10).unwrap();
    assert!(bridge_h_series(&short, &short, &q).is_err());
}

#[test]
fn bridge_identities_on_random_triples() {
    let mut r = rng(4);
    for &g in &GAMMAS {
        let q = p(g);
        for _ in 0..1000 {
            let xi = random_bits(&mut r, 64);
            let eta = random_bits(&mut r, 64);
            let x = random_bits(&mut r, 64);
            let y = random_bits(&mut r, 64);
            let s = stable_s(&xi, &q);
            let lhs = bridge_h_series(&xi, &y, &q).unwrap() - bridge_h_series(&xi, &x, &q).unwrap();
            let rhs = takagi(&y, &q) - takagi(&x, &q) + s * (decode(&y) - decode(&x));
            assert!(lhs.agrees_with(&rhs));
            let lhs = bridge_h_series(&eta, &x, &q).unwrap() - bridge_h_series(&xi, &x, &q).unwrap();
            let rhs = (stable_s(&eta, &q) - s) * decode(&x);
            assert!(lhs.agrees_with(&rhs));
        }
    }
}

#[test]
fn bridge_identity_exhaustive_depth_10() {
    // Both bridge identities are differences of the per-point identity
    // H_series(ξ,x) = T(x) + x S(ξ); checking that for every pair covers
    // every triple.
    for &g in &GAMMAS {
        let q = Params::new(g, 10, 10).unwrap();
        for xi in all(10) {
            for x in all(10) {
                let a = bridge_h_series(&xi, &x, &q).unwrap();
                let b = takagi(&x, &q) + stable_s(&xi, &q) * decode(&x);
                assert!(a.agrees_with(&b));
            }
        }
    }
}

#[test]
fn scaling_identities_random() {
    let mut r = rng(5);
    for &g in &GAMMAS {
        let q = p(g);
        for _ in 0..1000 {
            let xi = random_bits(&mut r, 64);
            let x = random_bits(&mut r, 64);
            let rep = scaling_checks(&xi, &x, &q).unwrap();
            assert!(rep.all_hold(), "γ={g}: {rep:?}");
        }
    }
}

#[test]
fn scaling_identities_exhaustive_depth_10() {
    for &g in &GAMMAS {
        let q = Params::new(g, 10, 10).unwrap();
        for xi in all(10) {
            for x in all(10) {
                assert!(scaling_checks(&xi, &x, &q).unwrap().all_hold());
            }
        }
    }
}

#[test]
fn attractor_at_origin_is_exact() {
    let zero = BitString::zeros(64).unwrap();
    let rep = scaling_checks(&zero, &zero, &p(0.6)).unwrap();
    assert_eq!(rep.attractor.residual, 0.0);
}

#[test]
fn undifferenced_g_scaling_has_leading_digit_defect() {
    let mut r = rng(6);
    for &g in &GAMMAS {
        let q = p(g);
        for _ in 0..200 {
            let xi = random_bits(&mut r, 64);
            let x = random_bits(&mut r, 64);
            let d = g_scaling_defect(&xi, &x, &q).unwrap();
            assert!(d.contains(-2.0 * q.kappa * f64::from(x.bit(1))));
        }
    }
}

#[test]
fn g_is_constant() {
    for &g in &GAMMAS {
        let q = p(g);
        let vals: Vec<f64> = (0..1024)
            .map(|j| g_function(&BitString::from_index(j, 10).unwrap(), &q).value)
            .collect();
        let max = vals.iter().copied().fold(f64::MIN, f64::max);
        let min = vals.iter().copied().fold(f64::MAX, f64::min);
        assert_eq!(max - min, 0.0);
        assert_eq!(max, -2.0);
    }
    assert_eq!(g_function(&bs("01"), &p(0.6)).value, -2.0);
}

#[test]
fn hoelder_fit_matches_numpy_oracle() {
    // Slopes from an independent numpy evaluation on the same 2^16 grid.
    for (g, oracle) in [(0.6, 0.6719108378323446), (0.75, 0.3943961267602293)] {
        let fit = hoelder_fit(&p(g), 16, 4, 16).unwrap();
        assert!((fit.slope - oracle).abs() < 1e-9, "{fit:?}");
    }
}

#[test]
fn hoelder_exponent_at_three_quarters() {
    let fit = hoelder_fit(&p(0.75), 16, 4, 16).unwrap();
    assert!((fit.slope - fit.expected).abs() <= 0.05, "{fit:?}");
}

#[test]
fn hoelder_increments_approach_exponent() {
    // The per-scale decrement tends to log2(γ) from above; the finite-k
    // correction decays like (2γ)^-k.
    for g in [0.6, 0.75] {
        let fit = hoelder_fit(&p(g), 16, 4, 16).unwrap();
        let d: Vec<f64> = fit.log2_increments.windows(2).map(|w| w[1] - w[0]).collect();
        assert!(d.windows(2).all(|w| w[1] <= w[0] + 1e-12));
        assert!(*d.last().unwrap() >= g.log2() - 1e-12);
    }
}

#[test]
fn curve_csv_shape() {
    let rows = curve(&BitString::zeros(64).unwrap(), &p(0.6), 16).unwrap();
    let mut out = Vec::new();
    write_curve_csv(&mut out, &rows).unwrap();
    let text = String::from_utf8(out).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "x,T,H,S");
    assert_eq!(lines.len(), 17);
    assert!(lines[1].starts_with("0.0000000000000000e0,"));
}

proptest! {
    #[test]
    fn tails_shrink_with_truncation(g in 0.51f64..0.99, n in 1u32..20) {
        let a = Params::new(g, n, 128).unwrap();
        let b = Params::new(g, n + 1, 128).unwrap();
        let x = BitString::ones(128).unwrap();
        prop_assert!(takagi(&x, &b).tail_bound < takagi(&x, &a).tail_bound);
        prop_assert!(stable_s(&x, &b).tail_bound < stable_s(&x, &a).tail_bound);
    }

    #[test]
    fn s_is_bounded_and_antisymmetric(g in 0.51f64..0.99, w in any::<u128>()) {
        let q = p(g);
        let xi = BitString::from_word(w, 64).unwrap();
        let s = stable_s(&xi, &q);
        let t = stable_s(&xi.complement(), &q);
        prop_assert!(s.value.abs() <= q.s_max());
        prop_assert_eq!(s.value, -t.value);
    }

    #[test]
    fn scaling_identities_hold(g in 0.51f64..0.99, a in any::<u128>(), b in any::<u128>()) {
        let q = p(g);
        let xi = BitString::from_word(a, 64).unwrap();
        let x = BitString::from_word(b, 64).unwrap();
        prop_assert!(scaling_checks(&xi, &x, &q).unwrap().all_hold());
    }
}
