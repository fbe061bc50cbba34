mod common;

use std::collections::HashSet;

use common::{all, bs};
use proptest::prelude::*;
use takagi_core::bitreg::{decode, encode, meet, BitString, Phase};

fn arb_bits(max_depth: u32) -> impl Strategy<Value = BitString> {
    (0..=max_depth, any::<u128>()).prop_map(|(d, w)| BitString::from_word(w, d).unwrap())
}

#[test]
fn one_step_is_a_bijection_at_total_depth_20() {
    // Pairs (xi, x) with depths (d, 20 - d), d >= 1 so a forward step is allowed.
    for d in [1u32, 7, 10, 13, 20] {
        let dx = 20 - d;
        let mut seen = HashSet::with_capacity(1 << 20);
        for xi in all(d) {
            for x in all(dx) {
                let q = Phase::new(xi, x).baker_k(1).unwrap();
                assert_eq!(q.xi.depth() + q.x.depth(), 20);
                assert!(seen.insert((q.xi.index(), q.x.index())));
            }
        }
        assert_eq!(seen.len(), 1 << 20);
    }
}

#[test]
fn forward_then_backward_is_identity_exhaustively() {
    for xi in all(6) {
        for x in all(6) {
            let p = Phase::new(xi, x);
            for k in -6..=6 {
                assert_eq!(p.baker_k(k).unwrap().baker_k(-k).unwrap(), p);
            }
        }
    }
}

#[test]
fn baker_matches_its_real_formula() {
    let p = Phase::new(bs("1011"), bs("01"));
    for k in 1..=4 {
        let q = p.baker_k(k).unwrap();
        let xi = decode(&p.xi);
        let x = decode(&p.x);
        let scale = f64::from(1u32 << k);
        let expected_xi = (scale * xi).fract();
        let prefix: f64 = (1..=k as u32)
            .map(|j| f64::from(p.xi.bit(j)) * 2f64.powi(j as i32 - k - 1))
            .sum();
        assert_eq!(decode(&q.xi), expected_xi);
        assert_eq!(decode(&q.x), prefix + x / scale);
    }
}

#[test]
fn encode_rejects_out_of_range() {
    assert!(encode(1.0000001, 8).is_err());
    assert!(encode(0.5, 0).is_err());
    assert!(encode(0.5, 129).is_err());
    assert_eq!(encode(1.0, 3).unwrap(), bs("111"));
}

#[test]
fn meet_needs_equal_depths() {
    assert!(meet(&bs("01"), &bs("011")).is_err());
}

proptest! {
    #[test]
    fn group_law(xi in arb_bits(40), x in arb_bits(40), j in -20i32..=20, k in -20i32..=20) {
        let p = Phase::new(xi, x);
        if let (Ok(a), Ok(direct)) = (p.baker_k(j), p.baker_k(j + k)) {
            if let Ok(b) = a.baker_k(k) {
                prop_assert_eq!(b, direct);
            }
        }
    }

    #[test]
    fn forward_step_decodes_as_halving(xi in arb_bits(50), x in arb_bits(50)) {
        prop_assume!(xi.depth() >= 1);
        let q = Phase::new(xi, x).baker_k(1).unwrap();
        prop_assert_eq!(decode(&q.x), f64::from(xi.bit(1)) / 2.0 + decode(&x) / 2.0);
    }

    #[test]
    fn round_trip(v in 0.0f64..1.0, d in 1u32..=128) {
        let b = encode(v, d).unwrap();
        prop_assert!(v - decode(&b) >= 0.0);
        prop_assert!(v - decode(&b) < 2f64.powi(-(d.min(53) as i32)) + f64::EPSILON);
        if d <= 53 {
            prop_assert_eq!(encode(decode(&b), d).unwrap(), b);
        }
    }

    #[test]
    fn value_stays_below_one(b in arb_bits(128)) {
        let v = decode(&b);
        prop_assert!((0.0..1.0).contains(&v));
    }

    #[test]
    fn string_round_trip(b in arb_bits(128)) {
        let s = b.to_string();
        prop_assert_eq!(s.len() as u32, b.depth());
        prop_assert_eq!(s.parse::<BitString>().unwrap(), b);
    }

    #[test]
    fn baker_respects_budgets(xi in arb_bits(128), x in arb_bits(128), k in -130i32..=130) {
        let p = Phase::new(xi, x);
        let allowed = if k >= 0 { k as u32 <= p.valid_forward() } else { k.unsigned_abs() <= p.valid_backward() };
        prop_assert_eq!(p.baker_k(k).is_ok(), allowed);
    }
}
