use takagi_web::{curve_points, occupation_histogram, parse_xi, sbr_histogram};

#[test]
fn xi_is_zero_padded() {
    let xi = parse_xi("101").unwrap();
    assert_eq!(xi.depth(), 64);
    assert_eq!((xi.bit(1), xi.bit(2), xi.bit(3), xi.bit(4)), (1, 0, 1, 0));
    assert!(parse_xi("").unwrap().depth() == 64);
    assert!(parse_xi("10a").is_err());
    assert!(parse_xi(&"1".repeat(65)).is_err());
}

#[test]
fn curve_is_flat_triples_starting_at_zero() {
    let v = curve_points(0.6, "", 16).unwrap();
    assert_eq!(v.len(), 16 * 3);
    assert_eq!(&v[..3], &[0.0, 0.0, 0.0]);
    // T(1/2) = 1/2 for every γ.
    assert!((v[8 * 3] - 0.5).abs() < 1e-15);
    assert!((v[8 * 3 + 1] - 0.5).abs() < 1e-12);
    assert!(curve_points(0.4, "", 16).is_err());
}

#[test]
fn sbr_histogram_is_a_probability() {
    let v = sbr_histogram(0.65, 20_000, 7, 64).unwrap();
    assert_eq!(v.len(), 2 + 64);
    assert!(v[0] < 0.0 && (v[0] + v[1]).abs() < 1e-15);
    let total: f64 = v[2..].iter().sum();
    assert!((total - 1.0).abs() < 1e-12);
    assert_eq!(v, sbr_histogram(0.65, 20_000, 7, 64).unwrap());
    assert!(sbr_histogram(0.65, 0, 7, 64).is_err());
}

#[test]
fn occupation_histogram_reports_stability() {
    let v = occupation_histogram(0.66, "0110", 14, 128).unwrap();
    assert_eq!(v.len(), 3 + 128);
    assert!(v[0] < v[1]);
    assert!((0.5..2.0).contains(&v[2]));
    let total: f64 = v[3..].iter().sum();
    assert!((total - 1.0).abs() < 1e-12);
    assert!(occupation_histogram(0.66, "", 25, 128).is_err());
}
