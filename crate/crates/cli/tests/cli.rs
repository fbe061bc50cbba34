use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn takagi(dir: &Path, args: &[&str], threads: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_takagi"));
    cmd.args(args).current_dir(dir).env_remove("TAKAGI_THREADS");
    if let Some(t) = threads {
        cmd.env("TAKAGI_THREADS", t);
    }
    cmd.output().expect("binary runs")
}

fn summary(out: &Output) -> Value {
    let text = String::from_utf8(out.stdout.clone()).unwrap();
    assert_eq!(text.lines().count(), 1, "{text}");
    serde_json::from_str(text.trim()).unwrap()
}

fn read(dir: &Path, name: &str) -> String {
    std::fs::read_to_string(dir.join(name)).unwrap()
}

#[test]
fn curve_writes_csv_and_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let out = takagi(dir.path(), &["curve", "--gamma", "0.6", "--points", "4096", "--out", "curve.csv"], None);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(summary(&out)["rows"], 4096);
    let csv = read(dir.path(), "curve.csv");
    assert_eq!(csv.lines().next(), Some("x,T,H,S"));
    assert_eq!(csv.lines().count(), 4097);
    assert!(!csv.contains('\r'));
    let meta: Value = serde_json::from_str(&read(dir.path(), "curve.run.json")).unwrap();
    for key in ["seed", "gamma", "depth", "truncation", "n_samples", "wall_ms"] {
        assert!(meta.get(key).is_some(), "{key}");
    }
    assert_eq!(meta["gamma"], 0.6);
    assert_eq!(meta["depth"], 64);
    assert_eq!(meta["truncation"], 48);
}

#[test]
fn curve_accepts_kappa_and_xi() {
    let dir = tempfile::tempdir().unwrap();
    let out = takagi(dir.path(), &["curve", "--kappa", "0.625", "--xi", "1", "--points", "8"], None);
    assert_eq!(out.status.code(), Some(0));
    let s = summary(&out)["s"].as_f64().unwrap();
    assert!((s - (0.625 / 0.375 - 2.0 * 0.625)).abs() < 1e-8);
}

#[test]
fn thresholds_report_every_case() {
    let dir = tempfile::tempdir().unwrap();
    let out = takagi(dir.path(), &["thresholds", "--tol", "1e-9", "--out", "th.json"], None);
    // Five printed thresholds are not reproduced, so the check fails.
    assert_eq!(out.status.code(), Some(1));
    let th: Value = serde_json::from_str(&read(dir.path(), "th.json")).unwrap();
    let cases = th["cases"].as_array().unwrap();
    assert_eq!(cases.len(), 11);
    for c in cases {
        assert!(c["id"].is_string() && c["paper_value"].is_f64() && c["computed_root"].is_f64());
    }
    assert!((th["gamma0"].as_f64().unwrap() - 0.65776).abs() < 1e-5);
}

#[test]
fn verify_scaling_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = takagi(dir.path(), &["verify", "--suite", "scaling", "--gamma", "0.7", "--trials", "1000", "--seed", "7"], None);
    assert_eq!(out.status.code(), Some(0));
    let s = summary(&out);
    assert_eq!(s["failures"], 0);
    assert_eq!(s["cases"], 3 * 1001);
}

#[test]
fn verify_attractor_at_origin() {
    let dir = tempfile::tempdir().unwrap();
    let out = takagi(dir.path(), &["verify", "--suite", "attractor", "--trials", "1", "--xi", "0", "--x", "0"], None);
    assert_eq!(out.status.code(), Some(0));
    let report: Value = serde_json::from_str(&read(dir.path(), "verify.json")).unwrap();
    assert_eq!(report["checks"][0]["cases"], 3);
}

#[test]
fn verify_representations_exhaustive_at_small_depth() {
    let dir = tempfile::tempdir().unwrap();
    let out = takagi(dir.path(), &["verify", "--suite", "representations", "--depth", "8"], None);
    assert_eq!(out.status.code(), Some(0));
    // 2^16 S pairs, 2^8 single S values and 3 · 2^16 pairs for each H form.
    assert_eq!(summary(&out)["cases"], 65536 + 256 + 2 * 3 * 65536);
}

#[test]
fn usage_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        vec!["bogus"],
        vec!["curve", "--nope"],
        vec!["curve", "--gamma", "0.6", "--kappa", "0.7"],
        vec!["curve", "--gamma", "1.5"],
        vec!["curve", "--depth", "16", "--truncation", "32"],
        vec!["curve", "--xi", "01x"],
        vec!["verify", "--suite", "nothing"],
        vec!["thresholds", "--tol", "0"],
        vec!["sbr", "--samples", "0"],
    ] {
        let out = takagi(dir.path(), &args, None);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(out.stdout.is_empty());
        assert!(!out.stderr.is_empty());
    }
    let out = takagi(dir.path(), &["curve", "--points", "4"], Some("zero"));
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn help_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(takagi(dir.path(), &["--help"], None).status.code(), Some(0));
}

#[test]
fn sampling_commands_write_histograms() {
    let dir = tempfile::tempdir().unwrap();
    let out = takagi(dir.path(), &["sbr", "--kappa", "0.65", "--samples", "20000", "--bins", "64"], None);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(read(dir.path(), "sbr.csv").lines().count(), 65);
    assert_eq!(read(dir.path(), "sbr.char.csv").lines().next(), Some("u,phi_sq,cumulative"));
    assert_eq!(read(dir.path(), "sbr.char.csv").lines().count(), 130);

    let out = takagi(dir.path(), &["rho", "--kappa", "0.65", "--samples", "20000", "--bins", "64"], None);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(summary(&out)["rho_hat_mass_in_gap"], 0.0);
    assert!(dir.path().join("rho.hat.csv").exists());

    // The separation claimed for chi-hat does not hold, so this check fails.
    let out = takagi(dir.path(), &["chi", "--gamma", "0.6", "--samples", "20000", "--bins", "64"], None);
    assert_eq!(out.status.code(), Some(1));
    assert!(summary(&out)["chi_hat_mass_in_gap"].as_f64().unwrap() > 0.0);
}

#[test]
fn transversality_and_telescope() {
    let dir = tempfile::tempdir().unwrap();
    let out = takagi(dir.path(), &["transversality", "--kappa", "0.6", "--depth", "10"], None);
    assert_eq!(out.status.code(), Some(0));
    let out = takagi(dir.path(), &["telescope", "--gamma", "0.75", "--samples", "20000", "--terms", "30"], None);
    assert_eq!(out.status.code(), Some(0));
    let report: Value = serde_json::from_str(&read(dir.path(), "telescope.json")).unwrap();
    assert_eq!(report["rho"]["rows"].as_array().unwrap().len(), 16);
}

#[test]
fn localtime_reports_diagnostics() {
    let dir = tempfile::tempdir().unwrap();
    let out = takagi(dir.path(), &["localtime", "--gamma", "0.6", "--xi", "0", "--grid", "65536", "--bins", "64"], None);
    assert!(matches!(out.status.code(), Some(0 | 1)));
    let s = summary(&out);
    assert!(s["stability_ratio"].is_f64() && s["final_decade_fraction"].is_f64());
    assert_eq!(read(dir.path(), "localtime.csv").lines().count(), 65);
}

#[test]
fn same_seed_same_bytes_across_thread_counts() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let args = ["chi", "--gamma", "0.66", "--samples", "50000", "--seed", "3", "--bins", "32"];
    takagi(a.path(), &args, Some("1"));
    takagi(b.path(), &args, Some("3"));
    for f in ["chi.csv", "chi.hat.csv"] {
        assert_eq!(read(a.path(), f), read(b.path(), f), "{f}");
    }
}
