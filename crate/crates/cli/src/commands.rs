use std::f64::consts::FRAC_1_SQRT_2;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use serde_json::{json, Value};
use takagi_core::bitreg::{encode, BitString};
use takagi_core::measures::{
    char_function, chi_samples, chi_support, nyquist_u_max, occupation_report, occupation_values,
    random_bits, rho_samples, rho_support, sbr_samples, sbr_support, standard_intervals,
    telescope_chi_check, telescope_rho_check, CharFunctionTable, EmpiricalMeasure, Restriction,
    SampleSet, SampleStreams, TelescopeReport,
};
use takagi_core::series::{curve, write_curve_csv, Params, DEFAULT_DEPTH, DEFAULT_TRUNCATION};
use takagi_core::thresholds::{
    case_threshold, cases, gamma_zero, h_separation, remark_bound, s_separation, transversality_bound,
};

use crate::args::*;
use crate::verify::{run_suite, SuiteConfig};
use crate::{sidecar_path, write_file, write_json, CliError, CliResult, Outcome, Sidecar};

const DEFAULT_GAMMA: f64 = 0.6;
const FAMILY_LOCALTIME_XI: u64 = 200;
/// Allowed distance between a recomputed threshold and its printed value.
const THRESHOLD_MATCH: f64 = 1e-3;

pub(crate) fn dispatch(cli: &Cli, start: Instant) -> CliResult<Outcome> {
    let mut run = Run { start, sidecar: None };
    let outcome = match &cli.command {
        Command::Curve(a) => run.curve(a),
        Command::Verify(a) => run.verify(a),
        Command::Thresholds(a) => run.thresholds(a),
        Command::Transversality(a) => run.transversality(a),
        Command::Sbr(a) => run.sbr(a),
        Command::Rho(a) => run.rho(a),
        Command::Chi(a) => run.chi(a),
        Command::Localtime(a) => run.localtime(a),
        Command::Telescope(a) => run.telescope(a),
    }?;
    if let Some((out, mut meta)) = run.sidecar.take() {
        meta.wall_ms = start.elapsed().as_millis();
        write_json(&sidecar_path(&out), &meta)?;
    }
    Ok(outcome)
}

struct Run {
    start: Instant,
    sidecar: Option<(PathBuf, Sidecar)>,
}

fn params_from(gamma: Option<f64>, kappa: Option<f64>, truncation: Option<u32>, depth: u32) -> CliResult<Params> {
    let truncation = truncation.unwrap_or(DEFAULT_TRUNCATION.min(depth));
    Ok(match kappa {
        Some(k) => Params::from_kappa(k, truncation, depth)?,
        None => Params::new(gamma.unwrap_or(DEFAULT_GAMMA), truncation, depth)?,
    })
}

fn params(a: &ParamArgs) -> CliResult<Params> {
    params_from(a.gamma, a.kappa, a.truncation, a.depth.unwrap_or(DEFAULT_DEPTH))
}

/// Reads digits like `0110` into a register of `depth` digits, zero-padded.
fn parse_xi(digits: &str, depth: u32) -> CliResult<BitString> {
    let b: BitString = digits
        .parse()
        .map_err(|e: takagi_core::Error| CliError::Usage(format!("--xi: {e}")))?;
    if b.depth() > depth {
        return Err(CliError::Usage(format!(
            "--xi has {} digits but the register holds {depth}",
            b.depth()
        )));
    }
    Ok(BitString::from_word(b.word(), depth)?)
}

fn positive(name: &str, v: u64) -> CliResult<()> {
    if v == 0 {
        Err(CliError::Usage(format!("{name} must be at least 1")))
    } else {
        Ok(())
    }
}

fn with_suffix(out: &Path, suffix: &str) -> PathBuf {
    out.with_extension(suffix)
}

fn write_hist(path: &Path, h: &EmpiricalMeasure) -> CliResult<()> {
    write_file(path, |w| h.write_csv(w))
}

fn write_char(path: &Path, t: &CharFunctionTable) -> CliResult<()> {
    write_file(path, |w| t.write_csv(w))
}

fn path_str(p: &Path) -> String {
    p.display().to_string()
}

#[derive(Serialize)]
struct CaseRow {
    id: &'static str,
    pattern: &'static str,
    paper_value: f64,
    computed_root: f64,
    matches: bool,
}

/// Whether a sub-probability measure's total mass is `m` within 3 standard errors.
fn mass_close(s: &SampleSet, m: f64) -> bool {
    (s.total_mass() - m).abs() <= 3.0 * s.stderr(m)
}

impl Run {
    fn record(&mut self, out: &Path, p: Option<&Params>, seed: Option<u64>, n: Option<u64>) {
        let meta = Sidecar {
            seed,
            gamma: p.map(|p| p.gamma),
            depth: p.map(|p| p.depth),
            truncation: p.map(|p| p.truncation),
            n_samples: n,
            wall_ms: self.start.elapsed().as_millis(),
        };
        self.sidecar = Some((out.to_path_buf(), meta));
    }

    fn curve(&mut self, a: &CurveArgs) -> CliResult<Outcome> {
        let p = params(&a.params)?;
        positive("--points", a.points as u64)?;
        let xi = match &a.xi {
            Some(s) => parse_xi(s, p.depth)?,
            None => BitString::zeros(p.depth)?,
        };
        let rows = curve(&xi, &p, a.points)?;
        write_file(&a.out, |w| write_curve_csv(w, &rows))?;
        self.record(&a.out, Some(&p), None, Some(a.points as u64));
        Ok(Outcome {
            summary: json!({
                "command": "curve",
                "out": path_str(&a.out),
                "rows": rows.len(),
                "xi": xi.to_string(),
                "s": rows[0].s,
            }),
            passed: true,
        })
    }

    fn verify(&mut self, a: &VerifyArgs) -> CliResult<Outcome> {
        let p = params(&a.params)?;
        positive("--samples", a.samples)?;
        let point = match (&a.xi, a.x) {
            (None, None) => None,
            (xi, x) => Some((
                match xi {
                    Some(s) => parse_xi(s, p.depth)?,
                    None => BitString::zeros(p.depth)?,
                },
                encode(x.unwrap_or(0.0), p.depth)?,
            )),
        };
        let cfg = SuiteConfig { params: p, trials: a.samples, seed: a.seed, terms: a.terms, point };
        let checks = run_suite(&a.suite, &cfg).map_err(|e| match e {
            takagi_core::Error::Domain(m) if m.starts_with("unknown suite") => CliError::Usage(m),
            e => e.into(),
        })?;
        let failures: u64 = checks.iter().map(|c| c.failures).sum();
        let passed = failures == 0;
        write_json(
            &a.out,
            &json!({
                "suite": a.suite,
                "gamma": p.gamma,
                "kappa": p.kappa,
                "depth": p.depth,
                "truncation": p.truncation,
                "trials": a.samples,
                "seed": a.seed,
                "checks": checks,
                "passed": passed,
            }),
        )?;
        self.record(&a.out, Some(&p), Some(a.seed), Some(a.samples));
        Ok(Outcome {
            summary: json!({
                "command": "verify",
                "suite": a.suite,
                "out": path_str(&a.out),
                "checks": checks.len(),
                "cases": checks.iter().map(|c| c.cases).sum::<u64>(),
                "failures": failures,
                "passed": passed,
            }),
            passed,
        })
    }

    fn thresholds(&mut self, a: &ThresholdArgs) -> CliResult<Outcome> {
        if !(a.tol > 0.0) {
            return Err(CliError::Usage(format!("--tol must be positive, got {}", a.tol)));
        }
        let rows = cases()
            .iter()
            .map(|c| {
                let root = case_threshold(c, a.tol)?;
                Ok(CaseRow {
                    id: c.case_id.label(),
                    pattern: c.case_id.pattern(),
                    paper_value: c.paper_threshold,
                    computed_root: root,
                    matches: (root - c.paper_threshold).abs() <= THRESHOLD_MATCH,
                })
            })
            .collect::<CliResult<Vec<_>>>()?;
        let g0 = gamma_zero(a.tol)?;
        let g0_matches = (g0.value - 0.668).abs() <= THRESHOLD_MATCH && g0.value > 2.0 / 3.0;
        let passed = g0_matches && rows.iter().all(|r| r.matches);
        write_json(
            &a.out,
            &json!({
                "cases": rows,
                "gamma0": g0.value,
                "gamma0_case": g0.argmin.label(),
                "gamma0_matches": g0_matches,
                "tol": a.tol,
            }),
        )?;
        self.record(&a.out, None, None, None);
        Ok(Outcome {
            summary: json!({
                "command": "thresholds",
                "out": path_str(&a.out),
                "gamma0": g0.value,
                "mismatched": rows.iter().filter(|r| !r.matches).map(|r| r.id).collect::<Vec<_>>(),
                "passed": passed,
            }),
            passed,
        })
    }

    fn transversality(&mut self, a: &TransversalityArgs) -> CliResult<Outcome> {
        let depth = DEFAULT_DEPTH.max(a.truncation);
        let p = params_from(a.gamma, a.kappa, Some(a.truncation), depth)?;
        let s = s_separation(&p, a.depth)?;
        let h = h_separation(&p, a.depth)?;
        let k = p.kappa;
        let tails = 2.0 * k.powi(p.truncation as i32 + 1) / (1.0 - k);
        let bound = transversality_bound(k);
        let s_holds = s.min_abs >= bound - tails;
        let remark = remark_bound(p.gamma);
        let remark_holds = h.min_abs >= remark - h.slack;
        let body = json!({
            "kappa": k,
            "gamma": p.gamma,
            "depth": a.depth,
            "truncation": p.truncation,
            "min_abs_s_diff": s.min_abs,
            "s_lattice_slack": s.slack,
            "transversality_bound": bound,
            "tails": tails,
            "transversal": s_holds,
            "kappa_within_range": k <= FRAC_1_SQRT_2,
            "min_abs_h_diff": h.min_abs,
            "h_lattice_slack": h.slack,
            "remark_bound": remark,
            "remark_holds": remark_holds,
        });
        write_json(&a.out, &body)?;
        self.record(&a.out, Some(&p), None, Some(1u64 << a.depth));
        Ok(Outcome {
            summary: json!({
                "command": "transversality",
                "out": path_str(&a.out),
                "kappa": k,
                "min_abs_s_diff": s.min_abs,
                "bound": bound - tails,
                "min_abs_h_diff": h.min_abs,
                "passed": s_holds,
            }),
            passed: s_holds,
        })
    }

    fn sbr(&mut self, a: &SampleArgs) -> CliResult<Outcome> {
        let p = params(&a.params)?;
        positive("--samples", a.samples)?;
        positive("--bins", a.bins as u64)?;
        let out = a.out.clone().unwrap_or_else(|| PathBuf::from("sbr.csv"));
        let l = sbr_support(&p);
        let s = sbr_samples(&p, a.samples, a.seed)?;
        let h = s.histogram(-l, l, a.bins)?;
        let t = char_function(&s.values, nyquist_u_max(2.0 * l, a.bins), 2 * a.bins + 1)?;
        write_hist(&out, &h)?;
        write_char(&with_suffix(&out, "char.csv"), &t)?;
        self.record(&out, Some(&p), Some(a.seed), Some(a.samples));
        let passed = h.total_mass() == 1.0;
        Ok(Outcome {
            summary: json!({
                "command": "sbr",
                "out": path_str(&out),
                "support": l,
                "total_mass": h.total_mass(),
                "density_l2": h.density_l2(),
                "fourier_l2": t.l2_estimate(),
                "final_decade_fraction": t.final_decade_fraction(),
                "passed": passed,
            }),
            passed,
        })
    }

    fn rho(&mut self, a: &SampleArgs) -> CliResult<Outcome> {
        let p = params(&a.params)?;
        positive("--samples", a.samples)?;
        positive("--bins", a.bins as u64)?;
        let out = a.out.clone().unwrap_or_else(|| PathBuf::from("rho.csv"));
        let l = rho_support(&p);
        let full = rho_samples(&p, a.samples, a.seed, Restriction::Full)?;
        let hat = rho_samples(&p, a.samples, a.seed, Restriction::Separated)?;
        write_hist(&out, &full.histogram(-l, l, a.bins)?)?;
        write_hist(&with_suffix(&out, "hat.csv"), &hat.histogram(-l, l, a.bins)?)?;
        self.record(&out, Some(&p), Some(a.seed), Some(a.samples));
        let k = p.kappa;
        let gap = transversality_bound(k) - 2.0 * k.powi(p.truncation as i32 + 1) / (1.0 - k);
        let gap_mass = hat.mass_within(gap);
        let gap_holds = gap <= 0.0 || gap_mass == 0.0;
        let mass_ok = mass_close(&hat, 0.25);
        let passed = gap_holds && mass_ok;
        Ok(Outcome {
            summary: json!({
                "command": "rho",
                "out": path_str(&out),
                "rho_hat_mass": hat.total_mass(),
                "rho_hat_mass_ok": mass_ok,
                "gap": gap,
                "rho_hat_mass_in_gap": gap_mass,
                "rho_mass_in_gap": full.mass_within(gap),
                "passed": passed,
            }),
            passed,
        })
    }

    fn chi(&mut self, a: &SampleArgs) -> CliResult<Outcome> {
        let p = params(&a.params)?;
        positive("--samples", a.samples)?;
        positive("--bins", a.bins as u64)?;
        let out = a.out.clone().unwrap_or_else(|| PathBuf::from("chi.csv"));
        let l = chi_support(&p);
        let full = chi_samples(&p, a.samples, a.seed, Restriction::Full)?;
        let hat = chi_samples(&p, a.samples, a.seed, Restriction::Separated)?;
        write_hist(&out, &full.histogram(-l, l, a.bins)?)?;
        write_hist(&with_suffix(&out, "hat.csv"), &hat.histogram(-l, l, a.bins)?)?;
        self.record(&out, Some(&p), Some(a.seed), Some(a.samples));
        let tails = p.gamma.powi(p.truncation as i32 + 1) / (1.0 - p.gamma)
            + p.kappa.powi(p.truncation as i32 + 1) / (1.0 - p.kappa);
        let gap = remark_bound(p.gamma) - tails;
        let gap_mass = hat.mass_within(gap);
        let gap_holds = gap <= 0.0 || gap_mass == 0.0;
        let mass_ok = mass_close(&hat, 0.25);
        let passed = gap_holds && mass_ok;
        Ok(Outcome {
            summary: json!({
                "command": "chi",
                "out": path_str(&out),
                "chi_hat_mass": hat.total_mass(),
                "chi_hat_mass_ok": mass_ok,
                "gap": gap,
                "chi_hat_mass_in_gap": gap_mass,
                "passed": passed,
            }),
            passed,
        })
    }

    fn localtime(&mut self, a: &LocaltimeArgs) -> CliResult<Outcome> {
        let p = params(&a.params)?;
        positive("--bins", a.bins as u64)?;
        let xi = match &a.xi {
            Some(s) => parse_xi(s, p.depth)?,
            None => random_bits(&mut SampleStreams::new(a.seed, FAMILY_LOCALTIME_XI).rng(0), p.depth),
        };
        let values = occupation_values(&xi, &p, a.grid)?;
        let rep = occupation_report(&values, a.bins)?;
        let fine = 2 * a.bins;
        let t = char_function(&values, nyquist_u_max(rep.max - rep.min, fine), 2 * fine + 1)?;
        write_hist(&a.out, &rep.measure)?;
        write_char(&with_suffix(&a.out, "char.csv"), &t)?;
        self.record(&a.out, Some(&p), Some(a.seed), Some(a.grid));
        let stable = (0.8..=1.25).contains(&rep.stability_ratio);
        let decade = t.final_decade_fraction();
        let passed = stable && decade < 0.1;
        Ok(Outcome {
            summary: json!({
                "command": "localtime",
                "out": path_str(&a.out),
                "xi": xi.to_string(),
                "min": rep.min,
                "max": rep.max,
                "l2_norm": rep.l2_norm,
                "refined_l2_norm": rep.refined_l2_norm,
                "stability_ratio": rep.stability_ratio,
                "final_decade_fraction": decade,
                "passed": passed,
            }),
            passed,
        })
    }

    fn telescope(&mut self, a: &TelescopeArgs) -> CliResult<Outcome> {
        let p = params(&a.params)?;
        positive("--samples", a.samples)?;
        let rho = telescope_rho_check(&p, &standard_intervals(rho_support(&p)), a.samples, a.seed, a.terms)?;
        let chi = telescope_chi_check(&p, &standard_intervals(chi_support(&p)), a.samples, a.seed, a.terms)?;
        let passed = rho.all_pass() && chi.all_pass();
        write_json(&a.out, &json!({ "rho": rho, "chi": chi, "passed": passed }))?;
        self.record(&a.out, Some(&p), Some(a.seed), Some(a.samples));
        let brief = |r: &TelescopeReport| -> Value {
            json!({ "passed": r.all_pass(), "worst_ratio": r.worst_ratio() })
        };
        Ok(Outcome {
            summary: json!({
                "command": "telescope",
                "out": path_str(&a.out),
                "rho": brief(&rho),
                "chi": brief(&chi),
                "passed": passed,
            }),
            passed,
        })
    }
}
