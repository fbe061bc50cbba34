//! Identity suites behind `takagi verify`.

use serde::Serialize;
use takagi_core::bitreg::{decode, BitString};
use takagi_core::measures::{
    random_bits, rho_support, chi_support, standard_intervals, telescope_chi_check, telescope_rho_check,
    SampleStreams, TelescopeReport,
};
use takagi_core::rep::{
    h_diff_rep, h_diff_simple_rep, s_diff_rep, s_oneterm_rep, sigma_alpha_times, MacroscopicWitness,
};
use takagi_core::series::{bridge_h, scaling_checks, stable_s, takagi, Params, SeriesValue};
use takagi_core::Result;

pub const SUITES: [&str; 5] = ["attractor", "scaling", "representations", "macroscopic", "telescoping"];

/// Deepest register the representation and macroscopic suites enumerate.
pub const EXHAUSTIVE_DEPTH: u32 = 12;

const FAMILY_VERIFY: u64 = 100;

/// One named check, aggregated over all of its cases.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub suite: &'static str,
    pub name: &'static str,
    pub cases: u64,
    pub failures: u64,
    /// Residual and bound of the case closest to (or furthest past) its bound.
    pub worst_residual: f64,
    pub worst_bound: f64,
}

impl Check {
    fn new(suite: &'static str, name: &'static str) -> Self {
        Self { suite, name, cases: 0, failures: 0, worst_residual: 0.0, worst_bound: 0.0 }
    }

    fn ratio(residual: f64, bound: f64) -> f64 {
        if residual == 0.0 {
            0.0
        } else {
            residual / bound
        }
    }

    pub fn record(&mut self, residual: f64, bound: f64) {
        self.cases += 1;
        if !(residual <= bound) {
            self.failures += 1;
        }
        if self.cases == 1 || Self::ratio(residual, bound) > Self::ratio(self.worst_residual, self.worst_bound) {
            self.worst_residual = residual;
            self.worst_bound = bound;
        }
    }

    fn agree(&mut self, a: SeriesValue, b: SeriesValue) {
        self.record((a.value - b.value).abs(), a.tail_bound + b.tail_bound);
    }

    fn flag(&mut self, ok: bool) {
        self.record(if ok { 0.0 } else { 1.0 }, 0.0);
    }

    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

/// Inputs shared by all suites.
#[derive(Clone, Debug)]
pub struct SuiteConfig {
    pub params: Params,
    pub trials: u64,
    pub seed: u64,
    pub terms: u32,
    /// Extra `(ξ, x)` point checked on top of the random ones.
    pub point: Option<(BitString, BitString)>,
}

impl SuiteConfig {
    fn points(&self) -> impl Iterator<Item = (BitString, BitString)> + '_ {
        let d = self.params.depth;
        let zero = BitString::zeros(d).expect("valid depth");
        let streams = SampleStreams::new(self.seed, FAMILY_VERIFY);
        std::iter::once((zero, zero))
            .chain(self.point)
            .chain((0..self.trials).map(move |i| {
                let mut r = streams.rng(i);
                (random_bits(&mut r, d), random_bits(&mut r, d))
            }))
    }
}

pub fn run_suite(name: &str, cfg: &SuiteConfig) -> Result<Vec<Check>> {
    match name {
        "attractor" => attractor(cfg),
        "scaling" => scaling(cfg),
        "representations" => representations(cfg),
        "macroscopic" => macroscopic(cfg),
        "telescoping" => telescoping(cfg),
        "all" => {
            let mut out = Vec::new();
            for s in SUITES {
                out.extend(run_suite(s, cfg)?);
            }
            Ok(out)
        }
        other => Err(takagi_core::Error::Domain(format!(
            "unknown suite {other:?}; expected one of {} or all",
            SUITES.join(", ")
        ))),
    }
}

fn attractor(cfg: &SuiteConfig) -> Result<Vec<Check>> {
    let mut c = Check::new("attractor", "attractor");
    for (xi, x) in cfg.points() {
        let r = scaling_checks(&xi, &x, &cfg.params)?.attractor;
        c.record(r.residual, r.bound);
    }
    Ok(vec![c])
}

fn scaling(cfg: &SuiteConfig) -> Result<Vec<Check>> {
    let mut s = Check::new("scaling", "s_scaling");
    let mut g = Check::new("scaling", "g_scaling");
    let mut h = Check::new("scaling", "h_scaling");
    for (xi, x) in cfg.points() {
        let rep = scaling_checks(&xi, &x, &cfg.params)?;
        s.record(rep.s_scaling.residual, rep.s_scaling.bound);
        g.record(rep.g_scaling.residual, rep.g_scaling.bound);
        h.record(rep.h_scaling.residual, rep.h_scaling.bound);
    }
    Ok(vec![s, g, h])
}

fn all_strings(depth: u32) -> Vec<BitString> {
    (0..1u128 << depth)
        .map(|i| BitString::from_index(i, depth).expect("depth checked"))
        .collect()
}

fn representations(cfg: &SuiteConfig) -> Result<Vec<Check>> {
    let p = &cfg.params;
    let mut sd = Check::new("representations", "s_diff_rep");
    let mut so = Check::new("representations", "s_oneterm_rep");
    let mut hd = Check::new("representations", "h_diff_rep");
    let mut hs = Check::new("representations", "h_diff_simple_rep");
    if p.depth <= EXHAUSTIVE_DEPTH {
        let strings = all_strings(p.depth);
        let s: Vec<SeriesValue> = strings.iter().map(|xi| stable_s(xi, p)).collect();
        let t: Vec<SeriesValue> = strings.iter().map(|x| takagi(x, p)).collect();
        for (i, xi) in strings.iter().enumerate() {
            so.agree(s_oneterm_rep(xi, p), s[i]);
            for (j, eta) in strings.iter().enumerate() {
                sd.agree(s_diff_rep(xi, eta, p)?, s[i] - s[j]);
            }
        }
        // Both sides are affine in S(ξ) with slope y − x, so a few ξ per
        // (x, y) cover the ξ dependence.
        let mut r = SampleStreams::new(cfg.seed, FAMILY_VERIFY).rng(u64::MAX);
        let xis = [BitString::zeros(p.depth)?, BitString::ones(p.depth)?, random_bits(&mut r, p.depth)];
        for xi in &xis {
            let sx = stable_s(xi, p);
            for (i, x) in strings.iter().enumerate() {
                for (j, y) in strings.iter().enumerate() {
                    let oracle = t[j] - t[i] + sx * (decode(y) - decode(x));
                    hd.agree(h_diff_rep(xi, x, y, p)?, oracle);
                    hs.agree(h_diff_simple_rep(xi, x, y, p)?.total, oracle);
                }
            }
        }
    } else {
        let streams = SampleStreams::new(cfg.seed, FAMILY_VERIFY + 1);
        for i in 0..cfg.trials {
            let mut r = streams.rng(i);
            let (xi, eta, x, y) = (
                random_bits(&mut r, p.depth),
                random_bits(&mut r, p.depth),
                random_bits(&mut r, p.depth),
                random_bits(&mut r, p.depth),
            );
            sd.agree(s_diff_rep(&xi, &eta, p)?, stable_s(&xi, p) - stable_s(&eta, p));
            so.agree(s_oneterm_rep(&xi, p), stable_s(&xi, p));
            let oracle = bridge_h(&xi, &y, p) - bridge_h(&xi, &x, p);
            hd.agree(h_diff_rep(&xi, &x, &y, p)?, oracle);
            hs.agree(h_diff_simple_rep(&xi, &x, &y, p)?.total, oracle);
        }
    }
    Ok(vec![sd, so, hd, hs])
}

fn macroscopic(cfg: &SuiteConfig) -> Result<Vec<Check>> {
    let d = cfg.params.depth.min(EXHAUSTIVE_DEPTH);
    let mut tr = Check::new("macroscopic", "translation");
    let mut al = Check::new("macroscopic", "alpha_conditions");
    let strings = all_strings(d);
    for x in &strings {
        for y in &strings {
            let w = MacroscopicWitness::new(x, y)?;
            tr.flag(w.holds() == (decode(y) > decode(x) + 0.5));
            if w.holds() {
                let sa = sigma_alpha_times(x, y)?;
                let first = sa.alpha.get(1).map_or(true, |a| a >= 2);
                let interleaved = sa
                    .r
                    .iter()
                    .zip(&sa.sigma.times)
                    .all(|(&r, &s)| r == 0 || sa.alpha.times[r - 1] < s);
                al.flag(first && interleaved);
            }
        }
    }
    Ok(vec![tr, al])
}

fn telescope_check(name: &'static str, rep: &TelescopeReport) -> Check {
    let mut c = Check::new("telescoping", name);
    for row in &rep.rows {
        c.record(row.discrepancy, row.slack);
    }
    c
}

fn telescoping(cfg: &SuiteConfig) -> Result<Vec<Check>> {
    let p = &cfg.params;
    let rho = telescope_rho_check(p, &standard_intervals(rho_support(p)), cfg.trials, cfg.seed, cfg.terms)?;
    let chi = telescope_chi_check(p, &standard_intervals(chi_support(p)), cfg.trials, cfg.seed, cfg.terms)?;
    Ok(vec![telescope_check("rho", &rho), telescope_check("chi", &chi)])
}
