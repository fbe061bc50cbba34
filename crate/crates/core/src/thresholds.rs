//! Parameter analysis: the transversality bound, the eleven case
//! inequalities of the positivity argument with their roots, and exhaustive
//! separation measurements on finite digit trees.

use serde::{Deserialize, Serialize};

use crate::bitreg::BitString;
use crate::error::{Error, Result};
use crate::series::{stable_s, takagi, Params};

/// Bisection bracket shared by all cases.
pub const BRACKET: (f64, f64) = (0.6, 0.8);
/// Default root tolerance.
pub const DEFAULT_TOL: f64 = 1e-9;

/// The subcases of the positivity lemma.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CaseId {
    C1,
    C2,
    C3a,
    C3b,
    C4a,
    C4b,
    C4c,
    C4d,
    C4e,
    C4f,
    C4g,
}

impl CaseId {
    pub const ALL: [CaseId; 11] = [
        CaseId::C1,
        CaseId::C2,
        CaseId::C3a,
        CaseId::C3b,
        CaseId::C4a,
        CaseId::C4b,
        CaseId::C4c,
        CaseId::C4d,
        CaseId::C4e,
        CaseId::C4f,
        CaseId::C4g,
    ];

    pub fn label(self) -> &'static str {
        match self {
            CaseId::C1 => "1",
            CaseId::C2 => "2",
            CaseId::C3a => "3a",
            CaseId::C3b => "3b",
            CaseId::C4a => "4a",
            CaseId::C4b => "4b",
            CaseId::C4c => "4c",
            CaseId::C4d => "4d",
            CaseId::C4e => "4e",
            CaseId::C4f => "4f",
            CaseId::C4g => "4g",
        }
    }

    /// The jump pattern `σ₂, σ₃, …` the case covers.
    pub fn pattern(self) -> &'static str {
        match self {
            CaseId::C1 => "s2=5, s3>=6",
            CaseId::C2 => "s2=4, s3>=5",
            CaseId::C3a => "s2=3, s3>=5",
            CaseId::C3b => "s2=3, s3=4, s4=5, s5>=6",
            CaseId::C4a => "s2=2, s3>=5",
            CaseId::C4b => "s2=2, s3=4, s4=5, s5>=6",
            CaseId::C4c => "s2=2, s3=3, s4>=6",
            CaseId::C4d => "s2=2, s3=3, s4=5, s5>=6",
            CaseId::C4e => "s2=2, s3=3, s4=4, s5>=6",
            CaseId::C4f => "s2=2, s3=3, s4=4, s5=5, s6>=7",
            CaseId::C4g => "s2=2, s3=3, s4=4, s5=6, s6>=7",
        }
    }

    /// The cutoff printed with the case.
    pub fn paper_threshold(self) -> f64 {
        match self {
            CaseId::C1 => 0.702,
            CaseId::C2 => 0.668,
            CaseId::C3a => 0.681,
            CaseId::C3b => 0.675,
            CaseId::C4a => 0.697,
            CaseId::C4b => 0.674,
            CaseId::C4c => 0.699,
            CaseId::C4d => 0.673,
            CaseId::C4e => 0.673,
            CaseId::C4f => 0.682,
            CaseId::C4g => 0.669,
        }
    }

    /// The case's lower bound for `J`, prefactor `1/(2γ−1)` included.
    pub fn lhs(self, g: f64) -> f64 {
        let p = 1.0 / (2.0 * g - 1.0);
        let tail = |a: i32| g.powi(a) / (1.0 - g) * (6.0 * g + 1.0) / (2.0 * g + 1.0);
        let g2 = g * g;
        let g3 = g2 * g;
        let g4 = g3 * g;
        let g5 = g4 * g;
        let g6 = g5 * g;
        match self {
            CaseId::C1 => p * (g + g5 - tail(6)),
            CaseId::C2 => p * (g + g4 - tail(5)),
            CaseId::C3a => p * (g + g3 - tail(5)),
            CaseId::C3b => p * (g + g3 - g4 - g5 - tail(6)),
            CaseId::C4a => p * (g + g2 - tail(5)),
            CaseId::C4b => p * (g + g2 - g4 - tail(5)) - g3 - g3 / 2.0,
            CaseId::C4c => p * (g + g2 - g3 - tail(6)),
            CaseId::C4d => p * (g + g2 - g3 - g5 - tail(6)) - g4 * (2.0 * g - 1.0),
            CaseId::C4e => p * (g + g2 - g3 - g4 - tail(6)),
            CaseId::C4f => p * (g + g2 - g3 - g4 - g5 - tail(7)),
            CaseId::C4g => p * (g + g2 - g3 - g5 - g6 - tail(7)),
        }
    }
}

/// A case together with its printed threshold.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CaseSpec {
    pub case_id: CaseId,
    pub paper_threshold: f64,
}

impl CaseSpec {
    pub fn lhs(&self, g: f64) -> f64 {
        self.case_id.lhs(g)
    }
}

pub fn cases() -> Vec<CaseSpec> {
    CaseId::ALL
        .iter()
        .map(|&case_id| CaseSpec { case_id, paper_threshold: case_id.paper_threshold() })
        .collect()
}

/// Root of `f` in `[lo, hi]` by bisection, to absolute tolerance `tol`.
pub fn bisect<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, tol: f64) -> Result<f64> {
    if !(tol > 0.0) {
        return Err(Error::Domain(format!("tolerance {tol} must be positive")));
    }
    let (mut a, mut b) = (lo, hi);
    let (fa, fb) = (f(a), f(b));
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::Analysis(format!(
            "no sign change on [{lo}, {hi}]: f = {fa}, {fb}"
        )));
    }
    while b - a > tol {
        let m = 0.5 * (a + b);
        let fm = f(m);
        if fm == 0.0 {
            return Ok(m);
        }
        if fm.signum() == fa.signum() {
            a = m;
        } else {
            b = m;
        }
    }
    Ok(0.5 * (a + b))
}

/// The root of the case expression in [`BRACKET`].
pub fn case_threshold(c: &CaseSpec, tol: f64) -> Result<f64> {
    bisect(|g| c.lhs(g), BRACKET.0, BRACKET.1, tol)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GammaZero {
    pub value: f64,
    pub argmin: CaseId,
}

/// The smallest case threshold and the case attaining it.
pub fn gamma_zero(tol: f64) -> Result<GammaZero> {
    let mut best: Option<GammaZero> = None;
    for c in cases() {
        let r = case_threshold(&c, tol)?;
        if best.map_or(true, |b| r < b.value) {
            best = Some(GammaZero { value: r, argmin: c.case_id });
        }
    }
    best.ok_or_else(|| Error::Analysis("no cases".into()))
}

/// Uniform lower bound `2κ(1−2κ²)/(1−κ)` on `|S(ξ) − S(η)|` over `|ξ − η| > 1/2`.
pub fn transversality_bound(kappa: f64) -> f64 {
    2.0 * kappa * (1.0 - 2.0 * kappa * kappa) / (1.0 - kappa)
}

/// The closing remark's separation bound `(1/2)(2−3γ)/((2γ−1)(1−γ))`.
pub fn remark_bound(gamma: f64) -> f64 {
    0.5 * (2.0 - 3.0 * gamma) / ((2.0 * gamma - 1.0) * (1.0 - gamma))
}

/// A minimum over a finite digit tree and the slack separating it from the
/// infimum over all points.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Extremum {
    pub min_abs: f64,
    pub slack: f64,
}

/// Exhaustive results at one depth.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Separation {
    pub depth: u32,
    pub s_diff: Extremum,
    pub h_diff: Extremum,
}

const MAX_EXHAUSTIVE_DEPTH: u32 = 16;

fn check_depth(depth: u32) -> Result<()> {
    if depth == 0 || depth > MAX_EXHAUSTIVE_DEPTH {
        Err(Error::Domain(format!(
            "exhaustive depth {depth} outside 1..={MAX_EXHAUSTIVE_DEPTH}"
        )))
    } else {
        Ok(())
    }
}

/// `S` at every depth-`depth` lattice point, each read as a zero-padded
/// expansion and summed to the full truncation of `p`.
fn s_table(p: &Params, depth: u32) -> Result<Vec<f64>> {
    let p = p.resized(p.truncation, p.depth.max(depth))?;
    (0..1u128 << depth)
        .map(|i| {
            let lattice = BitString::from_index(i, depth)?;
            Ok(stable_s(&BitString::from_word(lattice.word(), p.depth)?, &p).value)
        })
        .collect()
}

/// Distance from lattice minima to the infimum over all points, plus the
/// truncation tail of `S`.
fn s_slack(p: &Params, depth: u32) -> f64 {
    let k = p.kappa;
    2.0 * (k.powi(depth as i32 + 1) + k.powi(p.truncation as i32 + 1)) / (1.0 - k)
        + 64.0 * f64::EPSILON * p.s_max()
}

/// `min |S(ξ) − S(η)|` over all depth-`depth` pairs with `|ξ − η| > 1/2`.
pub fn s_separation(p: &Params, depth: u32) -> Result<Extremum> {
    check_depth(depth)?;
    let s = s_table(p, depth)?;
    let n = s.len();
    let half = n / 2;
    let mut min = f64::INFINITY;
    // ξ = i/n, η = j/n with i − j > n/2; the other order is symmetric.
    for i in half + 1..n {
        let si = s[i];
        for &sj in &s[..i - half] {
            min = min.min((si - sj).abs());
        }
    }
    Ok(Extremum { min_abs: min, slack: s_slack(p, depth) })
}

/// `min |H(ξ,y) − H(ξ,x)|` over all depth-`depth` triples with `y > x + 1/2`.
///
/// Uses `H(ξ,y) − H(ξ,x) = T(y) − T(x) + (y − x) S(ξ)`: for each `(x, y)` the
/// minimizing `ξ` is found by binary search in the sorted values of `S`.
pub fn h_separation(p: &Params, depth: u32) -> Result<Extremum> {
    check_depth(depth)?;
    let mut s = s_table(p, depth)?;
    s.sort_by(f64::total_cmp);
    let pt = p.resized(p.truncation.max(depth), p.depth.max(depth))?;
    let n = 1usize << depth;
    let t: Vec<f64> = (0..n)
        .map(|i| Ok(takagi(&BitString::from_index(i as u128, depth)?, &pt).value))
        .collect::<Result<_>>()?;
    let half = n / 2;
    let mut min = f64::INFINITY;
    for j in half + 1..n {
        for i in 0..j - half {
            let gap = (j - i) as f64 / n as f64;
            let dt = t[j] - t[i];
            let target = -dt / gap;
            let k = s.partition_point(|&v| v < target);
            for &v in s[k.saturating_sub(1)..(k + 1).min(n)].iter() {
                min = min.min((dt + gap * v).abs());
            }
        }
    }
    let slack = 2.0 * p.gamma.powi(depth as i32 + 1) / (1.0 - p.gamma)
        + s_slack(p, depth)
        + 64.0 * f64::EPSILON / (1.0 - p.gamma);
    Ok(Extremum { min_abs: min, slack })
}

/// Both exhaustive minima at parameter `γ`.
pub fn empirical_separation(gamma: f64, depth: u32) -> Result<Separation> {
    check_depth(depth)?;
    let p = Params::with_gamma(gamma)?;
    Ok(Separation {
        depth,
        s_diff: s_separation(&p, depth)?,
        h_diff: h_separation(&p, depth)?,
    })
}
