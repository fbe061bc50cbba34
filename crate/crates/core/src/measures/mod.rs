//! Monte-Carlo and grid estimates of the push-forward measures: the SBR
//! marginal law of `S`, the difference laws `ρ` and `χ` with their
//! macroscopic restrictions, the occupation measure of `x ↦ H(ξ, x)`, the
//! telescoping identities linking each law to its restriction, and
//! characteristic-function diagnostics.
//!
//! Sampling is deterministic: sample `i` draws from its own ChaCha stream,
//! work is split into fixed index chunks and partial results are merged in
//! chunk order, so the thread count never changes a result.

mod fourier;
mod histogram;
mod occupation;
mod sampling;
mod telescope;

pub use fourier::{char_function, nyquist_u_max, CharFunctionTable};
pub use histogram::EmpiricalMeasure;
pub use occupation::{occupation_local_time, occupation_report, occupation_values, OccupationReport};
pub use sampling::{
    chi_samples, chi_support, random_bits, rho_samples, rho_support, sample_chi, sample_rho,
    sample_sbr_marginal, sbr_samples, sbr_support, Restriction, SampleSet, SampleStreams,
};
pub use telescope::{
    chi_intervals, chi_telescope, rho_intervals, rho_telescope, standard_intervals,
    telescope_check_with, telescope_chi_check, telescope_rho_check, Interval, TelescopeReport,
    TelescopeRow,
};

/// Samples per work unit. Fixed so that chunk boundaries, and therefore
/// merge order, do not depend on the thread count.
pub const CHUNK: u64 = 1 << 14;

/// Applies `f` to consecutive index ranges of length [`CHUNK`] covering
/// `0..n` and returns the results in range order.
pub(crate) fn chunked<T, F>(n: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(std::ops::Range<u64>) -> T + Sync + Send,
{
    let chunks = n.div_ceil(CHUNK);
    let range = move |c: u64| c * CHUNK..((c + 1) * CHUNK).min(n);
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..chunks).into_par_iter().map(|c| f(range(c))).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..chunks).map(|c| f(range(c))).collect()
    }
}
