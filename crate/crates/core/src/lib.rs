//! Numerical laboratory for Takagi-type curves `T(x) = Σ γⁿ Φ(2ⁿx)`, the
//! baker map, the stable-manifold series `S` and bridge function `H`, and
//! the measures they push Lebesgue measure onto.
//!
//! Points are finite dyadic expansions ([`bitreg::BitString`]) so that the
//! baker map acts exactly. Series come with certified truncation radii
//! ([`series::SeriesValue`]).

// `!(a < b)` guards are meant to reject NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bitreg;
pub mod error;
pub mod measures;
pub mod rep;
pub mod series;
pub mod thresholds;

pub use bitreg::{baker_k, decode, encode, meet, phi, phi_prime, BitString, Phase};
pub use error::{Error, Result};
pub use series::{Params, SeriesValue};
