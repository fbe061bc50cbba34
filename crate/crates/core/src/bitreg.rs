//! Finite dyadic expansions and the baker map acting on them.
//!
//! A point of `[0, 1]` is stored as a left-aligned `u128` register: bit 1 of
//! the expansion is the most significant bit. The baker map on pairs
//! `(xi, x)` is then a pure register shift: forward steps move leading digits
//! of `xi` (reversed) to the front of `x`, backward steps do the opposite.
//! Every step is either exact or refused, nothing is ever zero-padded.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Register capacity in bits.
pub const MAX_DEPTH: u32 = 128;

/// `2^-128`, the weight of the last register bit.
const ULP128: f64 = 1.0 / 340_282_366_920_938_463_463_374_607_431_768_211_456.0;

/// Truncated dyadic expansion `0.b1 b2 ... bD` of a point in `[0, 1]`.
///
/// Digits past `depth` are always zero. A depth of zero is allowed and
/// represents the empty expansion, which arises after shifting all digits
/// out of a register.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct BitString {
    word: u128,
    depth: u32,
}

fn mask(depth: u32) -> u128 {
    match depth {
        0 => 0,
        d if d >= 128 => u128::MAX,
        d => !(u128::MAX >> d),
    }
}

impl BitString {
    /// Builds from a left-aligned register; digits past `depth` are cleared.
    pub fn from_word(word: u128, depth: u32) -> Result<Self> {
        if depth > MAX_DEPTH {
            return Err(Error::Precision(format!(
                "depth {depth} exceeds register capacity {MAX_DEPTH}"
            )));
        }
        Ok(Self { word: word & mask(depth), depth })
    }

    /// The point `index / 2^depth`, i.e. the binary digits of `index`.
    ///
    /// Used to enumerate all strings of a given depth in increasing order.
    pub fn from_index(index: u128, depth: u32) -> Result<Self> {
        if depth == 0 {
            return Self::from_word(0, 0);
        }
        if depth > MAX_DEPTH || (depth < 128 && index >> depth != 0) {
            return Err(Error::Domain(format!(
                "index {index} does not fit in {depth} digits"
            )));
        }
        Self::from_word(index << (128 - depth), depth)
    }

    pub fn zeros(depth: u32) -> Result<Self> {
        Self::from_word(0, depth)
    }

    pub fn ones(depth: u32) -> Result<Self> {
        Self::from_word(u128::MAX, depth)
    }

    /// Builds from a slice of digits, each 0 or 1.
    pub fn from_bits(bits: &[u8]) -> Result<Self> {
        let depth = u32::try_from(bits.len()).unwrap_or(u32::MAX);
        if depth > MAX_DEPTH {
            return Err(Error::Precision(format!(
                "{} digits exceed register capacity {MAX_DEPTH}",
                bits.len()
            )));
        }
        let mut word = 0u128;
        for (i, &b) in bits.iter().enumerate() {
            match b {
                0 => {}
                1 => word |= 1u128 << (127 - i),
                _ => return Err(Error::Domain(format!("digit {b} is not binary"))),
            }
        }
        Ok(Self { word, depth })
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    /// The left-aligned register.
    pub fn word(&self) -> u128 {
        self.word
    }

    /// Inverse of [`BitString::from_index`].
    pub fn index(&self) -> u128 {
        if self.depth == 0 {
            0
        } else {
            self.word >> (128 - self.depth)
        }
    }

    /// Digit `k`, 1-indexed. Digits past the depth read as 0.
    pub fn bit(&self, k: u32) -> u8 {
        if k == 0 || k > self.depth {
            0
        } else {
            ((self.word >> (128 - k)) & 1) as u8
        }
    }

    pub fn bits(&self) -> impl Iterator<Item = u8> + '_ {
        (1..=self.depth).map(move |k| self.bit(k))
    }

    /// Bitwise complement within the depth, the point `1 - 2^-D - v`.
    pub fn complement(&self) -> Self {
        Self { word: !self.word & mask(self.depth), depth: self.depth }
    }

    /// Drops the first `k` digits: the point `2^k v mod 1`.
    pub fn shifted(&self, k: u32) -> Result<Self> {
        if k > self.depth {
            return Err(Error::Precision(format!(
                "cannot shift {k} digits out of a depth-{} string",
                self.depth
            )));
        }
        let word = if k >= 128 { 0 } else { self.word << k };
        Ok(Self { word, depth: self.depth - k })
    }

    /// The first `k` digits.
    pub fn prefix(&self, k: u32) -> Self {
        let k = k.min(self.depth);
        Self { word: self.word & mask(k), depth: k }
    }

    /// Copy with digit `k` (1-indexed, within the depth) set to `b`.
    pub fn with_bit(&self, k: u32, b: u8) -> Result<Self> {
        if k == 0 || k > self.depth {
            return Err(Error::Domain(format!(
                "digit {k} outside depth {}",
                self.depth
            )));
        }
        let m = 1u128 << (128 - k);
        let word = if b == 0 { self.word & !m } else { self.word | m };
        Ok(Self { word, depth: self.depth })
    }

    /// Concatenation `self` followed by `tail`.
    pub fn concat(&self, tail: &Self) -> Result<Self> {
        let depth = self.depth + tail.depth;
        if depth > MAX_DEPTH {
            return Err(Error::Precision(format!(
                "concatenation needs {depth} digits, capacity is {MAX_DEPTH}"
            )));
        }
        let tail_word = if self.depth >= 128 { 0 } else { tail.word >> self.depth };
        Ok(Self { word: self.word | tail_word, depth })
    }

    /// The first `k` digits in reverse order.
    pub fn reversed_prefix(&self, k: u32) -> Self {
        let k = k.min(self.depth);
        if k == 0 {
            return Self::default();
        }
        let lead = self.word >> (128 - k);
        let rev = lead.reverse_bits() >> (128 - k);
        Self { word: rev << (128 - k), depth: k }
    }

    /// Φ of the value, as an exact fraction `n / 2^128` with `n <= 2^127`.
    pub fn phi_fixed(&self) -> u128 {
        if self.word >> 127 == 0 {
            self.word
        } else {
            self.word.wrapping_neg()
        }
    }

    /// Φ′ of the value under the right-continuous convention: `+1` on
    /// `[0, 1/2)` and `-1` on `[1/2, 1)`.
    pub fn phi_prime(&self) -> f64 {
        1.0 - 2.0 * f64::from(self.bit(1))
    }
}

/// Converts a fixed-point numerator over `2^128` to `f64`.
pub fn fixed_to_f64(n: u128) -> f64 {
    n as f64 * ULP128
}

/// Converts a signed fixed-point numerator over `2^128` to `f64`.
pub fn signed_fixed_to_f64(n: i128) -> f64 {
    n as f64 * ULP128
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.bits() {
            f.write_str(if b == 1 { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitString(\"{self}\")")
    }
}

impl FromStr for BitString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let digits = s
            .bytes()
            .map(|c| match c {
                b'0' => Ok(0),
                b'1' => Ok(1),
                _ => Err(Error::Domain(format!("invalid digit {:?} in bit string", c as char))),
            })
            .collect::<Result<Vec<u8>>>()?;
        Self::from_bits(&digits)
    }
}

impl Serialize for BitString {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for BitString {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Truncated binary expansion of `v`, using the terminating form for dyadic
/// rationals. `v = 1` has no terminating form and maps to the all-ones string.
pub fn encode(v: f64, depth: u32) -> Result<BitString> {
    if !(0.0..=1.0).contains(&v) {
        return Err(Error::Domain(format!("cannot encode {v}: outside [0, 1]")));
    }
    if depth == 0 || depth > MAX_DEPTH {
        return Err(Error::Domain(format!("depth {depth} outside 1..={MAX_DEPTH}")));
    }
    if v == 1.0 {
        return BitString::ones(depth);
    }
    // Doubling and subtracting one are exact in binary floating point.
    let mut rest = v;
    let mut word = 0u128;
    for k in 0..depth {
        rest *= 2.0;
        if rest >= 1.0 {
            word |= 1u128 << (127 - k);
            rest -= 1.0;
        }
        if rest == 0.0 {
            break;
        }
    }
    BitString::from_word(word, depth)
}

/// Value of the expansion rounded down to 53 digits, exact for depth <= 53.
pub fn decode(b: &BitString) -> f64 {
    ((b.word >> 75) as u64) as f64 * (1.0 / 9_007_199_254_740_992.0)
}

/// Distance to the nearest integer.
pub fn phi(v: f64) -> f64 {
    let f = v - v.floor();
    f.min(1.0 - f)
}

/// Derivative of [`phi`] with the right-continuous convention at breakpoints.
pub fn phi_prime(v: f64) -> f64 {
    let f = v - v.floor();
    if f < 0.5 {
        1.0
    } else {
        -1.0
    }
}

/// Bitwise AND of two expansions of equal depth.
pub fn meet(x: &BitString, y: &BitString) -> Result<BitString> {
    if x.depth != y.depth {
        return Err(Error::Domain(format!(
            "meet of depths {} and {}",
            x.depth, y.depth
        )));
    }
    Ok(BitString { word: x.word & y.word, depth: x.depth })
}

/// A point `(xi, x)` of the square, with `xi` holding the backward digits
/// `ξ̄_0, ξ̄_{-1}, ...` and `x` the forward digits `x̄_1, x̄_2, ...`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Default, Serialize, Deserialize)]
pub struct Phase {
    pub xi: BitString,
    pub x: BitString,
}

impl Phase {
    pub fn new(xi: BitString, x: BitString) -> Self {
        Self { xi, x }
    }

    /// Number of forward steps that stay exact.
    pub fn valid_forward(&self) -> u32 {
        self.xi.depth.min(MAX_DEPTH - self.x.depth)
    }

    /// Number of backward steps that stay exact.
    pub fn valid_backward(&self) -> u32 {
        self.x.depth.min(MAX_DEPTH - self.xi.depth)
    }

    /// The iterate `B^k`. Forward steps expand `xi` and contract `x`.
    pub fn baker_k(&self, k: i32) -> Result<Phase> {
        let steps = k.unsigned_abs();
        if k >= 0 {
            if steps > self.valid_forward() {
                return Err(Error::Precision(format!(
                    "{steps} forward steps requested, {} certified",
                    self.valid_forward()
                )));
            }
            Ok(Phase {
                xi: self.xi.shifted(steps)?,
                x: self.xi.reversed_prefix(steps).concat(&self.x)?,
            })
        } else {
            if steps > self.valid_backward() {
                return Err(Error::Precision(format!(
                    "{steps} backward steps requested, {} certified",
                    self.valid_backward()
                )));
            }
            Ok(Phase {
                xi: self.x.reversed_prefix(steps).concat(&self.xi)?,
                x: self.x.shifted(steps)?,
            })
        }
    }
}

/// Free-function form of [`Phase::baker_k`].
pub fn baker_k(p: &Phase, k: i32) -> Result<Phase> {
    p.baker_k(k)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bs(s: &str) -> BitString {
        s.parse().unwrap()
    }

    #[test]
    fn encode_examples() {
        assert_eq!(encode(0.375, 4).unwrap(), bs("0110"));
        assert_eq!(encode(0.0, 8).unwrap(), bs("00000000"));
        assert_eq!(encode(1.0 / 3.0, 6).unwrap(), bs("010101"));
        assert!(encode(-0.1, 4).is_err());
        assert!(encode(f64::NAN, 4).is_err());
    }

    #[test]
    fn decode_examples() {
        assert_eq!(decode(&bs("0110")), 0.375);
        assert_eq!(decode(&bs("0000")), 0.0);
        assert_eq!(decode(&bs("010101")), 21.0 / 64.0);
    }

    #[test]
    fn baker_examples() {
        let p = Phase::new(bs("1011"), bs("01"));
        let q = p.baker_k(1).unwrap();
        assert_eq!(decode(&q.xi), 0.375);
        assert_eq!(decode(&q.x), 0.625);

        let p = Phase::new(bs("1"), bs("11"));
        let q = p.baker_k(-1).unwrap();
        assert_eq!(decode(&q.xi), 0.75);
        assert_eq!(decode(&q.x), 0.5);

        assert_eq!(p.baker_k(0).unwrap(), p);
    }

    #[test]
    fn baker_refuses_uncertified_steps() {
        let p = Phase::new(bs("10"), bs("1"));
        assert!(matches!(p.baker_k(3), Err(Error::Precision(_))));
        assert!(matches!(p.baker_k(-2), Err(Error::Precision(_))));
    }

    #[test]
    fn phi_examples() {
        assert!((phi(0.3) - 0.3).abs() < 1e-15);
        assert!((phi(0.7) - 0.3).abs() < 1e-15);
        assert_eq!(phi(1.5), 0.5);
        assert_eq!(phi(0.0), 0.0);
        assert_eq!(phi_prime(0.25), 1.0);
        assert_eq!(phi_prime(0.75), -1.0);
        assert_eq!(phi_prime(0.5), -1.0);
    }

    #[test]
    fn meet_examples() {
        assert_eq!(meet(&bs("0110"), &bs("0011")).unwrap(), bs("0010"));
        let b = bs("1101");
        assert_eq!(meet(&b, &b).unwrap(), b);
        assert_eq!(meet(&b, &bs("0000")).unwrap(), bs("0000"));
        assert!(meet(&b, &bs("000")).is_err());
    }

    #[test]
    fn phi_fixed_matches_phi() {
        for s in ["0", "1", "01", "11", "0011", "1101", "1000"] {
            let b = bs(s);
            assert_eq!(fixed_to_f64(b.phi_fixed()), phi(decode(&b)), "{s}");
        }
    }

    #[test]
    fn json_round_trip() {
        let b = bs("0110");
        let s = serde_json::to_string(&b).unwrap();
        assert_eq!(s, "\"0110\"");
        let back: BitString = serde_json::from_str(&s).unwrap();
        assert_eq!(back, b);
    }
}
