#![allow(dead_code)]

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use takagi_core::BitString;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_bits(rng: &mut ChaCha8Rng, depth: u32) -> BitString {
    let word = (u128::from(rng.next_u64()) << 64) | u128::from(rng.next_u64());
    BitString::from_word(word, depth).unwrap()
}

pub fn bs(s: &str) -> BitString {
    s.parse().unwrap()
}

/// All strings of the given depth, in increasing order.
pub fn all(depth: u32) -> impl Iterator<Item = BitString> {
    (0..1u128 << depth).map(move |i| BitString::from_index(i, depth).unwrap())
}
