use rug::Integer;

use crate::error::{Error, Result};
use crate::numeric::{BitString, ExactRational};

/// Per-stage parameters: stage `i` consumes `i` input bits and emits
/// `ell = ⌈i + log2(1 + i²)⌉` output bits whose capital growth is held
/// below `delta = 1 + 1/i²`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StageParams {
    pub i: u64,
    pub delta: ExactRational,
    pub ell: u64,
}

impl StageParams {
    pub fn new(i: u64) -> Self {
        assert!(i >= 1, "stages are numbered from 1");
        let sq = Integer::from(i) * i;
        let delta = ExactRational::one() + ExactRational::new(1, sq.clone()).expect("i ≥ 1");
        Self {
            i,
            delta,
            ell: i + ceil_log2(&(sq + 1u32)),
        }
    }

    /// Input bits consumed through stage `i`: `i(i+1)/2`.
    pub fn input_total(i: u64) -> u64 {
        i * (i + 1) / 2
    }

    /// Output bits emitted through stage `i`: `Σ_{j≤i} ell_j`.
    pub fn output_total(i: u64) -> u64 {
        (1..=i).map(|j| StageParams::new(j).ell).sum()
    }

    /// Least stage whose cumulative input covers `n` bits.
    pub fn covering_stage(n: u64) -> u64 {
        let mut i = 0;
        while Self::input_total(i) < n {
            i += 1;
        }
        i
    }
}

/// `⌈log2 m⌉` for `m ≥ 1`.
fn ceil_log2(m: &Integer) -> u64 {
    let below = Integer::from(m - 1u32);
    below.significant_bits() as u64
}

/// `∏_{j=1..i} (1 + 1/j²)`, exact.
pub fn delta_product(i: u64) -> ExactRational {
    (1..=i).fold(ExactRational::one(), |acc, j| acc * StageParams::new(j).delta)
}

/// Big-endian value of `x` plus one, in `[1, 2^|x|]`.
pub fn value_index(x: &BitString) -> Result<Integer> {
    if x.is_empty() {
        return Err(Error::Parameter("value_index needs a nonempty word".into()));
    }
    let mut v = Integer::new();
    for b in x.iter() {
        v <<= 1;
        if b {
            v += 1;
        }
    }
    Ok(v + 1u32)
}

/// Inverse of [`value_index`] for words of length `len`.
pub fn index_word(v: &Integer, len: usize) -> BitString {
    let raw = Integer::from(v - 1u32);
    (0..len).rev().map(|k| raw.get_bit(k as u32)).collect()
}
