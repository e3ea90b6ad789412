//! Finite bit words, indexable infinite bit sources and the two on-disk
//! bit file formats.
//!
//! Slices are half-open: `slice(w, from, to)` is `w[from..to)`. The
//! inclusive notation `X[n:m]` (both ends included) maps to
//! `slice(w, n, m + 1)`; [`BitString::slice_inclusive`] is the single
//! adapter for it.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::error::{Error, Result};

#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitString {
    bits: Vec<bool>,
}

impl BitString {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_capacity(n: usize) -> Self {
        Self {
            bits: Vec::with_capacity(n),
        }
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            bits: vec![false; n],
        }
    }

    pub fn ones(n: usize) -> Self {
        Self {
            bits: vec![true; n],
        }
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn get(&self, i: usize) -> Option<bool> {
        self.bits.get(i).copied()
    }

    pub fn push(&mut self, bit: bool) {
        self.bits.push(bit);
    }

    pub fn extend_from(&mut self, other: &BitString) {
        self.bits.extend_from_slice(&other.bits);
    }

    pub fn truncate(&mut self, n: usize) {
        self.bits.truncate(n);
    }

    pub fn as_slice(&self) -> &[bool] {
        &self.bits
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        self.bits.iter().copied()
    }

    pub fn concat(&self, other: &BitString) -> BitString {
        let mut out = self.clone();
        out.extend_from(other);
        out
    }

    /// Half-open slice `[from, to)`.
    pub fn slice(&self, from: usize, to: usize) -> Result<BitString> {
        if from > to || to > self.len() {
            return Err(Error::Bounds {
                from,
                to,
                len: self.len(),
            });
        }
        Ok(self.bits[from..to].iter().copied().collect())
    }

    /// Inclusive slice `X[from:to]`, i.e. bits `from..=to`.
    pub fn slice_inclusive(&self, from: usize, to: usize) -> Result<BitString> {
        self.slice(from, to + 1)
    }

    /// The first `n` bits.
    pub fn prefix(&self, n: usize) -> Result<BitString> {
        self.slice(0, n)
    }

    pub fn is_prefix_of(&self, other: &BitString) -> bool {
        other.bits.starts_with(&self.bits)
    }

    pub fn count_ones(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    /// Adler-style 64-bit digest over the packed form, length included.
    pub fn checksum(&self) -> u64 {
        const MOD: u64 = 4_294_967_291;
        let (mut a, mut b) = (1u64, 0u64);
        for byte in self.to_packed() {
            a = (a + byte as u64) % MOD;
            b = (b + a) % MOD;
        }
        (b << 32) | a
    }

    pub fn from_bits(bits: Vec<bool>) -> Self {
        Self { bits }
    }

    pub fn into_bits(self) -> Vec<bool> {
        self.bits
    }

    /// Big-endian binary expansion of `v` without leading zeros; `0` maps to
    /// the empty word.
    pub fn from_uint(v: u64) -> Self {
        let width = 64 - v.leading_zeros() as usize;
        (0..width).rev().map(|k| (v >> k) & 1 == 1).collect()
    }

    /// Big-endian value, failing when it does not fit in 64 bits.
    pub fn to_uint(&self) -> Result<u64> {
        if self.len() > 64 {
            return Err(Error::Range(format!("{}-bit word exceeds u64", self.len())));
        }
        Ok(self.iter().fold(0u64, |acc, b| (acc << 1) | b as u64))
    }

    /// ASCII `0`/`1` text with an optional trailing newline.
    pub fn from_ascii(text: &str) -> Result<Self> {
        let body = text.strip_suffix('\n').unwrap_or(text);
        let body = body.strip_suffix('\r').unwrap_or(body);
        body.chars()
            .enumerate()
            .map(|(i, c)| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::Input(format!("unexpected {other:?} at offset {i}"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(Self::from_bits)
    }

    pub fn to_ascii(&self) -> String {
        self.to_string()
    }

    /// Packed form: 8-byte little-endian bit count, then the bits packed
    /// MSB-first, zero-padded in the last byte.
    pub fn to_packed(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(8 + self.len().div_ceil(8));
        out.extend_from_slice(&(self.len() as u64).to_le_bytes());
        for chunk in self.bits.chunks(8) {
            let byte = chunk
                .iter()
                .enumerate()
                .fold(0u8, |acc, (k, &b)| acc | ((b as u8) << (7 - k)));
            out.push(byte);
        }
        out
    }

    pub fn from_packed(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < 8 {
            return Err(Error::Input("packed bit file shorter than its header".into()));
        }
        let (header, body) = bytes.split_at(8);
        let n = u64::from_le_bytes(header.try_into().expect("8-byte header")) as usize;
        if body.len() != n.div_ceil(8) {
            return Err(Error::Input(format!(
                "packed bit file declares {n} bits but carries {} bytes",
                body.len()
            )));
        }
        Ok((0..n).map(|i| (body[i / 8] >> (7 - i % 8)) & 1 == 1).collect())
    }

    /// Reads a bit file; `.bin` files use the packed layout, anything else
    /// is ASCII.
    pub fn read_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        if is_packed_path(path) {
            Self::from_packed(&std::fs::read(path)?)
        } else {
            Self::from_ascii(&std::fs::read_to_string(path)?)
        }
    }

    pub fn write_file(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        if is_packed_path(path) {
            std::fs::write(path, self.to_packed())?;
        } else {
            std::fs::write(path, format!("{self}\n"))?;
        }
        Ok(())
    }
}

fn is_packed_path(path: &Path) -> bool {
    path.extension().is_some_and(|e| e == "bin")
}

impl FromIterator<bool> for BitString {
    fn from_iter<I: IntoIterator<Item = bool>>(iter: I) -> Self {
        Self {
            bits: iter.into_iter().collect(),
        }
    }
}

impl FromStr for BitString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::from_ascii(s)
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: String = self.iter().map(|b| if b { '1' } else { '0' }).collect();
        f.write_str(&s)
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "\"{self}\"")
    }
}

/// Deterministic, randomly addressable bit sequence. Finite sources answer
/// `None` past their end.
pub trait BitSource: Send + Sync {
    fn get(&self, index: usize) -> Option<bool>;

    /// Short identity string: generator name plus parameters.
    fn name(&self) -> String;

    fn prefix(&self, n: usize) -> Result<BitString> {
        (0..n)
            .map(|i| {
                self.get(i)
                    .ok_or_else(|| Error::Range(format!("source {} ends before bit {i}", self.name())))
            })
            .collect()
    }
}

impl BitSource for BitString {
    fn get(&self, index: usize) -> Option<bool> {
        BitString::get(self, index)
    }

    fn name(&self) -> String {
        format!("word(len={})", self.len())
    }

    fn prefix(&self, n: usize) -> Result<BitString> {
        self.slice(0, n)
            .map_err(|_| Error::Range(format!("word of length {} has no {n}-bit prefix", self.len())))
    }
}

/// The constant sequence `b^∞`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConstantBits(pub bool);

impl BitSource for ConstantBits {
    fn get(&self, _index: usize) -> Option<bool> {
        Some(self.0)
    }

    fn name(&self) -> String {
        if self.0 { "ones" } else { "zeros" }.to_string()
    }

    fn prefix(&self, n: usize) -> Result<BitString> {
        Ok(if self.0 {
            BitString::ones(n)
        } else {
            BitString::zeros(n)
        })
    }
}

/// ChaCha8 keystream keyed by `seed`; bit `i` is bit `i mod 32` (MSB
/// first) of keystream word `i / 32`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SeededBits {
    pub seed: u64,
}

impl SeededBits {
    pub fn new(seed: u64) -> Self {
        Self { seed }
    }
}

impl BitSource for SeededBits {
    fn get(&self, index: usize) -> Option<bool> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_word_pos((index / 32) as u128);
        let word = rng.next_u32();
        Some((word >> (31 - index % 32)) & 1 == 1)
    }

    fn name(&self) -> String {
        format!("seeded({})", self.seed)
    }

    fn prefix(&self, n: usize) -> Result<BitString> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let mut out = BitString::with_capacity(n);
        while out.len() < n {
            let word = rng.next_u32();
            for k in (0..32).rev() {
                if out.len() == n {
                    break;
                }
                out.push((word >> k) & 1 == 1);
            }
        }
        Ok(out)
    }
}

/// `n` pseudorandom bits from the `seed` stream; prefix-consistent in `n`.
pub fn seeded_bits(seed: u64, n: usize) -> BitString {
    SeededBits::new(seed).prefix(n).expect("seeded source is infinite")
}
