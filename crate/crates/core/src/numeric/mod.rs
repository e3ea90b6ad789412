//! Exact arithmetic and bit-sequence foundations.

mod bits;
mod rational;

pub use bits::{seeded_bits, BitSource, BitString, ConstantBits, SeededBits};
pub use rational::{rat, ExactRational};
