//! Exact betting strategies, a stage-wise codec that embeds data into
//! sequences those strategies cannot win on, a compressed-oracle layout
//! with measured oracle use, and finite-state transducer frequency
//! analysis.

pub mod error;
pub mod finite_state;
pub mod hybrid;
pub mod kg;
pub mod martingale;
pub mod numeric;

pub use error::{Error, Result};
pub use numeric::{rat, seeded_bits, BitSource, BitString, ExactRational};
