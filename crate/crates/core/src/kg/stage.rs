//! One codec stage: binary search over the losing extensions of `w`.
//!
//! `N(w, y, ℓ, δ) = 2^(ℓ−|y|) · (1 − d(wy) / (d(w)·δ))` lower-bounds the
//! number of `ℓ`-bit extensions of `y` that keep `d` below `δ·d(w)`, and is
//! additive over the two children of `y`. The encoder walks `y` towards the
//! `val(x)`-th losing path; the decoder replays the same comparisons as an
//! interval `(start, end]` that ends up holding exactly `val(x)`.

use rug::Integer;

use super::params::{index_word, value_index, StageParams};
use crate::error::{Error, Result};
use crate::martingale::{Cursor, Martingale};
use crate::numeric::{BitString, ExactRational};

/// `N(w, y, ℓ, δ)` from `d(w)`, `d(wy)` and `|y|`.
pub(crate) fn n_value(
    dw: &ExactRational,
    dwy: &ExactRational,
    ell: u64,
    ylen: u64,
    delta: &ExactRational,
) -> ExactRational {
    let ratio = dwy / &(dw * delta);
    (ExactRational::one() - ratio).mul_pow2(ell as i64 - ylen as i64)
}

/// Exact `N(w, y, ℓ, δ)`. May be zero or negative off the encoder's path.
pub fn count_bound(
    d: &dyn Martingale,
    w: &BitString,
    y: &BitString,
    ell: u64,
    delta: &ExactRational,
) -> Result<ExactRational> {
    if y.len() as u64 > ell {
        return Err(Error::Parameter(format!("|y| = {} exceeds ell = {ell}", y.len())));
    }
    if delta <= &ExactRational::one() {
        return Err(Error::Parameter(format!("delta {delta} must exceed 1")));
    }
    let dw = d.eval(w);
    if !dw.is_positive() {
        return Err(Error::NonPositive(w.len()));
    }
    Ok(n_value(&dw, &d.eval(&w.concat(y)), ell, y.len() as u64, delta))
}

/// One step of a stage: `N(w, y·0)` before the choice, the chosen bit, and
/// the left boundary `a` and on-path `N(w, y)` after it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StepTrace {
    pub n_left: ExactRational,
    pub bit: bool,
    pub offset: ExactRational,
    pub n_path: ExactRational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StageOutcome {
    pub block: BitString,
    /// `d(w·block)`.
    pub capital: ExactRational,
    pub steps: Vec<StepTrace>,
}

/// Runs the encoder binary search from a cursor positioned at `w` with
/// capital `dw`, leaving the cursor at `w·y`. Every loop invariant is checked
/// exactly; a failure means `d` is not a martingale.
pub(crate) fn encode_block(
    cursor: &mut Box<dyn Cursor>,
    dw: &ExactRational,
    params: &StageParams,
    x: &BitString,
) -> Result<StageOutcome> {
    let val = ExactRational::from(value_index(x)?);
    let invariant = |j: u64, what: &str| Error::Invariant(format!(
        "stage {} step {j}: {what}; the strategy is not an exact martingale",
        params.i
    ));
    let mut offset = ExactRational::zero();
    let mut n_path = n_value(dw, dw, params.ell, 0, &params.delta);
    if !(offset < val && val <= &offset + &n_path) {
        return Err(invariant(0, "initial interval misses val(x)"));
    }
    let mut block = BitString::with_capacity(params.ell as usize);
    let mut steps = Vec::with_capacity(params.ell as usize);
    let mut capital = dw.clone();
    for j in 0..params.ell {
        let mut left = cursor.boxed();
        left.push(false);
        let left_value = left.value();
        let n_left = n_value(dw, &left_value, params.ell, j + 1, &params.delta);
        let bit = val > &offset + &n_left;
        if bit {
            offset += &n_left;
            cursor.push(true);
            capital = cursor.value();
            n_path = n_value(dw, &capital, params.ell, j + 1, &params.delta);
        } else {
            *cursor = left;
            capital = left_value;
            n_path = n_left.clone();
        }
        if !(offset < val && val <= &offset + &n_path) {
            return Err(invariant(j + 1, "a < val(x) ≤ a + N fails"));
        }
        if !n_path.is_positive() {
            return Err(invariant(j + 1, "on-path N is not positive"));
        }
        block.push(bit);
        steps.push(StepTrace {
            n_left,
            bit,
            offset: offset.clone(),
            n_path: n_path.clone(),
        });
    }
    if capital >= dw * &params.delta {
        return Err(invariant(params.ell, "emitted block is not a losing path"));
    }
    Ok(StageOutcome {
        block,
        capital,
        steps,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecodedStage {
    pub x: BitString,
    pub capital: ExactRational,
    /// `N(w, y·0)` at every step, for agreement checks with the encoder.
    pub n_left: Vec<ExactRational>,
    pub start: ExactRational,
    pub end: ExactRational,
}

/// Interval replay of a stage from a cursor at `w`; `block` must hold
/// exactly `ell` bits.
pub(crate) fn decode_block(
    cursor: &mut Box<dyn Cursor>,
    dw: &ExactRational,
    params: &StageParams,
    block: &BitString,
) -> Result<DecodedStage> {
    if block.len() as u64 != params.ell {
        return Err(Error::Parameter(format!(
            "stage {} block has {} bits, expected {}",
            params.i,
            block.len(),
            params.ell
        )));
    }
    let mut start = ExactRational::zero();
    let mut end = ExactRational::pow2(params.i as i64);
    let mut n_left_trace = Vec::with_capacity(block.len());
    for (j, bit) in block.iter().enumerate() {
        let mut left = cursor.boxed();
        left.push(false);
        let n_left = n_value(dw, &left.value(), params.ell, j as u64 + 1, &params.delta);
        if bit {
            start += &n_left;
            cursor.push(true);
        } else {
            end = &start + &n_left;
            *cursor = left;
        }
        n_left_trace.push(n_left);
    }
    let invalid = |reason: String| Error::InvalidCodeword {
        stage: params.i,
        reason,
    };
    let candidate = Integer::from(start.floor() + 1u32);
    let top = Integer::from(1) << params.i as u32;
    if ExactRational::from(candidate.clone()) > end || candidate < 1 || candidate > top {
        return Err(invalid(format!("interval ({start}, {end}] holds no admissible value")));
    }
    if ExactRational::from(Integer::from(&candidate + 1u32)) <= end {
        return Err(invalid(format!("interval ({start}, {end}] holds several values")));
    }
    Ok(DecodedStage {
        x: index_word(&candidate, params.i as usize),
        capital: cursor.value(),
        n_left: n_left_trace,
        start,
        end,
    })
}

/// Extends `w` by the losing block that encodes `x` (stage `|x|`).
pub fn encode_stage(d: &dyn Martingale, w: &BitString, x: &BitString) -> Result<BitString> {
    if x.is_empty() {
        return Err(Error::Parameter("stage input must be nonempty".into()));
    }
    let (mut cursor, dw) = positioned(d, w)?;
    let params = StageParams::new(x.len() as u64);
    Ok(encode_block(&mut cursor, &dw, &params, x)?.block)
}

/// Recovers the `i` input bits carried by `block` after prefix `w`.
pub fn decode_stage(d: &dyn Martingale, w: &BitString, block: &BitString, i: u64) -> Result<BitString> {
    if i == 0 {
        return Err(Error::Parameter("stages are numbered from 1".into()));
    }
    let (mut cursor, dw) = positioned(d, w)?;
    Ok(decode_block(&mut cursor, &dw, &StageParams::new(i), block)?.x)
}

fn positioned(d: &dyn Martingale, w: &BitString) -> Result<(Box<dyn Cursor>, ExactRational)> {
    let mut cursor = d.cursor();
    for b in w.iter() {
        cursor.push(b);
    }
    let dw = cursor.value();
    if !dw.is_positive() {
        return Err(Error::NonPositive(w.len()));
    }
    Ok((cursor, dw))
}
