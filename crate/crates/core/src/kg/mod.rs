//! Stage-wise codec that embeds input bits into a sequence on which a given
//! strictly positive martingale never gains more than a bounded factor.

mod codec;
mod params;
mod stage;

pub use codec::{
    decode, decode_traced, encode, encode_traced, CodewordTrace, Decoded, Encoded, StageTrace,
    StreamDecoder,
};
pub use params::{delta_product, index_word, value_index, StageParams};
pub use stage::{count_bound, decode_stage, encode_stage, DecodedStage, StageOutcome, StepTrace};
