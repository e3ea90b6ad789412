//! Compressed oracles built from checkpointed descriptions, replayable
//! decoder runs, and composition with the codec.

mod code;
mod oracle;
mod pipeline;
mod program;

pub use code::{dec, dec_from, enc, BitReader, CodecReader, RecordingReader, SourceReader};
pub use oracle::{
    build_oracle, checkpoint_schedule, chunk_count, decode_oracle, record_decode, reduction_to_description,
    use_report, BlockLayout, DecodeRun, OracleLayout, OracleRun,
};
pub use pipeline::{kg_pipeline, ComposedUse, PipelineRun};
pub use program::{
    describer_by_name, run_program, udec, BestDescriber, Describer, LiteralDescriber, LzDescriber, Method, Program,
    RunLengthDescriber, ORACLE_DECODER_ID,
};
