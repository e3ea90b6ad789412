//! Two-step reduction: `X` from the oracle `Y`, and `Y` from a codec
//! codeword `R`. Composed oracle use is the number of `R` bits the codec
//! decoder reads to supply the `Y` bits the oracle decoder touches.

use super::code::{CodecReader, SourceReader};
use super::oracle::{build_oracle, decode_oracle, ratio, OracleLayout};
use super::program::Describer;
use crate::error::{Error, Result};
use crate::kg::{encode, CodewordTrace, StreamDecoder};
use crate::martingale::Martingale;
use crate::numeric::{BitSource, BitString};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComposedUse {
    pub n: usize,
    /// `Y` bits read by the oracle decoder.
    pub oracle_used: usize,
    /// `R` bits read by the codec decoder.
    pub codeword_used: usize,
}

impl ComposedUse {
    pub fn ratio(&self) -> f64 {
        self.codeword_used as f64 / self.n as f64
    }
}

#[derive(Debug, Clone)]
pub struct PipelineRun {
    pub oracle: BitString,
    pub layout: OracleLayout,
    pub codeword: BitString,
    pub trace: CodewordTrace,
    /// One row per checkpoint up to `n`, then `n` itself if not a checkpoint.
    pub uses: Vec<ComposedUse>,
}

impl PipelineRun {
    /// Composed use at the requested length.
    pub fn composed_use(&self) -> usize {
        self.uses.last().map_or(0, |u| u.codeword_used)
    }

    /// `n,used,ratio` per measured length.
    pub fn report_csv(&self) -> String {
        let mut out = String::from("n,used,ratio\n");
        for u in &self.uses {
            out.push_str(&format!("{},{},{}\n", u.n, u.codeword_used, ratio(u.codeword_used, u.n)));
        }
        out
    }
}

pub fn kg_pipeline(
    x: &dyn BitSource,
    schedule: &[u64],
    describer: &dyn Describer,
    d: &dyn Martingale,
    n: usize,
) -> Result<PipelineRun> {
    if n == 0 {
        return Err(Error::Parameter("pipeline needs n ≥ 1".into()));
    }
    let (oracle, layout) = build_oracle(x, schedule, describer)?;
    let needed = decode_oracle(&mut SourceReader::new(&oracle), n)?.used;
    let encoded = encode(d, &oracle, needed)?;

    let mut targets: Vec<usize> = schedule.iter().map(|&m| m as usize).filter(|&m| m < n).collect();
    targets.push(n);
    let mut decoder = StreamDecoder::new(d, &encoded.codeword);
    let mut uses = Vec::with_capacity(targets.len());
    for t in targets {
        let mut reader = CodecReader::new(&mut decoder);
        let run = decode_oracle(&mut reader, t)?;
        if run.output != x.prefix(t)? {
            return Err(Error::Invariant(format!("pipeline output differs from source at length {t}")));
        }
        uses.push(ComposedUse {
            n: t,
            oracle_used: run.used,
            codeword_used: decoder.used(),
        });
    }
    Ok(PipelineRun {
        oracle,
        layout,
        codeword: encoded.codeword,
        trace: encoded.trace,
        uses,
    })
}
