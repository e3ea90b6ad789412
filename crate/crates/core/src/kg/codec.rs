//! Multi-stage encoder and decoder.
//!
//! Stage `i` takes input bits `[n_{i−1}, n_i)` with `n_i = i(i+1)/2` and
//! emits `ell_i` output bits. When `n` is not triangular the last stage is
//! padded with zeros; the decoder truncates. Reads of the codeword are
//! left-to-right, so oracle use is the number of codeword bits consumed.

use super::params::StageParams;
use super::stage::{decode_block, encode_block, DecodedStage, StepTrace};
use crate::error::{Error, Result};
use crate::martingale::{Cursor, Martingale};
use crate::numeric::{BitSource, BitString, ExactRational};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StageTrace {
    pub i: u64,
    pub delta: ExactRational,
    pub ell: u64,
    pub input: BitString,
    /// Zero bits appended to `input` past the requested length.
    pub padding: usize,
    pub block: BitString,
    /// `d(R↾k_i)`.
    pub capital: ExactRational,
    /// `n_i`.
    pub input_total: u64,
    /// `k_i`.
    pub output_total: u64,
    /// Evaluations of `N(w, y·0)`; one per emitted bit.
    pub n_evaluations: u64,
    /// Per-step record, present only when requested.
    pub steps: Option<Vec<StepTrace>>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CodewordTrace {
    pub stages: Vec<StageTrace>,
}

impl CodewordTrace {
    /// `stage,delta_num,delta_den,ell,n_i,k_i,capital_num,capital_den,evals`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("stage,delta_num,delta_den,ell,n_i,k_i,capital_num,capital_den,evals\n");
        for s in &self.stages {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{}\n",
                s.i,
                s.delta.numer(),
                s.delta.denom(),
                s.ell,
                s.input_total,
                s.output_total,
                s.capital.numer(),
                s.capital.denom(),
                s.n_evaluations
            ));
        }
        out
    }

    /// Per-step CSV: `stage,step,bit,n_left,offset,n_path`, rationals as `p/q`.
    /// Empty unless steps were recorded.
    pub fn steps_csv(&self) -> String {
        let mut out = String::from("stage,step,bit,n_left,offset,n_path\n");
        for s in &self.stages {
            for (j, st) in s.steps.iter().flatten().enumerate() {
                out.push_str(&format!(
                    "{},{},{},{},{},{}\n",
                    s.i, j, st.bit as u8, st.n_left, st.offset, st.n_path
                ));
            }
        }
        out
    }
}

#[derive(Debug, Clone)]
pub struct Encoded {
    pub codeword: BitString,
    pub trace: CodewordTrace,
}

/// Encodes the first `n` bits of `x` against `d`.
pub fn encode(d: &dyn Martingale, x: &dyn BitSource, n: usize) -> Result<Encoded> {
    encode_traced(d, x, n, false)
}

/// As [`encode`], optionally keeping every step's N values.
pub fn encode_traced(d: &dyn Martingale, x: &dyn BitSource, n: usize, record_steps: bool) -> Result<Encoded> {
    if n == 0 {
        return Err(Error::Parameter("nothing to encode".into()));
    }
    let mut cursor = d.cursor();
    let mut dw = cursor.value();
    let mut codeword = BitString::new();
    let mut trace = CodewordTrace::default();
    let mut consumed = 0usize;
    let mut output_total = 0u64;
    let mut i = 0u64;
    while consumed < n {
        i += 1;
        if !dw.is_positive() {
            return Err(Error::NonPositive(codeword.len()));
        }
        let params = StageParams::new(i);
        let mut input = BitString::with_capacity(i as usize);
        let mut padding = 0;
        for k in consumed..consumed + i as usize {
            if k < n {
                let bit = x
                    .get(k)
                    .ok_or_else(|| Error::Range(format!("input ends before bit {k}")))?;
                input.push(bit);
            } else {
                input.push(false);
                padding += 1;
            }
        }
        consumed += i as usize;
        let outcome = encode_block(&mut cursor, &dw, &params, &input)?;
        codeword.extend_from(&outcome.block);
        output_total += params.ell;
        trace.stages.push(StageTrace {
            i,
            ell: params.ell,
            delta: params.delta,
            input,
            padding,
            block: outcome.block,
            capital: outcome.capital.clone(),
            input_total: StageParams::input_total(i),
            output_total,
            n_evaluations: params.ell,
            steps: record_steps.then_some(outcome.steps),
        });
        dw = outcome.capital;
    }
    Ok(Encoded { codeword, trace })
}

/// Incremental decoder: recovers input bits stage by stage, reading the
/// codeword only as far as needed.
pub struct StreamDecoder<'a> {
    codeword: &'a dyn BitSource,
    cursor: Box<dyn Cursor>,
    capital: ExactRational,
    stage: u64,
    read: usize,
    decoded: BitString,
    record: Option<Vec<DecodedStage>>,
}

impl<'a> StreamDecoder<'a> {
    pub fn new(d: &dyn Martingale, codeword: &'a dyn BitSource) -> Self {
        let cursor = d.cursor();
        Self {
            codeword,
            capital: cursor.value(),
            cursor,
            stage: 0,
            read: 0,
            decoded: BitString::new(),
            record: None,
        }
    }

    /// Keeps every decoded stage's interval and N values.
    pub fn recording(mut self) -> Self {
        self.record = Some(Vec::new());
        self
    }

    /// Decodes whole stages until at least `n` input bits are available.
    pub fn ensure(&mut self, n: usize) -> Result<()> {
        while self.decoded.len() < n {
            self.next_stage()?;
        }
        Ok(())
    }

    fn next_stage(&mut self) -> Result<()> {
        if !self.capital.is_positive() {
            return Err(Error::NonPositive(self.read));
        }
        let params = StageParams::new(self.stage + 1);
        let mut block = BitString::with_capacity(params.ell as usize);
        for k in self.read..self.read + params.ell as usize {
            let bit = self
                .codeword
                .get(k)
                .ok_or_else(|| Error::Range(format!("codeword ends before bit {k}")))?;
            block.push(bit);
        }
        let stage = decode_block(&mut self.cursor, &self.capital, &params, &block)?;
        self.read += block.len();
        self.stage = params.i;
        self.capital = stage.capital.clone();
        self.decoded.extend_from(&stage.x);
        if let Some(rec) = &mut self.record {
            rec.push(stage);
        }
        Ok(())
    }

    pub fn decoded(&self) -> &BitString {
        &self.decoded
    }

    /// Codeword bits consumed so far.
    pub fn used(&self) -> usize {
        self.read
    }

    pub fn stages_decoded(&self) -> u64 {
        self.stage
    }

    pub fn recorded(&self) -> &[DecodedStage] {
        self.record.as_deref().unwrap_or(&[])
    }

    pub fn get(&mut self, index: usize) -> Result<bool> {
        self.ensure(index + 1)?;
        Ok(self.decoded.get(index).expect("ensured"))
    }
}

#[derive(Debug, Clone)]
pub struct Decoded {
    pub bits: BitString,
    /// Codeword bits read: `k_i` for the least stage with `n_i ≥ n`.
    pub used: usize,
    pub stages: Vec<DecodedStage>,
}

/// Recovers the first `n` input bits from `codeword`.
pub fn decode(d: &dyn Martingale, codeword: &dyn BitSource, n: usize) -> Result<Decoded> {
    decode_traced(d, codeword, n, false)
}

pub fn decode_traced(d: &dyn Martingale, codeword: &dyn BitSource, n: usize, record: bool) -> Result<Decoded> {
    let mut dec = StreamDecoder::new(d, codeword);
    if record {
        dec = dec.recording();
    }
    dec.ensure(n)?;
    let mut bits = dec.decoded().clone();
    bits.truncate(n);
    Ok(Decoded {
        bits,
        used: dec.used(),
        stages: dec.record.take().unwrap_or_default(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::martingale::{all_in, bias_bettor, kt_bettor, uniform, MartingaleSpec};
    use crate::numeric::{rat, seeded_bits};

    fn w(s: &str) -> BitString {
        s.parse().unwrap()
    }

    #[test]
    fn three_bits_under_uniform() {
        let u = uniform();
        let enc = encode(u.as_ref(), &w("011"), 3).unwrap();
        assert_eq!(enc.codeword, w("0110011"));
        assert_eq!(enc.trace.stages.len(), 2);
        assert!(enc.trace.stages.iter().all(|s| s.padding == 0));
        let dec = decode(u.as_ref(), &enc.codeword, 3).unwrap();
        assert_eq!(dec.bits, w("011"));
        assert_eq!(dec.used, 7);
    }

    #[test]
    fn padding_and_truncation() {
        let d = kt_bettor();
        let x = w("10110");
        let enc = encode(d.as_ref(), &x, 5).unwrap();
        // stages 1..3 cover 6 bits; one pad bit
        assert_eq!(enc.trace.stages.len(), 3);
        assert_eq!(enc.trace.stages[2].padding, 1);
        assert_eq!(enc.codeword.len(), 2 + 5 + 7);
        let dec = decode(d.as_ref(), &enc.codeword, 5).unwrap();
        assert_eq!(dec.bits, x);
        assert_eq!(dec.used, 14);
    }

    #[test]
    fn round_trip_savings_mixture() {
        let d = MartingaleSpec::from_json(
            r#"{"kind":"savings","inner":{"kind":"mixture","members":[{"kind":"kt"},{"kind":"bias","beta":"2/3"}]}}"#,
        )
        .unwrap()
        .build()
        .unwrap();
        let x = seeded_bits(42, 300);
        let enc = encode(d.as_ref(), &x, 300).unwrap();
        let dec = decode(d.as_ref(), &enc.codeword, 300).unwrap();
        assert_eq!(dec.bits, x);
        assert_eq!(dec.used, enc.codeword.len());
    }

    #[test]
    fn encoder_and_decoder_agree_on_every_n() {
        let d = bias_bettor(rat(2, 3).unwrap()).unwrap();
        let x = seeded_bits(3, 28);
        let enc = encode_traced(d.as_ref(), &x, 28, true).unwrap();
        let dec = decode_traced(d.as_ref(), &enc.codeword, 28, true).unwrap();
        assert_eq!(enc.trace.stages.len(), dec.stages.len());
        for (s, ds) in enc.trace.stages.iter().zip(&dec.stages) {
            let n_left: Vec<_> = s.steps.as_ref().unwrap().iter().map(|st| st.n_left.clone()).collect();
            assert_eq!(n_left, ds.n_left);
            assert_eq!(s.capital, ds.capital);
        }
    }

    #[test]
    fn zero_capital_is_a_positivity_error() {
        // all-in on 1: the first losing block must contain a 0, zeroing d
        let err = encode(all_in(true).as_ref(), &w("0101"), 4).unwrap_err();
        assert_eq!(err, Error::NonPositive(2));
    }

    #[test]
    fn short_inputs_are_range_errors() {
        let u = uniform();
        assert!(matches!(encode(u.as_ref(), &w("01"), 3), Err(Error::Range(_))));
        assert!(matches!(decode(u.as_ref(), &w("011001"), 3), Err(Error::Range(_))));
        assert!(encode(u.as_ref(), &w("01"), 0).is_err());
    }

    #[test]
    fn trace_csv_rows() {
        let enc = encode(uniform().as_ref(), &w("011"), 3).unwrap();
        let csv = enc.trace.to_csv();
        let lines: Vec<_> = csv.lines().collect();
        assert_eq!(lines[0], "stage,delta_num,delta_den,ell,n_i,k_i,capital_num,capital_den,evals");
        assert_eq!(lines[1], "1,2,1,2,1,2,1,1,2");
        assert_eq!(lines[2], "2,5,4,5,3,7,1,1,5");
        assert_eq!(lines.len(), 3);
    }
}
