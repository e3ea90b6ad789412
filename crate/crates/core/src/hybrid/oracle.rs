//! Checkpointed oracle `Y = v_1·π_1·v_2·π_2·…` and its decoder.
//!
//! Block `i` covers `(m_{i−1}, m_i]`. The flag word `v_i` carries raw
//! chunks of doubling length: `0·c_0·0·c_1·…·0·c_{ℓ−1}·1` where `c_j` is
//! `X[m_{i−1} + 2^j − 1, m_{i−1} + 2^{j+1} − 1)` and `ℓ = ⌊½·log2 m_i⌋`.
//! After the closing `1` comes a program `π_i` for `X↾m_i`.

use serde::{Deserialize, Serialize};

use super::code::{need, BitReader, RecordingReader, SourceReader};
use super::program::{udec, Describer, Program, ORACLE_DECODER_ID};
use crate::error::{Error, Result};
use crate::numeric::{BitSource, BitString, ExactRational};

/// Greedy checkpoint choice: each pick is the least remaining candidate at
/// least the square of the sum of earlier picks. Stops when no candidate
/// qualifies.
pub fn checkpoint_schedule(candidates: &[u64]) -> Result<Vec<u64>> {
    if candidates.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Schedule("candidates must be strictly ascending".into()));
    }
    let mut chosen = Vec::new();
    let mut sum: u64 = 0;
    for &c in candidates {
        if c == 0 {
            continue;
        }
        match sum.checked_mul(sum) {
            Some(sq) if c >= sq => {
                chosen.push(c);
                sum += c;
            }
            _ => {}
        }
    }
    if chosen.is_empty() {
        return Err(Error::Schedule("no usable checkpoint among the candidates".into()));
    }
    Ok(chosen)
}

fn validate_schedule(schedule: &[u64]) -> Result<()> {
    if schedule.is_empty() {
        return Err(Error::Schedule("empty schedule".into()));
    }
    let mut sum: u64 = 0;
    for (i, &m) in schedule.iter().enumerate() {
        let floor = sum.checked_mul(sum).ok_or_else(|| Error::Schedule("schedule overflows".into()))?;
        if m == 0 || m < floor || (i > 0 && m <= schedule[i - 1]) {
            return Err(Error::Schedule(format!(
                "checkpoint {m} violates growth: needs ≥ {floor} and above the previous checkpoint"
            )));
        }
        sum += m;
    }
    Ok(())
}

/// `⌊½·log2 m⌋`.
pub fn chunk_count(m: u64) -> u32 {
    m.ilog2() / 2
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockLayout {
    pub checkpoint: u64,
    pub chunks: u32,
    /// End of the raw-chunk coverage, `m_{i−1} + 2^ℓ − 1`.
    pub covered: u64,
    pub v_start: usize,
    pub v_len: usize,
    pub pi_start: usize,
    pub pi_len: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleLayout {
    pub describer: String,
    pub checkpoints: Vec<u64>,
    pub blocks: Vec<BlockLayout>,
    /// `max_j |π_j| / m_j`.
    pub s: ExactRational,
    pub s_approx: f64,
}

impl OracleLayout {
    /// `Σ_{j≤i} (|π_j| + |v_j|)`, `i` zero-based.
    pub fn prefix_cost(&self, i: usize) -> usize {
        self.blocks[..=i].iter().map(|b| b.v_len + b.pi_len).sum()
    }

    /// `s·m_i + 5·√m_i`.
    pub fn use_bound(&self, i: usize) -> f64 {
        let m = self.checkpoints[i] as f64;
        self.s_approx * m + 5.0 * m.sqrt()
    }

    pub fn total_len(&self) -> usize {
        self.blocks.last().map_or(0, |b| b.pi_start + b.pi_len)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("layout serializes")
    }
}

pub fn build_oracle(
    x: &dyn BitSource,
    schedule: &[u64],
    describer: &dyn Describer,
) -> Result<(BitString, OracleLayout)> {
    validate_schedule(schedule)?;
    let mut y = BitString::new();
    let mut blocks = Vec::with_capacity(schedule.len());
    let mut s = ExactRational::zero();
    let mut prev = 0u64;
    for &m in schedule {
        let chunks = chunk_count(m);
        let covered = prev + (1u64 << chunks) - 1;
        if covered > m {
            return Err(Error::Schedule(format!("chunks of block ending at {m} overrun it")));
        }
        let v_start = y.len();
        for j in 0..chunks {
            y.push(false);
            let from = prev + (1u64 << j) - 1;
            for k in from..from + (1u64 << j) {
                let bit = x
                    .get(k as usize)
                    .ok_or_else(|| Error::Range(format!("source ends before bit {k}")))?;
                y.push(bit);
            }
        }
        y.push(true);
        let v_len = y.len() - v_start;
        let program = describer.describe(&x.prefix(m as usize)?);
        let pi_start = y.len();
        y.extend_from(program.bits());
        let ratio = ExactRational::new(program.len() as u64, m)?;
        if ratio > s {
            s = ratio;
        }
        blocks.push(BlockLayout {
            checkpoint: m,
            chunks,
            covered,
            v_start,
            v_len,
            pi_start,
            pi_len: program.len(),
        });
        prev = m;
    }
    let layout = OracleLayout {
        describer: describer.name().to_string(),
        checkpoints: schedule.to_vec(),
        blocks,
        s_approx: s.to_f64(),
        s,
    };
    Ok((y, layout))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleRun {
    pub n: usize,
    pub output: BitString,
    /// Oracle bits read.
    pub used: usize,
}

/// Recovers `X↾n` from the oracle read through `y`. Past a program, the
/// decoded prefix replaces everything before it; between programs, raw
/// chunks extend it.
pub fn decode_oracle(y: &mut dyn BitReader, n: usize) -> Result<OracleRun> {
    let start = y.position();
    let mut x = BitString::new();
    let mut pending = BitString::new();
    let mut j = 0u32;
    while x.len() + pending.len() < n {
        let flag = y
            .read_bit()?
            .ok_or_else(|| Error::Range(format!("oracle ends before {n} bits are available")))?;
        if flag {
            x = udec(y)?;
            pending = BitString::new();
            j = 0;
        } else {
            if j >= 48 {
                return Err(Error::Decode("chunk counter out of range".into()));
            }
            for _ in 0..1u64 << j {
                pending.push(need(y, "raw chunk")?);
            }
            j += 1;
        }
    }
    let mut output = x.concat(&pending);
    output.truncate(n);
    Ok(OracleRun {
        n,
        output,
        used: y.position() - start,
    })
}

/// Decoder run with its oracle answers, in query order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecodeRun {
    pub machine: u64,
    pub n: usize,
    pub output: BitString,
    pub answers: BitString,
}

pub fn record_decode(y: &mut dyn BitReader, n: usize) -> Result<DecodeRun> {
    let mut rec = RecordingReader::new(y);
    let run = decode_oracle(&mut rec, n)?;
    Ok(DecodeRun {
        machine: ORACLE_DECODER_ID,
        n,
        output: run.output,
        answers: rec.into_answers(),
    })
}

/// Turns a recorded run into a replay program that reproduces its output.
pub fn reduction_to_description(run: &DecodeRun) -> Result<Program> {
    if run.machine != ORACLE_DECODER_ID {
        return Err(Error::Parameter(format!("machine {} cannot be replayed", run.machine)));
    }
    Ok(Program::replay(run.machine, run.n as u64, &run.answers))
}

/// Oracle use per requested length: `n,used,ratio`.
pub fn use_report(y: &BitString, ns: &[usize]) -> Result<String> {
    let mut out = String::from("n,used,ratio\n");
    for &n in ns {
        let run = decode_oracle(&mut SourceReader::new(y), n)?;
        out.push_str(&format!("{},{},{}\n", n, run.used, ratio(run.used, n)));
    }
    Ok(out)
}

pub(crate) fn ratio(used: usize, n: usize) -> String {
    if n == 0 {
        return "0".into();
    }
    format!("{:.6}", used as f64 / n as f64)
}
