//! Self-delimiting programs and the fixed VM that runs them.
//!
//! A program is `enc(tag)·payload`:
//!
//! | tag  | method    | payload                                  |
//! |------|-----------|------------------------------------------|
//! | ``   | runlength | `enc(bin count)·enc(unit)`               |
//! | `0`  | literal   | `enc(x)`                                 |
//! | `1`  | lz        | `enc(bin |x|)·enc(tokens)`               |
//! | `00` | replay    | `enc(machine)·enc(bin n)·enc(answers)`   |

use std::collections::HashMap;
use std::fmt;

use super::code::{dec_from, enc, BitReader, SourceReader};
use super::oracle::decode_oracle;
use crate::error::{Error, Result};
use crate::numeric::BitString;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Literal,
    RunLength,
    Lz,
    Replay,
}

impl Method {
    fn tag(self) -> BitString {
        BitString::from_bits(match self {
            Method::RunLength => vec![],
            Method::Literal => vec![false],
            Method::Lz => vec![true],
            Method::Replay => vec![false, false],
        })
    }

    fn from_tag(tag: &BitString) -> Result<Self> {
        match tag.as_slice() {
            [] => Ok(Method::RunLength),
            [false] => Ok(Method::Literal),
            [true] => Ok(Method::Lz),
            [false, false] => Ok(Method::Replay),
            _ => Err(Error::Decode(format!("unknown method tag {tag:?}"))),
        }
    }
}

/// Identifier of the only machine REPLAY programs may name: the oracle decoder.
pub const ORACLE_DECODER_ID: u64 = 0;

#[derive(Clone, PartialEq, Eq)]
pub struct Program {
    method: Method,
    bits: BitString,
}

impl Program {
    fn assemble(method: Method, parts: &[BitString]) -> Self {
        let mut bits = enc(&method.tag());
        for p in parts {
            bits.extend_from(&enc(p));
        }
        Self { method, bits }
    }

    pub fn literal(x: &BitString) -> Self {
        Self::assemble(Method::Literal, &[x.clone()])
    }

    /// `count` copies of `unit`; `count` must be positive.
    pub fn runlength(count: u64, unit: &BitString) -> Result<Self> {
        if count == 0 {
            return Err(Error::Parameter("runlength count must be positive".into()));
        }
        Ok(Self::assemble(Method::RunLength, &[BitString::from_uint(count), unit.clone()]))
    }

    pub fn lz(x: &BitString) -> Self {
        Self::assemble(Method::Lz, &[BitString::from_uint(x.len() as u64), lz_tokens(x)])
    }

    pub fn replay(machine: u64, n: u64, answers: &BitString) -> Self {
        Self::assemble(
            Method::Replay,
            &[BitString::from_uint(machine), BitString::from_uint(n), answers.clone()],
        )
    }

    pub fn method(&self) -> Method {
        self.method
    }

    pub fn bits(&self) -> &BitString {
        &self.bits
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    /// Reparses a stored program word.
    pub fn from_bits(bits: BitString) -> Result<Self> {
        let mut reader = SourceReader::new(&bits);
        let method = Method::from_tag(&dec_from(&mut reader)?)?;
        Ok(Self { method, bits })
    }

    pub fn run(&self) -> Result<BitString> {
        let (x, used) = run_program(&self.bits)?;
        if used != self.bits.len() {
            return Err(Error::Decode(format!("{} trailing bits after program", self.bits.len() - used)));
        }
        Ok(x)
    }
}

impl fmt::Debug for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}({} bits)", self.method, self.bits.len())
    }
}

fn small_uint(w: &BitString, what: &str) -> Result<u64> {
    w.to_uint().map_err(|_| Error::Decode(format!("{what} out of range")))
}

/// Reads one program from `reader` and returns its output.
pub fn udec(reader: &mut dyn BitReader) -> Result<BitString> {
    let method = Method::from_tag(&dec_from(reader)?)?;
    match method {
        Method::Literal => dec_from(reader),
        Method::RunLength => {
            let count = small_uint(&dec_from(reader)?, "repeat count")?;
            let unit = dec_from(reader)?;
            if count == 0 {
                return Err(Error::Decode("zero repeat count".into()));
            }
            let total = (unit.len() as u64)
                .checked_mul(count)
                .filter(|&t| t <= 1 << 40)
                .ok_or_else(|| Error::Decode("runlength output too large".into()))?;
            let mut out = BitString::with_capacity(total as usize);
            for _ in 0..count {
                out.extend_from(&unit);
            }
            Ok(out)
        }
        Method::Lz => {
            let len = small_uint(&dec_from(reader)?, "lz length")?;
            lz_expand(&dec_from(reader)?, len as usize)
        }
        Method::Replay => {
            let machine = small_uint(&dec_from(reader)?, "machine id")?;
            let n = small_uint(&dec_from(reader)?, "replay length")?;
            let answers = dec_from(reader)?;
            if machine != ORACLE_DECODER_ID {
                return Err(Error::Decode(format!("machine {machine} is not replayable")));
            }
            let mut source = SourceReader::new(&answers);
            let run = decode_oracle(&mut source, n as usize)?;
            if run.used != answers.len() {
                return Err(Error::Decode("replay did not consume its answers exactly".into()));
            }
            Ok(run.output)
        }
    }
}

/// Runs the program at the head of `stream`: `(output, bits consumed)`.
pub fn run_program(stream: &BitString) -> Result<(BitString, usize)> {
    let mut reader = SourceReader::new(stream);
    let x = udec(&mut reader)?;
    Ok((x, reader.position()))
}

fn width(v: usize) -> usize {
    (usize::BITS - v.leading_zeros()) as usize
}

/// LZ78 parse. Token `t` (0-based) is the index of its parent phrase, in
/// `width(t)` bits with 0 for the empty phrase, followed by one new bit.
/// A trailing phrase that repeats an earlier one is emitted as that
/// phrase's own token.
fn lz_tokens(x: &BitString) -> BitString {
    let mut trie: HashMap<(usize, bool), usize> = HashMap::new();
    let mut phrases: Vec<(usize, bool)> = Vec::new();
    let mut out = BitString::new();
    let emit = |out: &mut BitString, t: usize, parent: usize, bit: bool| {
        let w = width(t);
        for k in (0..w).rev() {
            out.push((parent >> k) & 1 == 1);
        }
        out.push(bit);
    };
    let mut node = 0usize;
    for b in x.iter() {
        match trie.get(&(node, b)) {
            Some(&next) => node = next,
            None => {
                phrases.push((node, b));
                let id = phrases.len();
                trie.insert((node, b), id);
                emit(&mut out, id - 1, node, b);
                node = 0;
            }
        }
    }
    if node != 0 {
        let (parent, bit) = phrases[node - 1];
        emit(&mut out, phrases.len(), parent, bit);
    }
    out
}

fn lz_expand(tokens: &BitString, len: usize) -> Result<BitString> {
    let mut phrases: Vec<BitString> = vec![BitString::new()];
    let mut out = BitString::with_capacity(len);
    let mut pos = 0;
    while out.len() < len {
        let w = width(phrases.len() - 1);
        if pos + w + 1 > tokens.len() {
            return Err(Error::Decode("lz token stream truncated".into()));
        }
        let parent = (pos..pos + w).fold(0usize, |a, k| (a << 1) | tokens.get(k).unwrap() as usize);
        let bit = tokens.get(pos + w).unwrap();
        pos += w + 1;
        let base = phrases
            .get(parent)
            .ok_or_else(|| Error::Decode(format!("lz parent {parent} undefined")))?;
        let mut phrase = base.clone();
        phrase.push(bit);
        out.extend_from(&phrase);
        phrases.push(phrase);
    }
    if out.len() != len || pos != tokens.len() {
        return Err(Error::Decode("lz tokens disagree with declared length".into()));
    }
    Ok(out)
}

/// Produces a program for a word; stands in for a time-bounded shortest
/// description.
pub trait Describer: Send + Sync {
    fn name(&self) -> &'static str;
    fn describe(&self, x: &BitString) -> Program;
}

pub struct LiteralDescriber;
pub struct RunLengthDescriber;
pub struct LzDescriber;
/// Shortest of the other three.
pub struct BestDescriber;

impl Describer for LiteralDescriber {
    fn name(&self) -> &'static str {
        "literal"
    }

    fn describe(&self, x: &BitString) -> Program {
        Program::literal(x)
    }
}

impl Describer for RunLengthDescriber {
    fn name(&self) -> &'static str {
        "runlength"
    }

    /// Smallest period dividing `|x|`; literal when `x` is empty.
    fn describe(&self, x: &BitString) -> Program {
        let n = x.len();
        let bits = x.as_slice();
        for p in (1..=n).filter(|p| n % p == 0) {
            if bits.chunks(p).all(|c| c == &bits[..p]) {
                let unit = BitString::from_bits(bits[..p].to_vec());
                return Program::runlength((n / p) as u64, &unit).expect("positive count");
            }
        }
        Program::literal(x)
    }
}

impl Describer for LzDescriber {
    fn name(&self) -> &'static str {
        "lz"
    }

    fn describe(&self, x: &BitString) -> Program {
        Program::lz(x)
    }
}

impl Describer for BestDescriber {
    fn name(&self) -> &'static str {
        "best"
    }

    fn describe(&self, x: &BitString) -> Program {
        [
            LiteralDescriber.describe(x),
            RunLengthDescriber.describe(x),
            LzDescriber.describe(x),
        ]
        .into_iter()
        .min_by_key(Program::len)
        .expect("three candidates")
    }
}

pub fn describer_by_name(name: &str) -> Result<Box<dyn Describer>> {
    Ok(match name {
        "literal" => Box::new(LiteralDescriber),
        "runlength" => Box::new(RunLengthDescriber),
        "lz" => Box::new(LzDescriber),
        "best" => Box::new(BestDescriber),
        other => return Err(Error::Parameter(format!("unknown describer {other:?}"))),
    })
}
