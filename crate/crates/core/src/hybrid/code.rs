//! Self-delimiting word code and sequential bit readers.
//!
//! `enc(w)` writes `|w|` in binary with every bit doubled, then `01`, then
//! `w` itself. Doubled pairs are `00` or `11`, so the first `01` pair ends
//! the header.

use crate::error::{Error, Result};
use crate::kg::StreamDecoder;
use crate::numeric::{BitSource, BitString};

/// Sequential, counted access to an oracle sequence.
pub trait BitReader {
    /// The next bit, or `None` past the end of the sequence.
    fn read_bit(&mut self) -> Result<Option<bool>>;

    /// Bits read so far.
    fn position(&self) -> usize;
}

pub struct SourceReader<'a> {
    source: &'a dyn BitSource,
    pos: usize,
}

impl<'a> SourceReader<'a> {
    pub fn new(source: &'a dyn BitSource) -> Self {
        Self { source, pos: 0 }
    }
}

impl BitReader for SourceReader<'_> {
    fn read_bit(&mut self) -> Result<Option<bool>> {
        let bit = self.source.get(self.pos);
        if bit.is_some() {
            self.pos += 1;
        }
        Ok(bit)
    }

    fn position(&self) -> usize {
        self.pos
    }
}

/// Reads a sequence that is itself decoded on demand from a codec codeword.
pub struct CodecReader<'a, 'b> {
    decoder: &'b mut StreamDecoder<'a>,
    pos: usize,
}

impl<'a, 'b> CodecReader<'a, 'b> {
    pub fn new(decoder: &'b mut StreamDecoder<'a>) -> Self {
        Self { decoder, pos: 0 }
    }
}

impl BitReader for CodecReader<'_, '_> {
    fn read_bit(&mut self) -> Result<Option<bool>> {
        match self.decoder.get(self.pos) {
            Ok(bit) => {
                self.pos += 1;
                Ok(Some(bit))
            }
            Err(Error::Range(_)) => Ok(None),
            Err(e) => Err(e),
        }
    }

    fn position(&self) -> usize {
        self.pos
    }
}

/// Wraps a reader and keeps every bit it hands out.
pub struct RecordingReader<'r> {
    inner: &'r mut dyn BitReader,
    answers: BitString,
}

impl<'r> RecordingReader<'r> {
    pub fn new(inner: &'r mut dyn BitReader) -> Self {
        Self {
            inner,
            answers: BitString::new(),
        }
    }

    pub fn into_answers(self) -> BitString {
        self.answers
    }
}

impl BitReader for RecordingReader<'_> {
    fn read_bit(&mut self) -> Result<Option<bool>> {
        let bit = self.inner.read_bit()?;
        if let Some(b) = bit {
            self.answers.push(b);
        }
        Ok(bit)
    }

    fn position(&self) -> usize {
        self.inner.position()
    }
}

pub(crate) fn need(reader: &mut dyn BitReader, what: &str) -> Result<bool> {
    reader
        .read_bit()?
        .ok_or_else(|| Error::Decode(format!("stream ended inside {what}")))
}

pub fn enc(w: &BitString) -> BitString {
    let header = BitString::from_uint(w.len() as u64);
    let mut out = BitString::with_capacity(2 * header.len() + 2 + w.len());
    for b in header.iter() {
        out.push(b);
        out.push(b);
    }
    out.push(false);
    out.push(true);
    out.extend_from(w);
    out
}

/// Reads one `enc`-coded word.
pub fn dec_from(reader: &mut dyn BitReader) -> Result<BitString> {
    let mut len: u64 = 0;
    loop {
        let a = need(reader, "length header")?;
        let b = need(reader, "length header")?;
        match (a, b) {
            (false, true) => break,
            (true, false) => return Err(Error::Decode("malformed length header pair 10".into())),
            (bit, _) => {
                if len >> 62 != 0 {
                    return Err(Error::Decode("length header overflows".into()));
                }
                len = (len << 1) | bit as u64;
            }
        }
    }
    (0..len).map(|_| need(reader, "word body")).collect()
}

/// Decodes `enc(w)·anything`, returning `w` and the bits consumed.
pub fn dec(stream: &dyn BitSource) -> Result<(BitString, usize)> {
    let mut reader = SourceReader::new(stream);
    let w = dec_from(&mut reader)?;
    Ok((w, reader.position()))
}
