//! Length-explicit bit strings and self-delimiting codecs.
//!
//! LOCAL states and messages are bit strings whose exact length is the unit
//! of all bandwidth accounting, so the wire encoding must be canonical.
//! Composite values (tuples, sets, attribute vectors) are encoded with
//! self-delimiting Elias-gamma length prefixes; a reader always knows where
//! a field ends without out-of-band information.

use crate::fixed::{ceil_log2, mask, Fixed, Precision};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CodecError {
    #[error("bit string exhausted at bit {0}")]
    Exhausted(usize),
    #[error("invalid encoding: {0}")]
    Invalid(String),
}

/// A bit string with explicit length, MSB-first within each stored byte.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BitString {
    bytes: Vec<u8>,
    len: usize,
}

impl BitString {
    pub fn new() -> BitString {
        BitString::default()
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn push(&mut self, bit: bool) {
        let idx = self.len / 8;
        if idx == self.bytes.len() {
            self.bytes.push(0);
        }
        if bit {
            self.bytes[idx] |= 1 << (7 - (self.len % 8));
        }
        self.len += 1;
    }

    pub fn get(&self, i: usize) -> Option<bool> {
        (i < self.len).then(|| self.bytes[i / 8] & (1 << (7 - (i % 8))) != 0)
    }

    /// Append `width` bits of `value`, most significant first.
    pub fn push_uint(&mut self, value: u64, width: u32) {
        for k in (0..width).rev() {
            self.push(value >> k & 1 == 1);
        }
    }

    pub fn extend(&mut self, other: &BitString) {
        for i in 0..other.len {
            self.push(other.get(i).unwrap());
        }
    }

    /// Elias-gamma code of `v + 1`; encodes any v >= 0 self-delimitingly.
    pub fn push_gamma(&mut self, v: u64) {
        let n = v + 1;
        let bits = 64 - n.leading_zeros();
        for _ in 0..bits - 1 {
            self.push(false);
        }
        self.push_uint(n, bits);
    }

    pub fn reader(&self) -> BitReader<'_> {
        BitReader { bits: self, pos: 0 }
    }

    /// Render as a 0/1 character string (debugging and golden tests).
    pub fn to_bit_chars(&self) -> String {
        (0..self.len)
            .map(|i| if self.get(i).unwrap() { '1' } else { '0' })
            .collect()
    }
}

pub struct BitReader<'a> {
    bits: &'a BitString,
    pos: usize,
}

impl<'a> BitReader<'a> {
    pub fn read_bit(&mut self) -> Result<bool, CodecError> {
        let b = self.bits.get(self.pos).ok_or(CodecError::Exhausted(self.pos))?;
        self.pos += 1;
        Ok(b)
    }

    pub fn read_uint(&mut self, width: u32) -> Result<u64, CodecError> {
        let mut v = 0u64;
        for _ in 0..width {
            v = (v << 1) | self.read_bit()? as u64;
        }
        Ok(v)
    }

    pub fn read_gamma(&mut self) -> Result<u64, CodecError> {
        let mut zeros = 0u32;
        while !self.read_bit()? {
            zeros += 1;
            if zeros > 63 {
                return Err(CodecError::Invalid("gamma prefix too long".into()));
            }
        }
        let mut n = 1u64;
        for _ in 0..zeros {
            n = (n << 1) | self.read_bit()? as u64;
        }
        Ok(n - 1)
    }

    pub fn remaining(&self) -> usize {
        self.bits.len() - self.pos
    }

    pub fn at_end(&self) -> bool {
        self.remaining() == 0
    }

    pub fn expect_end(&self) -> Result<(), CodecError> {
        if self.at_end() {
            Ok(())
        } else {
            Err(CodecError::Invalid(format!(
                "{} trailing bits",
                self.remaining()
            )))
        }
    }
}

/// Append a signed dyadic scalar: sign bit, gamma(|mantissa|), gamma(fbits).
pub fn push_fixed(out: &mut BitString, v: &Fixed) {
    out.push(v.mantissa() < 0);
    out.push_gamma(v.mantissa().unsigned_abs());
    out.push_gamma(v.frac_bits() as u64);
}

pub fn read_fixed(r: &mut BitReader) -> Result<Fixed, CodecError> {
    let neg = r.read_bit()?;
    let mag = r.read_gamma()?;
    let fbits = r.read_gamma()?;
    if mag > i64::MAX as u64 || fbits > 62 {
        return Err(CodecError::Invalid("scalar out of range".into()));
    }
    let mant = if neg { -(mag as i64) } else { mag as i64 };
    Ok(Fixed::from_parts(mant, fbits as u32))
}

/// Append an attribute vector: gamma(len) then each scalar.
pub fn push_attr_vec(out: &mut BitString, attrs: &[Fixed]) {
    out.push_gamma(attrs.len() as u64);
    for a in attrs {
        push_fixed(out, a);
    }
}

pub fn read_attr_vec(r: &mut BitReader) -> Result<Vec<Fixed>, CodecError> {
    let len = r.read_gamma()? as usize;
    if len > 1 << 20 {
        return Err(CodecError::Invalid("attribute vector too long".into()));
    }
    (0..len).map(|_| read_fixed(r)).collect()
}

/// Fixed-width node id: `ceil(log2 n)` bits. Nodes know the id domain size.
pub fn id_bits(n: usize) -> u32 {
    ceil_log2(n).max(1)
}

pub fn push_node_id(out: &mut BitString, id: u32, n: usize) {
    out.push_uint(id as u64, id_bits(n));
}

pub fn read_node_id(r: &mut BitReader, n: usize) -> Result<u32, CodecError> {
    let v = r.read_uint(id_bits(n))?;
    if v as usize >= n {
        return Err(CodecError::Invalid(format!("node id {v} out of range")));
    }
    Ok(v as u32)
}

/// Append a length-prefixed nested bit string.
pub fn push_bitstring(out: &mut BitString, s: &BitString) {
    out.push_gamma(s.len() as u64);
    out.extend(s);
}

pub fn read_bitstring(r: &mut BitReader) -> Result<BitString, CodecError> {
    let len = r.read_gamma()? as usize;
    let mut s = BitString::new();
    for _ in 0..len {
        s.push(r.read_bit()?);
    }
    Ok(s)
}

/// Chunk a bit string into `p`-bit scalars using `10*` padding: append a 1
/// bit, then zeros up to a multiple of `p`. The map is a bijection between
/// arbitrary bit strings and non-empty chunk sequences, so vector states and
/// string states can be compared bit-for-bit after unpadding.
pub fn string_to_chunks(s: &BitString, prec: &Precision) -> Vec<Fixed> {
    let p = prec.total_bits;
    let mut padded = s.clone();
    padded.push(true);
    while padded.len() % p as usize != 0 {
        padded.push(false);
    }
    let mut out = Vec::with_capacity(padded.len() / p as usize);
    let mut r = padded.reader();
    while !r.at_end() {
        let raw = r.read_uint(p).unwrap();
        out.push(prec.from_raw_bits(raw));
    }
    out
}

/// Inverse of [`string_to_chunks`].
pub fn chunks_to_string(chunks: &[Fixed], prec: &Precision) -> Result<BitString, CodecError> {
    let p = prec.total_bits;
    let mut bits = BitString::new();
    for c in chunks {
        let raw = prec
            .raw_bits(c)
            .map_err(|e| CodecError::Invalid(e.to_string()))?;
        bits.push_uint(raw & mask(p), p);
    }
    // Strip 10* padding from the tail.
    let mut end = bits.len();
    while end > 0 && !bits.get(end - 1).unwrap() {
        end -= 1;
    }
    if end == 0 {
        return Err(CodecError::Invalid("missing pad terminator".into()));
    }
    let mut out = BitString::new();
    for i in 0..end - 1 {
        out.push(bits.get(i).unwrap());
    }
    Ok(out)
}
