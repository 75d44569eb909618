//! Fixed-length bit strings.
//!
//! Node identifiers, machine configurations and oracle-tape halves are all
//! plain bit strings. Bit 0 is the leftmost (most significant) bit, so the
//! textual form `"1000"` has `b[0] == 1`, and hex encodings are big-endian.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BitsError {
    #[error("invalid bit character {0:?}")]
    BadBit(char),
    #[error("invalid hex digit {0:?}")]
    BadHex(char),
    #[error("hex value {value:?} does not fit in {width} bits")]
    HexOverflow { value: String, width: usize },
    #[error("width {0} exceeds 64 bits")]
    TooWide(usize),
}

/// A finite string over `{0, 1}`.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitString(Vec<bool>);

impl BitString {
    pub fn new() -> Self {
        Self(Vec::new())
    }

    pub fn zeros(width: usize) -> Self {
        Self(vec![false; width])
    }

    pub fn from_bits(bits: Vec<bool>) -> Self {
        Self(bits)
    }

    /// The low `width` bits of `value`, most significant first.
    pub fn from_u64(value: u64, width: usize) -> Self {
        assert!(width <= 64, "width {width} exceeds 64 bits");
        Self((0..width).rev().map(|i| (value >> i) & 1 == 1).collect())
    }

    pub fn to_u64(&self) -> Result<u64, BitsError> {
        if self.0.len() > 64 {
            return Err(BitsError::TooWide(self.0.len()));
        }
        Ok(self.0.iter().fold(0u64, |acc, &b| (acc << 1) | b as u64))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    pub fn first(&self) -> Option<bool> {
        self.0.first().copied()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|b| !b)
    }

    pub fn push(&mut self, bit: bool) {
        self.0.push(bit);
    }

    pub fn extend_from(&mut self, other: &BitString) {
        self.0.extend_from_slice(&other.0);
    }

    pub fn concat<'a>(parts: impl IntoIterator<Item = &'a BitString>) -> Self {
        let mut out = Vec::new();
        for p in parts {
            out.extend_from_slice(&p.0);
        }
        Self(out)
    }

    pub fn slice(&self, start: usize, end: usize) -> BitString {
        Self(self.0[start..end].to_vec())
    }

    /// Split into `width`-bit chunks; the trailing remainder (shorter than
    /// `width`) is returned separately.
    pub fn chunks(&self, width: usize) -> (Vec<BitString>, BitString) {
        assert!(width > 0);
        let whole = self.0.len() / width;
        let nodes = (0..whole)
            .map(|i| self.slice(i * width, (i + 1) * width))
            .collect();
        (nodes, self.slice(whole * width, self.0.len()))
    }

    /// In-place XOR. Panics on width mismatch.
    pub fn xor_assign(&mut self, other: &BitString) {
        assert_eq!(self.0.len(), other.0.len(), "xor of unequal widths");
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            *a ^= *b;
        }
    }

    /// Big-endian hex, `ceil(len/4)` digits. The empty string encodes as `""`.
    pub fn to_hex(&self) -> String {
        let digits = self.0.len().div_ceil(4);
        let pad = digits * 4 - self.0.len();
        let mut padded = vec![false; pad];
        padded.extend_from_slice(&self.0);
        padded
            .chunks(4)
            .map(|c| {
                let v = c.iter().fold(0u32, |acc, &b| (acc << 1) | b as u32);
                char::from_digit(v, 16).unwrap()
            })
            .collect()
    }

    pub fn from_hex(hex: &str, width: usize) -> Result<Self, BitsError> {
        let mut bits = Vec::with_capacity(hex.len() * 4);
        for ch in hex.chars() {
            let v = ch.to_digit(16).ok_or(BitsError::BadHex(ch))?;
            bits.extend((0..4).rev().map(|i| (v >> i) & 1 == 1));
        }
        if bits.len() < width {
            let mut padded = vec![false; width - bits.len()];
            padded.extend(bits);
            return Ok(Self(padded));
        }
        let excess = bits.len() - width;
        if bits[..excess].iter().any(|&b| b) {
            return Err(BitsError::HexOverflow {
                value: hex.to_string(),
                width,
            });
        }
        Ok(Self(bits[excess..].to_vec()))
    }
}

impl FromStr for BitString {
    type Err = BitsError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(BitsError::BadBit(other)),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Self)
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitString({self})")
    }
}

/// Bits needed to write any integer in `0..=max`.
pub fn bit_width(max: u64) -> usize {
    (64 - max.leading_zeros() as usize).max(1)
}
