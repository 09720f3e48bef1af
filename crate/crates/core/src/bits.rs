//! Fixed-width bit strings.
//!
//! A [`BitString`] of width `w` is read left to right: index 0 is the most
//! significant bit of the `w`-bit unsigned integer it encodes. Lexicographic
//! order on equal-width strings is therefore numeric order, and hex
//! encodings are plain big-endian integers zero-padded to `ceil(w/4)` digits.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigUint;
use rand::RngCore;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BitsError {
    #[error("invalid hex digit in {0:?}")]
    BadHex(String),
    #[error("hex string {hex:?} does not encode a {width}-bit value")]
    BadLength { hex: String, width: usize },
    #[error("invalid binary digit in {0:?}")]
    BadBinary(String),
}

/// A bit string of fixed width.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitString {
    width: usize,
    // little-endian 64-bit limbs of the integer value; bits above `width` are zero
    words: Vec<u64>,
}

fn word_count(width: usize) -> usize {
    width.div_ceil(64)
}

impl BitString {
    pub fn zeros(width: usize) -> Self {
        Self { width, words: vec![0; word_count(width)] }
    }

    /// Builds a string from the low `width` bits of `value`.
    pub fn from_u64(value: u64, width: usize) -> Self {
        let mut s = Self::zeros(width);
        if width > 0 {
            s.words[0] = value;
            s.mask();
        }
        s
    }

    pub fn from_biguint(value: &BigUint, width: usize) -> Self {
        let mut s = Self::zeros(width);
        for (slot, digit) in s.words.iter_mut().zip(value.iter_u64_digits()) {
            *slot = digit;
        }
        s.mask();
        s
    }

    pub fn random<R: RngCore + ?Sized>(rng: &mut R, width: usize) -> Self {
        let mut s = Self::zeros(width);
        for w in s.words.iter_mut() {
            *w = rng.next_u64();
        }
        s.mask();
        s
    }

    /// The leftmost `width` bits of a big-endian byte string.
    pub fn from_be_bytes_prefix(bytes: &[u8], width: usize) -> Self {
        assert!(width <= bytes.len() * 8, "not enough bytes for {width} bits");
        let mut s = Self::zeros(width);
        for i in 0..width {
            if (bytes[i / 8] >> (7 - i % 8)) & 1 == 1 {
                s.set(i, true);
            }
        }
        s
    }

    /// Parses a string of `0`/`1` characters, leftmost character first.
    pub fn parse_bin(text: &str) -> Result<Self, BitsError> {
        let mut s = Self::zeros(text.len());
        for (i, ch) in text.chars().enumerate() {
            match ch {
                '0' => {}
                '1' => s.set(i, true),
                _ => return Err(BitsError::BadBinary(text.to_string())),
            }
        }
        Ok(s)
    }

    pub fn from_hex(hex: &str, width: usize) -> Result<Self, BitsError> {
        let digits = width.div_ceil(4);
        if hex.len() != digits {
            return Err(BitsError::BadLength { hex: hex.to_string(), width });
        }
        let mut s = Self::zeros(width);
        for (k, ch) in hex.chars().rev().enumerate() {
            let nibble = ch.to_digit(16).ok_or_else(|| BitsError::BadHex(hex.to_string()))? as u64;
            let pos = 4 * k;
            if nibble != 0 {
                if pos >= width || (width - pos < 4 && nibble >> (width - pos) != 0) {
                    return Err(BitsError::BadLength { hex: hex.to_string(), width });
                }
                s.words[pos / 64] |= nibble << (pos % 64);
            }
        }
        Ok(s)
    }

    pub fn to_hex(&self) -> String {
        let digits = self.width.div_ceil(4);
        let mut out = String::with_capacity(digits);
        for k in (0..digits).rev() {
            let pos = 4 * k;
            let nibble = (self.words[pos / 64] >> (pos % 64)) & 0xf;
            out.push(char::from_digit(nibble as u32, 16).unwrap());
        }
        out
    }

    pub fn to_bin(&self) -> String {
        (0..self.width).map(|i| if self.get(i) { '1' } else { '0' }).collect()
    }

    pub fn width(&self) -> usize {
        self.width
    }

    /// Integer value, if it fits in 64 bits.
    pub fn to_u64(&self) -> Option<u64> {
        if self.words.iter().skip(1).any(|&w| w != 0) {
            return None;
        }
        Some(self.words.first().copied().unwrap_or(0))
    }

    pub fn to_biguint(&self) -> BigUint {
        let mut bytes = Vec::with_capacity(self.words.len() * 8);
        for w in &self.words {
            bytes.extend_from_slice(&w.to_le_bytes());
        }
        BigUint::from_bytes_le(&bytes)
    }

    /// Big-endian bytes of the integer value, `ceil(width/8)` long.
    pub fn to_bytes(&self) -> Vec<u8> {
        let len = self.width.div_ceil(8);
        let mut le = Vec::with_capacity(self.words.len() * 8);
        for w in &self.words {
            le.extend_from_slice(&w.to_le_bytes());
        }
        le.truncate(len);
        le.reverse();
        le
    }

    fn position(&self, i: usize) -> (usize, u32) {
        assert!(i < self.width, "bit index {i} out of range for width {}", self.width);
        let p = self.width - 1 - i;
        (p / 64, (p % 64) as u32)
    }

    pub fn get(&self, i: usize) -> bool {
        let (w, b) = self.position(i);
        (self.words[w] >> b) & 1 == 1
    }

    pub fn set(&mut self, i: usize, value: bool) {
        let (w, b) = self.position(i);
        if value {
            self.words[w] |= 1 << b;
        } else {
            self.words[w] &= !(1 << b);
        }
    }

    pub fn flip(&mut self, i: usize) {
        let (w, b) = self.position(i);
        self.words[w] ^= 1 << b;
    }

    pub fn xor(&self, other: &Self) -> Self {
        assert_eq!(self.width, other.width, "xor of mismatched widths");
        Self { width: self.width, words: self.words.iter().zip(&other.words).map(|(a, b)| a ^ b).collect() }
    }

    /// Inner product mod 2.
    pub fn dot(&self, other: &Self) -> bool {
        assert_eq!(self.width, other.width, "dot of mismatched widths");
        let ones: u32 = self.words.iter().zip(&other.words).map(|(a, b)| (a & b).count_ones()).sum();
        ones % 2 == 1
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn count_ones(&self) -> u32 {
        self.words.iter().map(|w| w.count_ones()).sum()
    }

    /// Index of the leftmost set bit.
    pub fn first_one(&self) -> Option<usize> {
        (0..self.width).find(|&i| self.get(i))
    }

    /// `self ‖ other`.
    pub fn concat(&self, other: &Self) -> Self {
        let mut out = Self::zeros(self.width + other.width);
        for i in 0..self.width {
            if self.get(i) {
                out.set(i, true);
            }
        }
        for i in 0..other.width {
            if other.get(i) {
                out.set(self.width + i, true);
            }
        }
        out
    }

    pub fn with_prefix_bit(&self, bit: bool) -> Self {
        let mut head = Self::zeros(1);
        head.set(0, bit);
        head.concat(self)
    }

    /// Splits off the leftmost bit.
    pub fn split_first(&self) -> Option<(bool, Self)> {
        if self.width == 0 {
            return None;
        }
        Some((self.get(0), self.remove_bit(0)))
    }

    /// The string with bit `j` deleted.
    pub fn remove_bit(&self, j: usize) -> Self {
        assert!(j < self.width);
        let mut out = Self::zeros(self.width - 1);
        let mut k = 0;
        for i in 0..self.width {
            if i == j {
                continue;
            }
            if self.get(i) {
                out.set(k, true);
            }
            k += 1;
        }
        out
    }

    /// Every string of the given width, in increasing order. Intended for toy widths.
    pub fn all(width: usize) -> impl Iterator<Item = BitString> {
        assert!(width < 64, "cannot enumerate width {width}");
        (0..(1u64 << width)).map(move |v| BitString::from_u64(v, width))
    }

    fn mask(&mut self) {
        let rem = self.width % 64;
        if rem != 0 {
            if let Some(top) = self.words.last_mut() {
                *top &= (1u64 << rem) - 1;
            }
        }
    }
}

impl Ord for BitString {
    fn cmp(&self, other: &Self) -> Ordering {
        self.width.cmp(&other.width).then_with(|| self.words.iter().rev().cmp(other.words.iter().rev()))
    }
}

impl PartialOrd for BitString {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.width <= 32 {
            write!(f, "0b{}", self.to_bin())
        } else {
            write!(f, "{}'h{}", self.width, self.to_hex())
        }
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Serialize, Deserialize)]
struct BitStringRepr {
    width: usize,
    hex: String,
}

impl Serialize for BitString {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        BitStringRepr { width: self.width, hex: self.to_hex() }.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for BitString {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let repr = BitStringRepr::deserialize(deserializer)?;
        BitString::from_hex(&repr.hex, repr.width).map_err(serde::de::Error::custom)
    }
}
