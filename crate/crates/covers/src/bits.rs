//! Word-level bit storage: a plain bitset and a packed integer array.
//!
//! Both types keep their payload in `Vec<u64>` with bit 0 of word 0 as the
//! lowest-addressed bit, and both allow entries to straddle word boundaries.
//! All higher layers (packed texts, cover bitmasks, the compact cover-array
//! index) sit on top of these two.

use crate::error::CoverError;
use std::ops::Range;

/// Reads `nbits` bits (at most 64) starting at absolute bit offset `bit`.
///
/// The caller must guarantee `bit + nbits <= 64 * words.len()`.
#[inline]
pub fn read_bits(words: &[u64], bit: usize, nbits: usize) -> u64 {
    debug_assert!(nbits <= 64);
    if nbits == 0 {
        return 0;
    }
    debug_assert!(bit + nbits <= words.len() * 64);
    let word = bit / 64;
    let off = bit % 64;
    let mask = if nbits == 64 { !0u64 } else { (1u64 << nbits) - 1 };
    if off + nbits <= 64 {
        (words[word] >> off) & mask
    } else {
        let lo = words[word] >> off;
        let hi = words[word + 1] << (64 - off);
        (lo | hi) & mask
    }
}

/// Writes the low `nbits` bits of `value` at absolute bit offset `bit`.
#[inline]
pub fn write_bits(words: &mut [u64], bit: usize, nbits: usize, value: u64) {
    debug_assert!(nbits <= 64);
    if nbits == 0 {
        return;
    }
    debug_assert!(bit + nbits <= words.len() * 64);
    let mask = if nbits == 64 { !0u64 } else { (1u64 << nbits) - 1 };
    debug_assert_eq!(value & !mask, 0, "value does not fit in {nbits} bits");
    let word = bit / 64;
    let off = bit % 64;
    if off + nbits <= 64 {
        words[word] = (words[word] & !(mask << off)) | (value << off);
    } else {
        let lo_bits = 64 - off;
        words[word] = (words[word] & !(!0u64 << off)) | (value << off);
        let hi_mask = mask >> lo_bits;
        words[word + 1] = (words[word + 1] & !hi_mask) | (value >> lo_bits);
    }
}

/// Fixed-length bitset. Bits past `len` in the last word are kept zero so
/// that popcounts over whole words are exact.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitVec {
    words: Vec<u64>,
    len: usize,
}

impl BitVec {
    pub fn zeros(len: usize) -> Self {
        BitVec {
            words: vec![0u64; len.div_ceil(64)],
            len,
        }
    }

    /// Rebuilds from raw words, e.g. when loading a serialized index.
    pub fn from_words(words: Vec<u64>, len: usize) -> Result<Self, CoverError> {
        if words.len() != len.div_ceil(64) {
            return Err(CoverError::Deserialize(format!(
                "bitvec of length {len} needs {} words, got {}",
                len.div_ceil(64),
                words.len()
            )));
        }
        let mut v = BitVec { words, len };
        // Tail bits must be zero; clear rather than reject so that the
        // on-disk format does not have to care.
        if len % 64 != 0 {
            if let Some(last) = v.words.last_mut() {
                *last &= (1u64 << (len % 64)) - 1;
            }
        }
        Ok(v)
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        (self.words[i / 64] >> (i % 64)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, v: bool) {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        let mask = 1u64 << (i % 64);
        if v {
            self.words[i / 64] |= mask;
        } else {
            self.words[i / 64] &= !mask;
        }
    }

    /// Sets every bit in `r` to one, whole words at a time in the middle.
    pub fn set_range(&mut self, r: Range<usize>) {
        assert!(r.end <= self.len, "range end {} out of range {}", r.end, self.len);
        if r.start >= r.end {
            return;
        }
        let (first, last) = (r.start / 64, (r.end - 1) / 64);
        let head = !0u64 << (r.start % 64);
        let tail = !0u64 >> (63 - (r.end - 1) % 64);
        if first == last {
            self.words[first] |= head & tail;
        } else {
            self.words[first] |= head;
            for w in &mut self.words[first + 1..last] {
                *w = !0;
            }
            self.words[last] |= tail;
        }
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Index of the lowest zero bit, if any.
    pub fn first_zero(&self) -> Option<usize> {
        for (wi, &w) in self.words.iter().enumerate() {
            if w != !0 {
                let i = wi * 64 + (!w).trailing_zeros() as usize;
                if i < self.len {
                    return Some(i);
                }
            }
        }
        None
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn size_bits(&self) -> usize {
        self.words.len() * 64
    }
}

/// Array of `len` unsigned integers of `width` bits each, packed back to
/// back. `width == 0` is allowed and stores only zeros.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PackedInts {
    words: Vec<u64>,
    width: usize,
    len: usize,
}

impl PackedInts {
    pub fn new(len: usize, width: usize) -> Self {
        assert!(width <= 64, "width {width} exceeds 64");
        PackedInts {
            words: vec![0u64; (len * width).div_ceil(64)],
            width,
            len,
        }
    }

    pub fn from_raw(words: Vec<u64>, width: usize, len: usize) -> Result<Self, CoverError> {
        if width > 64 {
            return Err(CoverError::Deserialize(format!("width {width} exceeds 64")));
        }
        if words.len() != (len * width).div_ceil(64) {
            return Err(CoverError::Deserialize(format!(
                "{len} entries of {width} bits need {} words, got {}",
                (len * width).div_ceil(64),
                words.len()
            )));
        }
        Ok(PackedInts { words, width, len })
    }

    #[inline]
    pub fn get(&self, i: usize) -> u64 {
        assert!(i < self.len, "index {i} out of range {}", self.len);
        read_bits(&self.words, i * self.width, self.width)
    }

    #[inline]
    pub fn set(&mut self, i: usize, v: u64) {
        assert!(i < self.len, "index {i} out of range {}", self.len);
        write_bits(&mut self.words, i * self.width, self.width, v);
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn size_bits(&self) -> usize {
        self.words.len() * 64
    }
}
