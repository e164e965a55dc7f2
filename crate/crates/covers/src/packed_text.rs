//! Texts in packed form: `n` symbols over an alphabet `{0, .., sigma-1}`,
//! stored `ceil(log2 sigma)` bits apiece in a flat word array. A single u64
//! therefore holds `64 / width` symbols, which is what makes the sublinear
//! word-operation counts of the cover pipeline possible in the first place.

use crate::bits::{read_bits, PackedInts};
use crate::error::CoverError;
use crate::pillar::Counters;
use std::ops::Range;

/// Bits needed per symbol: `ceil(log2(max(sigma, 2)))`, so at least one bit
/// even for the unary alphabet.
pub fn symbol_width(sigma: u32) -> usize {
    let s = sigma.max(2);
    ((s - 1).ilog2() + 1) as usize
}

/// Maps `'a'..='z'` to `0..=25`. Convenience for doctests and unit tests.
pub fn latin(s: &str) -> Vec<u32> {
    s.bytes()
        .map(|b| {
            assert!(b.is_ascii_lowercase(), "latin() accepts only a-z, got {:?}", b as char);
            (b - b'a') as u32
        })
        .collect()
}

/// A packed text. Immutable once built.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PackedText {
    ints: PackedInts,
    sigma: u32,
}

impl PackedText {
    /// Packs `symbols` over an alphabet of size `sigma`.
    pub fn pack(symbols: &[u32], sigma: u32) -> Result<Self, CoverError> {
        if sigma == 0 {
            return Err(CoverError::EmptyAlphabet);
        }
        let width = symbol_width(sigma);
        let mut ints = PackedInts::new(symbols.len(), width);
        for (i, &s) in symbols.iter().enumerate() {
            if s >= sigma {
                return Err(CoverError::SymbolOutOfRange { symbol: s, sigma });
            }
            ints.set(i, s as u64);
        }
        Ok(PackedText { ints, sigma })
    }

    /// Packs with `sigma` taken as one more than the largest symbol present.
    pub fn pack_auto(symbols: &[u32]) -> Self {
        let sigma = symbols.iter().max().map_or(1, |&m| m + 1);
        Self::pack(symbols, sigma).expect("sigma derived from input")
    }

    /// Rebuilds a text from its raw words, e.g. when loading a serialized
    /// index. Word count and every symbol are validated.
    pub fn from_raw_words(words: Vec<u64>, len: usize, sigma: u32) -> Result<Self, CoverError> {
        if sigma == 0 {
            return Err(CoverError::EmptyAlphabet);
        }
        let ints = PackedInts::from_raw(words, symbol_width(sigma), len)?;
        for i in 0..len {
            let s = ints.get(i) as u32;
            if s >= sigma {
                return Err(CoverError::SymbolOutOfRange { symbol: s, sigma });
            }
        }
        Ok(PackedText { ints, sigma })
    }

    pub fn len(&self) -> usize {
        self.ints.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ints.is_empty()
    }

    pub fn sigma(&self) -> u32 {
        self.sigma
    }

    pub fn width(&self) -> usize {
        self.ints.width()
    }

    pub fn words(&self) -> &[u64] {
        self.ints.words()
    }

    /// Number of words the payload occupies.
    pub fn word_len(&self) -> usize {
        self.ints.words().len()
    }

    #[inline]
    pub fn get(&self, i: usize) -> u32 {
        self.ints.get(i) as u32
    }

    pub fn iter(&self) -> impl Iterator<Item = u32> + '_ {
        (0..self.len()).map(|i| self.get(i))
    }

    pub fn to_vec(&self) -> Vec<u32> {
        self.iter().collect()
    }

    /// Raw bit window starting at symbol boundary `bit_start` (absolute bit
    /// offset, not symbol index).
    #[inline]
    pub fn read_bits_u64(&self, bit_start: usize, nbits: usize) -> u64 {
        read_bits(self.ints.words(), bit_start, nbits)
    }

    /// Copies the half-open symbol range `r` into a fresh packed text.
    pub fn extract(&self, r: Range<usize>) -> Result<Self, CoverError> {
        if r.start > r.end || r.end > self.len() {
            return Err(CoverError::RangeOutOfBounds {
                start: r.start,
                end: r.end,
                len: self.len(),
            });
        }
        let width = self.width();
        let len = r.end - r.start;
        let total_bits = len * width;
        let mut words = vec![0u64; total_bits.div_ceil(64)];
        let src_bit = r.start * width;
        for (i, w) in words.iter_mut().enumerate() {
            let take = (total_bits - i * 64).min(64);
            *w = read_bits(self.ints.words(), src_bit + i * 64, take);
        }
        Ok(PackedText {
            ints: PackedInts::from_raw(words, width, len).expect("sized above"),
            sigma: self.sigma,
        })
    }

    /// Like [`extract`](Self::extract) but charges one word operation per
    /// word copied (plus one for the setup) to `counters`.
    pub fn extract_counted(&self, r: Range<usize>, counters: &Counters) -> Result<Self, CoverError> {
        let out = self.extract(r)?;
        counters.add_word_ops(out.word_len() as u64 + 1);
        Ok(out)
    }

    /// Word-parallel equality of `self[a..a+len]` and `self[b..b+len]`.
    pub fn eq_ranges(&self, a: usize, b: usize, len: usize) -> bool {
        self.eq_ranges_impl(a, b, len, None)
    }

    /// Counted flavour: one unit per 64-bit chunk compared, plus one.
    pub fn eq_ranges_counted(&self, a: usize, b: usize, len: usize, counters: &Counters) -> bool {
        self.eq_ranges_impl(a, b, len, Some(counters))
    }

    fn eq_ranges_impl(&self, a: usize, b: usize, len: usize, counters: Option<&Counters>) -> bool {
        assert!(a + len <= self.len() && b + len <= self.len(), "eq_ranges out of bounds");
        let w = self.width();
        let total = len * w;
        let mut done = 0usize;
        let mut chunks = 1u64;
        let eq = loop {
            if done >= total {
                break true;
            }
            let take = (total - done).min(64);
            chunks += 1;
            if read_bits(self.ints.words(), a * w + done, take)
                != read_bits(self.ints.words(), b * w + done, take)
            {
                break false;
            }
            done += take;
        };
        if let Some(c) = counters {
            c.add_word_ops(chunks);
        }
        eq
    }

    /// Base `sigma+1` code of `self[start..start+len]`, first symbol most
    /// significant. Digit `sigma` is reserved for the out-of-text sentinel,
    /// so codes of equal-length factors are equal iff the factors are.
    pub fn factor_code(&self, start: usize, len: usize) -> Result<u64, CoverError> {
        if start + len > self.len() {
            return Err(CoverError::RangeOutOfBounds {
                start,
                end: start + len,
                len: self.len(),
            });
        }
        let base = self.sigma as u64 + 1;
        let mut code: u64 = 0;
        for i in start..start + len {
            code = code
                .checked_mul(base)
                .and_then(|c| c.checked_add(self.get(i) as u64))
                .ok_or(CoverError::FactorCodeOverflow { len, sigma: self.sigma })?;
        }
        Ok(code)
    }
}

/// Base `sigma+1` code over raw symbols; unlike [`PackedText::factor_code`]
/// the digit `sigma` (sentinel) is a legal input here.
pub fn factor_code_of_symbols(syms: &[u32], sigma: u32) -> Result<u64, CoverError> {
    let base = sigma as u64 + 1;
    let mut code: u64 = 0;
    for &s in syms {
        debug_assert!(s <= sigma);
        code = code
            .checked_mul(base)
            .and_then(|c| c.checked_add(s as u64))
            .ok_or(CoverError::FactorCodeOverflow { len: syms.len(), sigma })?;
    }
    Ok(code)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn width_formula() {
        assert_eq!(symbol_width(1), 1);
        assert_eq!(symbol_width(2), 1);
        assert_eq!(symbol_width(3), 2);
        assert_eq!(symbol_width(4), 2);
        assert_eq!(symbol_width(5), 3);
        assert_eq!(symbol_width(256), 8);
        assert_eq!(symbol_width(257), 9);
        assert_eq!(symbol_width(1 << 20), 20);
    }

    #[test]
    fn pack_rejects_bad_symbols() {
        assert!(matches!(
            PackedText::pack(&[0, 2], 2),
            Err(CoverError::SymbolOutOfRange { symbol: 2, sigma: 2 })
        ));
        assert!(matches!(PackedText::pack(&[], 0), Err(CoverError::EmptyAlphabet)));
    }

    #[test]
    fn word_count_is_exact() {
        // 100 symbols at 3 bits = 300 bits = 5 words, not one more.
        let t = PackedText::pack(&vec![4u32; 100], 5).unwrap();
        assert_eq!(t.width(), 3);
        assert_eq!(t.word_len(), 5);
        // 64 one-bit symbols fit exactly in one word.
        let t = PackedText::pack(&vec![1u32; 64], 2).unwrap();
        assert_eq!(t.word_len(), 1);
    }

    #[test]
    fn extract_matches_slice() {
        let syms = latin("abaababaabaababaababa");
        let t = PackedText::pack(&syms, 2).unwrap();
        let sub = t.extract(3..11).unwrap();
        assert_eq!(sub.to_vec(), &syms[3..11]);
        assert_eq!(sub.len(), 8);
        let empty = t.extract(5..5).unwrap();
        assert!(empty.is_empty());
        assert!(t.extract(10..30).is_err());
    }

    #[test]
    fn eq_ranges_finds_borders() {
        let t = PackedText::pack(&latin("abaababa"), 2).unwrap();
        // "aba" is a border of length 3.
        assert!(t.eq_ranges(0, 5, 3));
        // length 4 prefix "abaa" vs suffix "baba".
        assert!(!t.eq_ranges(0, 4, 4));
        assert!(t.eq_ranges(2, 2, 6));
        assert!(t.eq_ranges(0, 0, 0));
    }

    #[test]
    fn factor_codes_are_positional() {
        let t = PackedText::pack(&latin("ab"), 2).unwrap();
        assert_eq!(t.factor_code(0, 2).unwrap(), 1); // 0*3 + 1
        let t = PackedText::pack(&latin("aba"), 2).unwrap();
        assert_eq!(t.factor_code(0, 3).unwrap(), 3); // 0*9 + 1*3 + 0
        assert_eq!(t.factor_code(1, 2).unwrap(), 3); // 1*3 + 0
        assert_eq!(t.factor_code(2, 1).unwrap(), 0);
    }

    #[test]
    fn factor_code_overflow_is_detected() {
        // 41 'b's over sigma 2: (3^41 - 1) / 2 still fits, but 'b' * 40 then
        // one more multiply-add with a 'c' digit cannot. Use sigma 3 where
        // 4^32 overflows cleanly instead.
        let t = PackedText::pack(&vec![2u32; 33], 3).unwrap();
        assert!(matches!(
            t.factor_code(0, 33),
            Err(CoverError::FactorCodeOverflow { .. })
        ));
        assert!(t.factor_code(0, 31).is_ok());
    }

    #[test]
    fn sentinel_digit_in_symbol_codes() {
        // Window "ab#" padded with sentinel digit sigma=2: 0*9 + 1*3 + 2.
        assert_eq!(factor_code_of_symbols(&[0, 1, 2], 2).unwrap(), 5);
    }

    proptest! {
        #[test]
        fn pack_get_roundtrip(sigma in 1u32..40, n in 0usize..300, seed in any::<u64>()) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let syms: Vec<u32> = (0..n).map(|_| rng.gen_range(0..sigma)).collect();
            let t = PackedText::pack(&syms, sigma).unwrap();
            prop_assert_eq!(t.to_vec(), syms);
            prop_assert_eq!(t.word_len(), (n * symbol_width(sigma)).div_ceil(64));
        }

        #[test]
        fn eq_ranges_agrees_with_slices(seed in any::<u64>(), n in 2usize..120) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let sigma = rng.gen_range(2..6);
            let syms: Vec<u32> = (0..n).map(|_| rng.gen_range(0..sigma)).collect();
            let t = PackedText::pack(&syms, sigma).unwrap();
            for _ in 0..16 {
                let len = rng.gen_range(0..=n / 2);
                let a = rng.gen_range(0..=n - len);
                let b = rng.gen_range(0..=n - len);
                prop_assert_eq!(t.eq_ranges(a, b, len), syms[a..a + len] == syms[b..b + len]);
            }
        }
    }
}
