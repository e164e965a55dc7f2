//! Compact index answering "shortest cover of the length-l prefix" in O(1)
//! query cost.
//!
//! The cover array Cov[l] stores the shortest cover length of every prefix.
//! Materialized it costs n words; this index shrinks it to roughly
//! n(1 + log2 log2 n) bits by exploiting two structural facts. First, when
//! the prefix is superprimitive the answer is l itself, recorded in one bit
//! per length. Second, when it is not, its shortest cover C reoccurs at some
//! position j <= |C|, gluing T[0..2j) into a square with primitive root
//! T[0..j). Square prefixes with primitive roots are rare: their half
//! lengths j_1 < j_2 < .. grow so fast (j_{i+2} > j_i + j_{i+1}) that there
//! are only t = O(log n) of them. Each non-superprimitive length thus needs
//! just ceil(log2 t) bits naming which square its cover points through.
//!
//! A query for a non-superprimitive l reads i = pref[l], takes the
//! precomputed shortest aperiodic prefix P of length p_i in [j_i, 2j_i),
//! and asks one internal-pattern-matching query for P inside
//! T[max(0, l-2p_i+1)..l). P being aperiodic, the window of length at most
//! 2p_i - 1 holds at most two occurrences; the rightmost one at position k
//! gives Cov[l] = l - k.
//!
//! # Serialized layout (version 1)
//!
//! Little-endian throughout. The byte stream is exactly:
//!
//! | field           | size                            |
//! |-----------------|---------------------------------|
//! | magic `"CVIX"`  | 4 bytes                         |
//! | version         | u32 (= 1)                       |
//! | n               | u64                             |
//! | sigma           | u64                             |
//! | t               | u64                             |
//! | square halves   | t x u64                         |
//! | aperiodic lens  | t x u64                         |
//! | sp bits         | ceil(n/64) x u64                |
//! | pref width      | u64                             |
//! | pref bits       | ceil(n*width/64) x u64          |
//! | text bits       | ceil(n*symbol_width(sigma)/64) x u64 |
//!
//! Every derived structure (the occurrence index) is rebuilt on load, so a
//! save / load / save round trip is byte-identical.

use crate::bits::{BitVec, PackedInts};
use crate::error::CoverError;
use crate::ipm_index::TextIndex;
use crate::oracles;
use crate::packed_text::PackedText;
use crate::pillar::Counters;
use std::io::{Read, Write};

/// Half lengths of all primitively rooted square prefixes of `text`,
/// ascending: j is listed iff T[0..2j) = XX with X = T[0..j) primitive.
pub fn square_prefix_halves(text: &PackedText) -> Vec<usize> {
    let syms = text.to_vec();
    let n = syms.len();
    let z = oracles::z_array(&syms);
    let per = oracles::smallest_period_array(&syms);
    (1..=n / 2)
        .filter(|&j| {
            let p = per[j - 1];
            z[j] >= j && (p == j || j % p != 0)
        })
        .collect()
}

/// Smallest p >= j such that T[0..p) is aperiodic (its smallest period
/// exceeds p/2). For j a square half this always exists below 2j, because
/// T[0..2j-1) is aperiodic whenever T[0..j) is primitive.
pub fn aperiodic_prefix_for(text: &PackedText, j: usize) -> usize {
    let syms = text.to_vec();
    let per = oracles::smallest_period_array(&syms);
    (j..2 * j)
        .find(|&p| 2 * per[p - 1] > p)
        .expect("a primitive root forces an aperiodic prefix before 2j")
}

/// The O(1)-query cover-array index. Immutable after build; concurrent
/// queries are safe.
#[derive(Debug, Clone)]
pub struct CoverArrayIndex {
    square_halves: Vec<u64>,
    aperiodic_lens: Vec<u64>,
    /// sp\[l-1\] set iff T[0..l) is superprimitive (its own shortest cover).
    sp: BitVec,
    /// For lengths with sp unset: 0-based position into `square_halves` of
    /// the square through which the shortest cover reoccurs.
    pref: PackedInts,
    ipm: TextIndex,
}

const MAGIC: &[u8; 4] = b"CVIX";
const VERSION: u32 = 1;

/// Frozen constants of the index space budget
/// `C1 * n * (log2 sigma + log2 log2 n) / log2 n + C2` bits.
pub const SPACE_C1: u64 = 24;
pub const SPACE_C2: u64 = 4096;

fn read_u64<R: Read>(r: &mut R) -> Result<u64, CoverError> {
    let mut word = [0u8; 8];
    r.read_exact(&mut word).map_err(|e| CoverError::Deserialize(e.to_string()))?;
    Ok(u64::from_le_bytes(word))
}

fn read_words<R: Read>(r: &mut R, len: usize) -> Result<Vec<u64>, CoverError> {
    let mut out = Vec::with_capacity(len);
    for _ in 0..len {
        out.push(read_u64(r)?);
    }
    Ok(out)
}

fn pref_width(t: usize) -> usize {
    if t <= 1 {
        0
    } else {
        (usize::BITS - (t - 1).leading_zeros()) as usize
    }
}

impl CoverArrayIndex {
    /// Builds the index in linear time from the online cover array, a
    /// Z-array for second occurrences, and the square-prefix scan.
    pub fn build(text: PackedText) -> Result<Self, CoverError> {
        let syms = text.to_vec();
        let n = syms.len();
        let cov = oracles::cover_array(&syms);
        let z = oracles::z_array(&syms);
        let squares = square_prefix_halves(&text);
        let aperiodic: Vec<u64> =
            squares.iter().map(|&j| aperiodic_prefix_for(&text, j) as u64).collect();

        // min_q[len] = smallest q > 0 with z[q] >= len: the position of the
        // second occurrence of the length-len prefix.
        let mut min_q = vec![usize::MAX; n + 1];
        for q in 1..n {
            let l = z[q];
            if l > 0 && q < min_q[l] {
                min_q[l] = q;
            }
        }
        for l in (1..n).rev() {
            min_q[l] = min_q[l].min(min_q[l + 1]);
        }

        let mut sp = BitVec::zeros(n);
        let mut pref = PackedInts::new(n, pref_width(squares.len()));
        for ell in 1..=n {
            let c = cov[ell - 1];
            if c == ell {
                sp.set(ell - 1, true);
                continue;
            }
            let q = min_q[c];
            if q == usize::MAX {
                return Err(CoverError::IndexCorrupt(format!(
                    "cover of prefix {ell} has no second occurrence"
                )));
            }
            let i = squares.binary_search(&q).map_err(|_| {
                CoverError::IndexCorrupt(format!(
                    "second occurrence {q} of the cover of prefix {ell} is not a square half"
                ))
            })?;
            if c > 2 * q {
                return Err(CoverError::IndexCorrupt(format!(
                    "cover of prefix {ell} does not fit its square T[0..{})",
                    2 * q
                )));
            }
            pref.set(ell - 1, i as u64);
        }

        Ok(CoverArrayIndex {
            square_halves: squares.iter().map(|&j| j as u64).collect(),
            aperiodic_lens: aperiodic,
            sp,
            pref,
            ipm: TextIndex::build(text),
        })
    }

    pub fn text(&self) -> &PackedText {
        self.ipm.text()
    }

    pub fn n(&self) -> usize {
        self.ipm.len()
    }

    pub fn square_halves(&self) -> &[u64] {
        &self.square_halves
    }

    pub fn aperiodic_lens(&self) -> &[u64] {
        &self.aperiodic_lens
    }

    pub fn is_superprimitive(&self, ell: usize) -> bool {
        self.sp.get(ell - 1)
    }

    /// Cov[ell], charging the one window query (if any) to `counters`.
    pub fn query_cov(&self, ell: usize, counters: &Counters) -> Result<usize, CoverError> {
        let n = self.n();
        if ell == 0 || ell > n {
            return Err(CoverError::LengthOutOfRange { len: ell, max: n });
        }
        if self.sp.get(ell - 1) {
            return Ok(ell);
        }
        let i = self.pref.get(ell - 1) as usize;
        let p = self.aperiodic_lens[i] as usize;
        let win_start = ell.saturating_sub(2 * p - 1);
        let occs = self.ipm.ipm_query(counters, 0..p, win_start..ell)?;
        debug_assert!(
            occs.iter().map(|o| o.count).sum::<u64>() <= 2,
            "aperiodic pattern occurred more than twice in a short window"
        );
        let k = occs
            .last()
            .map(|o| o.last() as usize)
            .ok_or_else(|| {
                CoverError::IndexCorrupt(format!(
                    "no occurrence of the aperiodic prefix ending by {ell}"
                ))
            })?;
        Ok(ell - k)
    }

    /// Cov[ell] without external accounting.
    pub fn query(&self, ell: usize) -> Result<usize, CoverError> {
        self.query_cov(ell, &Counters::new())
    }

    /// Like [`Self::query_cov`], additionally reporting how many window
    /// occurrences the query saw (diagnostics; at most 2 by construction).
    pub fn query_cov_with_occ_count(
        &self,
        ell: usize,
        counters: &Counters,
    ) -> Result<(usize, u64), CoverError> {
        let n = self.n();
        if ell == 0 || ell > n {
            return Err(CoverError::LengthOutOfRange { len: ell, max: n });
        }
        if self.sp.get(ell - 1) {
            return Ok((ell, 0));
        }
        let i = self.pref.get(ell - 1) as usize;
        let p = self.aperiodic_lens[i] as usize;
        let win_start = ell.saturating_sub(2 * p - 1);
        let occs = self.ipm.ipm_query(counters, 0..p, win_start..ell)?;
        let total: u64 = occs.iter().map(|o| o.count).sum();
        let k = occs
            .last()
            .map(|o| o.last() as usize)
            .ok_or_else(|| {
                CoverError::IndexCorrupt(format!(
                    "no occurrence of the aperiodic prefix ending by {ell}"
                ))
            })?;
        Ok((ell - k, total))
    }

    /// Size of the stored arrays in bits: the sp vector, the packed pref
    /// array, and the two length-t tables at one word each. The rebuildable
    /// occurrence index is excluded.
    pub fn size_bits(&self) -> usize {
        self.sp.size_bits()
            + self.pref.size_bits()
            + 64 * (self.square_halves.len() + self.aperiodic_lens.len())
    }

    /// Frozen space budget: [`size_bits`](Self::size_bits) must stay within
    /// this for every built index (checked on large random texts).
    pub fn space_bound_bits(n: usize, sigma: u32) -> u64 {
        if n <= 1 {
            return SPACE_C2;
        }
        let log2n = (n as f64).log2();
        let per_symbol = (sigma.max(2) as f64).log2() + log2n.log2().max(0.0);
        (SPACE_C1 as f64 * n as f64 * per_symbol / log2n).ceil() as u64 + SPACE_C2
    }

    /// Writes the version-1 blob described in the module docs.
    pub fn save<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        let text = self.ipm.text();
        w.write_all(MAGIC)?;
        w.write_all(&VERSION.to_le_bytes())?;
        let header = [
            text.len() as u64,
            u64::from(text.sigma()),
            self.square_halves.len() as u64,
        ];
        for v in header {
            w.write_all(&v.to_le_bytes())?;
        }
        for arr in [&self.square_halves, &self.aperiodic_lens] {
            for &v in arr.iter() {
                w.write_all(&v.to_le_bytes())?;
            }
        }
        for &v in self.sp.words() {
            w.write_all(&v.to_le_bytes())?;
        }
        w.write_all(&(self.pref.width() as u64).to_le_bytes())?;
        for &v in self.pref.words() {
            w.write_all(&v.to_le_bytes())?;
        }
        for i in 0..text.word_len() {
            w.write_all(&text.words()[i].to_le_bytes())?;
        }
        Ok(())
    }

    /// Reads a version-1 blob and rebuilds the derived occurrence index.
    pub fn load<R: Read>(mut r: R) -> Result<Self, CoverError> {
        let de = |msg: &str| CoverError::Deserialize(msg.to_string());
        let mut magic = [0u8; 4];
        r.read_exact(&mut magic).map_err(|e| CoverError::Deserialize(e.to_string()))?;
        if &magic != MAGIC {
            return Err(de("bad magic"));
        }
        let mut ver = [0u8; 4];
        r.read_exact(&mut ver).map_err(|e| CoverError::Deserialize(e.to_string()))?;
        if u32::from_le_bytes(ver) != VERSION {
            return Err(de("unsupported version"));
        }
        let n = read_u64(&mut r)? as usize;
        let sigma = read_u64(&mut r)?;
        if sigma == 0 || sigma > u64::from(u32::MAX) {
            return Err(de("alphabet size out of range"));
        }
        let sigma = sigma as u32;
        let t = read_u64(&mut r)? as usize;
        if t > n {
            return Err(de("square count exceeds text length"));
        }
        let square_halves = read_words(&mut r, t)?;
        let aperiodic_lens = read_words(&mut r, t)?;
        let sp_words = read_words(&mut r, n.div_ceil(64))?;
        let sp = BitVec::from_words(sp_words, n)?;
        let width = read_u64(&mut r)? as usize;
        if width != pref_width(t) {
            return Err(de("pref width inconsistent with square count"));
        }
        let pref_words = read_words(&mut r, (n * width).div_ceil(64))?;
        let pref = PackedInts::from_raw(pref_words, width, n)?;
        let text_words = read_words(
            &mut r,
            (n * crate::packed_text::symbol_width(sigma)).div_ceil(64),
        )?;
        let text = PackedText::from_raw_words(text_words, n, sigma)?;
        for pair in square_halves.windows(2) {
            if pair[0] >= pair[1] {
                return Err(de("square halves not ascending"));
            }
        }
        for (&j, &p) in square_halves.iter().zip(&aperiodic_lens) {
            if p < j || p >= 2 * j {
                return Err(de("aperiodic length outside its square"));
            }
        }
        Ok(CoverArrayIndex {
            square_halves,
            aperiodic_lens,
            sp,
            pref,
            ipm: TextIndex::build(text),
        })
    }
}
