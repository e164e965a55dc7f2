//! The PILLAR query interface: fragments, the five primitives, a direct
//! backend, and the instrumented ledger used by the lower-bound adversary.
//!
//! PILLAR abstracts string algorithms over five primitive operations
//! (Extract, LCP, LCP_R, IPM, Access, plus Length) on fragments of a string
//! collection; an algorithm's cost is the number of primitives it performs.
//! [`DirectBackend`] answers the primitives honestly against packed texts.
//! [`QueryLedger`] records a transcript and maintains the set of *touched*
//! text positions, the accounting at the heart of the adversary argument:
//!
//! 1. `Access` on position i touches {i};
//! 2. `LCP` with result l touches the two matched prefixes of length l;
//! 3. `LCP_R` symmetrically touches the two matched suffixes;
//! 4. `IPM` touches both fragments entirely, but only when
//!    |X| < the ledger's threshold (the adversary sets 15(k+1)-1; larger
//!    patterns are answered structurally and touch nothing).
//!
//! `Extract` is treated as touching its whole range: the touch rules as
//! stated omit it, and over-approximating is the conservative direction for
//! the adversary's soundness. `Length` touches nothing.

use crate::error::CoverError;
use crate::oracles;
use crate::packed_text::PackedText;
use crate::progressions::Progression;
use serde::{Deserialize, Serialize};
use std::io::{BufRead, Write};
use std::sync::atomic::{AtomicU64, Ordering};

/// Shared counters for the two cost models the crate talks about: word
/// operations of the packed algorithms and query units of the PILLAR
/// interface. Relaxed atomics, so counting works unchanged when the work is
/// spread over rayon threads.
#[derive(Debug, Default)]
pub struct Counters {
    query_units: AtomicU64,
    word_ops: AtomicU64,
    ipm_calls: AtomicU64,
}

/// Point-in-time copy of [`Counters`], e.g. for JSON reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CounterSnapshot {
    pub query_units: u64,
    pub word_ops: u64,
    pub ipm_calls: u64,
}

impl Counters {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add_query_units(&self, n: u64) {
        self.query_units.fetch_add(n, Ordering::Relaxed);
    }

    #[inline]
    pub fn add_word_ops(&self, n: u64) {
        self.word_ops.fetch_add(n, Ordering::Relaxed);
    }

    #[inline]
    pub fn add_ipm_call(&self) {
        self.ipm_calls.fetch_add(1, Ordering::Relaxed);
    }

    pub fn query_units(&self) -> u64 {
        self.query_units.load(Ordering::Relaxed)
    }

    pub fn word_ops(&self) -> u64 {
        self.word_ops.load(Ordering::Relaxed)
    }

    pub fn ipm_calls(&self) -> u64 {
        self.ipm_calls.load(Ordering::Relaxed)
    }

    pub fn snapshot(&self) -> CounterSnapshot {
        CounterSnapshot {
            query_units: self.query_units(),
            word_ops: self.word_ops(),
            ipm_calls: self.ipm_calls(),
        }
    }

    pub fn reset(&self) {
        self.query_units.store(0, Ordering::Relaxed);
        self.word_ops.store(0, Ordering::Relaxed);
        self.ipm_calls.store(0, Ordering::Relaxed);
    }
}

/// Half-open window of one text in the backend's collection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fragment {
    pub text_id: u32,
    pub start: usize,
    pub end: usize,
}

impl Fragment {
    pub fn new(text_id: u32, start: usize, end: usize) -> Self {
        assert!(start <= end, "fragment start {start} past end {end}");
        Fragment { text_id, start, end }
    }

    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.start == self.end
    }
}

/// One PILLAR primitive with its arguments. `Access`/`Extract` indices are
/// relative to the fragment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum Query {
    Access { frag: Fragment, i: usize },
    Length { frag: Fragment },
    Extract { frag: Fragment, from: usize, to: usize },
    Lcp { x: Fragment, y: Fragment },
    LcpR { x: Fragment, y: Fragment },
    /// Occurrences of `x` in `y`; requires |y| <= 2|x|. Positions in the
    /// answer are relative to `y`.
    Ipm { x: Fragment, y: Fragment },
}

impl Query {
    pub fn kind(&self) -> QueryKind {
        match self {
            Query::Access { .. } => QueryKind::Access,
            Query::Length { .. } => QueryKind::Length,
            Query::Extract { .. } => QueryKind::Extract,
            Query::Lcp { .. } => QueryKind::Lcp,
            Query::LcpR { .. } => QueryKind::LcpR,
            Query::Ipm { .. } => QueryKind::Ipm,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QueryKind {
    Access,
    Length,
    Extract,
    Lcp,
    LcpR,
    Ipm,
}

pub const QUERY_KINDS: [QueryKind; 6] = [
    QueryKind::Access,
    QueryKind::Length,
    QueryKind::Extract,
    QueryKind::Lcp,
    QueryKind::LcpR,
    QueryKind::Ipm,
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Answer {
    Symbol { value: u32 },
    Len { value: usize },
    Text { symbols: Vec<u32> },
    /// IPM result; empty when x does not occur in y.
    Occurrences { progression: Option<Progression> },
}

/// Honest PILLAR backend over a collection of packed texts.
#[derive(Debug, Default)]
pub struct DirectBackend {
    texts: Vec<PackedText>,
}

impl DirectBackend {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_text(t: PackedText) -> (Self, Fragment) {
        let mut b = Self::new();
        let id = b.add_text(t);
        let frag = b.whole(id);
        (b, frag)
    }

    pub fn add_text(&mut self, t: PackedText) -> u32 {
        self.texts.push(t);
        (self.texts.len() - 1) as u32
    }

    pub fn text(&self, id: u32) -> &PackedText {
        &self.texts[id as usize]
    }

    /// Fragment spanning the entire text `id`.
    pub fn whole(&self, id: u32) -> Fragment {
        Fragment::new(id, 0, self.text(id).len())
    }

    fn resolve(&self, f: Fragment) -> Result<&PackedText, CoverError> {
        let t = self
            .texts
            .get(f.text_id as usize)
            .ok_or(CoverError::RangeOutOfBounds { start: f.start, end: f.end, len: 0 })?;
        if f.end > t.len() {
            return Err(CoverError::RangeOutOfBounds {
                start: f.start,
                end: f.end,
                len: t.len(),
            });
        }
        Ok(t)
    }

    pub fn access(&self, f: Fragment, i: usize) -> Result<u32, CoverError> {
        let t = self.resolve(f)?;
        if i >= f.len() {
            return Err(CoverError::RangeOutOfBounds {
                start: f.start + i,
                end: f.start + i + 1,
                len: f.end,
            });
        }
        Ok(t.get(f.start + i))
    }

    pub fn length(&self, f: Fragment) -> Result<usize, CoverError> {
        self.resolve(f)?;
        Ok(f.len())
    }

    pub fn extract(&self, f: Fragment, from: usize, to: usize) -> Result<Vec<u32>, CoverError> {
        let t = self.resolve(f)?;
        if from > to || to > f.len() {
            return Err(CoverError::RangeOutOfBounds { start: from, end: to, len: f.len() });
        }
        Ok((f.start + from..f.start + to).map(|i| t.get(i)).collect())
    }

    /// Longest common prefix of the two fragments, word-parallel when both
    /// texts share a symbol width.
    pub fn lcp(&self, x: Fragment, y: Fragment) -> Result<usize, CoverError> {
        let tx = self.resolve(x)?;
        let ty = self.resolve(y)?;
        let max = x.len().min(y.len());
        if tx.width() == ty.width() {
            let w = tx.width();
            let total = max * w;
            let mut done = 0usize;
            while done < total {
                let take = (total - done).min(64);
                let a = tx.read_bits_u64(x.start * w + done, take);
                let b = ty.read_bits_u64(y.start * w + done, take);
                if a != b {
                    return Ok((done + (a ^ b).trailing_zeros() as usize) / w);
                }
                done += take;
            }
            Ok(max)
        } else {
            let mut l = 0;
            while l < max && tx.get(x.start + l) == ty.get(y.start + l) {
                l += 1;
            }
            Ok(l)
        }
    }

    /// Longest common suffix of the two fragments.
    pub fn lcp_r(&self, x: Fragment, y: Fragment) -> Result<usize, CoverError> {
        let tx = self.resolve(x)?;
        let ty = self.resolve(y)?;
        let max = x.len().min(y.len());
        if tx.width() == ty.width() {
            let w = tx.width();
            let total = max * w;
            let mut done = 0usize;
            while done < total {
                let take = (total - done).min(64);
                let a = tx.read_bits_u64(x.end * w - done - take, take);
                let b = ty.read_bits_u64(y.end * w - done - take, take);
                if a != b {
                    let lz = (a ^ b).leading_zeros() as usize - (64 - take);
                    return Ok((done + lz) / w);
                }
                done += take;
            }
            Ok(max)
        } else {
            let mut l = 0;
            while l < max && tx.get(x.end - 1 - l) == ty.get(y.end - 1 - l) {
                l += 1;
            }
            Ok(l)
        }
    }

    /// All occurrences of `x` in `y` (positions relative to `y`), as the
    /// single arithmetic progression the |y| <= 2|x| regime guarantees.
    pub fn ipm(&self, x: Fragment, y: Fragment) -> Result<Option<Progression>, CoverError> {
        let tx = self.resolve(x)?;
        let ty = self.resolve(y)?;
        if x.is_empty() {
            return Err(CoverError::EmptyPattern);
        }
        if y.len() > 2 * x.len() {
            return Err(CoverError::IpmWindowTooLong { x_len: x.len(), y_len: y.len() });
        }
        if x.len() > y.len() {
            return Ok(None);
        }
        // Z-array over X . Y; linear in |x| + |y|, which is O(|x|) here.
        let mut cat: Vec<u32> = (x.start..x.end).map(|i| tx.get(i)).collect();
        cat.extend((y.start..y.end).map(|i| ty.get(i)));
        let z = oracles::z_array(&cat);
        let m = x.len();
        let occ: Vec<u64> = (0..=y.len() - m)
            .filter(|&j| z[m + j] >= m || j == 0 && cat[m..m + m] == cat[..m])
            .map(|j| j as u64)
            .collect();
        Ok(progression_from_sorted(&occ))
    }

    pub fn answer(&self, q: &Query) -> Result<Answer, CoverError> {
        Ok(match *q {
            Query::Access { frag, i } => Answer::Symbol { value: self.access(frag, i)? },
            Query::Length { frag } => Answer::Len { value: self.length(frag)? },
            Query::Extract { frag, from, to } => {
                Answer::Text { symbols: self.extract(frag, from, to)? }
            }
            Query::Lcp { x, y } => Answer::Len { value: self.lcp(x, y)? },
            Query::LcpR { x, y } => Answer::Len { value: self.lcp_r(x, y)? },
            Query::Ipm { x, y } => Answer::Occurrences { progression: self.ipm(x, y)? },
        })
    }
}

/// Packs an ascending occurrence list into one progression. Panics if the
/// list is not an arithmetic progression; in the |Y| <= 2|X| regime that
/// cannot happen (three occurrences force the period structure).
pub(crate) fn progression_from_sorted(occ: &[u64]) -> Option<Progression> {
    match occ.len() {
        0 => None,
        1 => Some(Progression::singleton(occ[0])),
        _ => {
            let diff = occ[1] - occ[0];
            for w in occ.windows(2) {
                assert_eq!(w[1] - w[0], diff, "occurrences do not form a progression");
            }
            Some(Progression::new(occ[0], diff, occ.len() as u64))
        }
    }
}

/// One transcript line: a query and the answer that was given.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TranscriptEntry {
    pub query: Query,
    pub answer: Answer,
}

/// Instrumented record of an answered query sequence: per-kind counts, the
/// transcript, and the touched-position sets, one per text.
#[derive(Debug)]
pub struct QueryLedger {
    /// IPM patterns shorter than this touch both fragments; longer ones
    /// touch nothing (the adversary's structural-answer regime).
    ipm_touch_threshold: usize,
    touched: Vec<crate::bits::BitVec>,
    transcript: Vec<TranscriptEntry>,
    counts: [u64; QUERY_KINDS.len()],
}

impl QueryLedger {
    /// `text_lens[i]` is the length of text id `i`. `ipm_touch_threshold`
    /// of `usize::MAX` makes every IPM query touch (no structural regime).
    pub fn new(text_lens: &[usize], ipm_touch_threshold: usize) -> Self {
        QueryLedger {
            ipm_touch_threshold,
            touched: text_lens.iter().map(|&n| crate::bits::BitVec::zeros(n)).collect(),
            transcript: Vec::new(),
            counts: [0; QUERY_KINDS.len()],
        }
    }

    fn kind_slot(kind: QueryKind) -> usize {
        QUERY_KINDS.iter().position(|&k| k == kind).unwrap()
    }

    fn touch_range(&mut self, text_id: u32, start: usize, end: usize) {
        self.touched[text_id as usize].set_range(start..end);
    }

    /// Applies the touch rules for `(query, answer)` and appends the pair
    /// to the transcript.
    pub fn record(&mut self, query: Query, answer: Answer) {
        self.counts[Self::kind_slot(query.kind())] += 1;
        match (&query, &answer) {
            (Query::Access { frag, i }, _) => {
                self.touch_range(frag.text_id, frag.start + i, frag.start + i + 1);
            }
            (Query::Length { .. }, _) => {}
            (Query::Extract { frag, from, to }, _) => {
                self.touch_range(frag.text_id, frag.start + from, frag.start + to);
            }
            (Query::Lcp { x, y }, Answer::Len { value: l }) => {
                self.touch_range(x.text_id, x.start, x.start + l);
                self.touch_range(y.text_id, y.start, y.start + l);
            }
            (Query::LcpR { x, y }, Answer::Len { value: l }) => {
                self.touch_range(x.text_id, x.end - l, x.end);
                self.touch_range(y.text_id, y.end - l, y.end);
            }
            (Query::Ipm { x, y }, _) => {
                if x.len() < self.ipm_touch_threshold {
                    self.touch_range(x.text_id, x.start, x.end);
                    self.touch_range(y.text_id, y.start, y.end);
                }
            }
            _ => unreachable!("answer shape does not match query"),
        }
        self.transcript.push(TranscriptEntry { query, answer });
    }

    pub fn queries_answered(&self) -> usize {
        self.transcript.len()
    }

    pub fn count(&self, kind: QueryKind) -> u64 {
        self.counts[Self::kind_slot(kind)]
    }

    pub fn touched_count(&self, text_id: u32) -> usize {
        self.touched[text_id as usize].count_ones()
    }

    pub fn is_touched(&self, text_id: u32, pos: usize) -> bool {
        self.touched[text_id as usize].get(pos)
    }

    /// Smallest untouched position of `text_id` that is `>= from`.
    pub fn first_untouched_at_or_after(&self, text_id: u32, from: usize) -> Option<usize> {
        let bits = &self.touched[text_id as usize];
        (from..bits.len()).find(|&i| !bits.get(i))
    }

    pub fn first_untouched(&self, text_id: u32) -> Option<usize> {
        self.touched[text_id as usize].first_zero()
    }

    pub fn transcript(&self) -> &[TranscriptEntry] {
        &self.transcript
    }

    /// One JSON object per line, in transcript order.
    pub fn write_jsonl<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        for entry in &self.transcript {
            serde_json::to_writer(&mut w, entry)?;
            writeln!(w)?;
        }
        Ok(())
    }

    pub fn read_jsonl<R: BufRead>(r: R) -> Result<Vec<TranscriptEntry>, CoverError> {
        let mut out = Vec::new();
        for line in r.lines() {
            let line = line.map_err(|e| CoverError::Deserialize(e.to_string()))?;
            if line.trim().is_empty() {
                continue;
            }
            out.push(
                serde_json::from_str(&line).map_err(|e| CoverError::Deserialize(e.to_string()))?,
            );
        }
        Ok(out)
    }
}

/// Re-answers `transcript` against `backend`; `Ok` when every answer matches
/// the recorded one, otherwise the index of the first divergence.
pub fn replay(backend: &DirectBackend, transcript: &[TranscriptEntry]) -> Result<(), usize> {
    for (i, entry) in transcript.iter().enumerate() {
        match backend.answer(&entry.query) {
            Ok(a) if a == entry.answer => {}
            _ => return Err(i),
        }
    }
    Ok(())
}
