//! Occurrence machinery over one fixed text: internal pattern matching
//! queries whose cost is counted in query units, and the text's border
//! lengths grouped by powers of two.
//!
//! [`TextIndex::ipm_query`] reports every occurrence of one substring X of
//! the text inside another substring Y, packaged as arithmetic progressions.
//! Y is split into aligned windows of X-length steps; occurrences whose
//! start falls into one window span a range shorter than |X|, so each window
//! contributes at most one progression and the result has at most
//! ceil(|Y|/|X|) entries. One query charges ceil(|Y|/|X|) query units, the
//! cost the counting model assigns it; the concrete matcher behind it is an
//! implementation detail and deliberately simple.
//!
//! [`BorderGroups`] buckets the border lengths of the text by the power of
//! two below them. Borders of length within [d, 2d) are all long borders of
//! the largest among them, hence form a single arithmetic progression whose
//! difference is their common smallest period; one progression per bucket
//! stores the whole set.

use crate::error::CoverError;
use crate::oracles;
use crate::packed_text::PackedText;
use crate::pillar::{progression_from_sorted, Counters};
use crate::progressions::Progression;
use std::ops::Range;

/// Border lengths of a text, one arithmetic progression per power-of-two
/// bucket: `group(i)` holds the borders with length in `[2^i, 2^(i+1))`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BorderGroups {
    groups: Vec<Option<Progression>>,
}

impl BorderGroups {
    /// Borders with length in `[2^i, 2^(i+1))`, smallest first.
    pub fn group(&self, i: u32) -> Option<&Progression> {
        self.groups.get(i as usize).and_then(|g| g.as_ref())
    }

    /// Number of buckets allocated (index range of `group`).
    pub fn bucket_count(&self) -> usize {
        self.groups.len()
    }

    /// Non-empty groups as `(log2 of the bucket's lower bound, progression)`,
    /// in increasing order.
    pub fn iter(&self) -> impl Iterator<Item = (u32, &Progression)> {
        self.groups
            .iter()
            .enumerate()
            .filter_map(|(i, g)| g.as_ref().map(|p| (i as u32, p)))
    }

    /// Union of all groups: every proper border length of the text,
    /// ascending.
    pub fn all_borders(&self) -> Vec<usize> {
        self.iter()
            .flat_map(|(_, p)| p.iter().map(|v| v as usize))
            .collect()
    }
}

fn groups_from_chain(mut chain: Vec<usize>, n: usize) -> BorderGroups {
    chain.sort_unstable();
    let buckets = if n <= 1 { 1 } else { n.ilog2() as usize + 1 };
    let mut per_bucket: Vec<Vec<u64>> = vec![Vec::new(); buckets];
    for b in chain {
        per_bucket[b.ilog2() as usize].push(b as u64);
    }
    BorderGroups {
        groups: per_bucket
            .into_iter()
            .map(|v| progression_from_sorted(&v))
            .collect(),
    }
}

/// Groups the proper borders of `text` by powers of two.
pub fn border_groups(text: &PackedText) -> BorderGroups {
    let syms = text.to_vec();
    let b = oracles::border_array(&syms);
    let mut chain = Vec::new();
    if let Some(&last) = b.last() {
        let mut k = last;
        while k > 0 {
            chain.push(k);
            k = b[k - 1];
        }
    }
    groups_from_chain(chain, text.len())
}

/// Preprocessed occurrence index over one text. Immutable after build;
/// queries are read-only and safe to issue concurrently.
#[derive(Debug, Clone)]
pub struct TextIndex {
    text: PackedText,
    /// z[i] = length of the longest common prefix of T and T[i..].
    z: Vec<usize>,
    border: Vec<usize>,
}

impl TextIndex {
    /// Linear-time preprocessing of `text`.
    pub fn build(text: PackedText) -> Self {
        let syms = text.to_vec();
        let z = oracles::z_array(&syms);
        let border = oracles::border_array(&syms);
        TextIndex { text, z, border }
    }

    pub fn text(&self) -> &PackedText {
        &self.text
    }

    pub fn len(&self) -> usize {
        self.text.len()
    }

    pub fn is_empty(&self) -> bool {
        self.text.len() == 0
    }

    /// Border groups of the indexed text (reuses the stored border array).
    pub fn border_groups(&self) -> BorderGroups {
        let mut chain = Vec::new();
        if let Some(&last) = self.border.last() {
            let mut k = last;
            while k > 0 {
                chain.push(k);
                k = self.border[k - 1];
            }
        }
        groups_from_chain(chain, self.len())
    }

    /// All occurrences of the substring `x` of the text inside the
    /// substring `y`, as at most ceil(|y|/|x|) progressions of absolute
    /// start positions, ascending. Charges ceil(|y|/|x|) query units (at
    /// least one) and one IPM call to `counters`. `x` longer than `y`
    /// yields no occurrences.
    pub fn ipm_query(
        &self,
        counters: &Counters,
        x: Range<usize>,
        y: Range<usize>,
    ) -> Result<Vec<Progression>, CoverError> {
        let n = self.len();
        if x.is_empty() {
            return Err(CoverError::EmptyPattern);
        }
        for r in [&x, &y] {
            if r.start > r.end || r.end > n {
                return Err(CoverError::RangeOutOfBounds { start: r.start, end: r.end, len: n });
            }
        }
        let m = x.len();
        counters.add_ipm_call();
        counters.add_query_units((y.len().div_ceil(m)).max(1) as u64);
        if m > y.len() {
            return Ok(Vec::new());
        }

        // Absolute start positions of x inside y. The prefix case reads the
        // precomputed z values; the general case runs a linear matcher over
        // x ++ y. Either way the answer is the exact occurrence set.
        let occ: Vec<u64> = if x.start == 0 {
            (y.start..=y.end - m)
                .filter(|&t| self.z[t] >= m)
                .map(|t| t as u64)
                .collect()
        } else {
            let mut cat: Vec<u32> = Vec::with_capacity(m + y.len());
            cat.extend(x.clone().map(|i| self.text.get(i)));
            cat.extend(y.clone().map(|i| self.text.get(i)));
            let zc = oracles::z_array(&cat);
            (0..=y.len() - m)
                .filter(|&j| zc[m + j] >= m)
                .map(|j| (y.start + j) as u64)
                .collect()
        };

        // Bucket starts by aligned |x|-windows of y; within one bucket the
        // starts span less than |x|, so they form a single progression.
        let mut out = Vec::new();
        let mut i = 0;
        while i < occ.len() {
            let bucket = (occ[i] - y.start as u64) / m as u64;
            let mut j = i;
            while j < occ.len() && (occ[j] - y.start as u64) / m as u64 == bucket {
                j += 1;
            }
            out.push(progression_from_sorted(&occ[i..j]).unwrap());
            i = j;
        }
        Ok(out)
    }
}
