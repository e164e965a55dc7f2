//! Arithmetic-progression representation of cover sets.
//!
//! The lengths of covers of a string of length n can always be written as
//! O(log^2 n) arithmetic progressions, which is what the algorithms in this
//! crate emit. [`CoverSet`] wraps the progression list with the invariants
//! the rest of the crate relies on: members strictly increase, everything is
//! in `1..=n`, and `n` itself (every string covers itself) closes the list.

use crate::bits::BitVec;
use crate::error::CoverError;
use serde::{Deserialize, Serialize};
use std::fmt;

/// `count` values `start, start + diff, ..`; `diff == 0` exactly when
/// `count == 1`, so every value set has one canonical encoding.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Progression {
    pub start: u64,
    pub diff: u64,
    pub count: u64,
}

impl Progression {
    pub fn new(start: u64, diff: u64, count: u64) -> Self {
        assert!(count >= 1, "empty progression");
        assert!(count == 1 || diff > 0, "repeated members in progression");
        Progression {
            start,
            diff: if count == 1 { 0 } else { diff },
            count,
        }
    }

    pub fn singleton(v: u64) -> Self {
        Progression { start: v, diff: 0, count: 1 }
    }

    pub fn last(&self) -> u64 {
        self.start + self.diff * (self.count - 1)
    }

    pub fn contains(&self, v: u64) -> bool {
        if v < self.start || v > self.last() {
            return false;
        }
        if self.count == 1 {
            return v == self.start;
        }
        (v - self.start) % self.diff == 0
    }

    pub fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        (0..self.count).map(move |k| self.start + k * self.diff)
    }
}

impl fmt::Display for Progression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.start, self.diff, self.count)
    }
}

/// The cover lengths of a text of length `n`, as disjoint sorted
/// progressions.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverSet {
    n: usize,
    progressions: Vec<Progression>,
}

impl CoverSet {
    /// Validates and wraps a progression list. Requirements: members lie in
    /// `1..=n`, concatenating the progressions yields a strictly increasing
    /// sequence, and (for non-empty texts) the final member is `n`.
    pub fn from_progressions(n: usize, progressions: Vec<Progression>) -> Result<Self, CoverError> {
        let bad = |msg: String| CoverError::IndexCorrupt(msg);
        let mut prev: u64 = 0;
        for p in &progressions {
            if p.count == 0 || (p.count > 1 && p.diff == 0) {
                return Err(bad(format!("non-canonical progression {p:?}")));
            }
            if p.start <= prev {
                return Err(bad(format!(
                    "progression starting at {} does not extend past {}",
                    p.start, prev
                )));
            }
            prev = p.last();
            if prev > n as u64 {
                return Err(bad(format!("member {prev} exceeds text length {n}")));
            }
        }
        if n > 0 && prev != n as u64 {
            return Err(bad(format!("cover set for length {n} must end with {n}")));
        }
        Ok(CoverSet { n, progressions })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn progressions(&self) -> &[Progression] {
        &self.progressions
    }

    /// Total number of cover lengths represented.
    pub fn member_count(&self) -> u64 {
        self.progressions.iter().map(|p| p.count).sum()
    }

    /// Is `len` a cover length? O(log of the progression count).
    pub fn contains(&self, len: usize) -> Result<bool, CoverError> {
        if len == 0 || len > self.n {
            return Err(CoverError::LengthOutOfRange { len, max: self.n });
        }
        let v = len as u64;
        // Index of the last progression with start <= v.
        let idx = self.progressions.partition_point(|p| p.start <= v);
        if idx == 0 {
            return Ok(false);
        }
        Ok(self.progressions[idx - 1].contains(v))
    }

    /// All members, ascending. Linear in the member count.
    pub fn enumerate(&self) -> Vec<usize> {
        self.progressions
            .iter()
            .flat_map(|p| p.iter())
            .map(|v| v as usize)
            .collect()
    }

    /// Bit `l - 1` is set iff `l` is a cover length.
    pub fn to_bitmask(&self) -> BitVec {
        let mut b = BitVec::zeros(self.n);
        for p in &self.progressions {
            for v in p.iter() {
                b.set(v as usize - 1, true);
            }
        }
        b
    }
}

impl fmt::Display for CoverSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n={}:", self.n)?;
        for p in &self.progressions {
            write!(f, " [{p}]")?;
        }
        Ok(())
    }
}
