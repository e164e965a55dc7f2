//! Fibonacci strings and the closed form of their cover arrays.
//!
//! `Fib_0 = "b"`, `Fib_1 = "a"`, `Fib_m = Fib_{m-1} Fib_{m-2}`, so the
//! lengths satisfy `F_0 = F_1 = 1` and `F_k = F_{k-1} + F_{k-2}`. The cover
//! array of a Fibonacci string collapses to four corner cases plus a single
//! subtraction step, which [`fib_cov`] iterates in `O(log l)` arithmetic
//! operations without materializing any text.

use crate::packed_text::PackedText;

/// Ascending Fibonacci lengths, extended one entry past the construction
/// bound so every `l <= bound` can be bracketed as `F_k <= l < F_{k+1}`.
#[derive(Debug, Clone)]
pub struct FibTable {
    f: Vec<usize>,
}

impl FibTable {
    pub fn up_to(bound: usize) -> Self {
        let mut f = vec![1usize, 1];
        while *f.last().unwrap() <= bound {
            f.push(f[f.len() - 1] + f[f.len() - 2]);
        }
        FibTable { f }
    }

    pub fn lengths(&self) -> &[usize] {
        &self.f
    }

    /// Largest `k` with `F_k <= l`. The duplicate `F_0 = F_1 = 1` resolves
    /// to `k = 1`, which is fine: callers only use the bracket for `l >= 3`.
    fn bracket(&self, l: usize) -> usize {
        debug_assert!(l >= 1 && l < *self.f.last().unwrap());
        self.f.partition_point(|&v| v <= l) - 1
    }

    /// Is `v` equal to `F_j` for some `j >= 4`? Values from `F_4 = 5` up
    /// are pairwise distinct, so a binary search settles it.
    fn is_fib_at_least_4(&self, v: usize) -> bool {
        v >= 5 && self.f[4..].binary_search(&v).is_ok()
    }
}

/// The `m`-th Fibonacci string over the two-letter alphabet, `a = 0` and
/// `b = 1`.
pub fn fib_string(m: usize) -> PackedText {
    let mut prev: Vec<u32> = vec![1];
    let mut cur: Vec<u32> = vec![0];
    if m == 0 {
        return PackedText::pack(&prev, 2).expect("binary alphabet");
    }
    for _ in 1..m {
        let next = [cur.as_slice(), prev.as_slice()].concat();
        prev = cur;
        cur = next;
    }
    PackedText::pack(&cur, 2).expect("binary alphabet")
}

/// `Cov[l]` of any sufficiently long Fibonacci string (they are prefixes of
/// one another, so the value depends on `l` alone). The guard order is
/// load-bearing: the fixed points `l = F_k - 1` and `l = 2 F_k - 1` sit
/// inside the range the recursion would otherwise claim.
pub fn fib_cov(l: usize, table: &FibTable) -> usize {
    assert!(l >= 1, "prefix lengths start at 1");
    assert!(
        l < *table.f.last().unwrap(),
        "FibTable too small for l = {l}"
    );
    let mut l = l;
    loop {
        if l <= 2 {
            return l;
        }
        let k = table.bracket(l);
        if table.f[k] == l {
            return if k % 2 == 1 { 3 } else { 5 };
        }
        if table.is_fib_at_least_4(l + 1) {
            return l;
        }
        if (l + 1) % 2 == 0 && table.is_fib_at_least_4((l + 1) / 2) {
            return l;
        }
        // F_k < l < F_{k+1}: drop to l - F_{k-1}, which lands below F_k,
        // so the bracket index shrinks every round.
        l -= table.f[k - 1];
    }
}

/// What one structural pass over `Fib_m` measured.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CensusReport {
    pub m: usize,
    pub n: usize,
    /// Number of distinct values in the cover array.
    pub distinct_values: usize,
    /// Number of prefixes that are their own shortest cover.
    pub superprimitive_prefixes: usize,
    /// Lengths `l` in `[5, n)` where `Cov[l+1] = Cov[l] + 1`. Expected to
    /// stay empty; anything here is a counterexample worth reporting.
    pub counterexamples: Vec<usize>,
}

/// Runs the structural checks on `Fib_m`: counts distinct cover-array
/// values and superprimitive prefixes (both grow linearly in `m`), and
/// scans for adjacent lengths whose cover values differ by exactly one.
pub fn superprimitive_census(m: usize) -> CensusReport {
    assert!(m >= 5, "the checks only make sense from Fib_5 on");
    let text = fib_string(m).to_vec();
    let cov = crate::oracles::cover_array(&text);
    let n = text.len();
    let distinct: std::collections::HashSet<usize> = cov.iter().copied().collect();
    let superprimitive = (1..=n).filter(|&l| cov[l - 1] == l).count();
    let counterexamples: Vec<usize> = (5..n).filter(|&l| cov[l] == cov[l - 1] + 1).collect();
    CensusReport {
        m,
        n,
        distinct_values: distinct.len(),
        superprimitive_prefixes: superprimitive,
        counterexamples,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracles::cover_array;
    use crate::packed_text::latin;

    #[test]
    fn fib_string_examples() {
        assert_eq!(fib_string(0).to_vec(), latin("b"));
        assert_eq!(fib_string(1).to_vec(), latin("a"));
        assert_eq!(fib_string(2).to_vec(), latin("ab"));
        assert_eq!(fib_string(5).to_vec(), latin("abaababa"));
        assert_eq!(
            fib_string(7).to_vec(),
            latin("abaababaabaababaababa")
        );
        let table = FibTable::up_to(10_000);
        for m in 0..=15 {
            assert_eq!(fib_string(m).len(), table.lengths()[m]);
        }
    }

    #[test]
    fn table_shape() {
        let table = FibTable::up_to(100_000);
        let f = table.lengths();
        assert_eq!(f[24], 75_025);
        assert_eq!(f[25], 121_393);
        assert_eq!(f.len(), 26);
        for k in 2..f.len() {
            assert!(f[k] > f[k - 1]);
        }
        for k in 3..f.len() {
            assert!(f[k] < 2 * f[k - 1]);
        }
    }

    #[test]
    fn corner_and_spot_values() {
        let table = FibTable::up_to(100_000);
        let f = table.lengths().to_vec();

        for (k, &fk) in f.iter().enumerate().skip(3) {
            if fk >= *f.last().unwrap() {
                break;
            }
            let expect = if k % 2 == 1 { 3 } else { 5 };
            assert_eq!(fib_cov(fk, &table), expect, "F_{k} = {fk}");
        }
        for (_, &fk) in f.iter().enumerate().skip(4) {
            if fk - 1 < *f.last().unwrap() {
                assert_eq!(fib_cov(fk - 1, &table), fk - 1);
            }
            if 2 * fk - 1 < *f.last().unwrap() {
                assert_eq!(fib_cov(2 * fk - 1, &table), 2 * fk - 1);
            }
        }

        assert_eq!(fib_cov(1, &table), 1);
        assert_eq!(fib_cov(2, &table), 2);
        assert_eq!(fib_cov(6, &table), 3);
        assert_eq!(fib_cov(8, &table), 3);
        assert_eq!(fib_cov(10, &table), 5);
        assert_eq!(fib_cov(17, &table), 9);
        assert_eq!(fib_cov(20, &table), 20);
    }

    #[test]
    fn matches_the_online_recurrence() {
        let table = FibTable::up_to(121_393);
        for m in 2..=25 {
            let text = fib_string(m).to_vec();
            let cov = cover_array(&text);
            for l in 1..=text.len() {
                assert_eq!(fib_cov(l, &table), cov[l - 1], "m={m} l={l}");
            }
        }
    }

    #[test]
    fn census_reports() {
        let seven = superprimitive_census(7);
        assert_eq!(seven.n, 21);
        assert_eq!(seven.distinct_values, 10);
        assert_eq!(seven.superprimitive_prefixes, 10);
        assert!(seven.counterexamples.is_empty());

        for m in 5..=22 {
            let report = superprimitive_census(m);
            assert!(report.counterexamples.is_empty(), "m={m}");
            // every cover-array value is a superprimitive prefix length and
            // vice versa, so the two counts coincide
            assert_eq!(report.distinct_values, report.superprimitive_prefixes);
            if m >= 8 {
                assert!(report.distinct_values >= m / 2);
                assert!(report.distinct_values <= 4 * m);
            }
        }

        // the step from l = 4 to l = 5 is the one place adjacent values may
        // differ by exactly one; it sits below the checked range
        let cov = cover_array(&fib_string(7).to_vec());
        assert_eq!(cov[4], cov[3] + 1);
    }
}
