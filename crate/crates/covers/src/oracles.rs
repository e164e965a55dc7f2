//! Reference implementations used as test oracles and bench baselines.
//!
//! Everything here works on plain `&[u32]` symbol slices, one symbol per
//! element, and uses textbook linear-time string machinery (border arrays,
//! Z-arrays, the online shortest-cover recurrence). Nothing in this module
//! shares code with the packed/sublinear pipeline, which is the point: the
//! two sides are developed independently and the tests compare them.

/// `b[i]` is the length of the longest proper border of the prefix of
/// length `i + 1`.
pub fn border_array(t: &[u32]) -> Vec<usize> {
    let n = t.len();
    let mut b = vec![0usize; n];
    let mut k = 0usize;
    for i in 1..n {
        while k > 0 && t[i] != t[k] {
            k = b[k - 1];
        }
        if t[i] == t[k] {
            k += 1;
        }
        b[i] = k;
    }
    b
}

/// `z[i]` is the length of the longest common prefix of `t` and `t[i..]`,
/// with `z[0] = n` by convention.
pub fn z_array(t: &[u32]) -> Vec<usize> {
    let n = t.len();
    let mut z = vec![0usize; n];
    if n == 0 {
        return z;
    }
    z[0] = n;
    let (mut l, mut r) = (0usize, 0usize);
    for i in 1..n {
        if i < r {
            z[i] = z[i - l].min(r - i);
        }
        while i + z[i] < n && t[z[i]] == t[i + z[i]] {
            z[i] += 1;
        }
        if i + z[i] > r {
            l = i;
            r = i + z[i];
        }
    }
    z
}

/// `per[i]` is the smallest period of the prefix of length `i + 1`.
pub fn smallest_period_array(t: &[u32]) -> Vec<usize> {
    border_array(t)
        .iter()
        .enumerate()
        .map(|(i, &b)| i + 1 - b)
        .collect()
}

/// Starting positions of the length-`m` prefix of `t` inside `t`,
/// ascending. Linear time via the Z-array.
pub fn prefix_occurrences(t: &[u32], m: usize) -> Vec<usize> {
    assert!(m >= 1 && m <= t.len());
    let z = z_array(t);
    (0..=t.len() - m).filter(|&i| z[i] >= m).collect()
}

/// Starting positions of `pat` in `text` by definitional window compare.
/// Quadratic; test-sized inputs only.
pub fn occurrences_naive(pat: &[u32], text: &[u32]) -> Vec<usize> {
    if pat.is_empty() || pat.len() > text.len() {
        return Vec::new();
    }
    (0..=text.len() - pat.len())
        .filter(|&i| &text[i..i + pat.len()] == pat)
        .collect()
}

/// Does the length-`m` prefix of `t` cover `t`? Checks the definition:
/// occurrences of the prefix must start at 0, end at `n - m`, and leave no
/// gap wider than `m`.
pub fn is_cover_naive(t: &[u32], m: usize) -> bool {
    let n = t.len();
    if m == 0 || m > n {
        return false;
    }
    if m == n {
        return true;
    }
    let occ = prefix_occurrences(t, m);
    if *occ.last().unwrap() != n - m {
        return false;
    }
    occ.windows(2).all(|w| w[1] - w[0] <= m)
}

/// All cover lengths of `t`, ascending. Every proper cover is a border, so
/// only the border chain of the whole text needs testing.
pub fn all_covers_naive(t: &[u32]) -> Vec<usize> {
    let n = t.len();
    if n == 0 {
        return Vec::new();
    }
    let b = border_array(t);
    let mut chain = Vec::new();
    let mut beta = b[n - 1];
    while beta > 0 {
        chain.push(beta);
        beta = b[beta - 1];
    }
    let mut covers: Vec<usize> = chain
        .into_iter()
        .filter(|&m| is_cover_naive(t, m))
        .collect();
    covers.reverse();
    covers.push(n);
    covers
}

/// `cov[i]` is the length of the shortest cover of the prefix of length
/// `i + 1`, by the online recurrence over the border array: the shortest
/// cover of a prefix is either the shortest cover of its longest border
/// (when that cover's tiling reaches far enough to splice with the new
/// border occurrence) or the prefix itself.
pub fn cover_array(t: &[u32]) -> Vec<usize> {
    let n = t.len();
    let b = border_array(t);
    let mut cov = vec![0usize; n];
    // reach[c] = largest prefix length currently known to be covered by the
    // prefix of length c.
    let mut reach = vec![0usize; n + 1];
    for l in 1..=n {
        let beta = b[l - 1];
        if beta > 0 && reach[cov[beta - 1]] >= l - beta {
            let c = cov[beta - 1];
            cov[l - 1] = c;
            reach[c] = l;
        } else {
            cov[l - 1] = l;
            reach[l] = l;
        }
    }
    cov
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::packed_text::latin;
    use proptest::prelude::*;

    // 21-symbol Fibonacci string: covers {3, 8, 21}.
    const FIB7: &str = "abaababaabaababaababa";

    #[test]
    fn border_array_known_values() {
        assert_eq!(border_array(&latin("abaababa")), [0, 0, 1, 1, 2, 3, 2, 3]);
        assert_eq!(border_array(&latin("aaaa")), [0, 1, 2, 3]);
        assert_eq!(border_array(&latin("abcd")), [0, 0, 0, 0]);
    }

    #[test]
    fn smallest_periods_known_values() {
        assert_eq!(
            smallest_period_array(&latin("abaababa")),
            [1, 2, 2, 3, 3, 3, 5, 5]
        );
    }

    #[test]
    fn cover_array_known_values() {
        // Worked 21-symbol example: shortest covers of all prefixes.
        assert_eq!(
            cover_array(&latin(FIB7)),
            [1, 2, 3, 4, 5, 3, 7, 3, 9, 5, 3, 12, 5, 3, 15, 3, 9, 5, 3, 20, 3]
        );
        assert_eq!(cover_array(&latin("abaababa")), [1, 2, 3, 4, 5, 3, 7, 3]);
        assert_eq!(cover_array(&latin("aaaa")), [1, 1, 1, 1]);
    }

    #[test]
    fn covers_known_values() {
        assert_eq!(all_covers_naive(&latin(FIB7)), [3, 8, 21]);
        assert_eq!(all_covers_naive(&latin("abaababa")), [3, 8]);
        assert_eq!(all_covers_naive(&latin("aaaa")), [1, 2, 3, 4]);
        assert_eq!(all_covers_naive(&latin("abca")), [4]);
        assert_eq!(all_covers_naive(&latin("a")), [1]);
    }

    #[test]
    fn cover_predicate_known_values() {
        let t = latin("abaababa");
        assert!(is_cover_naive(&t, 3));
        assert!(!is_cover_naive(&t, 2));
        assert!(!is_cover_naive(&t, 5));
        assert!(is_cover_naive(&t, 8));
        assert!(!is_cover_naive(&t, 0));
        assert!(!is_cover_naive(&t, 9));
    }

    #[test]
    fn occurrence_positions_known_values() {
        let t = latin(FIB7);
        assert_eq!(
            prefix_occurrences(&t, 3),
            [0, 3, 5, 8, 11, 13, 16, 18]
        );
        assert_eq!(occurrences_naive(&latin("aba"), &t), prefix_occurrences(&t, 3));
    }

    /// Definition-level shortest cover, no recurrences: try every length.
    fn shortest_cover_brute(t: &[u32]) -> usize {
        (1..=t.len()).find(|&m| is_cover_naive(t, m)).unwrap()
    }

    fn arb_text() -> impl Strategy<Value = Vec<u32>> {
        (1usize..=3, 1usize..24).prop_flat_map(|(sigma, n)| {
            proptest::collection::vec(0u32..sigma as u32, n)
        })
    }

    proptest! {
        #[test]
        fn z_array_matches_definition(t in arb_text()) {
            let z = z_array(&t);
            for i in 0..t.len() {
                let mut l = 0;
                while i + l < t.len() && t[l] == t[i + l] {
                    l += 1;
                }
                prop_assert_eq!(z[i], l, "suffix {}", i);
            }
        }

        #[test]
        fn border_array_matches_definition(t in arb_text()) {
            let b = border_array(&t);
            for i in 0..t.len() {
                let pref = &t[..=i];
                let best = (0..=i)
                    .rev()
                    .find(|&k| pref[..k] == pref[pref.len() - k..])
                    .unwrap();
                prop_assert_eq!(b[i], best);
            }
        }

        #[test]
        fn cover_array_matches_brute_force(t in arb_text()) {
            let cov = cover_array(&t);
            for i in 0..t.len() {
                prop_assert_eq!(cov[i], shortest_cover_brute(&t[..=i]), "prefix {}", i + 1);
            }
        }

        #[test]
        fn all_covers_matches_brute_force(t in arb_text()) {
            let brute: Vec<usize> = (1..=t.len()).filter(|&m| is_cover_naive(&t, m)).collect();
            prop_assert_eq!(all_covers_naive(&t), brute);
        }

        // The shortest cover of the shortest cover is itself (it is
        // superprimitive), and a border can grow by at most one symbol
        // per appended symbol.
        #[test]
        fn structural_invariants(t in arb_text()) {
            let cov = cover_array(&t);
            for i in 0..t.len() {
                let c = cov[i];
                prop_assert_eq!(cov[c - 1], c, "prefix {}", i + 1);
            }
            let b = border_array(&t);
            for i in 1..t.len() {
                prop_assert!(b[i] <= b[i - 1] + 1);
            }
        }
    }
}
