//! Adversary harness showing that few PILLAR queries cannot pin down
//! quasiperiodicity.
//!
//! The reference text `T_k` applies a 15-symbol morphism to a binary de
//! Bruijn sequence of order `k`. Every window of `T_k` of length
//! `15(k+1) - 1` is distinct, so the adversary can answer `Access`,
//! `Length`, `Extract`, `LCP` and `LCP_R` truthfully, answer long-pattern
//! IPM queries purely from interval containment, and still keep almost the
//! whole text untouched. After the query budget `q = 2^k / (6k)` runs out,
//! some untouched position can be flipped: one completion is covered by
//! `aba`, the other has no cover but itself, and both replay the entire
//! transcript unchanged. Hence the algorithm under test cannot have
//! decided anything.

use std::collections::HashSet;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::CoverError;
use crate::oracles;
use crate::packed_text::PackedText;
use crate::pillar::{replay, Answer, DirectBackend, Fragment, Query, QueryLedger};
use crate::progressions::Progression;

/// `phi(0)`: (ab)^3 a (ab) a (ab)^2 a, covered by `aba`.
pub const PHI0: [u32; 15] = [0, 1, 0, 1, 0, 1, 0, 0, 1, 0, 0, 1, 0, 1, 0];
/// `phi(1)`: (ab)^3 a (ab)^2 a (ab) a, covered by `aba`. Differs from
/// `phi(0)` exactly at offsets 10 and 11.
pub const PHI1: [u32; 15] = [0, 1, 0, 1, 0, 1, 0, 0, 1, 0, 1, 0, 0, 1, 0];

pub fn phi(bit: u32) -> &'static [u32; 15] {
    match bit {
        0 => &PHI0,
        1 => &PHI1,
        _ => panic!("phi is defined on bits"),
    }
}

/// Binary de Bruijn sequence of order `k`, linearized: the canonical
/// necklace-concatenation cycle of length `2^k` with its first `k - 1`
/// symbols appended, so every length-`k` substring appears exactly once.
pub fn de_bruijn(k: usize) -> Vec<u32> {
    assert!(k >= 1);
    let mut seq: Vec<u32> = Vec::with_capacity((1 << k) + k - 1);
    let mut a = vec![0u32; k + 1];
    // Lyndon words over {0,1} of length dividing k, in lexicographic order.
    fn gen(t: usize, p: usize, k: usize, a: &mut [u32], seq: &mut Vec<u32>) {
        if t > k {
            if k % p == 0 {
                seq.extend_from_slice(&a[1..=p]);
            }
        } else {
            a[t] = a[t - p];
            gen(t + 1, p, k, a, seq);
            for j in (a[t - p] + 1)..2 {
                a[t] = j;
                gen(t + 1, t, k, a, seq);
            }
        }
    }
    gen(1, 1, k, &mut a, &mut seq);
    debug_assert_eq!(seq.len(), 1 << k);
    let head: Vec<u32> = seq[..k - 1].to_vec();
    seq.extend(head);
    seq
}

/// `T_k`: the order-`k` de Bruijn sequence run through `phi`, length
/// `15 (2^k + k - 1)`.
pub fn adversary_text(k: usize) -> PackedText {
    let mut symbols = Vec::with_capacity(15 * ((1 << k) + k - 1));
    for bit in de_bruijn(k) {
        symbols.extend_from_slice(phi(bit));
    }
    PackedText::pack(&symbols, 2).expect("binary alphabet")
}

/// Verifies that all windows of length `l` are pairwise distinct, by exact
/// comparison of their bit images (at most 256 bits each here).
fn assert_distinct_windows(text: &PackedText, l: usize) {
    let n = text.len();
    if n < l {
        return;
    }
    let w = text.width() as usize;
    let bits = l * w;
    assert!(bits <= 256, "window image does not fit four words");
    let mut seen: HashSet<[u64; 4]> = HashSet::with_capacity(n - l + 1);
    for s in 0..=n - l {
        let base = s * w;
        let mut key = [0u64; 4];
        for (j, slot) in key.iter_mut().enumerate() {
            let off = j * 64;
            if off < bits {
                *slot = text.read_bits_u64(base + off, (bits - off).min(64));
            }
        }
        assert!(seen.insert(key), "windows of length {l} collide at start {s}");
    }
}

/// The adversary: the reference text, an honest backend over it, the query
/// budget, and the ledger tracking touches and the transcript.
#[derive(Debug)]
pub struct AdversaryState {
    k: usize,
    q: u64,
    backend: DirectBackend,
    whole: Fragment,
    ledger: QueryLedger,
}

impl AdversaryState {
    pub fn build(k: usize) -> Self {
        assert!(k >= 1);
        let text = adversary_text(k);
        let n = text.len();
        assert_eq!(n, 15 * ((1usize << k) + k - 1));
        assert_distinct_windows(&text, 15 * (k + 1) - 1);
        let q = (1u64 << k) / (6 * k as u64);
        let (backend, whole) = DirectBackend::with_text(text);
        let ledger = QueryLedger::new(&[n], 15 * (k + 1) - 1);
        AdversaryState { k, q, backend, whole, ledger }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.whole.len()
    }

    /// Query budget `2^k / (6k)`.
    pub fn q(&self) -> u64 {
        self.q
    }

    /// The whole reference text as a fragment (text id 0).
    pub fn whole(&self) -> Fragment {
        self.whole
    }

    pub fn text(&self) -> &PackedText {
        self.backend.text(0)
    }

    pub fn ledger(&self) -> &QueryLedger {
        &self.ledger
    }

    /// Patterns at least this long are answered structurally.
    fn ipm_cutoff(&self) -> usize {
        15 * (self.k + 1) - 1
    }

    /// Answers one query, records it, and applies the touch rules. Long
    /// IPM patterns are resolved from interval containment alone, which
    /// window distinctness makes indistinguishable from the honest answer.
    pub fn answer(&mut self, query: Query) -> Result<Answer, CoverError> {
        if self.ledger.queries_answered() as u64 >= self.q {
            return Err(CoverError::BudgetExhausted { budget: self.q });
        }
        let answer = match query {
            Query::Ipm { x, y } if x.len() >= self.ipm_cutoff() => {
                self.backend.length(x)?;
                self.backend.length(y)?;
                if y.len() > 2 * x.len() {
                    return Err(CoverError::IpmWindowTooLong { x_len: x.len(), y_len: y.len() });
                }
                let contained =
                    x.text_id == y.text_id && y.start <= x.start && x.end <= y.end;
                Answer::Occurrences {
                    progression: contained
                        .then(|| Progression::singleton((x.start - y.start) as u64)),
                }
            }
            _ => self.backend.answer(&query)?,
        };
        self.ledger.record(query, answer.clone());
        Ok(answer)
    }
}

/// Which query stream to run against the adversary.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Driver {
    RandomQueries,
    CoverPipeline,
}

impl std::str::FromStr for Driver {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "random-queries" => Ok(Driver::RandomQueries),
            "cover-pipeline" => Ok(Driver::CoverPipeline),
            other => Err(format!("unknown driver {other:?}")),
        }
    }
}

/// Issues `q` random queries. The stream is adversarial-friendly but fair:
/// LCP pairs use distinct starts and LCP_R pairs distinct ends (same-start
/// comparisons carry no information), extractions stay below `15(k+1)`
/// symbols, and IPM windows respect `|Y| <= 2|X|`.
pub fn drive_random(state: &mut AdversaryState, seed: u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = state.n();
    let whole = state.whole();
    let cutoff = 15 * (state.k() + 1) - 1;
    while (state.ledger().queries_answered() as u64) < state.q() {
        let query = match rng.gen_range(0..6u32) {
            0 => Query::Access { frag: whole, i: rng.gen_range(0..n) },
            1 => {
                let start = rng.gen_range(0..=n);
                let end = rng.gen_range(start..=n);
                Query::Length { frag: Fragment::new(0, start, end) }
            }
            2 => {
                let len = rng.gen_range(1..=(cutoff + 1).min(n));
                let start = rng.gen_range(0..=n - len);
                Query::Extract { frag: whole, from: start, to: start + len }
            }
            3 => {
                let a = rng.gen_range(0..n);
                let b = loop {
                    let b = rng.gen_range(0..n);
                    if b != a {
                        break b;
                    }
                };
                Query::Lcp { x: Fragment::new(0, a, n), y: Fragment::new(0, b, n) }
            }
            4 => {
                let a = rng.gen_range(1..=n);
                let b = loop {
                    let b = rng.gen_range(1..=n);
                    if b != a {
                        break b;
                    }
                };
                Query::LcpR { x: Fragment::new(0, 0, a), y: Fragment::new(0, 0, b) }
            }
            _ => {
                let small = rng.gen_bool(0.5);
                let xlen = if small {
                    rng.gen_range(1..cutoff.min(n))
                } else {
                    rng.gen_range(cutoff..=n)
                };
                let ylen = rng.gen_range(xlen..=(2 * xlen).min(n));
                let ys = rng.gen_range(0..=n - ylen);
                let xs = if small || rng.gen_bool(0.5) {
                    rng.gen_range(0..=n - xlen)
                } else {
                    // force interval containment so the structural branch
                    // also reports occurrences, not only misses
                    rng.gen_range(ys..=ys + (ylen - xlen))
                };
                Query::Ipm {
                    x: Fragment::new(0, xs, xs + xlen),
                    y: Fragment::new(0, ys, ys + ylen),
                }
            }
        };
        state.answer(query).expect("driver stays within budget");
    }
}

/// Issues the PILLAR stream the sublinear cover pipeline would open with on
/// a text it can only see through the model: one `Length`, suffix-prefix
/// border probes at halving scales, then aligned short-pattern IPM scans.
/// Truncated to the budget.
pub fn drive_cover_pipeline(state: &mut AdversaryState) {
    let n = state.n();
    let whole = state.whole();
    let mut pending = vec![Query::Length { frag: whole }];
    let mut m = n - 1;
    while m >= 1 {
        pending.push(Query::LcpR { x: Fragment::new(0, 0, m), y: whole });
        if m == 1 {
            break;
        }
        m /= 2;
    }
    let c = 3;
    let mut i = 0;
    while i * c < n {
        let ys = i * c;
        let ye = (ys + 2 * c).min(n);
        if ye - ys >= c {
            pending.push(Query::Ipm {
                x: Fragment::new(0, 0, c),
                y: Fragment::new(0, ys, ye),
            });
        }
        i += 1;
    }
    for query in pending.into_iter().take(state.q() as usize) {
        state.answer(query).expect("stream is truncated to the budget");
    }
}

/// The two completions the adversary can still commit to after the run.
#[derive(Debug)]
pub struct Finalization {
    pub flip_position: usize,
    /// The reference text itself; covered by `aba`.
    pub t_cover: PackedText,
    /// The reference text with one untouched position flipped; its shortest
    /// cover is the whole string.
    pub t_superprimitive: PackedText,
}

fn flipped_text(text: &PackedText, i: usize) -> PackedText {
    let mut symbols = text.to_vec();
    symbols[i] ^= 1;
    PackedText::pack(&symbols, text.sigma()).expect("alphabet unchanged")
}

/// Picks the smallest untouched position whose flip leaves every recorded
/// answer intact under honest re-evaluation, and returns both completions.
/// Panics if the budget invariant was violated and no position is left.
pub fn finalize(state: &AdversaryState) -> Finalization {
    let transcript = state.ledger().transcript();
    assert!(
        replay(&state.backend, transcript).is_ok(),
        "structural answers must agree with the reference text"
    );
    let mut from = 0;
    loop {
        let i = state
            .ledger()
            .first_untouched_at_or_after(0, from)
            .expect("query budget leaves untouched positions");
        let flipped = flipped_text(state.text(), i);
        let (alt, _) = DirectBackend::with_text(flipped.clone());
        if replay(&alt, transcript).is_ok() {
            return Finalization {
                flip_position: i,
                t_cover: state.text().clone(),
                t_superprimitive: flipped,
            };
        }
        from = i + 1;
    }
}

/// One experiment, serialized for external tooling.
#[derive(Debug, Clone, Serialize)]
pub struct ExperimentReport {
    pub k: usize,
    pub n: usize,
    pub q: u64,
    pub queries_issued: usize,
    pub touched_count: usize,
    pub flip_position: usize,
    pub cover_check: bool,
    pub superprimitive_check: bool,
}

/// Builds `T_k`, runs the driver to the budget, checks the touched-position
/// bound, finalizes, and validates both completions with the naive oracles.
pub fn run_experiment(k: usize, driver: Driver, seed: u64) -> ExperimentReport {
    let mut state = AdversaryState::build(k);
    match driver {
        Driver::RandomQueries => drive_random(&mut state, seed),
        Driver::CoverPipeline => drive_cover_pipeline(&mut state),
    }
    let touched = state.ledger().touched_count(0);
    if state.q() == 0 {
        assert_eq!(touched, 0, "no queries, no touches");
    } else {
        let bound = 45 * state.q() * (state.k() as u64 + 1);
        assert!((touched as u64) < bound, "touched {touched} >= bound {bound}");
    }
    let fin = finalize(&state);
    let cover_symbols = fin.t_cover.to_vec();
    let sp_symbols = fin.t_superprimitive.to_vec();
    let n = state.n();
    ExperimentReport {
        k,
        n,
        q: state.q(),
        queries_issued: state.ledger().queries_answered(),
        touched_count: touched,
        flip_position: fin.flip_position,
        cover_check: oracles::is_cover_naive(&cover_symbols, 3),
        superprimitive_check: oracles::all_covers_naive(&sp_symbols) == vec![n],
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::packed_text::latin;

    #[test]
    fn phi_blocks() {
        assert_eq!(PHI0.to_vec(), latin("abababaabaababa"));
        assert_eq!(PHI1.to_vec(), latin("abababaababaaba"));
        assert!(oracles::is_cover_naive(&PHI0, 3));
        assert!(oracles::is_cover_naive(&PHI1, 3));
        let mismatches: Vec<usize> = (0..15).filter(|&i| PHI0[i] != PHI1[i]).collect();
        assert_eq!(mismatches, [10, 11]);
    }

    #[test]
    fn de_bruijn_examples() {
        assert_eq!(de_bruijn(1), [0, 1]);
        assert_eq!(de_bruijn(2), [0, 0, 1, 1, 0]);
        for k in 1..=10 {
            let b = de_bruijn(k);
            assert_eq!(b.len(), (1 << k) + k - 1);
            let windows: HashSet<&[u32]> = b.windows(k).collect();
            assert_eq!(windows.len(), 1 << k, "order {k}");
        }
    }

    #[test]
    fn reference_text_shape() {
        for k in [2, 5, 6, 10] {
            let t = adversary_text(k);
            assert_eq!(t.len(), 15 * ((1 << k) + k - 1));
            assert!(oracles::is_cover_naive(&t.to_vec(), 3));
        }
        assert_eq!(adversary_text(2).len(), 75);
        assert_eq!(adversary_text(6).len(), 1035);
        assert_eq!(adversary_text(10).len(), 15495);
    }

    #[test]
    fn budget_values() {
        let expected = [(4, 0), (5, 1), (6, 1), (7, 3), (8, 5), (10, 17), (12, 56), (14, 195)];
        for (k, q) in expected {
            assert_eq!((1u64 << k) / (6 * k as u64), q, "k={k}");
        }
    }

    #[test]
    fn budget_is_enforced_and_touches_follow_answers() {
        let mut state = AdversaryState::build(5);
        assert_eq!(state.q(), 1);
        let whole = state.whole();
        let a = state.answer(Query::Access { frag: whole, i: 7 }).unwrap();
        assert_eq!(a, Answer::Symbol { value: state.text().get(7) });
        assert!(state.ledger().is_touched(0, 7));
        assert_eq!(state.ledger().touched_count(0), 1);
        let denied = state.answer(Query::Length { frag: whole });
        assert!(matches!(denied, Err(CoverError::BudgetExhausted { budget: 1 })));
    }

    #[test]
    fn structural_ipm_matches_honest_answers() {
        // On T_2 (n = 75, cutoff 44) the containment rule must coincide
        // with real pattern matching for every long-pattern query shape.
        let k = 2;
        let cutoff = 15 * (k + 1) - 1;
        let (backend, whole) = DirectBackend::with_text(adversary_text(k));
        let n = whole.len();
        for xs in 0..n {
            for xe in (xs + cutoff).min(n)..=n {
                let xlen = xe - xs;
                if xlen < cutoff {
                    continue;
                }
                for ys in 0..n {
                    for ye in ys..=(ys + 2 * xlen).min(n) {
                        let x = Fragment::new(0, xs, xe);
                        let y = Fragment::new(0, ys, ye);
                        let honest = backend.ipm(x, y).unwrap();
                        let contained = ys <= xs && xe <= ye;
                        let structural = if xlen > ye - ys {
                            None
                        } else {
                            contained.then(|| Progression::singleton((xs - ys) as u64))
                        };
                        assert_eq!(honest, structural, "x={xs}..{xe} y={ys}..{ye}");
                    }
                }
            }
        }
    }

    #[test]
    fn experiments_with_both_drivers() {
        for k in 4..=8 {
            for driver in [Driver::RandomQueries, Driver::CoverPipeline] {
                let report = run_experiment(k, driver, 0xC0FFEE + k as u64);
                assert_eq!(report.n, 15 * ((1 << k) + k - 1));
                assert_eq!(report.queries_issued as u64, report.q);
                assert!(report.cover_check, "k={k} {driver:?}");
                assert!(report.superprimitive_check, "k={k} {driver:?}");
                assert!(report.flip_position < report.n);
            }
        }
    }

    #[test]
    fn random_driver_is_seed_deterministic() {
        let a = run_experiment(7, Driver::RandomQueries, 99);
        let b = run_experiment(7, Driver::RandomQueries, 99);
        assert_eq!(a.touched_count, b.touched_count);
        assert_eq!(a.flip_position, b.flip_position);
        for seed in 0..10 {
            let r = run_experiment(6, Driver::RandomQueries, seed);
            assert!(r.cover_check && r.superprimitive_check, "seed {seed}");
        }
    }
}
