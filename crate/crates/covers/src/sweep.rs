//! Bulk differential sweeps: enumerate or sample texts, run the full
//! pipeline on each, and compare every observable against the naive
//! oracles. The per-text work is embarrassingly parallel, so the scan runs
//! on rayon when the `parallel` feature is on; the sequential path is kept
//! callable either way because the benches race the two against each other.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::cover_algorithms::{
    build_factor_set, covers, long_covers, short_cover_threshold, short_covers,
};
use crate::cover_array_ds::CoverArrayIndex;
use crate::ipm_index::TextIndex;
use crate::oracles;
use crate::packed_text::PackedText;
use crate::pillar::Counters;

/// Aggregate of one sweep. `examples` holds at most [`MAX_EXAMPLES`]
/// failure descriptions; `failures` counts all of them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SweepOutcome {
    pub texts: u64,
    pub failures: u64,
    pub examples: Vec<String>,
}

pub const MAX_EXAMPLES: usize = 16;

impl SweepOutcome {
    pub fn is_clean(&self) -> bool {
        self.failures == 0
    }

    fn from_failures(texts: u64, mut failures: Vec<String>) -> Self {
        failures.sort();
        let count = failures.len() as u64;
        failures.truncate(MAX_EXAMPLES);
        SweepOutcome { texts, failures: count, examples: failures }
    }
}

/// `sigma^len`, the size of one enumeration stratum.
pub fn text_count(sigma: u32, len: usize) -> u64 {
    (sigma as u64)
        .checked_pow(len as u32)
        .expect("stratum too large to enumerate")
}

/// The `code`-th string of length `len` over `[0, sigma)`, big-endian in
/// the symbol order, so code 0 is all zeros.
pub fn decode_text(code: u64, sigma: u32, len: usize) -> Vec<u32> {
    let mut symbols = vec![0u32; len];
    let mut rest = code;
    for slot in symbols.iter_mut().rev() {
        *slot = (rest % sigma as u64) as u32;
        rest /= sigma as u64;
    }
    debug_assert_eq!(rest, 0);
    symbols
}

/// Ceiling of `log2(n + 1)`.
fn ceil_log2_np1(n: usize) -> usize {
    (n + 1).next_power_of_two().trailing_zeros() as usize
}

/// Computed covers against the naive enumeration, plus the progression
/// budget `2 ceil(log2(n+1)) + 4`. `None` means the text is clean.
pub fn check_covers(symbols: &[u32], sigma: u32) -> Option<String> {
    let text = PackedText::pack(symbols, sigma).expect("enumerated symbols fit the alphabet");
    let set = match covers(&text) {
        Ok(s) => s,
        Err(e) => return Some(format!("covers failed on {symbols:?}: {e}")),
    };
    let got = set.enumerate();
    let want = oracles::all_covers_naive(symbols);
    if got != want {
        return Some(format!("covers mismatch on {symbols:?}: got {got:?} want {want:?}"));
    }
    let budget = 2 * ceil_log2_np1(symbols.len()) + 4;
    if set.progressions().len() > budget {
        return Some(format!(
            "progression budget exceeded on {symbols:?}: {} > {budget}",
            set.progressions().len()
        ));
    }
    None
}

/// The deeper per-text differential: cover partition, constant-time
/// cover-array queries, and IPM answers, all against the oracles.
pub fn check_text_full(symbols: &[u32], sigma: u32, rng: &mut ChaCha8Rng) -> Option<String> {
    if let Some(fail) = check_covers(symbols, sigma) {
        return Some(fail);
    }
    let text = PackedText::pack(symbols, sigma).expect("checked above");
    let n = symbols.len();
    let counters = Counters::new();

    // short/long partition stitches back into the full set
    let c = short_cover_threshold(n, sigma);
    let mut partitioned: Vec<usize> = Vec::new();
    if c >= 1 {
        let ctx = build_factor_set(&text, c, &counters);
        partitioned.extend(short_covers(&text, &ctx, &counters));
    }
    let idx = TextIndex::build(text.clone());
    match long_covers(&idx, c, &counters) {
        Ok(progs) => {
            let mut longs: Vec<usize> =
                progs.iter().flat_map(|p| p.iter().map(|v| v as usize)).collect();
            longs.sort_unstable();
            longs.dedup();
            if let Some(&first) = longs.first() {
                if first <= c {
                    return Some(format!("long cover {first} at or below threshold {c} on {symbols:?}"));
                }
            }
            partitioned.extend(longs);
        }
        Err(e) => return Some(format!("long_covers failed on {symbols:?}: {e}")),
    }
    partitioned.sort_unstable();
    partitioned.dedup();
    if partitioned != oracles::all_covers_naive(symbols) {
        return Some(format!("partition mismatch on {symbols:?}: {partitioned:?}"));
    }

    if n == 0 {
        return None;
    }

    // constant-time queries against the online recurrence
    let index = match CoverArrayIndex::build(text.clone()) {
        Ok(i) => i,
        Err(e) => return Some(format!("index build failed on {symbols:?}: {e}")),
    };
    let cov = oracles::cover_array(symbols);
    let lens: Vec<usize> = if n <= 256 {
        (1..=n).collect()
    } else {
        (0..256).map(|_| rng.gen_range(1..=n)).collect()
    };
    for ell in lens {
        match index.query(ell) {
            Ok(v) if v == cov[ell - 1] => {}
            Ok(v) => {
                return Some(format!(
                    "query mismatch on {symbols:?} at {ell}: got {v} want {}",
                    cov[ell - 1]
                ))
            }
            Err(e) => return Some(format!("query failed on {symbols:?} at {ell}: {e}")),
        }
    }

    // IPM occurrence lists against the naive matcher
    for _ in 0..8 {
        let xlen = rng.gen_range(1..=n);
        let xs = rng.gen_range(0..=n - xlen);
        let ylen = rng.gen_range(0..=n);
        let ys = rng.gen_range(0..=n - ylen);
        let got: Vec<usize> = match idx.ipm_query(&counters, xs..xs + xlen, ys..ys + ylen) {
            Ok(progs) => progs.iter().flat_map(|p| p.iter().map(|v| v as usize)).collect(),
            Err(e) => return Some(format!("ipm_query failed on {symbols:?}: {e}")),
        };
        let want: Vec<usize> = oracles::occurrences_naive(&symbols[xs..xs + xlen], symbols)
            .into_iter()
            .filter(|&t| t >= ys && t + xlen <= ys + ylen)
            .collect();
        if got != want {
            return Some(format!(
                "ipm mismatch on {symbols:?} x={xs}..{} y={ys}..{}: got {got:?} want {want:?}",
                xs + xlen,
                ys + ylen
            ));
        }
    }
    None
}

fn check_code(code: u64, sigma: u32, len: usize) -> Option<String> {
    let symbols = decode_text(code, sigma, len);
    check_covers(&symbols, sigma)
}

/// Sequential scan of every length-`len` text over `[0, sigma)`.
pub fn scan_stratum_seq(sigma: u32, len: usize) -> Vec<String> {
    (0..text_count(sigma, len)).filter_map(|code| check_code(code, sigma, len)).collect()
}

#[cfg(feature = "parallel")]
fn scan_stratum(sigma: u32, len: usize) -> Vec<String> {
    (0..text_count(sigma, len))
        .into_par_iter()
        .filter_map(|code| check_code(code, sigma, len))
        .collect()
}

#[cfg(not(feature = "parallel"))]
fn scan_stratum(sigma: u32, len: usize) -> Vec<String> {
    scan_stratum_seq(sigma, len)
}

/// Checks every text over `[0, sigma)` of every length up to `max_len`.
pub fn exhaustive(sigma: u32, max_len: usize) -> SweepOutcome {
    let mut texts = 0u64;
    let mut failures = Vec::new();
    for len in 0..=max_len {
        texts += text_count(sigma, len);
        failures.extend(scan_stratum(sigma, len));
    }
    SweepOutcome::from_failures(texts, failures)
}

/// The same scan pinned to one thread, for the bench comparison.
pub fn exhaustive_seq(sigma: u32, max_len: usize) -> SweepOutcome {
    let mut texts = 0u64;
    let mut failures = Vec::new();
    for len in 0..=max_len {
        texts += text_count(sigma, len);
        failures.extend(scan_stratum_seq(sigma, len));
    }
    SweepOutcome::from_failures(texts, failures)
}

fn random_case(i: u64, seed: u64, max_len: usize, sigmas: &[u32]) -> Option<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ i.wrapping_mul(0x9E37_79B9_7F4A_7C15));
    let sigma = sigmas[rng.gen_range(0..sigmas.len())];
    let len = rng.gen_range(1..=max_len);
    let symbols: Vec<u32> = (0..len).map(|_| rng.gen_range(0..sigma)).collect();
    check_text_full(&symbols, sigma, &mut rng)
}

/// `count` random texts with lengths in `[1, max_len]` and alphabets drawn
/// from `sigmas`, through the full differential. Deterministic in `seed`
/// regardless of thread count.
pub fn random_differential(count: u64, max_len: usize, sigmas: &[u32], seed: u64) -> SweepOutcome {
    #[cfg(feature = "parallel")]
    let failures: Vec<String> = (0..count)
        .into_par_iter()
        .filter_map(|i| random_case(i, seed, max_len, sigmas))
        .collect();
    #[cfg(not(feature = "parallel"))]
    let failures: Vec<String> =
        (0..count).filter_map(|i| random_case(i, seed, max_len, sigmas)).collect();
    SweepOutcome::from_failures(count, failures)
}
