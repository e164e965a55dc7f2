//! Command-line front end: cover computation, cover-array queries,
//! Fibonacci arrays, adversary experiments, and counted benchmarks.

use std::collections::HashMap;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use covers::cover_algorithms::{
    build_factor_set, covers_with, short_cover_threshold, short_covers,
};
use covers::cover_array_ds::CoverArrayIndex;
use covers::fibonacci::{fib_cov, fib_string, FibTable};
use covers::ipm_index::TextIndex;
use covers::lower_bound::{run_experiment, Driver};
use covers::oracles;
use covers::packed_text::PackedText;
use covers::pillar::Counters;

#[derive(Parser)]
#[command(name = "covers", version, about = "String covers of packed texts")]
struct Cli {
    /// Structured output where the command supports it.
    #[arg(long, global = true)]
    json: bool,

    /// Alphabet size override (at least the number of distinct input bytes).
    #[arg(long, global = true)]
    sigma: Option<u32>,

    /// Seed for randomized suites.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Short-cover threshold override; only honored when COVERS_TEST_MODE=1.
    #[arg(long, global = true, hide = true)]
    force_c: Option<usize>,

    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct InputArgs {
    /// Path of the text to read.
    input: Option<PathBuf>,

    /// Inline text instead of a file.
    #[arg(long, conflicts_with = "input")]
    text: Option<String>,
}

#[derive(Subcommand)]
enum Cmd {
    /// All cover lengths of the text, as progressions and flattened.
    Covers {
        #[command(flatten)]
        input: InputArgs,
        /// Cross-check against the naive enumeration; mismatch exits 3.
        #[arg(long)]
        oracle: bool,
    },
    /// Constant-time shortest-cover-of-prefix queries.
    CoverArray {
        #[command(flatten)]
        input: InputArgs,
        /// Prefix length to query.
        #[arg(long, conflicts_with = "all")]
        query: Option<usize>,
        /// Print the whole cover array.
        #[arg(long)]
        all: bool,
        /// Print measured index bits against the frozen budget.
        #[arg(long)]
        stats: bool,
        /// Cross-check every length against the online recurrence.
        #[arg(long)]
        oracle: bool,
    },
    /// Cover array of the m-th Fibonacci string, from the closed form.
    Fib {
        m: usize,
        /// Single prefix length instead of the whole array.
        #[arg(long)]
        query: Option<usize>,
    },
    /// One adversary experiment; emits the JSON report.
    Adversary {
        k: usize,
        /// random-queries or cover-pipeline.
        #[arg(long)]
        driver: String,
    },
    /// Counted-operation benchmark over random binary texts.
    Bench {
        /// Text lengths; defaults to the doublings from 2^14 to 2^22.
        #[arg(long, value_delimiter = ',')]
        sizes: Vec<usize>,
    },
}

enum Failure {
    Usage(String),
    Io(String),
    Mismatch(String),
}

impl Failure {
    fn exit(&self) -> ExitCode {
        let (code, msg) = match self {
            Failure::Usage(m) => (1, m),
            Failure::Io(m) => (2, m),
            Failure::Mismatch(m) => (3, m),
        };
        eprintln!("error: {msg}");
        ExitCode::from(code)
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let ok = matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion);
            let _ = e.print();
            return if ok { ExitCode::SUCCESS } else { ExitCode::from(1) };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => f.exit(),
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    let force_c = checked_force_c(cli.force_c)?;
    match &cli.cmd {
        Cmd::Covers { input, oracle } => {
            let (symbols, sigma) = load_input(input, cli.sigma)?;
            cmd_covers(&symbols, sigma, force_c, *oracle, cli.json)
        }
        Cmd::CoverArray { input, query, all, stats, oracle } => {
            let (symbols, sigma) = load_input(input, cli.sigma)?;
            if query.is_none() && !all && !stats && !oracle {
                return Err(Failure::Usage(
                    "pass --query L, --all, --stats, or --oracle".into(),
                ));
            }
            cmd_cover_array(&symbols, sigma, *query, *all, *stats, *oracle, cli.json)
        }
        Cmd::Fib { m, query } => cmd_fib(*m, *query, cli.json),
        Cmd::Adversary { k, driver } => cmd_adversary(*k, driver, cli.seed),
        Cmd::Bench { sizes } => cmd_bench(sizes, cli.sigma, cli.seed, force_c),
    }
}

fn checked_force_c(flag: Option<usize>) -> Result<Option<usize>, Failure> {
    match flag {
        None => Ok(None),
        Some(c) => {
            if std::env::var("COVERS_TEST_MODE").as_deref() == Ok("1") {
                Ok(Some(c))
            } else {
                Err(Failure::Usage("--force-c requires COVERS_TEST_MODE=1".into()))
            }
        }
    }
}

/// Maps distinct input bytes to `[0, sigma)` in first-occurrence order.
fn load_input(input: &InputArgs, sigma_flag: Option<u32>) -> Result<(Vec<u32>, u32), Failure> {
    let bytes: Vec<u8> = match (&input.input, &input.text) {
        (Some(path), None) => {
            let mut raw = fs::read(path)
                .map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
            if raw.last() == Some(&b'\n') {
                raw.pop();
                if raw.last() == Some(&b'\r') {
                    raw.pop();
                }
            }
            raw
        }
        (None, Some(text)) => text.clone().into_bytes(),
        _ => return Err(Failure::Usage("provide exactly one of FILE or --text".into())),
    };
    let mut seen: HashMap<u8, u32> = HashMap::new();
    let mut symbols = Vec::with_capacity(bytes.len());
    for b in bytes {
        let next = seen.len() as u32;
        symbols.push(*seen.entry(b).or_insert(next));
    }
    let inferred = (seen.len() as u32).max(1);
    let sigma = match sigma_flag {
        Some(s) if s < inferred => {
            return Err(Failure::Usage(format!(
                "--sigma {s} is smaller than the {inferred} distinct input symbols"
            )))
        }
        Some(s) => s,
        None => inferred,
    };
    Ok((symbols, sigma))
}

fn pack(symbols: &[u32], sigma: u32) -> Result<PackedText, Failure> {
    PackedText::pack(symbols, sigma).map_err(|e| Failure::Usage(e.to_string()))
}

fn cmd_covers(
    symbols: &[u32],
    sigma: u32,
    force_c: Option<usize>,
    oracle: bool,
    json: bool,
) -> Result<(), Failure> {
    let text = pack(symbols, sigma)?;
    let set = covers_with(&text, force_c, &Counters::new())
        .map_err(|e| Failure::Usage(e.to_string()))?;
    let lengths = set.enumerate();
    if oracle {
        let want = oracles::all_covers_naive(symbols);
        if lengths != want {
            return Err(Failure::Mismatch(format!(
                "covers disagree with the oracle: got {lengths:?} want {want:?}"
            )));
        }
    }
    if json {
        let progs: Vec<[u64; 3]> =
            set.progressions().iter().map(|p| [p.start, p.diff, p.count]).collect();
        println!(
            "{}",
            serde_json::json!({ "n": text.len(), "progressions": progs, "lengths": lengths })
        );
    } else {
        for p in set.progressions() {
            println!("{p}");
        }
        println!("{lengths:?}");
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_cover_array(
    symbols: &[u32],
    sigma: u32,
    query: Option<usize>,
    all: bool,
    stats: bool,
    oracle: bool,
    json: bool,
) -> Result<(), Failure> {
    let text = pack(symbols, sigma)?;
    let n = text.len();
    let index = CoverArrayIndex::build(text).map_err(|e| Failure::Usage(e.to_string()))?;
    if oracle {
        let want = oracles::cover_array(symbols);
        for ell in 1..=n {
            let got = index.query(ell).map_err(|e| Failure::Usage(e.to_string()))?;
            if got != want[ell - 1] {
                return Err(Failure::Mismatch(format!(
                    "cover array disagrees at {ell}: got {got} want {}",
                    want[ell - 1]
                )));
            }
        }
    }
    if let Some(ell) = query {
        let value = index.query(ell).map_err(|e| Failure::Usage(e.to_string()))?;
        if json {
            println!("{}", serde_json::json!({ "l": ell, "cov": value }));
        } else {
            println!("{value}");
        }
    }
    if all {
        let values: Vec<usize> = (1..=n)
            .map(|ell| index.query(ell))
            .collect::<Result<_, _>>()
            .map_err(|e| Failure::Usage(e.to_string()))?;
        if json {
            println!("{}", serde_json::json!({ "n": n, "cov": values }));
        } else {
            let line: Vec<String> = values.iter().map(|v| v.to_string()).collect();
            println!("{}", line.join(" "));
        }
    }
    if stats {
        let bits = index.size_bits() as u64;
        let bound = CoverArrayIndex::space_bound_bits(n, sigma);
        if json {
            println!(
                "{}",
                serde_json::json!({
                    "n": n, "sigma": sigma,
                    "index_bits": bits, "bound_bits": bound,
                    "within_bound": bits <= bound,
                })
            );
        } else {
            println!("index bits: {bits}");
            println!("bound bits: {bound}");
            println!("within bound: {}", bits <= bound);
        }
    }
    Ok(())
}

fn cmd_fib(m: usize, query: Option<usize>, json: bool) -> Result<(), Failure> {
    if m > 30 {
        return Err(Failure::Usage("m larger than 30 is not materializable here".into()));
    }
    let n = fib_string(m).len();
    let table = FibTable::up_to(n);
    match query {
        Some(ell) => {
            if ell < 1 || ell > n {
                return Err(Failure::Usage(format!("query {ell} outside 1..={n}")));
            }
            let value = fib_cov(ell, &table);
            if json {
                println!("{}", serde_json::json!({ "m": m, "l": ell, "cov": value }));
            } else {
                println!("{value}");
            }
        }
        None => {
            let values: Vec<usize> = (1..=n).map(|ell| fib_cov(ell, &table)).collect();
            if json {
                println!("{}", serde_json::json!({ "m": m, "n": n, "cov": values }));
            } else {
                let line: Vec<String> = values.iter().map(|v| v.to_string()).collect();
                println!("{}", line.join(" "));
            }
        }
    }
    Ok(())
}

fn cmd_adversary(k: usize, driver: &str, seed: u64) -> Result<(), Failure> {
    if !(1..=16).contains(&k) {
        return Err(Failure::Usage("k must be between 1 and 16".into()));
    }
    let driver: Driver = driver.parse().map_err(Failure::Usage)?;
    let report = run_experiment(k, driver, seed);
    println!("{}", serde_json::to_string(&report).expect("report serializes"));
    Ok(())
}

fn cmd_bench(
    sizes: &[usize],
    sigma: Option<u32>,
    seed: u64,
    force_c: Option<usize>,
) -> Result<(), Failure> {
    let sigma = sigma.unwrap_or(2);
    let sizes: Vec<usize> = if sizes.is_empty() {
        (14..=22).map(|e| 1usize << e).collect()
    } else {
        sizes.to_vec()
    };
    for &n in &sizes {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ n as u64);
        let symbols: Vec<u32> = (0..n).map(|_| rng.gen_range(0..sigma)).collect();
        let text = pack(&symbols, sigma)?;
        let c = force_c.unwrap_or_else(|| short_cover_threshold(n, sigma));

        let short = Counters::new();
        if c >= 1 {
            let ctx = build_factor_set(&text, c, &short);
            short_covers(&text, &ctx, &short);
        }
        let long = Counters::new();
        let idx = TextIndex::build(text.clone());
        covers::cover_algorithms::long_covers(&idx, c, &long)
            .map_err(|e| Failure::Usage(e.to_string()))?;

        println!(
            "{}",
            serde_json::json!({
                "n": n, "sigma": sigma, "c": c,
                "short_word_ops": short.word_ops(),
                "short_query_units": short.query_units(),
                "long_query_units": long.query_units(),
                "long_word_ops": long.word_ops(),
                "ipm_calls": long.ipm_calls(),
            })
        );
    }
    Ok(())
}
