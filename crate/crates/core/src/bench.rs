//! Timing harness behind the `bench` command.
//!
//! Every (op, size, workers) cell is run `reps` times on the same seeded
//! input. Each run becomes one CSV row, followed by a row whose `rep` column
//! is `median`. The checksum hashes the op's output, so it must not change
//! with the worker count or chunk size.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::assembler::{reconstruct_indexed, AssemblyError, SearchLimits};
use crate::parallel::{chunked_radix_sort, radix_sort, ConfigError, Executor, ExecutorConfig, KeyArray};
use crate::seqmodel::AlphabetMode;
use crate::shotgun::{random_sequence, random_spaced_instance, ShotgunError};
use crate::suffixarray::{build_parallel, SaError};

pub const CSV_HEADER: &str = "op,n,workers,chunk_size,rep,wall_time_ns,checksum";

/// Smallest and largest size accepted under strict sizing.
pub const STRICT_MIN: usize = 1 << 10;
pub const STRICT_MAX: usize = 1 << 20;

/// Mean distance between neighbouring breakpoints in generated instances,
/// and the smallest allowed one.
pub const BREAKPOINT_SPACING: usize = 32;
pub const MIN_GAP: usize = 12;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("size {0} is not a power of two in [{STRICT_MIN}, {STRICT_MAX}]")]
    BadSize(usize),
    #[error("size {0} is too small for a {1} instance")]
    TooSmall(usize, &'static str),
    #[error("at least one repetition is required")]
    NoReps,
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Shotgun(#[from] ShotgunError),
    #[error(transparent)]
    SuffixArray(#[from] SaError),
    #[error("reconstruction failed: {0}")]
    Assembly(#[from] AssemblyError),
    #[error("bad csv line {line}: {reason}")]
    Csv { line: usize, reason: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BenchOp {
    RadixSort,
    ChunkedRadixSort,
    BuildParallel,
    Reconstruct,
}

impl BenchOp {
    pub const ALL: [BenchOp; 4] = [
        BenchOp::RadixSort,
        BenchOp::ChunkedRadixSort,
        BenchOp::BuildParallel,
        BenchOp::Reconstruct,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BenchOp::RadixSort => "radix_sort",
            BenchOp::ChunkedRadixSort => "chunked_radix_sort",
            BenchOp::BuildParallel => "build_parallel",
            BenchOp::Reconstruct => "reconstruct",
        }
    }
}

impl fmt::Display for BenchOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BenchOp {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        BenchOp::ALL
            .into_iter()
            .find(|op| op.name() == s)
            .ok_or_else(|| format!("unknown op {s:?}"))
    }
}

/// What `n` counts for the text-based ops. Sort ops always take `n` keys.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SizeUnit {
    /// `n` fragments; the sequence is long enough to cut into that many.
    Frags,
    /// `n` bases of original sequence.
    #[default]
    Bases,
}

impl FromStr for SizeUnit {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "frags" => Ok(SizeUnit::Frags),
            "bases" => Ok(SizeUnit::Bases),
            _ => Err(format!("unknown unit {s:?}, expected frags or bases")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rep {
    Run(usize),
    Median,
}

impl fmt::Display for Rep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rep::Run(i) => write!(f, "{i}"),
            Rep::Median => f.write_str("median"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BenchRecord {
    pub op: BenchOp,
    pub n: usize,
    pub workers: usize,
    pub chunk_size: usize,
    pub rep: Rep,
    pub wall_time_ns: u64,
    pub checksum: u64,
}

impl BenchRecord {
    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{}",
            self.op, self.n, self.workers, self.chunk_size, self.rep, self.wall_time_ns, self.checksum
        )
    }
}

/// Parses CSV written by [`write_csv`], header included.
pub fn parse_csv(text: &str) -> Result<Vec<BenchRecord>, BenchError> {
    let mut lines = text.lines().enumerate();
    let bad = |line: usize, reason: &str| BenchError::Csv {
        line: line + 1,
        reason: reason.to_string(),
    };
    match lines.next() {
        Some((_, h)) if h == CSV_HEADER => {}
        _ => return Err(bad(0, "missing header")),
    }
    lines
        .map(|(i, line)| {
            let cols: Vec<&str> = line.split(',').collect();
            if cols.len() != 7 {
                return Err(bad(i, "expected 7 columns"));
            }
            let num = |s: &str| s.parse::<u64>().map_err(|e| bad(i, &e.to_string()));
            Ok(BenchRecord {
                op: cols[0].parse().map_err(|e: String| bad(i, &e))?,
                n: num(cols[1])? as usize,
                workers: num(cols[2])? as usize,
                chunk_size: num(cols[3])? as usize,
                rep: if cols[4] == "median" {
                    Rep::Median
                } else {
                    Rep::Run(num(cols[4])? as usize)
                },
                wall_time_ns: num(cols[5])?,
                checksum: num(cols[6])?,
            })
        })
        .collect()
}

pub fn write_csv<W: std::io::Write>(mut out: W, records: &[BenchRecord]) -> std::io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for r in records {
        writeln!(out, "{}", r.csv_row())?;
    }
    Ok(())
}

/// Rejects sizes that are not powers of two in `[2^10, 2^20]`.
pub fn check_strict_sizes(sizes: &[usize]) -> Result<(), BenchError> {
    match sizes
        .iter()
        .find(|&&n| !n.is_power_of_two() || !(STRICT_MIN..=STRICT_MAX).contains(&n))
    {
        Some(&n) => Err(BenchError::BadSize(n)),
        None => Ok(()),
    }
}

/// `2^lo, 2^(lo+1), …, 2^hi`.
pub fn power_sizes(lo: u32, hi: u32) -> Vec<usize> {
    (lo..=hi).map(|e| 1usize << e).collect()
}

#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub ops: Vec<BenchOp>,
    pub sizes: Vec<usize>,
    pub workers: Vec<usize>,
    pub chunk_size: usize,
    pub reps: usize,
    pub seed: u64,
    pub unit: SizeUnit,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            ops: BenchOp::ALL.to_vec(),
            sizes: power_sizes(10, 20),
            workers: vec![1],
            chunk_size: ExecutorConfig::DEFAULT_CHUNK_SIZE,
            reps: 3,
            seed: 42,
            unit: SizeUnit::Bases,
        }
    }
}

/// FNV-1a over a byte stream; stable across platforms and runs.
#[derive(Debug, Clone, Copy)]
pub struct Checksum(u64);

impl Default for Checksum {
    fn default() -> Self {
        Checksum(0xcbf2_9ce4_8422_2325)
    }
}

impl Checksum {
    pub fn bytes(mut self, data: &[u8]) -> Self {
        for &b in data {
            self.0 = (self.0 ^ b as u64).wrapping_mul(0x0000_0100_0000_01b3);
        }
        self
    }

    pub fn words(self, data: &[u32]) -> Self {
        data.iter().fold(self, |c, w| c.bytes(&w.to_le_bytes()))
    }

    pub fn finish(self) -> u64 {
        self.0
    }
}

enum Input {
    Keys(KeyArray),
    Text(Vec<u8>),
    Instance(crate::seqmodel::FragmentSet),
}

/// Sequence length and cut counts for an instance of size `n`.
fn instance_shape(n: usize, unit: SizeUnit) -> Result<(usize, usize), BenchError> {
    // k = 2 * (cuts + 1) fragments over len / SPACING breakpoint slots
    let (len, cuts) = match unit {
        SizeUnit::Bases => (n, (n / (2 * BREAKPOINT_SPACING)).saturating_sub(1)),
        SizeUnit::Frags => {
            if n < 2 || n % 2 == 1 {
                return Err(BenchError::TooSmall(n, "fragment"));
            }
            (n * BREAKPOINT_SPACING, n / 2 - 1)
        }
    };
    if len < (2 * cuts + 1) * MIN_GAP || len == 0 {
        return Err(BenchError::TooSmall(n, "sequence"));
    }
    Ok((len, cuts))
}

fn make_input(op: BenchOp, n: usize, cfg: &BenchConfig) -> Result<Input, BenchError> {
    let seed = cfg.seed ^ (n as u64).rotate_left(32);
    Ok(match op {
        BenchOp::RadixSort | BenchOp::ChunkedRadixSort => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            Input::Keys(KeyArray::indexed((0..n).map(|_| rng.gen()).collect()))
        }
        BenchOp::BuildParallel if cfg.unit == SizeUnit::Bases => {
            Input::Text(random_sequence(n, AlphabetMode::Dna, seed).into_bytes())
        }
        BenchOp::BuildParallel | BenchOp::Reconstruct => {
            let (len, cuts) = instance_shape(n, cfg.unit)?;
            let inst = random_spaced_instance(len, cuts, cuts, MIN_GAP, AlphabetMode::Dna, seed)?;
            match op {
                BenchOp::BuildParallel => Input::Text(inst.fragments.concat().to_vec()),
                _ => Input::Instance(inst.fragments),
            }
        }
    })
}

fn run_once(input: &Input, op: BenchOp, exec: &Executor) -> Result<u64, BenchError> {
    let sum = Checksum::default();
    Ok(match (op, input) {
        (BenchOp::RadixSort, Input::Keys(arr)) => {
            let out = radix_sort(arr, exec);
            sum.words(&out.keys)
                .words(out.payload.as_deref().unwrap_or(&[]))
                .finish()
        }
        (BenchOp::ChunkedRadixSort, Input::Keys(arr)) => {
            let out = chunked_radix_sort(arr, exec);
            sum.words(&out.keys)
                .words(out.payload.as_deref().unwrap_or(&[]))
                .finish()
        }
        (BenchOp::BuildParallel, Input::Text(text)) => sum.words(&build_parallel(text, exec)?.sa).finish(),
        (BenchOp::Reconstruct, Input::Instance(set)) => {
            let res = reconstruct_indexed(set, SearchLimits::default(), exec)?;
            sum.bytes(res.sequence.as_bytes()).finish()
        }
        _ => unreachable!("input built for another op"),
    })
}

fn median(mut times: Vec<u64>) -> u64 {
    times.sort_unstable();
    let m = times.len() / 2;
    if times.len() % 2 == 1 {
        times[m]
    } else {
        (times[m - 1] + times[m]) / 2
    }
}

/// Runs every configured cell, handing each record to `sink` as soon as it
/// is measured.
pub fn run_bench(cfg: &BenchConfig, mut sink: impl FnMut(&BenchRecord)) -> Result<Vec<BenchRecord>, BenchError> {
    if cfg.reps == 0 {
        return Err(BenchError::NoReps);
    }
    let mut records = Vec::new();
    for &op in &cfg.ops {
        for &n in &cfg.sizes {
            let input = make_input(op, n, cfg)?;
            for &workers in &cfg.workers {
                let exec = Executor::new(ExecutorConfig::new(workers, cfg.chunk_size)?);
                let mut times = Vec::with_capacity(cfg.reps);
                let mut checksum = 0;
                for rep in 0..cfg.reps {
                    let start = Instant::now();
                    checksum = run_once(&input, op, &exec)?;
                    let ns = start.elapsed().as_nanos() as u64;
                    times.push(ns);
                    let rec = BenchRecord {
                        op,
                        n,
                        workers,
                        chunk_size: cfg.chunk_size,
                        rep: Rep::Run(rep),
                        wall_time_ns: ns,
                        checksum,
                    };
                    sink(&rec);
                    records.push(rec);
                }
                let rec = BenchRecord {
                    op,
                    n,
                    workers,
                    chunk_size: cfg.chunk_size,
                    rep: Rep::Median,
                    wall_time_ns: median(times),
                    checksum,
                };
                sink(&rec);
                records.push(rec);
            }
        }
    }
    Ok(records)
}
