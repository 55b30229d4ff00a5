mod config;

use std::fs;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use dualcut::assembler::{
    format_trace, reconstruct_indexed, reconstruct_with, verify_tiling, AssemblyError, NaiveEngine,
    ReconstructionResult, SearchLimits,
};
use dualcut::bench::{self, BenchConfig, BenchOp, SizeUnit};
use dualcut::io::{parse_sequence, read_fragments, write_fragments};
use dualcut::overlap::{exact_superstring_small, greedy_superstring, OverlapGraph};
use dualcut::parallel::{Executor, ExecutorConfig};
use dualcut::shotgun::{double_cut, random_cut_pair, spaced_cut_pair};
use dualcut::suffixarray::build_parallel;
use dualcut::{AlphabetMode, FragmentSet};

use config::FileConfig;

const EXIT_UNSOLVABLE: u8 = 2;
const EXIT_LIMIT: u8 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "dualcut",
    version,
    about = "Reassemble a sequence from two complete shotgun cuttings"
)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Global {
    /// Worker threads (default: available cores)
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Elements per chunk for chunked sorting
    #[arg(long, global = true)]
    chunk_size: Option<usize>,
    /// Seed for every random choice
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output format: txt or bin for build-sa, csv for overlap dump
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Alphabet of sequences and fragments: dna or generic
    #[arg(long, global = true)]
    alphabet: Option<String>,
    /// TOML file with workers, chunk_size, seed, alphabet, max_nodes
    #[arg(long, global = true)]
    config: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Format {
    Txt,
    Bin,
    Csv,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Cut a sequence twice and write the shuffled fragments
    Shotgun {
        /// FASTA or raw sequence file
        input: PathBuf,
        /// Breakpoints in the first cutting
        #[arg(short)]
        m: usize,
        /// Breakpoints in the second cutting
        #[arg(short)]
        n: usize,
        /// Keep every breakpoint at least this far from the others and the ends
        #[arg(long)]
        min_gap: Option<usize>,
        /// Fragment file; cut positions go to `<out>.cuts`
        #[arg(short, long)]
        out: PathBuf,
    },
    /// Reconstruct the original sequence from a fragment file
    Reconstruct {
        fragments: PathBuf,
        /// Scan every fragment for each query
        #[arg(long, conflicts_with = "indexed")]
        naive: bool,
        /// Answer queries from the suffix-array index (default)
        #[arg(long)]
        indexed: bool,
        /// Print the move trace after the stats
        #[arg(long)]
        emit_trace: bool,
        #[arg(long)]
        max_nodes: Option<u64>,
    },
    /// Overlap-graph baselines
    Overlap {
        #[arg(value_enum)]
        mode: OverlapMode,
        fragments: PathBuf,
    },
    /// Build the suffix array of a sequence file
    BuildSa {
        input: PathBuf,
        /// Output file (default: stdout)
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Time the parallel primitives and write CSV
    Bench {
        /// Sizes, comma separated (default: 2^10 .. 2^20)
        #[arg(long, value_delimiter = ',')]
        sizes: Vec<usize>,
        /// Reject sizes that are not powers of two in [2^10, 2^20]
        #[arg(long)]
        strict_sizes: bool,
        /// Worker counts to compare, comma separated (default: --workers)
        #[arg(long, value_delimiter = ',')]
        worker_counts: Vec<usize>,
        /// Ops to run, comma separated (default: all)
        #[arg(long, value_delimiter = ',')]
        ops: Vec<BenchOp>,
        #[arg(long, default_value_t = 3)]
        reps: usize,
        /// What n counts for the text ops
        #[arg(long, default_value = "bases")]
        unit: SizeUnit,
        /// CSV file (default: stdout)
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Check that a candidate is tiled twice by the fragments
    Verify { fragments: PathBuf, candidate: PathBuf },
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum OverlapMode {
    Dump,
    Greedy,
    Exact,
}

struct Settings {
    exec: Executor,
    seed: u64,
    mode: AlphabetMode,
    max_nodes: Option<u64>,
    format: Option<Format>,
    workers: usize,
    chunk_size: usize,
}

impl Settings {
    fn resolve(g: &Global) -> Result<Self> {
        let file = match &g.config {
            Some(path) => FileConfig::load(path)?,
            None => FileConfig::default(),
        };
        let defaults = ExecutorConfig::default();
        let workers = g.workers.or(file.workers).unwrap_or(defaults.workers);
        let chunk_size = g.chunk_size.or(file.chunk_size).unwrap_or(defaults.chunk_size);
        let exec = Executor::new(ExecutorConfig::new(workers, chunk_size)?);
        let mode = match g.alphabet.as_deref().or(file.alphabet.as_deref()).unwrap_or("dna") {
            "dna" => AlphabetMode::Dna,
            "generic" => AlphabetMode::GenericByte,
            other => bail!("unknown alphabet {other:?}, expected dna or generic"),
        };
        Ok(Settings {
            exec,
            seed: g.seed.or(file.seed).unwrap_or(0),
            mode,
            max_nodes: file.max_nodes,
            format: g.format,
            workers,
            chunk_size,
        })
    }

    fn fragments(&self, path: &Path) -> Result<FragmentSet> {
        let file = fs::File::open(path).with_context(|| format!("opening {}", path.display()))?;
        read_fragments(BufReader::new(file), self.mode).with_context(|| format!("reading {}", path.display()))
    }

    fn sequence(&self, path: &Path) -> Result<dualcut::Sequence> {
        let data = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
        parse_sequence(&data, self.mode).with_context(|| format!("parsing {}", path.display()))
    }
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            fs::File::create(p).with_context(|| format!("creating {}", p.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn cmd_shotgun(s: &Settings, input: &Path, m: usize, n: usize, min_gap: Option<usize>, out: &Path) -> Result<()> {
    let seq = s.sequence(input)?;
    let (a, b) = match min_gap {
        Some(gap) => spaced_cut_pair(seq.len(), m, n, gap, s.seed)?,
        None => random_cut_pair(seq.len(), m, n, s.seed)?,
    };
    let inst = double_cut(&seq, &a, &b, s.seed.rotate_left(17))?;
    let mut w = output(Some(out))?;
    write_fragments(&mut w, &inst.fragments)?;
    w.flush()?;
    let mut sidecar = out.as_os_str().to_owned();
    sidecar.push(".cuts");
    let dump = inst.dump();
    let meta: String = dump.lines().take(3).map(|l| format!("{l}\n")).collect();
    let trivial = if inst.has_trivial_cutting() {
        "trivial_cutting\n"
    } else {
        ""
    };
    fs::write(&sidecar, format!("{meta}{trivial}")).context("writing cut metadata")?;
    Ok(())
}

fn cmd_reconstruct(
    s: &Settings,
    path: &Path,
    naive: bool,
    emit_trace: bool,
    max_nodes: Option<u64>,
) -> Result<ExitCode> {
    let set = s.fragments(path)?;
    let mut limits = SearchLimits::default();
    if let Some(cap) = max_nodes.or(s.max_nodes) {
        limits.max_nodes = cap;
    }
    let result = if naive {
        reconstruct_with(&NaiveEngine::new(&set), limits)
    } else {
        reconstruct_indexed(&set, limits, &s.exec)
    };
    match result {
        Ok(ReconstructionResult { sequence, trace, stats }) => {
            let mut out = output(None)?;
            out.write_all(sequence.as_bytes())?;
            writeln!(
                out,
                "\n# nodes_expanded {} backtracks {} max_depth {}",
                stats.nodes_expanded, stats.backtracks, stats.max_depth
            )?;
            if emit_trace {
                out.write_all(format_trace(&trace).as_bytes())?;
            }
            out.flush()?;
            Ok(ExitCode::SUCCESS)
        }
        Err(AssemblyError::Unsolvable) => {
            eprintln!("dualcut: no reconstruction exists");
            Ok(ExitCode::from(EXIT_UNSOLVABLE))
        }
        Err(e @ AssemblyError::LimitExceeded(_)) => {
            eprintln!("dualcut: {e}");
            Ok(ExitCode::from(EXIT_LIMIT))
        }
        Err(e) => Err(e.into()),
    }
}

fn cmd_overlap(s: &Settings, mode: OverlapMode, path: &Path) -> Result<()> {
    let set = s.fragments(path)?;
    let mut out = output(None)?;
    match mode {
        OverlapMode::Dump => {
            if s.format.is_some_and(|f| f != Format::Csv) {
                bail!("overlap dump only writes csv");
            }
            out.write_all(OverlapGraph::build(&set).to_csv().as_bytes())?;
        }
        OverlapMode::Greedy => writeln!(out, "{}", String::from_utf8_lossy(greedy_superstring(&set)?.as_bytes()))?,
        OverlapMode::Exact => writeln!(
            out,
            "{}",
            String::from_utf8_lossy(exact_superstring_small(&set)?.as_bytes())
        )?,
    }
    out.flush()?;
    Ok(())
}

fn cmd_build_sa(s: &Settings, input: &Path, out: Option<&Path>) -> Result<()> {
    let seq = s.sequence(input)?;
    let sa = build_parallel(seq.as_bytes(), &s.exec)?;
    let mut w = output(out)?;
    match s.format.unwrap_or(Format::Txt) {
        Format::Txt => {
            for p in &sa.sa {
                writeln!(w, "{p}")?;
            }
        }
        Format::Bin => {
            for p in &sa.sa {
                w.write_all(&p.to_le_bytes())?;
            }
        }
        Format::Csv => bail!("build-sa writes txt or bin"),
    }
    w.flush()?;
    Ok(())
}

struct BenchArgs {
    sizes: Vec<usize>,
    strict_sizes: bool,
    worker_counts: Vec<usize>,
    ops: Vec<BenchOp>,
    reps: usize,
    unit: SizeUnit,
    out: Option<PathBuf>,
}

fn cmd_bench(s: &Settings, args: BenchArgs) -> Result<()> {
    let mut cfg = BenchConfig {
        workers: vec![s.workers],
        chunk_size: s.chunk_size,
        reps: args.reps,
        seed: s.seed,
        unit: args.unit,
        ..BenchConfig::default()
    };
    if !args.sizes.is_empty() {
        cfg.sizes = args.sizes;
    }
    if args.strict_sizes {
        bench::check_strict_sizes(&cfg.sizes)?;
    }
    if !args.worker_counts.is_empty() {
        cfg.workers = args.worker_counts;
    }
    if !args.ops.is_empty() {
        cfg.ops = args.ops;
    }
    let mut w = output(args.out.as_deref())?;
    writeln!(w, "{}", bench::CSV_HEADER)?;
    let mut failed = None;
    bench::run_bench(&cfg, |r| {
        if failed.is_none() {
            failed = writeln!(w, "{}", r.csv_row()).err();
        }
    })?;
    if let Some(e) = failed {
        return Err(e.into());
    }
    w.flush()?;
    Ok(())
}

fn cmd_verify(s: &Settings, fragments: &Path, candidate: &Path) -> Result<ExitCode> {
    let set = s.fragments(fragments)?;
    let seq = s.sequence(candidate)?;
    if verify_tiling(seq.as_bytes(), &set) {
        println!("valid");
        Ok(ExitCode::SUCCESS)
    } else {
        println!("invalid");
        Ok(ExitCode::FAILURE)
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    let s = Settings::resolve(&cli.global)?;
    match cli.command {
        Command::Shotgun {
            input,
            m,
            n,
            min_gap,
            out,
        } => cmd_shotgun(&s, &input, m, n, min_gap, &out)?,
        Command::Reconstruct {
            fragments,
            naive,
            indexed: _,
            emit_trace,
            max_nodes,
        } => return cmd_reconstruct(&s, &fragments, naive, emit_trace, max_nodes),
        Command::Overlap { mode, fragments } => cmd_overlap(&s, mode, &fragments)?,
        Command::BuildSa { input, out } => cmd_build_sa(&s, &input, out.as_deref())?,
        Command::Bench {
            sizes,
            strict_sizes,
            worker_counts,
            ops,
            reps,
            unit,
            out,
        } => cmd_bench(
            &s,
            BenchArgs {
                sizes,
                strict_sizes,
                worker_counts,
                ops,
                reps,
                unit,
                out,
            },
        )?,
        Command::Verify { fragments, candidate } => return cmd_verify(&s, &fragments, &candidate),
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("dualcut: {e:#}");
            ExitCode::FAILURE
        }
    }
}
