//! Command-line front end. Exit status: 2 on malformed input, 1 when
//! `--report first` finds nothing, 0 otherwise.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};

use super::{generate_sized, oracle_edit, oracle_hamming, run_query, Algorithm, Profile, QueryConfig};
use crate::lzindex::{decode, decompress, encode, lz78_parse, Codebook, CompressedText};
use crate::{Error, Letter, Mode, Parallelism};

#[derive(Parser, Debug)]
#[command(name = "lzpm", version, about = "Approximate pattern matching on LZ78/LZW-compressed text")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModeArg {
    Hamming,
    Edit,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Hamming => Mode::Hamming,
            ModeArg::Edit => Mode::Edit,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum, PartialEq, Eq)]
enum ReportArg {
    All,
    First,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum AlgorithmArg {
    Auto,
    Naive,
    Paper,
}

impl From<AlgorithmArg> for Algorithm {
    fn from(a: AlgorithmArg) -> Algorithm {
        match a {
            AlgorithmArg::Auto => Algorithm::Auto,
            AlgorithmArg::Naive => Algorithm::Naive,
            AlgorithmArg::Paper => Algorithm::Paper,
        }
    }
}

#[derive(clap::Args, Debug)]
struct QueryArgs {
    /// LZPM file to search.
    compressed: PathBuf,
    /// Pattern: a path to an existing file, otherwise the literal bytes.
    #[arg(long)]
    pattern: String,
    /// Maximum number of mismatches or errors.
    #[arg(short = 'k', default_value_t = 0)]
    k: usize,
    #[arg(long, value_enum, default_value = "hamming")]
    mode: ModeArg,
    #[arg(long, value_enum, default_value = "all")]
    report: ReportArg,
    /// Write the key=value metrics record here.
    #[arg(long)]
    metrics: Option<PathBuf>,
    /// Process codeword boundaries on all cores.
    #[arg(long)]
    parallel: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Compress a file (one letter per byte) into the LZPM format.
    Compress { input: PathBuf, output: PathBuf },
    /// Expand an LZPM file back to bytes.
    Decompress { input: PathBuf, output: PathBuf },
    /// Report `end<TAB>distance` for every match (1-based ends).
    Search {
        #[command(flatten)]
        query: QueryArgs,
        #[arg(long, value_enum, default_value = "auto")]
        algorithm: AlgorithmArg,
    },
    /// Same as `search --algorithm naive`.
    Oracle {
        #[command(flatten)]
        query: QueryArgs,
    },
    /// Time the compressed engine against the naive path on generated corpora.
    Bench {
        #[arg(long, default_value = "periodic")]
        profile: String,
        /// Comma-separated text lengths.
        #[arg(long, value_delimiter = ',', default_value = "10000,20000,40000")]
        sizes: Vec<usize>,
        #[arg(short = 'm', default_value_t = 256)]
        m: usize,
        #[arg(short = 'k', default_value_t = 2)]
        k: usize,
        #[arg(long, value_enum, default_value = "hamming")]
        mode: ModeArg,
        #[arg(long, default_value_t = 4)]
        sigma: u32,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

/// Input the CLI refuses, reported with exit status 2.
#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Write { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Lib(#[from] Error),
    #[error("letter {0} does not fit in a byte")]
    WideLetter(Letter),
}

/// A closed pipe downstream (`| head`) is not an error.
fn emit(s: &str) {
    let _ = std::io::stdout().lock().write_all(s.as_bytes());
}

fn read(path: &Path) -> Result<Vec<u8>, CliError> {
    fs::read(path).map_err(|source| CliError::Read { path: path.to_path_buf(), source })
}

fn write(path: &Path, data: &[u8]) -> Result<(), CliError> {
    fs::write(path, data).map_err(|source| CliError::Write { path: path.to_path_buf(), source })
}

fn load(path: &Path) -> Result<(Codebook, CompressedText), CliError> {
    Ok(decode(&read(path)?)?)
}

fn pattern_letters(spec: &str) -> Result<Vec<Letter>, CliError> {
    let path = Path::new(spec);
    let bytes = if path.is_file() { read(path)? } else { spec.as_bytes().to_vec() };
    if bytes.is_empty() {
        return Err(Error::EmptyPattern.into());
    }
    Ok(bytes.into_iter().map(Letter::from).collect())
}

fn run_search(q: &QueryArgs, algorithm: Algorithm) -> Result<i32, CliError> {
    let (cb, ct) = load(&q.compressed)?;
    let p = pattern_letters(&q.pattern)?;
    let cfg = QueryConfig {
        mode: q.mode.into(),
        k: q.k,
        first_only: q.report == ReportArg::First,
        algorithm,
        parallelism: if q.parallel { Parallelism::Parallel } else { Parallelism::Sequential },
        seed: 0,
    };
    let (report, metrics) = run_query(&ct, &cb, &p, &cfg)?;
    emit(&report.to_string());
    if let Some(path) = &q.metrics {
        write(path, metrics.to_record().as_bytes())?;
    }
    Ok(if cfg.first_only && report.is_empty() { 1 } else { 0 })
}

fn run_bench(profile: &str, sizes: &[usize], m: usize, k: usize, mode: Mode, sigma: u32, seed: u64) -> Result<i32, CliError> {
    let profile: Profile = profile.parse()?;
    let mut out = String::from("N\tphrases\tmatches\tverifications\tpaper_s\tnaive_s\n");
    for &n in sizes {
        let inst = generate_sized(profile, n, m, k, sigma, mode, seed);
        let (cb, ct) = lz78_parse(&inst.text);
        let cfg = QueryConfig { mode, k, first_only: false, algorithm: Algorithm::Paper, parallelism: Parallelism::Sequential, seed };
        let (report, metrics) = run_query(&ct, &cb, &inst.pattern, &cfg)?;
        let started = Instant::now();
        let raw = decompress(&ct, &cb)?;
        let naive = match mode {
            Mode::Hamming => oracle_hamming(&raw, &inst.pattern, k),
            Mode::Edit => oracle_edit(&raw, &inst.pattern, k),
        };
        let naive_s = started.elapsed().as_secs_f64();
        debug_assert_eq!(naive, report);
        let _ = writeln!(
            out,
            "{}\t{}\t{}\t{}\t{:.6}\t{:.6}",
            raw.len(),
            ct.n(),
            report.len(),
            metrics.counters.verifications,
            metrics.seconds,
            naive_s
        );
    }
    emit(&out);
    Ok(0)
}

fn dispatch(cli: Cli) -> Result<i32, CliError> {
    match cli.command {
        Command::Compress { input, output } => {
            let (cb, ct) = lz78_parse(&read(&input)?.into_iter().map(Letter::from).collect::<Vec<_>>());
            write(&output, &encode(&cb, &ct))?;
            Ok(0)
        }
        Command::Decompress { input, output } => {
            let (cb, ct) = load(&input)?;
            let bytes = decompress(&ct, &cb)?
                .into_iter()
                .map(|c| u8::try_from(c).map_err(|_| CliError::WideLetter(c)))
                .collect::<Result<Vec<u8>, _>>()?;
            write(&output, &bytes)?;
            Ok(0)
        }
        Command::Search { query, algorithm } => run_search(&query, algorithm.into()),
        Command::Oracle { query } => run_search(&query, Algorithm::Naive),
        Command::Bench { profile, sizes, m, k, mode, sigma, seed } => run_bench(&profile, &sizes, m, k, mode.into(), sigma, seed),
    }
}

/// Parse `args` (including the program name) and run; returns the exit status.
pub fn cli_main<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("lzpm: {e}");
            2
        }
    }
}
