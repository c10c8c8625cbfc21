//! Approximate pattern matching on LZ78/LZW-compressed text.
//!
//! Given the compressed form of a text `t` (a trie of codewords plus a token
//! sequence) and an uncompressed pattern `p`, report every end position of a
//! substring of `t` within Hamming distance `k` (or edit distance `k`) of `p`,
//! without decompressing `t`.
//!
//! The pieces, bottom-up:
//! - [`textcore`]: suffix array / LCP / RMQ over `p`, periods, z-breaks.
//! - [`lzindex`]: LZ78 parsing, the codeword trie extended by the pattern path,
//!   and chunk comparisons.
//! - [`pcreduce`]: tiling the text into pattern factors and holes, and cutting
//!   out one short window ("pc-string") per codeword boundary.
//! - [`hamming`] / [`editdist`]: the per-window matchers and the top-level
//!   searches.
//! - [`harness`]: oracles, instance generators, file formats and the CLI.

pub mod editdist;
pub mod hamming;
pub mod harness;
pub mod lzindex;
pub mod pcreduce;
pub mod textcore;

use std::fmt;

/// Letters are arbitrary integers; byte input maps each byte to its value.
pub type Letter = u32;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("pattern is empty")]
    EmptyPattern,
    #[error("text is empty")]
    EmptyText,
    #[error("unknown trie node {0}")]
    UnknownNode(u32),
    #[error("offset {offset} outside codeword of length {len}")]
    OffsetOutOfRange { offset: usize, len: usize },
    #[error("bad magic, not an LZPM file")]
    BadMagic,
    #[error("unsupported LZPM version {0}")]
    BadVersion(u8),
    #[error("truncated LZPM file")]
    Truncated,
    #[error("letter {letter} outside declared alphabet of size {sigma}")]
    LetterOutOfAlphabet { letter: Letter, sigma: u32 },
    #[error("unknown instance profile `{0}`")]
    UnknownProfile(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Which distance the search uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    Hamming,
    Edit,
}

/// How per-boundary windows are scheduled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Parallelism {
    #[default]
    Sequential,
    /// Uses rayon when built with the `parallel` feature, sequential otherwise.
    Parallel,
}

/// Knobs shared by both top-level searches.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SearchOptions {
    /// Report only the smallest end.
    pub first_only: bool,
    pub parallelism: Parallelism,
    /// Use the basic periodic matcher (verify one alignment per residue of
    /// every fine run) instead of the table-driven one. Hamming only.
    pub basic_periodic: bool,
}

/// End positions (1-based, inclusive) of occurrences with their distance.
/// Sorted by end, one entry per end, carrying the smallest distance seen.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MatchReport {
    pub hits: Vec<(usize, usize)>,
}

impl MatchReport {
    pub fn from_unsorted(mut hits: Vec<(usize, usize)>) -> Self {
        hits.sort_unstable();
        hits.dedup_by_key(|h| h.0);
        MatchReport { hits }
    }

    pub fn ends(&self) -> Vec<usize> {
        self.hits.iter().map(|h| h.0).collect()
    }

    pub fn is_empty(&self) -> bool {
        self.hits.is_empty()
    }

    pub fn len(&self) -> usize {
        self.hits.len()
    }

    /// Sorted union; on equal ends the smaller distance wins.
    pub fn merge(mut self, other: MatchReport) -> Self {
        self.hits.extend(other.hits);
        MatchReport::from_unsorted(self.hits)
    }
}

impl fmt::Display for MatchReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (end, d) in &self.hits {
            writeln!(f, "{end}\t{d}")?;
        }
        Ok(())
    }
}

/// Work counters for one query. All fields only ever grow.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Metrics {
    pub boundaries: u64,
    pub pc_strings: u64,
    pub skipped_windows: u64,
    pub naive_windows: u64,
    pub nonperiodic_windows: u64,
    pub periodic_windows: u64,
    pub marks: u64,
    pub candidates: u64,
    /// Direct verifier runs: kangaroo jumps per alignment, or diagonal waves
    /// per end range for edit distance.
    pub verifications: u64,
    /// Black breaks summed over all alignments resolved through the tables;
    /// those alignments are not counted as verifications.
    pub black_breaks: u64,
    pub fine_runs: u64,
    pub internal_hits: u64,
    pub table_words: u64,
    /// Marking-bound violations (marks > 4km/z or candidates > 4m/z).
    pub bound_violations: u64,
}

impl Metrics {
    pub fn absorb(&mut self, o: &Metrics) {
        self.boundaries += o.boundaries;
        self.pc_strings += o.pc_strings;
        self.skipped_windows += o.skipped_windows;
        self.naive_windows += o.naive_windows;
        self.nonperiodic_windows += o.nonperiodic_windows;
        self.periodic_windows += o.periodic_windows;
        self.marks += o.marks;
        self.candidates += o.candidates;
        self.verifications += o.verifications;
        self.black_breaks += o.black_breaks;
        self.fine_runs += o.fine_runs;
        self.internal_hits += o.internal_hits;
        self.table_words = self.table_words.max(o.table_words);
        self.bound_violations += o.bound_violations;
    }

    /// Flat `key=value` lines, one per counter, in a fixed order.
    pub fn to_record(&self) -> String {
        let fields: [(&str, u64); 14] = [
            ("boundaries", self.boundaries),
            ("pc_strings", self.pc_strings),
            ("skipped_windows", self.skipped_windows),
            ("naive_windows", self.naive_windows),
            ("nonperiodic_windows", self.nonperiodic_windows),
            ("periodic_windows", self.periodic_windows),
            ("marks", self.marks),
            ("candidates", self.candidates),
            ("verifications", self.verifications),
            ("black_breaks", self.black_breaks),
            ("fine_runs", self.fine_runs),
            ("internal_hits", self.internal_hits),
            ("table_words", self.table_words),
            ("bound_violations", self.bound_violations),
        ];
        fields.iter().map(|(k, v)| format!("{k}={v}\n")).collect()
    }
}

/// Map `f` over `items` with per-worker scratch from `init`, in parallel when
/// asked and compiled in.
pub(crate) fn par_map_init<T, S, R, I, F>(items: Vec<T>, par: Parallelism, init: I, f: F) -> Vec<R>
where
    T: Send,
    R: Send,
    I: Fn() -> S + Send + Sync,
    F: Fn(&mut S, T) -> R + Send + Sync,
{
    match par {
        #[cfg(feature = "parallel")]
        Parallelism::Parallel => {
            use rayon::prelude::*;
            items.into_par_iter().map_init(init, |s, t| f(s, t)).collect()
        }
        _ => {
            let mut scratch = init();
            items.into_iter().map(|t| f(&mut scratch, t)).collect()
        }
    }
}
