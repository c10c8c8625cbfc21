//! Reference oracles, instance generators, query plumbing and the CLI.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::lzindex::{decompress, lz78_parse, Codebook, CompressedText};
use crate::{editdist, hamming, Error, Letter, MatchReport, Metrics, Mode, Parallelism, SearchOptions};

/// Every end (1-based) with Hamming distance ≤ k, by direct counting.
pub fn oracle_hamming(raw: &[Letter], p: &[Letter], k: usize) -> MatchReport {
    let (n, m) = (raw.len(), p.len());
    let mut hits = Vec::new();
    if m == 0 || m > n {
        return MatchReport::default();
    }
    for s in 0..=n - m {
        let mut mism = 0;
        for j in 0..m {
            if raw[s + j] != p[j] {
                mism += 1;
                if mism > k {
                    break;
                }
            }
        }
        if mism <= k {
            hits.push((s + m, mism));
        }
    }
    MatchReport { hits }
}

/// Every end (1-based) of a substring within edit distance ≤ k, with the
/// minimum over all starts. Column-wise DP with a free start row.
pub fn oracle_edit(raw: &[Letter], p: &[Letter], k: usize) -> MatchReport {
    let m = p.len();
    let mut col: Vec<usize> = (0..=m).collect();
    let mut hits = Vec::new();
    for (j, &c) in raw.iter().enumerate() {
        let mut diag = col[0];
        col[0] = 0;
        for i in 1..=m {
            let up = col[i];
            col[i] = (diag + usize::from(p[i - 1] != c)).min(up + 1).min(col[i - 1] + 1);
            diag = up;
        }
        if col[m] <= k {
            hits.push((j + 1, col[m]));
        }
    }
    MatchReport { hits }
}

/// Second, independently written edit oracle: the same DP restricted to the
/// rows that can still be ≤ k (last-active-row cutoff).
pub fn oracle_edit_banded(raw: &[Letter], p: &[Letter], k: usize) -> MatchReport {
    let m = p.len();
    let cap = k + 1;
    let mut prev: Vec<usize> = (0..=m).map(|i| i.min(cap)).collect();
    let mut last_active = k.min(m);
    let mut hits = Vec::new();
    for (j, &c) in raw.iter().enumerate() {
        let mut cur = vec![cap; m + 1];
        cur[0] = 0;
        let top = (last_active + 1).min(m);
        for i in 1..=top {
            let sub = prev[i - 1] + usize::from(p[i - 1] != c);
            cur[i] = sub.min(prev[i] + 1).min(cur[i - 1] + 1).min(cap);
        }
        let mut la = top;
        while la > 0 && cur[la] > k {
            la -= 1;
        }
        last_active = la;
        if cur[m] <= k {
            hits.push((j + 1, cur[m]));
        }
        prev = cur;
    }
    MatchReport { hits }
}

/// Instance families for differential testing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Profile {
    /// Uniform random text; pattern cut from the text and mutated.
    Uniform,
    /// Text and pattern powers of one short word with sparse planted breaks.
    Periodic,
    /// Random text with several planted copies at distance ≤ k.
    Planted,
    /// Text letters partly absent from the pattern.
    Foreign,
    /// Periodic text whose breaks are spaced just around the close/fine
    /// threshold of the periodic matcher.
    Adversarial,
}

impl Profile {
    pub const ALL: [Profile; 5] = [Profile::Uniform, Profile::Periodic, Profile::Planted, Profile::Foreign, Profile::Adversarial];

    pub fn name(&self) -> &'static str {
        match self {
            Profile::Uniform => "uniform",
            Profile::Periodic => "periodic",
            Profile::Planted => "planted",
            Profile::Foreign => "foreign",
            Profile::Adversarial => "adversarial",
        }
    }
}

impl FromStr for Profile {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        Profile::ALL.iter().copied().find(|p| p.name() == s).ok_or_else(|| Error::UnknownProfile(s.to_string()))
    }
}

impl fmt::Display for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Size limits for generated instances.
#[derive(Debug, Clone, Copy)]
pub struct InstanceLimits {
    pub max_n: usize,
    pub max_m: usize,
    pub max_k: usize,
    pub sigma: u32,
}

#[derive(Debug, Clone)]
pub struct Instance {
    pub text: Vec<Letter>,
    pub pattern: Vec<Letter>,
    pub k: usize,
    pub mode: Mode,
}

/// Log-uniform integer in `[lo, hi]`.
fn log_uniform(rng: &mut ChaCha8Rng, lo: usize, hi: usize) -> usize {
    if hi <= lo {
        return lo;
    }
    let (a, b) = ((lo as f64).ln(), (hi as f64 + 1.0).ln());
    ((rng.gen_range(a..b)).exp() as usize).clamp(lo, hi)
}

fn random_word(rng: &mut ChaCha8Rng, len: usize, sigma: u32) -> Vec<Letter> {
    (0..len).map(|_| rng.gen_range(0..sigma)).collect()
}

/// Apply `e` random edits (substitutions only in Hamming mode).
fn mutate(rng: &mut ChaCha8Rng, w: &mut Vec<Letter>, e: usize, sigma: u32, mode: Mode) {
    for _ in 0..e {
        if w.is_empty() {
            return;
        }
        let op = if mode == Mode::Hamming { 0 } else { rng.gen_range(0..3) };
        let i = rng.gen_range(0..w.len());
        match op {
            0 => w[i] = rng.gen_range(0..sigma),
            1 => {
                if w.len() > 1 {
                    w.remove(i);
                }
            }
            _ => w.insert(i, rng.gen_range(0..sigma)),
        }
    }
}

/// Deterministic instance for `(profile, seed)` with sizes drawn
/// log-uniformly under `lim`.
pub fn generate_instance(profile: Profile, lim: InstanceLimits, mode: Mode, seed: u64) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (profile as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15));
    let k = rng.gen_range(0..=lim.max_k);
    let n = log_uniform(&mut rng, 64.min(lim.max_n), lim.max_n);
    let m = log_uniform(&mut rng, 1, lim.max_m.min(n));
    generate_sized(profile, n, m, k, lim.sigma, mode, rng.gen())
}

/// Deterministic instance with text length `n`, pattern length about `m`
/// (edits may shift it by up to `k`) and threshold `k`.
pub fn generate_sized(profile: Profile, n: usize, m: usize, k: usize, sigma: u32, mode: Mode, seed: u64) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sigma = sigma.max(2);
    let n = n.max(1);
    let m = m.clamp(1, n);
    match profile {
        Profile::Uniform => {
            let text = random_word(&mut rng, n, sigma);
            let s = rng.gen_range(0..=n - m);
            let mut pattern = text[s..s + m].to_vec();
            let e = rng.gen_range(0..=k + 1);
            mutate(&mut rng, &mut pattern, e, sigma, mode);
            Instance { text, pattern, k, mode }
        }
        Profile::Periodic => {
            // sparse bursts in the text; the pattern is a clean run of the
            // same word with fewer than 2·max(k,1) isolated edits, so it has
            // fewer than 2·max(k,1) disjoint breaks
            let z = crate::hamming::choose_z(m, k);
            let q = rng.gen_range(1..=(z / 2).clamp(1, 6));
            let u = random_word(&mut rng, q, sigma);
            let mut text: Vec<Letter> = (0..n).map(|i| u[i % q]).collect();
            let spacing = rng.gen_range(m.max(2) / 2..=4 * m.max(2));
            plant_bursts(&mut rng, &mut text, spacing, sigma);
            let phase = rng.gen_range(0..q);
            let mut pattern: Vec<Letter> = (0..m).map(|i| u[(phase + i) % q]).collect();
            let edits = rng.gen_range(0..=k);
            mutate(&mut rng, &mut pattern, edits, sigma, mode);
            if pattern.is_empty() {
                pattern.push(u[0]);
            }
            Instance { text, pattern, k, mode }
        }
        Profile::Adversarial => {
            // bursts spaced right around the close-alignment distance of the
            // periodic matchers; the pattern is cut from the text
            let q = rng.gen_range(1..=6.min(m));
            let u = random_word(&mut rng, q, sigma);
            let mut text: Vec<Letter> = (0..n).map(|i| u[i % q]).collect();
            let z = crate::hamming::choose_z(m, k);
            plant_bursts(&mut rng, &mut text, (z * (k.max(1) + 1)).max(2), sigma);
            let s = rng.gen_range(0..=n - m);
            let mut pattern = text[s..s + m].to_vec();
            let e = rng.gen_range(0..=k);
            mutate(&mut rng, &mut pattern, e, sigma, mode);
            if pattern.is_empty() {
                pattern.push(u[0]);
            }
            Instance { text, pattern, k, mode }
        }
        Profile::Planted => {
            let mut text = random_word(&mut rng, n, sigma);
            let pattern = random_word(&mut rng, m, sigma);
            let copies = rng.gen_range(1..=4);
            for _ in 0..copies {
                let mut w = pattern.clone();
                let e = rng.gen_range(0..=k);
                mutate(&mut rng, &mut w, e, sigma, mode);
                if w.len() <= n {
                    let s = rng.gen_range(0..=n - w.len());
                    text[s..s + w.len()].copy_from_slice(&w);
                }
            }
            Instance { text, pattern, k, mode }
        }
        Profile::Foreign => {
            // pattern over the lower half of the alphabet, text sprinkled
            // with letters from the upper half
            let half = (sigma / 2).max(1);
            let mut text = random_word(&mut rng, n, half);
            let s = rng.gen_range(0..=n - m);
            let mut pattern = text[s..s + m].to_vec();
            let e = rng.gen_range(0..=k);
            mutate(&mut rng, &mut pattern, e, half, mode);
            if pattern.is_empty() {
                pattern.push(0);
            }
            for _ in 0..rng.gen_range(1..=n / 16 + 1) {
                let i = rng.gen_range(0..n);
                text[i] = rng.gen_range(half..sigma.max(half + 1));
            }
            Instance { text, pattern, k, mode }
        }
    }
}

/// Overwrite 1 to 3 letters every `spacing` letters (with jitter).
fn plant_bursts(rng: &mut ChaCha8Rng, text: &mut [Letter], spacing: usize, sigma: u32) {
    let n = text.len();
    let mut x = rng.gen_range(0..spacing);
    while x < n {
        let burst = rng.gen_range(1..=3);
        for y in x..(x + burst).min(n) {
            text[y] = rng.gen_range(0..sigma);
        }
        x += spacing - spacing / 8 + rng.gen_range(0..=spacing / 4 + 1);
    }
}

/// Which engine answers a query.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Algorithm {
    /// The compressed-text engine.
    #[default]
    Auto,
    /// Decompress and run the oracle.
    Naive,
    /// The compressed-text engine (alias of `Auto`).
    Paper,
}

impl FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "auto" => Ok(Algorithm::Auto),
            "naive" => Ok(Algorithm::Naive),
            "paper" => Ok(Algorithm::Paper),
            _ => Err(format!("unknown algorithm `{s}`")),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct QueryConfig {
    pub mode: Mode,
    pub k: usize,
    pub first_only: bool,
    pub algorithm: Algorithm,
    pub parallelism: Parallelism,
    pub seed: u64,
}

/// Timings per phase plus the engine counters.
#[derive(Debug, Clone, Default)]
pub struct QueryMetrics {
    pub counters: Metrics,
    pub seconds: f64,
}

impl QueryMetrics {
    pub fn to_record(&self) -> String {
        format!("{}seconds={:.6}\n", self.counters.to_record(), self.seconds)
    }
}

/// Answer one query on a compressed text.
pub fn run_query(ct: &CompressedText, cb: &Codebook, p: &[Letter], cfg: &QueryConfig) -> Result<(MatchReport, QueryMetrics), Error> {
    if p.is_empty() {
        return Err(Error::EmptyPattern);
    }
    let started = Instant::now();
    let (mut report, counters) = match cfg.algorithm {
        Algorithm::Naive => {
            let raw = decompress(ct, cb)?;
            let r = match cfg.mode {
                Mode::Hamming => oracle_hamming(&raw, p, cfg.k),
                Mode::Edit => oracle_edit(&raw, p, cfg.k),
            };
            (r, Metrics::default())
        }
        Algorithm::Auto | Algorithm::Paper => {
            let opts = SearchOptions { first_only: false, parallelism: cfg.parallelism, basic_periodic: false };
            match cfg.mode {
                Mode::Hamming => hamming::search_hamming(ct, cb, p, cfg.k, opts),
                Mode::Edit => editdist::search_errors(ct, cb, p, cfg.k, opts),
            }
        }
    };
    if cfg.first_only {
        report.hits.truncate(1);
    }
    let seconds = started.elapsed().as_secs_f64();
    Ok((report, QueryMetrics { counters, seconds }))
}

/// Compress raw bytes (each byte one letter).
pub fn compress_bytes(raw: &[u8]) -> (Codebook, CompressedText) {
    let letters: Vec<Letter> = raw.iter().map(|&b| Letter::from(b)).collect();
    lz78_parse(&letters)
}

pub mod cli;
