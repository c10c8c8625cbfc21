//! Pattern matching with k errors (unit-cost edit distance).
//!
//! A match ends at `e` when some substring of the text ending at `e` is within
//! edit distance `k` of the pattern; every end is reported once with the
//! smallest such distance. All distances here are thresholded: a value of
//! `k + 1` stands for "more than `k`".
//!
//! Per window the pattern is either short (the whole window goes through the
//! diagonal-wave verifier), non-periodic (break occurrences vote for
//! length-`kk` groups of start positions; surviving groups are verified), or
//! periodic (ends near a break/endpoint pair are verified directly; between
//! them the distance repeats with the common period, so one end per residue
//! class is verified).

use std::ops::Range;

use crate::hamming::{choose_z, is_short, MarkTable, NonPeriodicPlan};
use crate::lzindex::{Chunk, Codebook, CompressedText, PatternTrie};
use crate::pcreduce::{build_ph, crossing_window, kk, pc_decompose, trim_to_few_breaks, PcString};
use crate::textcore::{decompose, find_breaks, BreakDecomposition, PatternIndex, PeriodTable};
use crate::{par_map_init, Letter, MatchReport, Metrics, Mode, SearchOptions};

const NEG: i64 = i64::MIN / 4;

/// Diagonal waves for costs `0..=k` over diagonals `dlo..=dhi`, where the
/// diagonal of cell `(i, j)` is `j - i` (`i` indexes `a`, `j` indexes `b`).
/// After each cost `e`, `visit(e, rows)` sees the furthest row reachable on
/// every diagonal with cost `≤ e` (`rows[d - dlo]`, [`NEG`] if none); a `true`
/// return stops the run. With `free_start` every cell `(0, j)` costs nothing.
/// `lce(i, j)` is the longest common prefix of `a[i..]` and `b[j..]`.
fn waves<L, V>(la: usize, lb: usize, k: usize, dlo: i64, dhi: i64, free_start: bool, mut lce: L, mut visit: V)
where
    L: FnMut(usize, usize) -> usize,
    V: FnMut(usize, &[i64]) -> bool,
{
    if dhi < dlo {
        return;
    }
    let (la, lb) = (la as i64, lb as i64);
    let w = (dhi - dlo + 1) as usize;
    let mut prev = vec![NEG; w];
    let mut cur = vec![NEG; w];
    for e in 0..=k {
        for idx in 0..w {
            let d = dlo + idx as i64;
            let mut r = NEG;
            if e == 0 {
                if d == 0 || (free_start && d >= 0) {
                    r = 0;
                }
            } else {
                if prev[idx] != NEG {
                    r = prev[idx] + 1;
                }
                if idx + 1 < w && prev[idx + 1] != NEG {
                    r = r.max(prev[idx + 1] + 1);
                }
                if idx > 0 && prev[idx - 1] != NEG {
                    r = r.max(prev[idx - 1]);
                }
            }
            if r == NEG || d > lb || d < -la {
                cur[idx] = NEG;
                continue;
            }
            r = r.min(la).min(lb - d);
            if r < la && r + d < lb {
                r += lce(r as usize, (r + d) as usize) as i64;
            }
            cur[idx] = r;
        }
        if visit(e, &cur) {
            return;
        }
        std::mem::swap(&mut prev, &mut cur);
    }
}

/// Thresholded edit distance of `p` against the best substring of `f` ending
/// exactly at `end` (exclusive offset), by waves over reversed strings with
/// suffix jumps. `None` when above `k`.
pub fn lv_verify(pc: &PcString, p: &PatternIndex, end: usize, k: usize) -> Option<usize> {
    let m = p.len();
    let mut found = None;
    waves(
        m,
        end,
        k,
        -(k as i64),
        k as i64,
        false,
        |i, j| pc.lcsuf(p, end - j, m - i, usize::MAX),
        |e, rows| {
            if rows.iter().any(|&r| r >= m as i64) {
                found = Some(e);
                return true;
            }
            false
        },
    );
    found
}

/// Every end `e` in `[e0, e1]` (exclusive offsets into `f`, `e ≥ 1`) at which
/// some substring of `f` ending at `e` is within distance `k` of `p`, with the
/// smallest distance. Work is `O(k (k + e1 - e0))` jumps.
pub fn lv_window(pc: &PcString, p: &PatternIndex, e0: usize, e1: usize, k: usize) -> Vec<(usize, usize)> {
    let m = p.len() as i64;
    let n = pc.len();
    let e0 = e0.max(1);
    let e1 = e1.min(n);
    if e0 > e1 {
        return Vec::new();
    }
    let (t0, t1) = (e0 as i64 - m, e1 as i64 - m);
    let (dlo, dhi) = (t0 - k as i64, t1 + k as i64);
    let mut best = vec![usize::MAX; (t1 - t0 + 1) as usize];
    waves(
        p.len(),
        n,
        k,
        dlo,
        dhi,
        true,
        |i, j| pc.lcpref(p, j, i, usize::MAX),
        |e, rows| {
            for d in t0..=t1 {
                let slot = &mut best[(d - t0) as usize];
                if *slot == usize::MAX && rows[(d - dlo) as usize] >= m {
                    *slot = e;
                }
            }
            false
        },
    );
    best.iter()
        .enumerate()
        .filter(|(_, &b)| b != usize::MAX)
        .map(|(i, &b)| (e0 + i, b))
        .collect()
}

/// All thresholded prefix-vs-prefix distances of two explicit strings reachable
/// within cost `k` of the origin.
#[derive(Debug, Clone)]
pub struct LvGrid {
    k: usize,
    /// `levels[e][d + k]`: furthest row on diagonal `d` with cost `≤ e`.
    levels: Vec<Vec<i64>>,
}

impl LvGrid {
    pub fn new(a: &[Letter], b: &[Letter], k: usize) -> Self {
        let mut levels = Vec::with_capacity(k + 1);
        waves(
            a.len(),
            b.len(),
            k,
            -(k as i64),
            k as i64,
            false,
            |i, j| a[i..].iter().zip(&b[j..]).take_while(|(x, y)| x == y).count(),
            |_, rows| {
                levels.push(rows.to_vec());
                false
            },
        );
        LvGrid { k, levels }
    }

    /// `ed(a[..x], b[..y])`, or `k + 1` when above `k`. Reach values never
    /// drop as the cost grows and distances never drop along a diagonal, so
    /// the first level reaching row `x` on diagonal `y - x` is the answer.
    pub fn dist(&self, x: usize, y: usize) -> usize {
        let d = y as i64 - x as i64;
        if d.unsigned_abs() as usize > self.k {
            return self.k + 1;
        }
        let idx = (d + self.k as i64) as usize;
        self.levels.iter().position(|rows| rows[idx] >= x as i64).unwrap_or(self.k + 1)
    }
}

/// Thresholded distances between the `k` longest suffixes of `t` and the `k`
/// longest suffixes of `p`: entry `[i][j]` is `ed(t[i..], p[j..])`.
pub fn lv_suffix_grid(t: &[Letter], p: &[Letter], k: usize) -> Vec<Vec<usize>> {
    suffix_grid(t, p, k, k.min(t.len()), k.min(p.len()))
}

fn suffix_grid(t: &[Letter], p: &[Letter], k: usize, rows: usize, cols: usize) -> Vec<Vec<usize>> {
    let rt: Vec<Letter> = t.iter().rev().copied().collect();
    let rp: Vec<Letter> = p.iter().rev().copied().collect();
    let g = LvGrid::new(&rt, &rp, k);
    (0..rows).map(|i| (0..cols).map(|j| g.dist(t.len() - i, p.len() - j)).collect()).collect()
}

/// `len` letters of `w^∞` starting at phase `phase`.
fn periodic_word(w: &[Letter], phase: usize, len: usize) -> Vec<Letter> {
    (0..len).map(|i| w[(phase + i) % w.len()]).collect()
}

/// Which ends of an interval are open (hit an endpoint of its string).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Openness {
    pub left: bool,
    pub right: bool,
}

/// Locked edit distance of `b` against the primitive word `u`, thresholded at
/// `k + 1`:
/// - closed on both sides: `min ed(b, u^α)` over `|b| - k ≤ α|u| ≤ |b| + k`;
/// - open on the right: `min ed(b, s)` over prefixes `s` of `u^∞`, `|s| ≤ |b| + k`;
/// - open on the left: the same over suffixes of `^∞u`.
///
/// Open on both sides is not a locked shape; it is answered as open on the
/// right.
pub fn locked_edit_distance(b: &[Letter], open: Openness, u: &[Letter], k: usize) -> usize {
    let q = u.len();
    let hi = b.len() + k;
    let lo = b.len().saturating_sub(k);
    if open.left && !open.right {
        let rb: Vec<Letter> = b.iter().rev().copied().collect();
        let ru: Vec<Letter> = u.iter().rev().copied().collect();
        let g = LvGrid::new(&rb, &periodic_word(&ru, 0, hi), k);
        return (lo..=hi).map(|y| g.dist(rb.len(), y)).min().unwrap_or(k + 1);
    }
    let g = LvGrid::new(b, &periodic_word(u, 0, hi), k);
    if open.right {
        (lo..=hi).map(|y| g.dist(b.len(), y)).min().unwrap_or(k + 1)
    } else {
        (lo.div_ceil(q)..=hi / q).map(|a| g.dist(b.len(), a * q)).min().unwrap_or(k + 1)
    }
}

/// `min ed(x, u'u^α)` over `|x| - k ≤ |u'u^α| ≤ |x| + k`, where `u'` is the
/// suffix of `u` of length `head < |u|`; thresholded at `k + 1`.
pub fn leftval(x: &[Letter], u: &[Letter], head: usize, k: usize) -> usize {
    let q = u.len();
    debug_assert!(head < q);
    let hi = x.len() + k;
    let lo = x.len().saturating_sub(k);
    let g = LvGrid::new(x, &periodic_word(u, (q - head) % q, hi), k);
    (lo..=hi).filter(|&y| y >= head && (y - head) % q == 0).map(|y| g.dist(x.len(), y)).min().unwrap_or(k + 1)
}

/// Boundary terms for fine alignments with common period `u`.
#[derive(Debug, Clone)]
pub struct LeftvalTables {
    pub u: Vec<Letter>,
    /// `leftval_p[h]`: the pattern prefix `x` against `u'u^α` with `|u'| = h`.
    pub leftval_p: Vec<usize>,
    /// `leftval_t[c][h]`: `(suffix of u of length h) + firsts[c]` against
    /// `u'u^α`, `u'` being the suffix of `u` the pattern starts with.
    pub leftval_t: Vec<Vec<usize>>,
    pattern_head: usize,
}

impl LeftvalTables {
    /// `x_pattern`: pattern prefix through its first interval; `firsts`: the
    /// candidate first text intervals; `pattern_head`: length of the suffix of
    /// `u` the pattern starts with.
    pub fn build(x_pattern: &[Letter], firsts: &[Vec<Letter>], u: &[Letter], pattern_head: usize, k: usize) -> Self {
        let q = u.len();
        let leftval_p = (0..q).map(|h| leftval(x_pattern, u, h, k)).collect();
        let leftval_t = firsts
            .iter()
            .map(|b1| {
                (0..q)
                    .map(|h| {
                        let mut x = u[q - h..].to_vec();
                        x.extend_from_slice(b1);
                        leftval(&x, u, pattern_head, k)
                    })
                    .collect()
            })
            .collect();
        LeftvalTables { u: u.to_vec(), leftval_p, leftval_t, pattern_head }
    }

    /// `leftval_t(u''u^β b1)`: independent of `β` because `b1` opens with
    /// `2(k+1)` copies of `u`, one of which any cheap alignment keeps intact.
    pub fn leftval_t_at(&self, c: usize, head: usize, _beta: usize) -> usize {
        self.leftval_t[c][head]
    }

    pub fn pattern_head(&self) -> usize {
        self.pattern_head
    }
}

/// A group of nearby breaks widened into its flanking periodic stretches.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Interval {
    pub start: usize,
    pub end: usize,
    pub open: Openness,
    /// Canonical ids of the flanking stretches (`None` at an open side).
    pub left_canon: Option<u32>,
    pub right_canon: Option<u32>,
    /// Indices of the grouped breaks in the decomposition.
    pub breaks: Range<usize>,
}

#[derive(Debug, Clone, Default)]
pub struct Intervals {
    pub list: Vec<Interval>,
    /// A single interval open on both sides: no periodic flank to lock onto.
    pub pathological: bool,
}

impl Intervals {
    /// Pieces of the stretches not covered by any interval, as
    /// `(start, end, canonical id)`.
    pub fn uncovered(&self, d: &BreakDecomposition) -> Vec<(usize, usize, u32)> {
        let mut out = Vec::new();
        for st in d.stretches.iter().filter(|s| s.len > 0) {
            let mut s = st.start;
            for iv in &self.list {
                if iv.end <= s || iv.start >= st.end() {
                    continue;
                }
                if iv.start > s {
                    out.push((s, iv.start, st.canon.unwrap()));
                }
                s = s.max(iv.end);
            }
            if s < st.end() {
                out.push((s, st.end(), st.canon.unwrap()));
            }
        }
        out
    }
}

/// Group breaks whose separating stretch is shorter than `2z(kk+2)`, then
/// widen each group by `z(kk+1)..=z(kk+1)+z/2` letters into each flank, landing
/// on a copy boundary of the flank's canonical word. A flank too short for
/// that makes the interval open on that side, reaching the endpoint.
pub fn build_intervals(d: &BreakDecomposition, z: usize, k: usize) -> Intervals {
    let kk = kk(k);
    let gap = 2 * z * (kk + 2);
    let ext = z * (kk + 1);
    let nb = d.breaks.len();
    let mut list = Vec::new();
    let mut g0 = 0;
    while g0 < nb {
        let mut g1 = g0 + 1;
        while g1 < nb && d.stretches[g1].len < gap {
            g1 += 1;
        }
        let (gs, ge) = (d.breaks[g0].start, d.breaks[g1 - 1].end());
        let left = d.stretches[g0];
        let right = d.stretches[g1];
        // leftmost phase-0 position x with gs - x ≥ ext, inside the flank
        let (start, open_left) = if gs >= ext && left.len > 0 {
            let x = gs - ext;
            let back = left.phase_at(x);
            match x.checked_sub(back) {
                Some(s) if s >= left.start => (s, false),
                _ => (0, true),
            }
        } else {
            (0, true)
        };
        let (end, open_right) = if right.len > 0 && ge + ext <= right.end() {
            let y = ge + ext;
            let fwd = (right.period - right.phase_at(y)) % right.period;
            if y + fwd <= right.end() { (y + fwd, false) } else { (d.len, true) }
        } else {
            (d.len, true)
        };
        // the flanks are exhausted only at the string ends
        let start = if open_left { 0 } else { start };
        let end = if open_right { d.len } else { end };
        list.push(Interval {
            start,
            end,
            open: Openness { left: open_left, right: open_right },
            left_canon: if open_left { None } else { left.canon },
            right_canon: if open_right { None } else { right.canon },
            breaks: g0..g1,
        });
        g0 = g1;
    }
    let pathological = list.len() == 1 && list[0].open.left && list[0].open.right;
    Intervals { list, pathological }
}

/// Pattern-side data for the periodic error matcher.
#[derive(Debug, Clone)]
pub struct ErrorsPeriodicPlan {
    pub decomposition: BreakDecomposition,
    pub table: PeriodTable,
    pub intervals: Intervals,
    /// Canonical id shared by every uncovered pattern stretch, `None` if they
    /// disagree (then no fine end can match).
    pub common: Option<u32>,
    /// Breaks plus the two endpoints.
    items: Vec<(usize, usize)>,
}

#[derive(Debug, Clone)]
pub enum ErrorsPlan {
    /// Whole-window verification; also used for a pattern that is a single
    /// interval open on both sides.
    Short { pathological: bool },
    NonPeriodic(NonPeriodicPlan),
    Periodic(ErrorsPeriodicPlan),
}

#[derive(Debug, Clone)]
pub struct ErrorsPattern {
    pub m: usize,
    pub k: usize,
    pub z: usize,
    pub plan: ErrorsPlan,
}

fn items_of(d: &BreakDecomposition) -> Vec<(usize, usize)> {
    let mut items = vec![(0, 0)];
    items.extend(d.breaks.iter().map(|b| (b.start, b.end())));
    items.push((d.len, d.len));
    items
}

impl ErrorsPattern {
    pub fn new(p: &[Letter], k: usize) -> Self {
        let m = p.len();
        let z = choose_z(m, k);
        if is_short(m, k) {
            return ErrorsPattern { m, k, z, plan: ErrorsPlan::Short { pathological: false } };
        }
        let breaks = find_breaks(p, z);
        let need = 2 * kk(k);
        if breaks.len() >= need {
            return ErrorsPattern { m, k, z, plan: ErrorsPlan::NonPeriodic(NonPeriodicPlan::new(p, z, &breaks, need)) };
        }
        let mut table = PeriodTable::default();
        let d = decompose(p, z, &mut table);
        let intervals = build_intervals(&d, z, k);
        if intervals.pathological {
            return ErrorsPattern { m, k, z, plan: ErrorsPlan::Short { pathological: true } };
        }
        let mut ids: Vec<u32> = intervals.uncovered(&d).iter().map(|u| u.2).collect();
        ids.sort_unstable();
        ids.dedup();
        let common = if ids.len() == 1 { Some(ids[0]) } else { None };
        let items = items_of(&d);
        let plan = ErrorsPeriodicPlan { decomposition: d, table, intervals, common, items };
        ErrorsPattern { m, k, z, plan: ErrorsPlan::Periodic(plan) }
    }
}

fn union_ranges(mut raw: Vec<(i64, i64)>, lo: i64, hi: i64) -> Vec<(usize, usize)> {
    raw.retain(|r| r.0 <= r.1 && r.1 >= lo && r.0 <= hi);
    raw.sort_unstable();
    let mut out: Vec<(usize, usize)> = Vec::new();
    for (l, r) in raw {
        let (l, r) = (l.max(lo) as usize, r.min(hi) as usize);
        match out.last_mut() {
            Some(prev) if l <= prev.1 + 1 => prev.1 = prev.1.max(r),
            _ => out.push((l, r)),
        }
    }
    out
}

/// Break occurrences vote for start groups of length `kk`; a group survives
/// when it and the next two hold at least `chosen - k` votes, and the ends its
/// starts can produce are verified with [`lv_window`]. Returns `(end, dist)`.
pub fn nonperiodic_search_errors(
    pc: &PcString,
    p: &PatternIndex,
    plan: &NonPeriodicPlan,
    k: usize,
    marks: &mut MarkTable,
    metrics: &mut Metrics,
) -> Vec<(usize, usize)> {
    let (n, m) = (pc.len(), p.len());
    let kk = kk(k);
    let groups = (n + 2 * k) / kk + 3;
    marks.begin(groups);
    // an intact break at pattern offset o of a match starting at s sits at
    // s + o + δ with |δ| ≤ k, so its vote y = x - o + k lies in [s, s + 2k]
    for (x, id) in crate::hamming::match_breaks_in_pc(pc, p, plan) {
        for &o in &plan.offsets[id as usize] {
            if x + k < o {
                continue;
            }
            let g = (x + k - o) / kk;
            if g < groups {
                marks.add(g);
                metrics.marks += 1;
            }
        }
    }
    let thr = (plan.chosen - k.min(plan.chosen)) as u32;
    let mut raw = Vec::new();
    for &g in marks.touched().to_vec().iter() {
        for w0 in (g as usize).saturating_sub(2)..=g as usize {
            if w0 * kk >= n {
                continue;
            }
            if marks.get(w0) + marks.get(w0 + 1) + marks.get(w0 + 2) >= thr {
                raw.push(((w0 * kk + m) as i64 - k as i64, ((w0 + 1) * kk - 1 + m + k) as i64));
            }
        }
    }
    marks.reset();
    raw.sort_unstable();
    raw.dedup();
    metrics.candidates += raw.len() as u64;
    let mut out = Vec::new();
    for (l, r) in union_ranges(raw, 1, n as i64) {
        metrics.verifications += 1;
        out.extend(lv_window(pc, p, l, r, k));
    }
    out
}

/// Ends near a pattern/text item pair are verified window by window; the rest
/// split into fine runs where, given one canonical period `u` common to every
/// uncovered stretch on both sides, the distance depends only on the end
/// modulo `|u|`. Returns `(end, dist)` in window offsets.
pub fn periodic_search_errors(pc: &PcString, p: &PatternIndex, ep: &ErrorsPattern, metrics: &mut Metrics) -> Vec<(usize, usize)> {
    let ErrorsPlan::Periodic(plan) = &ep.plan else { panic!("periodic plan expected") };
    let (n, m, k, z) = (pc.len(), ep.m, ep.k, ep.z);
    let mut table = plan.table.clone();
    let d = pc_decompose(pc, p, z, &mut table);
    let tiv = build_intervals(&d, z, k);
    let uncovered = tiv.uncovered(&d);
    let titems = items_of(&d);
    let w = (2 * z * (kk(k) + 2)) as i64;
    let mut raw = Vec::new();
    for &(ps, pe) in &plan.items {
        for &(ts, te) in &titems {
            // pattern placed at [e - m, e): shift e - m
            raw.push((ts as i64 - pe as i64 - w + 1 + m as i64, te as i64 - ps as i64 + w - 1 + m as i64));
        }
    }
    let close = union_ranges(raw, 1, n as i64);
    let mut out = Vec::new();
    for &(l, r) in &close {
        metrics.verifications += 1;
        out.extend(lv_window(pc, p, l, r, k));
    }
    let mut next = 1;
    let mut fine = Vec::new();
    for &(l, r) in close.iter().chain(std::iter::once(&(n + 1, n + 1))) {
        if l > next {
            fine.push((next, l - 1));
        }
        next = r + 1;
    }
    for (lo, hi) in fine {
        metrics.fine_runs += 1;
        let Some(id) = plan.common else { continue };
        let span = (lo.saturating_sub(m), lo);
        if uncovered.iter().any(|&(s, e, c)| s < span.1 && e > span.0 && c != id) {
            continue;
        }
        let q = table.word(id).len();
        for e in lo..=hi.min(lo + q - 1) {
            metrics.verifications += 1;
            if let Some(dist) = lv_verify(pc, p, e, k) {
                out.extend((e..=hi).step_by(q).map(|x| (x, dist)));
            }
        }
    }
    out
}

/// All `(end, dist)` of one window, ends as exclusive offsets into `pc`.
pub fn search_pc_errors(
    pc: &PcString,
    p: &PatternIndex,
    rp: &PatternIndex,
    ep: &ErrorsPattern,
    marks: &mut MarkTable,
    metrics: &mut Metrics,
) -> Vec<(usize, usize)> {
    match &ep.plan {
        ErrorsPlan::Short { .. } => {
            metrics.naive_windows += 1;
            metrics.verifications += 1;
            lv_window(pc, p, 1, pc.len(), ep.k)
        }
        ErrorsPlan::NonPeriodic(plan) => {
            metrics.nonperiodic_windows += 1;
            nonperiodic_search_errors(pc, p, plan, ep.k, marks, metrics)
        }
        ErrorsPlan::Periodic(_) => {
            metrics.periodic_windows += 1;
            let trimmed = trim_to_few_breaks(pc, p, rp, ep.z, kk(ep.k));
            let offset = trimmed.window_start - pc.window_start;
            periodic_search_errors(&trimmed, p, ep, metrics).into_iter().map(|(e, d)| (e + offset, d)).collect()
        }
    }
}

/// Smallest distance between `p` and a suffix of codeword `v`, thresholded.
fn chunk_edit(pt: &PatternTrie, v: u32, k: usize) -> Option<usize> {
    let m = pt.m();
    let depth = pt.depth(v);
    let mut found = None;
    waves(
        m,
        depth,
        k,
        -(k as i64),
        k as i64,
        false,
        |i, j| {
            let anc = pt.ancestor(v, depth - j);
            pt.chunk_lcsuf(Chunk { end: anc, len: (depth - j) as u32 }, pt.pattern_chunk(0, m - i))
        },
        |e, rows| {
            if rows.iter().any(|&r| r >= m as i64) {
                found = Some(e);
                return true;
            }
            false
        },
    );
    found
}

/// Occurrences starting and ending inside one codeword. Every prefix of a
/// codeword is a codeword, so one suffix check per trie node suffices; tokens
/// then report the matching nodes on their root paths.
pub fn internal_matches_edit(ct: &CompressedText, pt: &PatternTrie, k: usize) -> Vec<(usize, usize)> {
    const NONE: u32 = u32::MAX;
    let min_depth = pt.m().saturating_sub(k).max(1);
    let nodes = pt.text_nodes;
    let mut dist = vec![NONE; nodes];
    let mut match_anc = vec![NONE; nodes];
    for v in 1..nodes as u32 {
        if pt.depth(v) >= min_depth {
            if let Some(d) = chunk_edit(pt, v, k) {
                dist[v as usize] = d as u32;
            }
        }
        let par = pt.trie.parent[v as usize] as usize;
        match_anc[v as usize] = if dist[v as usize] != NONE { v } else { match_anc[par] };
    }
    let mut out = Vec::new();
    for (i, &t) in ct.tokens.iter().enumerate() {
        let mut u = match_anc[t as usize];
        while u != NONE {
            out.push((ct.boundary[i] + pt.depth(u), dist[u as usize] as usize));
            u = match_anc[pt.trie.parent[u as usize] as usize];
        }
    }
    out
}

/// Every end (1-based) of a substring of the text within edit distance `k` of
/// `p`, with the smallest distance.
pub fn search_errors(ct: &CompressedText, cb: &Codebook, p: &[Letter], k: usize, opts: SearchOptions) -> (MatchReport, Metrics) {
    let mut metrics = Metrics::default();
    let m = p.len();
    if m == 0 || m > ct.total_len() + k {
        return (MatchReport::default(), metrics);
    }
    let pt = PatternTrie::new(cb, p).expect("nonempty pattern");
    let ph = build_ph(ct, &pt, k);
    let ep = ErrorsPattern::new(p, k);
    let mut hits = internal_matches_edit(ct, &pt, k);
    metrics.internal_hits = hits.len() as u64;
    let boundaries: Vec<usize> = (1..ct.n()).collect();
    let per = par_map_init(boundaries, opts.parallelism, MarkTable::default, |marks, i| {
        let mut mt = Metrics { boundaries: 1, ..Metrics::default() };
        let Some(pc) = crossing_window(&ph, ct, &pt, i, Mode::Edit) else {
            mt.skipped_windows += 1;
            return (Vec::new(), mt);
        };
        mt.pc_strings += 1;
        let found = search_pc_errors(&pc, &pt.pattern, &pt.rpattern, &ep, marks, &mut mt);
        let ends = found.into_iter().map(|(e, d)| (pc.window_start + e, d)).collect::<Vec<_>>();
        (ends, mt)
    });
    for (h, mt) in per {
        hits.extend(h);
        metrics.absorb(&mt);
    }
    let mut report = MatchReport::from_unsorted(hits);
    if opts.first_only {
        report.hits.truncate(1);
    }
    (report, metrics)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::oracle_edit;
    use crate::lzindex::lz78_parse;

    fn w(s: &str) -> Vec<Letter> {
        s.bytes().map(Letter::from).collect()
    }

    fn dp(a: &[Letter], b: &[Letter]) -> usize {
        let mut row: Vec<usize> = (0..=b.len()).collect();
        for (i, &x) in a.iter().enumerate() {
            let mut diag = row[0];
            row[0] = i + 1;
            for (j, &y) in b.iter().enumerate() {
                let v = (diag + usize::from(x != y)).min(row[j] + 1).min(row[j + 1] + 1);
                diag = row[j + 1];
                row[j + 1] = v;
            }
        }
        row[b.len()]
    }

    #[test]
    fn grid_examples() {
        let g = LvGrid::new(&w("kitten"), &w("sitting"), 3);
        assert_eq!(g.dist(6, 7), 3);
        assert_eq!(g.dist(4, 4), 1);
        assert_eq!(LvGrid::new(&w("kitten"), &w("sitting"), 2).dist(6, 7), 3);
        assert_eq!(LvGrid::new(&w("abc"), &w("abc"), 0).dist(3, 3), 0);
    }

    #[test]
    fn verify_and_window_examples() {
        let p = PatternIndex::new(&w("abcd")).unwrap();
        let pc = PcString::from_text(&p, &w("xxabdxx"));
        // "abd" is one deletion away; "abdx" and "ab" are two away
        assert_eq!(lv_verify(&pc, &p, 5, 1), Some(1));
        assert_eq!(lv_verify(&pc, &p, 6, 1), None);
        assert_eq!(lv_verify(&pc, &p, 4, 1), None);
        assert_eq!(lv_verify(&pc, &p, 6, 2), Some(2));
        assert_eq!(lv_window(&pc, &p, 1, 7, 1), vec![(5, 1)]);
    }

    #[test]
    fn locked_distance_examples() {
        let closed = Openness::default();
        assert_eq!(locked_edit_distance(&w("aba"), closed, &w("ab"), 1), 1);
        assert_eq!(locked_edit_distance(&w("abab"), closed, &w("ab"), 1), 0);
        // open on the right: "aba" is a prefix of (ab)^∞
        assert_eq!(locked_edit_distance(&w("aba"), Openness { left: false, right: true }, &w("ab"), 1), 0);
        // open on the left: "bab" is a suffix of ^∞(ab)
        assert_eq!(locked_edit_distance(&w("bab"), Openness { left: true, right: false }, &w("ab"), 1), 0);
        assert_eq!(locked_edit_distance(&w("bbbb"), closed, &w("ab"), 1), 2);
    }

    #[test]
    fn leftval_examples() {
        // u' = "b", then (ab)^α
        assert_eq!(leftval(&w("babab"), &w("ab"), 1, 2), 0);
        assert_eq!(leftval(&w("abab"), &w("ab"), 0, 2), 0);
        assert_eq!(leftval(&w("abab"), &w("ab"), 1, 2), 1);
    }

    #[test]
    fn intervals_around_one_burst() {
        let z = 4;
        let mut s: Vec<Letter> = (0..200).map(|i| (i % 2) as Letter).collect();
        s[100] = 7;
        let mut table = PeriodTable::default();
        let d = decompose(&s, z, &mut table);
        let iv = build_intervals(&d, z, 1);
        assert_eq!(iv.list.len(), 1);
        let i = &iv.list[0];
        assert_eq!(i.open, Openness::default());
        assert!(i.start < 100 && i.end > 101);
        assert!(!iv.pathological);
        // both flanks start on a copy boundary of the canonical word
        assert_eq!(d.stretches[0].phase_at(i.start), 0);
        assert_eq!(i.left_canon, i.right_canon);
        let uncovered = iv.uncovered(&d);
        assert_eq!(uncovered.iter().map(|u| u.1 - u.0).sum::<usize>() + i.end - i.start, 200);
    }

    #[test]
    fn burst_near_both_ends_is_pathological() {
        let z = 4;
        let mut s: Vec<Letter> = (0..30).map(|i| (i % 2) as Letter).collect();
        s[3] = 7;
        s[26] = 7;
        let mut table = PeriodTable::default();
        let d = decompose(&s, z, &mut table);
        let iv = build_intervals(&d, z, 1);
        assert!(iv.pathological);
        assert_eq!((iv.list[0].start, iv.list[0].end), (0, 30));
    }

    proptest::proptest! {
        #[test]
        fn grid_matches_dp(a in proptest::collection::vec(0u32..3, 0..40), b in proptest::collection::vec(0u32..3, 0..40), k in 0usize..6) {
            let g = LvGrid::new(&a, &b, k);
            for x in 0..=a.len() {
                for y in 0..=b.len() {
                    proptest::prop_assert_eq!(g.dist(x, y), dp(&a[..x], &b[..y]).min(k + 1));
                }
            }
        }

        #[test]
        fn search_matches_oracle(t in proptest::collection::vec(0u32..3, 1..300), p in proptest::collection::vec(0u32..3, 1..40), k in 0usize..4) {
            let (cb, ct) = lz78_parse(&t);
            let (got, _) = search_errors(&ct, &cb, &p, k, SearchOptions::default());
            proptest::prop_assert_eq!(got, oracle_edit(&t, &p, k));
        }
    }
}
