//! Pattern matching with k mismatches.
//!
//! Per window the pattern is either
//! - short relative to `k` (`m < 9kk²`): every alignment is checked by kangaroo
//!   jumps;
//! - non-periodic (at least `2kk` disjoint z-breaks): the first `2kk` breaks are
//!   located in the window and each occurrence votes for one alignment; only
//!   alignments with enough votes are checked;
//! - periodic: the window is trimmed, both sides are split into periodic
//!   stretches and breaks, and only alignments where some pattern item comes
//!   near some text item are checked individually. Between such alignments the
//!   mismatch count repeats with the common period.

use std::collections::HashMap;

use crate::lzindex::{Chunk, Codebook, CompressedText, PatternTrie};
use crate::pcreduce::{build_ph, crossing_window, kk, pc_decompose, trim_to_few_breaks, verify_hamming_at, PcBlock, PcString, PhDecomposition};
use crate::textcore::{decompose, find_breaks, BreakDecomposition, PatternIndex, PeriodTable, Stretch};
use crate::{par_map_init, Letter, MatchReport, Metrics, Mode, SearchOptions};

/// Break length for pattern length `m` and `k`: `max(3, ⌊√m / kk⌋)`.
pub fn choose_z(m: usize, k: usize) -> usize {
    (m.isqrt() / kk(k)).max(3)
}

/// Below this pattern length the window is scanned alignment by alignment.
pub fn is_short(m: usize, k: usize) -> bool {
    m < 9 * kk(k) * kk(k)
}

/// Per-position vote counter with O(1) reset: entries stamped with an older
/// epoch read as zero.
#[derive(Debug, Clone, Default)]
pub struct MarkTable {
    counts: Vec<u32>,
    stamps: Vec<u32>,
    epoch: u32,
    touched: Vec<u32>,
}

impl MarkTable {
    pub fn begin(&mut self, size: usize) {
        if self.counts.len() < size {
            self.counts.resize(size, 0);
            self.stamps.resize(size, 0);
        }
        self.epoch = self.epoch.wrapping_add(1);
        if self.epoch == 0 {
            self.stamps.iter_mut().for_each(|s| *s = 0);
            self.epoch = 1;
        }
        self.touched.clear();
    }

    /// Adds one vote and returns the new count.
    pub fn add(&mut self, x: usize) -> u32 {
        if self.stamps[x] != self.epoch {
            self.stamps[x] = self.epoch;
            self.counts[x] = 0;
            self.touched.push(x as u32);
        }
        self.counts[x] += 1;
        self.counts[x]
    }

    pub fn get(&self, x: usize) -> u32 {
        if x < self.stamps.len() && self.stamps[x] == self.epoch { self.counts[x] } else { 0 }
    }

    pub fn touched(&self) -> &[u32] {
        &self.touched
    }

    /// Zero the entries written since `begin`.
    pub fn reset(&mut self) {
        for &t in &self.touched {
            self.counts[t as usize] = 0;
        }
        self.touched.clear();
    }

    /// Raw scan of the underlying counters, ignoring epochs.
    pub fn all_zero(&self) -> bool {
        self.counts.iter().all(|&c| c == 0)
    }
}

/// Multi-pattern automaton over `u32` letters; all patterns have one length.
#[derive(Debug, Clone)]
pub struct AhoCorasick {
    goto: HashMap<(u32, Letter), u32>,
    fail: Vec<u32>,
    out: Vec<u32>,
}

const NONE: u32 = u32::MAX;

impl AhoCorasick {
    pub fn new(patterns: &[Vec<Letter>]) -> Self {
        let mut goto = HashMap::new();
        let mut out = vec![NONE];
        for (id, pat) in patterns.iter().enumerate() {
            let mut s = 0u32;
            for &c in pat {
                s = match goto.get(&(s, c)) {
                    Some(&t) => t,
                    None => {
                        let t = out.len() as u32;
                        out.push(NONE);
                        goto.insert((s, c), t);
                        t
                    }
                };
            }
            out[s as usize] = id as u32;
        }
        let mut children: Vec<Vec<(Letter, u32)>> = vec![Vec::new(); out.len()];
        for (&(s, c), &t) in &goto {
            children[s as usize].push((c, t));
        }
        let mut fail = vec![0u32; out.len()];
        let mut queue = std::collections::VecDeque::new();
        for &(_, t) in &children[0] {
            queue.push_back(t);
        }
        while let Some(s) = queue.pop_front() {
            for &(c, t) in &children[s as usize] {
                let mut f = fail[s as usize];
                let target = loop {
                    if let Some(&x) = goto.get(&(f, c)) {
                        break x;
                    }
                    if f == 0 {
                        break 0;
                    }
                    f = fail[f as usize];
                };
                fail[t as usize] = target;
                queue.push_back(t);
            }
        }
        AhoCorasick { goto, fail, out }
    }

    pub fn step(&self, mut s: u32, c: Letter) -> u32 {
        loop {
            if let Some(&t) = self.goto.get(&(s, c)) {
                return t;
            }
            if s == 0 {
                return 0;
            }
            s = self.fail[s as usize];
        }
    }

    /// Pattern ending at state `s` (equal lengths: only the state itself can match).
    pub fn output(&self, s: u32) -> Option<u32> {
        let o = self.out[s as usize];
        (o != NONE).then_some(o)
    }
}

/// Pattern-side data for the voting matcher.
#[derive(Debug, Clone)]
pub struct NonPeriodicPlan {
    pub z: usize,
    /// Distinct contents among the chosen breaks.
    pub patterns: Vec<Vec<Letter>>,
    /// Pattern offsets of the chosen breaks, per distinct content.
    pub offsets: Vec<Vec<usize>>,
    /// Number of chosen breaks (`2kk`).
    pub chosen: usize,
    /// Id of the break starting at each pattern position, or `NONE`.
    occ_id: Vec<u32>,
    /// Smallest position `>= x` with an occurrence; `m` if none.
    next_occ: Vec<u32>,
    ac: AhoCorasick,
}

impl NonPeriodicPlan {
    pub fn new(p: &[Letter], z: usize, breaks: &[usize], chosen: usize) -> Self {
        let m = p.len();
        let mut ids: HashMap<&[Letter], u32> = HashMap::new();
        let mut patterns = Vec::new();
        let mut offsets: Vec<Vec<usize>> = Vec::new();
        for &b in &breaks[..chosen] {
            let w = &p[b..b + z];
            let id = *ids.entry(w).or_insert_with(|| {
                patterns.push(w.to_vec());
                offsets.push(Vec::new());
                (patterns.len() - 1) as u32
            });
            offsets[id as usize].push(b);
        }
        let mut occ_id = vec![NONE; m + 1];
        for x in 0..=m.saturating_sub(z) {
            if let Some(&id) = ids.get(&p[x..x + z]) {
                occ_id[x] = id;
            }
        }
        let mut next_occ = vec![m as u32; m + 2];
        for x in (0..=m).rev() {
            next_occ[x] = if occ_id[x] != NONE { x as u32 } else { next_occ[x + 1] };
        }
        let ac = AhoCorasick::new(&patterns);
        NonPeriodicPlan { z, patterns, offsets, chosen, occ_id, next_occ, ac }
    }
}

/// All occurrences `(offset in f, break id)` of the chosen breaks in `f`:
/// occurrences inside one block come from the pattern-side occurrence array,
/// occurrences straddling block boundaries from a short automaton scan around
/// each boundary (attributed to the first boundary they cross).
pub fn match_breaks_in_pc(pc: &PcString, p: &PatternIndex, plan: &NonPeriodicPlan) -> Vec<(usize, u32)> {
    let z = plan.z;
    let n = pc.len();
    let mut out = Vec::new();
    for (i, blk) in pc.blocks.iter().enumerate() {
        let base = pc.prefix[i];
        if let PcBlock::Factor { a, b } = *blk {
            let (a, b) = (a as usize, b as usize);
            if b - a >= z {
                let mut x = plan.next_occ[a] as usize;
                while x + z <= b {
                    out.push((base + x - a, plan.occ_id[x]));
                    x = plan.next_occ[x + 1] as usize;
                }
            }
        }
        if i == 0 || z < 2 {
            continue;
        }
        let s0 = (base + 1).saturating_sub(z).max(pc.prefix[i - 1]);
        let e0 = (base + z - 1).min(n);
        if e0 <= base {
            continue;
        }
        let letters = pc.extract(p, s0, e0);
        let mut st = 0u32;
        for (j, &c) in letters.iter().enumerate() {
            st = plan.ac.step(st, c);
            if let Some(id) = plan.ac.output(st) {
                let start = s0 + j + 1 - z;
                if start < base {
                    out.push((start, id));
                }
            }
        }
    }
    out
}

/// Outcome of one voting pass over a window.
#[derive(Debug, Clone, Default)]
pub struct VoteOutcome {
    /// `(alignment, distance)`.
    pub hits: Vec<(usize, usize)>,
    pub marks: u64,
    pub candidates: u64,
}

/// Vote for `q - o` per break occurrence at `q` (break offset `o`), then check
/// every alignment holding at least `chosen - k` votes.
pub fn nonperiodic_search(pc: &PcString, p: &PatternIndex, plan: &NonPeriodicPlan, k: usize, marks: &mut MarkTable) -> VoteOutcome {
    let m = p.len();
    let n = pc.len();
    let mut res = VoteOutcome::default();
    if n < m {
        return res;
    }
    let last = n - m;
    let thr = (plan.chosen - k.min(plan.chosen)) as u32;
    marks.begin(last + 1);
    let mut cands = Vec::new();
    for (q, id) in match_breaks_in_pc(pc, p, plan) {
        for &o in &plan.offsets[id as usize] {
            if q < o || q - o > last {
                continue;
            }
            res.marks += 1;
            if marks.add(q - o) == thr {
                cands.push(q - o);
            }
        }
    }
    marks.reset();
    res.candidates = cands.len() as u64;
    cands.sort_unstable();
    for a in cands {
        if let Some(d) = verify_hamming_at(pc, p, a, k) {
            res.hits.push((a, d));
        }
    }
    res
}

/// Inclusive alignment ranges, sorted and disjoint.
pub type Ranges = Vec<(usize, usize)>;

fn union_clip(mut raw: Vec<(i64, i64)>, last: i64) -> Ranges {
    raw.retain(|r| r.0 <= r.1 && r.1 >= 0 && r.0 <= last);
    raw.sort_unstable();
    let mut out: Ranges = Vec::new();
    for (l, r) in raw {
        let (l, r) = (l.max(0) as usize, r.min(last) as usize);
        match out.last_mut() {
            Some(prev) if l <= prev.1 + 1 => prev.1 = prev.1.max(r),
            _ => out.push((l, r)),
        }
    }
    out
}

fn contains(ranges: &Ranges, a: usize) -> bool {
    let i = ranges.partition_point(|r| r.1 < a);
    i < ranges.len() && ranges[i].0 <= a
}

/// `[start, end)` in the coordinates of its side.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

/// Alignments `a` at which pattern span `ps` (shifted by `a`) lies within
/// distance `< w` of text span `ts`.
fn near_range(ps: Span, ts: Span, w: usize) -> (i64, i64) {
    let w = w as i64;
    (ts.start as i64 - ps.end as i64 - w + 1, ts.end as i64 - ps.start as i64 + w - 1)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum ElemKind {
    Stretch(usize),
    Break(usize),
}

#[derive(Debug, Clone, Copy)]
struct Elem {
    start: usize,
    end: usize,
    kind: ElemKind,
}

/// One side (pattern or window) as an ordered tiling of stretches and breaks.
#[derive(Debug, Clone)]
struct Side {
    len: usize,
    elems: Vec<Elem>,
    breaks: Vec<Span>,
    /// Breaks plus the two zero-length endpoints, sorted.
    items: Vec<Span>,
    stretches: Vec<Stretch>,
    break_letters: Vec<Vec<Letter>>,
}

impl Side {
    fn new(d: &BreakDecomposition, break_letters: Vec<Vec<Letter>>) -> Self {
        let mut elems = Vec::new();
        for (i, st) in d.stretches.iter().enumerate() {
            if st.len > 0 {
                elems.push(Elem { start: st.start, end: st.end(), kind: ElemKind::Stretch(i) });
            }
            if i < d.breaks.len() {
                let b = d.breaks[i];
                elems.push(Elem { start: b.start, end: b.end(), kind: ElemKind::Break(i) });
            }
        }
        let breaks: Vec<Span> = d.breaks.iter().map(|b| Span { start: b.start, end: b.end() }).collect();
        let mut items = vec![Span { start: 0, end: 0 }];
        items.extend(breaks.iter().copied());
        items.push(Span { start: d.len, end: d.len });
        Side { len: d.len, elems, breaks, items, stretches: d.stretches.clone(), break_letters }
    }

    fn elem_at(&self, x: usize) -> usize {
        self.elems.partition_point(|e| e.end <= x)
    }

    /// Distance from `[s, e)` to the nearest item of this side.
    fn nearest_item_gap(&self, s: usize, e: usize) -> usize {
        let i = self.items.partition_point(|it| it.end <= s);
        let mut best = usize::MAX;
        for j in [i.wrapping_sub(1), i, i + 1] {
            if let Some(it) = self.items.get(j) {
                let gap = if it.end <= s {
                    s - it.end
                } else if it.start >= e {
                    it.start - e
                } else {
                    0
                };
                best = best.min(gap);
            }
        }
        best
    }
}

/// Canonical id shared by all long pattern stretches.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum LongIds {
    Empty,
    One(u32),
    Mixed,
}

/// Pattern-side data for the periodic matchers.
#[derive(Debug, Clone)]
pub struct PeriodicPlan {
    pub decomposition: BreakDecomposition,
    pub table: PeriodTable,
    side: Side,
    long_ids: LongIds,
}

impl PeriodicPlan {
    fn new(p: &[Letter], z: usize, k: usize) -> Self {
        let mut table = PeriodTable::default();
        let d = decompose(p, z, &mut table);
        let letters = d.breaks.iter().map(|b| p[b.start..b.end()].to_vec()).collect();
        let side = Side::new(&d, letters);
        let long = z * (kk(k) + 1);
        let mut long_ids = LongIds::Empty;
        for st in d.stretches.iter().filter(|s| s.len >= long) {
            let id = st.canon.unwrap();
            long_ids = match long_ids {
                LongIds::Empty => LongIds::One(id),
                LongIds::One(x) if x == id => LongIds::One(x),
                _ => LongIds::Mixed,
            };
        }
        PeriodicPlan { decomposition: d, table, side, long_ids }
    }
}

#[derive(Debug, Clone)]
pub enum Plan {
    Short,
    NonPeriodic(NonPeriodicPlan),
    Periodic(PeriodicPlan),
}

/// Everything the per-window matchers need about the pattern.
#[derive(Debug, Clone)]
pub struct HammingPattern {
    pub m: usize,
    pub k: usize,
    pub z: usize,
    pub plan: Plan,
}

impl HammingPattern {
    pub fn new(p: &[Letter], k: usize) -> Self {
        let m = p.len();
        let z = choose_z(m, k);
        if is_short(m, k) {
            return HammingPattern { m, k, z, plan: Plan::Short };
        }
        let breaks = find_breaks(p, z);
        let need = 2 * kk(k);
        let plan = if breaks.len() >= need {
            Plan::NonPeriodic(NonPeriodicPlan::new(p, z, &breaks, need))
        } else {
            Plan::Periodic(PeriodicPlan::new(p, z, k))
        };
        HammingPattern { m, k, z, plan }
    }

    pub fn periodic(&self) -> Option<&PeriodicPlan> {
        match &self.plan {
            Plan::Periodic(pp) => Some(pp),
            _ => None,
        }
    }
}

/// Mismatch counts between `u1^∞` and `u2^∞` from any pair of phases, in O(1)
/// per query: the phase pairs split into `gcd(q1, q2)` cycles of length
/// `lcm(q1, q2)`, each stored as a prefix-sum array.
#[derive(Debug, Clone)]
struct PairTable {
    q2: usize,
    g: usize,
    cycle: usize,
    pos: Vec<u32>,
    prefix: Vec<Vec<u32>>,
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 { a } else { gcd(b, a % b) }
}

impl PairTable {
    fn new(u1: &[Letter], u2: &[Letter]) -> Self {
        let (q1, q2) = (u1.len(), u2.len());
        let g = gcd(q1, q2);
        let cycle = q1 / g * q2;
        let mut pos = vec![0u32; q1 * q2];
        let mut prefix = Vec::with_capacity(g);
        for r in 0..g {
            let mut pre = Vec::with_capacity(cycle + 1);
            pre.push(0u32);
            for t in 0..cycle {
                let (i1, i2) = ((r + t) % q1, t % q2);
                pos[i1 * q2 + i2] = t as u32;
                pre.push(pre[t] + u32::from(u1[i1] != u2[i2]));
            }
            prefix.push(pre);
        }
        PairTable { q2, g, cycle, pos, prefix }
    }

    fn count(&self, i1: usize, i2: usize, len: usize) -> u64 {
        let r = (i1 + self.g * self.q2 - i2 % self.g) % self.g;
        let pre = &self.prefix[r];
        let t0 = self.pos[i1 * self.q2 + i2] as usize;
        let full = (len / self.cycle) as u64 * pre[self.cycle] as u64;
        let rem = len % self.cycle;
        let part = if t0 + rem <= self.cycle {
            pre[t0 + rem] - pre[t0]
        } else {
            pre[self.cycle] - pre[t0] + pre[t0 + rem - self.cycle]
        };
        full + part as u64
    }

    fn words(&self) -> usize {
        self.pos.len() + self.prefix.iter().map(Vec::len).sum::<usize>()
    }
}

/// Why the table-driven verifier refused an alignment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
pub enum BlackError {
    #[error("a pattern break overlaps a text break at this alignment")]
    Overlap,
}

/// One trimmed window prepared for the periodic matchers.
pub struct PeriodicWindow<'a> {
    pub pc: PcString,
    p: &'a PatternIndex,
    plan: &'a PeriodicPlan,
    k: usize,
    z: usize,
    table: PeriodTable,
    text: Side,
    break_memo: HashMap<(bool, u32, u32, u32), u32>,
    pair_memo: HashMap<(u32, u32), PairTable>,
    winner_memo: HashMap<(bool, usize, usize), Option<u32>>,
    /// Words held by lazily built tables.
    pub table_words: usize,
}

impl<'a> PeriodicWindow<'a> {
    pub fn new(pc: PcString, p: &'a PatternIndex, hp: &'a HammingPattern) -> Self {
        let plan = hp.periodic().expect("periodic plan");
        let mut table = plan.table.clone();
        let d = pc_decompose(&pc, p, hp.z, &mut table);
        let letters = d.breaks.iter().map(|b| pc.extract(p, b.start, b.end())).collect();
        let text = Side::new(&d, letters);
        PeriodicWindow {
            pc,
            p,
            plan,
            k: hp.k,
            z: hp.z,
            table,
            text,
            break_memo: HashMap::new(),
            pair_memo: HashMap::new(),
            winner_memo: HashMap::new(),
            table_words: 0,
        }
    }

    fn m(&self) -> usize {
        self.plan.side.len
    }

    /// Last valid alignment, if any.
    pub fn last_alignment(&self) -> Option<usize> {
        self.pc.len().checked_sub(self.m())
    }

    pub fn text_decomposition_breaks(&self) -> usize {
        self.text.breaks.len()
    }

    fn close_dist(&self) -> usize {
        self.z * (kk(self.k) + 1)
    }

    fn black_dist(&self) -> usize {
        23 * self.z * kk(self.k)
    }

    fn pairs_ranges(&self, w: usize, need_break: bool) -> Ranges {
        let last = self.last_alignment().unwrap() as i64;
        let mut raw = Vec::new();
        let (pn, tn) = (self.plan.side.items.len(), self.text.items.len());
        for (i, &ps) in self.plan.side.items.iter().enumerate() {
            for (j, &ts) in self.text.items.iter().enumerate() {
                let p_break = i > 0 && i + 1 < pn;
                let t_break = j > 0 && j + 1 < tn;
                if need_break && !p_break && !t_break {
                    continue;
                }
                raw.push(near_range(ps, ts, w));
            }
        }
        union_clip(raw, last)
    }

    /// Alignments with some (pattern item, text item) pair closer than `z(kk+1)`.
    pub fn close_alignments(&self) -> Ranges {
        self.pairs_ranges(self.close_dist(), false)
    }

    /// Alignments where some break lies within `23·z·kk` of an opposing item.
    pub fn black_alignments(&self) -> Ranges {
        self.pairs_ranges(self.black_dist(), true)
    }

    /// Alignments where a pattern break meets a text break, or a text break
    /// straddles a pattern endpoint.
    pub fn overlap_alignments(&self) -> Ranges {
        let last = self.last_alignment().unwrap() as i64;
        let m = self.m() as i64;
        let mut raw = Vec::new();
        for &tb in &self.text.breaks {
            let (ts, te) = (tb.start as i64, tb.end as i64);
            for &pb in &self.plan.side.breaks {
                raw.push((ts - pb.end as i64 + 1, te - pb.start as i64 - 1));
            }
            raw.push((ts + 1, te - 1));
            raw.push((ts - m + 1, te - m - 1));
        }
        union_clip(raw, last)
    }

    fn break_vs_period(&mut self, pattern_side: bool, b: usize, canon: u32, phase: usize) -> u32 {
        let key = (pattern_side, b as u32, canon, phase as u32);
        if let Some(&v) = self.break_memo.get(&key) {
            return v;
        }
        let letters = if pattern_side { &self.plan.side.break_letters[b] } else { &self.text.break_letters[b] };
        let word = self.table.word(canon);
        let q = word.len();
        let v = letters.iter().enumerate().filter(|&(i, &c)| c != word[(phase + i) % q]).count() as u32;
        self.table_words += 1;
        self.break_memo.insert(key, v);
        v
    }

    fn stretch_vs_stretch(&mut self, c1: u32, i1: usize, c2: u32, i2: usize, len: usize) -> u64 {
        if !self.pair_memo.contains_key(&(c1, c2)) {
            let t = PairTable::new(self.table.word(c1), self.table.word(c2));
            self.table_words += t.words();
            self.pair_memo.insert((c1, c2), t);
        }
        self.pair_memo[&(c1, c2)].count(i1, i2, len)
    }

    /// Canonical id with the largest total stretch length inside `[lo, hi)` of
    /// one side; ties go to the lexicographically least word.
    fn total_len_winner(&mut self, pattern_side: bool, first: usize, last: usize) -> Option<u32> {
        let key = (pattern_side, first, last);
        if let Some(&w) = self.winner_memo.get(&key) {
            return w;
        }
        let side = if pattern_side { &self.plan.side } else { &self.text };
        let ext = self.black_dist();
        let lo = side.breaks[first].start.saturating_sub(ext);
        let hi = (side.breaks[last].end + ext).min(side.len);
        let mut total: HashMap<u32, usize> = HashMap::new();
        for st in &side.stretches {
            let (s, e) = (st.start.max(lo), st.end().min(hi));
            if s < e {
                *total.entry(st.canon.unwrap()).or_default() += e - s;
            }
        }
        let table = &self.table;
        let winner = total
            .into_iter()
            .max_by(|a, b| a.1.cmp(&b.1).then_with(|| table.word(b.0).cmp(table.word(a.0))))
            .map(|x| x.0);
        self.winner_memo.insert(key, winner);
        winner
    }

    /// Exact Hamming distance at alignment `a` (or `None` when above `k`)
    /// from the stretch/break tables, without touching window letters.
    /// Also returns the number of black breaks at `a`.
    pub fn verify_black_alignment(&mut self, a: usize) -> Result<(Option<usize>, usize), BlackError> {
        let m = self.m();
        let k = self.k as u64;
        let bd = self.black_dist();

        // black breaks, and same-side white runs screened by the TotalLen winner
        let mut items: Vec<(usize, bool, usize)> = Vec::new();
        for (i, b) in self.plan.side.breaks.iter().enumerate() {
            items.push((a + b.start, true, i));
        }
        let t0 = self.text.breaks.partition_point(|b| b.end <= a);
        let t1 = self.text.breaks.partition_point(|b| b.start < a + m);
        for i in t0..t1 {
            items.push((self.text.breaks[i].start, false, i));
        }
        items.sort_unstable();
        let mut black_count = 0;
        let mut run: Option<(bool, usize, usize)> = None;
        let mut runs = Vec::new();
        for &(_, pside, i) in &items {
            let black = if pside {
                let b = self.plan.side.breaks[i];
                self.text.nearest_item_gap(a + b.start, a + b.end) < bd
            } else {
                let b = self.text.breaks[i];
                if b.start < a || b.end > a + m {
                    return Err(BlackError::Overlap);
                }
                self.plan.side.nearest_item_gap(b.start - a, b.end - a) < bd
            };
            if black {
                black_count += 1;
                if let Some(r) = run.take() {
                    runs.push(r);
                }
                continue;
            }
            run = match run {
                Some((s, f, _)) if s == pside => Some((s, f, i)),
                Some(r) => {
                    // mixed run: stop screening
                    runs.push(r);
                    None
                }
                None => Some((pside, i, i)),
            };
        }
        if let Some(r) = run {
            runs.push(r);
        }
        for (pside, first, last) in runs {
            // the opposite side is one stretch across the run's neighbourhood
            let probe = if pside { a + self.plan.side.breaks[first].start } else { self.text.breaks[first].start };
            let opposite = if pside {
                let e = self.text.elems[self.text.elem_at(probe)];
                match e.kind {
                    ElemKind::Stretch(s) => self.text.stretches[s].canon,
                    ElemKind::Break(_) => None,
                }
            } else {
                let e = self.plan.side.elems[self.plan.side.elem_at(probe - a)];
                match e.kind {
                    ElemKind::Stretch(s) => self.plan.side.stretches[s].canon,
                    ElemKind::Break(_) => None,
                }
            };
            if let Some(c) = opposite {
                if self.total_len_winner(pside, first, last) != Some(c) {
                    return Ok((None, black_count));
                }
            }
        }

        // exact walk over the overlay of both tilings
        let mut total = 0u64;
        let mut x = a;
        let (mut pi, mut ti) = (0usize, self.text.elem_at(a));
        while x < a + m {
            while self.plan.side.elems[pi].end + a <= x {
                pi += 1;
            }
            while self.text.elems[ti].end <= x {
                ti += 1;
            }
            let pe = self.plan.side.elems[pi];
            let te = self.text.elems[ti];
            match (pe.kind, te.kind) {
                (ElemKind::Break(b), ElemKind::Stretch(s)) => {
                    if pe.start + a != x || pe.end + a > te.end {
                        return Err(BlackError::Overlap);
                    }
                    let st = self.text.stretches[s];
                    total += self.break_vs_period(true, b, st.canon.unwrap(), st.phase_at(x)) as u64;
                    x = pe.end + a;
                }
                (ElemKind::Stretch(s), ElemKind::Break(b)) => {
                    if te.start != x || te.end > pe.end + a || te.end > a + m {
                        return Err(BlackError::Overlap);
                    }
                    let st = self.plan.side.stretches[s];
                    total += self.break_vs_period(false, b, st.canon.unwrap(), st.phase_at(x - a)) as u64;
                    x = te.end;
                }
                (ElemKind::Stretch(s1), ElemKind::Stretch(s2)) => {
                    let end = (pe.end + a).min(te.end).min(a + m);
                    let (p1, p2) = (self.plan.side.stretches[s1], self.text.stretches[s2]);
                    total += self.stretch_vs_stretch(
                        p1.canon.unwrap(),
                        p1.phase_at(x - a),
                        p2.canon.unwrap(),
                        p2.phase_at(x),
                        end - x,
                    );
                    x = end;
                }
                (ElemKind::Break(_), ElemKind::Break(_)) => return Err(BlackError::Overlap),
            }
            if total > k {
                return Ok((None, black_count));
            }
        }
        Ok((Some(total as usize), black_count))
    }

    /// Common canonical id of every long stretch involved at alignment `a`, or
    /// `None` when they disagree (then no alignment of the fine run matches).
    fn fine_period(&self, a: usize) -> Option<usize> {
        let long = self.close_dist();
        let m = self.m();
        let mut id = match self.plan.long_ids {
            LongIds::Mixed => return None,
            LongIds::One(c) => Some(c),
            LongIds::Empty => None,
        };
        for st in &self.text.stretches {
            if st.len < long || st.end() <= a || st.start >= a + m {
                continue;
            }
            let c = st.canon.unwrap();
            match id {
                None => id = Some(c),
                Some(x) if x != c => return None,
                _ => {}
            }
        }
        id.map(|c| self.table.word(c).len())
    }

    /// Alignments of the fine run `[lo, hi]` restricted to `[s, e]` that match:
    /// one check per residue class modulo the common period, then stepping.
    fn fine_run_hits(&mut self, lo: usize, hi: usize, parts: &[(usize, usize)], metrics: &mut Metrics, out: &mut Vec<(usize, usize)>) {
        metrics.fine_runs += 1;
        let Some(q) = self.fine_period(lo) else { return };
        let reps = q.min(hi - lo + 1);
        for r in 0..reps {
            metrics.verifications += 1;
            let Some(d) = verify_hamming_at(&self.pc, self.p, lo + r, self.k) else { continue };
            for &(s, e) in parts {
                let base = lo + r;
                let mut a = if base >= s { base } else { base + (s - base).div_ceil(q) * q };
                while a <= e {
                    out.push((a, d));
                    a += q;
                }
            }
        }
    }
}

fn complement(ranges: &Ranges, last: usize) -> Ranges {
    let mut out = Vec::new();
    let mut next = 0usize;
    for &(l, r) in ranges {
        if l > next {
            out.push((next, l - 1));
        }
        next = r + 1;
    }
    if next <= last {
        out.push((next, last));
    }
    out
}

/// Check close alignments one by one; inside each fine run check one
/// alignment per residue modulo the common period.
pub fn basic_periodic_search(w: &mut PeriodicWindow, metrics: &mut Metrics) -> Vec<(usize, usize)> {
    let Some(last) = w.last_alignment() else { return Vec::new() };
    let close = w.close_alignments();
    let mut out = Vec::new();
    for &(l, r) in &close {
        for a in l..=r {
            metrics.verifications += 1;
            if let Some(d) = verify_hamming_at(&w.pc, w.p, a, w.k) {
                out.push((a, d));
            }
        }
    }
    for (lo, hi) in complement(&close, last) {
        w.fine_run_hits(lo, hi, &[(lo, hi)], metrics, &mut out);
    }
    out.sort_unstable();
    out
}

/// As [`basic_periodic_search`], but alignments with a black break go through
/// [`PeriodicWindow::verify_black_alignment`]; only overlapping-break and
/// endpoint-only close alignments use the kangaroo verifier.
pub fn fast_periodic_search(w: &mut PeriodicWindow, metrics: &mut Metrics) -> Vec<(usize, usize)> {
    let Some(last) = w.last_alignment() else { return Vec::new() };
    let close = w.close_alignments();
    let black = w.black_alignments();
    let overlap = w.overlap_alignments();
    let mut out = Vec::new();
    let mut cuts: Vec<usize> = vec![0, last + 1];
    for rs in [&close, &black, &overlap] {
        for &(l, r) in rs {
            cuts.push(l);
            cuts.push(r + 1);
        }
    }
    cuts.sort_unstable();
    cuts.dedup();
    let fine = complement(&close, last);
    let mut fine_parts: Vec<Vec<(usize, usize)>> = vec![Vec::new(); fine.len()];
    for seg in cuts.windows(2) {
        let (s, e) = (seg[0], seg[1] - 1);
        if s > last {
            break;
        }
        if contains(&overlap, s) {
            for a in s..=e {
                metrics.verifications += 1;
                if let Some(d) = verify_hamming_at(&w.pc, w.p, a, w.k) {
                    out.push((a, d));
                }
            }
        } else if contains(&black, s) {
            for a in s..=e {
                match w.verify_black_alignment(a) {
                    Ok((d, b)) => {
                        metrics.black_breaks += b as u64;
                        if let Some(d) = d {
                            out.push((a, d));
                        }
                    }
                    Err(_) => {
                        metrics.verifications += 1;
                        if let Some(d) = verify_hamming_at(&w.pc, w.p, a, w.k) {
                            out.push((a, d));
                        }
                    }
                }
            }
        } else if contains(&close, s) {
            for a in s..=e {
                metrics.verifications += 1;
                if let Some(d) = verify_hamming_at(&w.pc, w.p, a, w.k) {
                    out.push((a, d));
                }
            }
        } else {
            let fi = fine.partition_point(|r| r.1 < s);
            fine_parts[fi].push((s, e));
        }
    }
    for (fi, parts) in fine_parts.iter().enumerate() {
        if !parts.is_empty() {
            w.fine_run_hits(fine[fi].0, fine[fi].1, parts, metrics, &mut out);
        }
    }
    metrics.table_words = metrics.table_words.max(w.table_words as u64);
    out.sort_unstable();
    out
}

/// All matching alignments of one window `(alignment, distance)`.
pub fn search_pc_hamming(
    pc: &PcString,
    p: &PatternIndex,
    rp: &PatternIndex,
    hp: &HammingPattern,
    basic: bool,
    marks: &mut MarkTable,
    metrics: &mut Metrics,
) -> Vec<(usize, usize)> {
    let m = hp.m;
    let k = hp.k;
    if pc.len() < m {
        return Vec::new();
    }
    match &hp.plan {
        Plan::Short => {
            metrics.naive_windows += 1;
            let mut out = Vec::new();
            for a in 0..=pc.len() - m {
                metrics.verifications += 1;
                if let Some(d) = verify_hamming_at(pc, p, a, k) {
                    out.push((a, d));
                }
            }
            out
        }
        Plan::NonPeriodic(plan) => {
            metrics.nonperiodic_windows += 1;
            let res = nonperiodic_search(pc, p, plan, k, marks);
            metrics.marks += res.marks;
            metrics.candidates += res.candidates;
            metrics.verifications += res.candidates;
            let kk = kk(k) as u64;
            let (m64, z64) = (m as u64, hp.z as u64);
            if res.marks * z64 > 4 * kk * m64 || res.candidates * z64 > 4 * m64 {
                metrics.bound_violations += 1;
            }
            res.hits
        }
        Plan::Periodic(_) => {
            metrics.periodic_windows += 1;
            let trimmed = trim_to_few_breaks(pc, p, rp, hp.z, kk(k));
            let offset = trimmed.window_start - pc.window_start;
            let mut w = PeriodicWindow::new(trimmed, p, hp);
            let hits = if basic { basic_periodic_search(&mut w, metrics) } else { fast_periodic_search(&mut w, metrics) };
            hits.into_iter().map(|(a, d)| (a + offset, d)).collect()
        }
    }
}

/// The trimmed windows the periodic matchers see for one query, paired with
/// their offset inside the untrimmed window. Empty unless `hp` is periodic.
pub fn periodic_windows<'a>(ct: &CompressedText, pt: &'a PatternTrie, ph: &PhDecomposition, hp: &'a HammingPattern) -> Vec<PeriodicWindow<'a>> {
    if hp.periodic().is_none() {
        return Vec::new();
    }
    (1..ct.n())
        .filter_map(|i| crossing_window(ph, ct, pt, i, Mode::Hamming))
        .filter(|pc| pc.len() >= hp.m)
        .map(|pc| trim_to_few_breaks(&pc, &pt.pattern, &pt.rpattern, hp.z, kk(hp.k)))
        .filter(|pc| pc.len() >= hp.m)
        .map(|pc| PeriodicWindow::new(pc, &pt.pattern, hp))
        .collect()
}

/// Occurrences lying inside a single codeword: each trie node of depth ≥ m is
/// checked once by kangaroo jumps over chunk suffixes, then every token
/// reports the matching nodes on its root path.
pub fn internal_matches_hamming(ct: &CompressedText, pt: &PatternTrie, k: usize) -> Vec<(usize, usize)> {
    let m = pt.m();
    let nodes = pt.text_nodes;
    let mut dist = vec![NONE; nodes];
    let mut match_anc = vec![NONE; nodes];
    for v in 1..nodes as u32 {
        if pt.depth(v) >= m {
            if let Some(d) = chunk_hamming(pt, v, k) {
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

/// Hamming distance between the last `m` letters of node `v` and `p`.
fn chunk_hamming(pt: &PatternTrie, v: u32, k: usize) -> Option<usize> {
    let mut rem = pt.m();
    let mut x = v;
    let mut mism = 0;
    loop {
        let l = pt.chunk_lcsuf(Chunk { end: x, len: rem as u32 }, pt.pattern_chunk(0, rem));
        if l >= rem {
            return Some(mism);
        }
        mism += 1;
        if mism > k {
            return None;
        }
        rem -= l + 1;
        if rem == 0 {
            return Some(mism);
        }
        x = pt.ancestor(x, pt.depth(x) - l - 1);
    }
}

/// Every end (1-based) of a substring of the text within Hamming distance `k`
/// of `p`, with its distance.
pub fn search_hamming(ct: &CompressedText, cb: &Codebook, p: &[Letter], k: usize, opts: SearchOptions) -> (MatchReport, Metrics) {
    let mut metrics = Metrics::default();
    let m = p.len();
    if m == 0 || m > ct.total_len() {
        return (MatchReport::default(), metrics);
    }
    let pt = PatternTrie::new(cb, p).expect("nonempty pattern");
    let ph = build_ph(ct, &pt, k);
    let hp = HammingPattern::new(p, k);
    let mut hits = internal_matches_hamming(ct, &pt, k);
    metrics.internal_hits = hits.len() as u64;
    let boundaries: Vec<usize> = (1..ct.n()).collect();
    let per = par_map_init(
        boundaries,
        opts.parallelism,
        MarkTable::default,
        |marks, i| {
            let mut mt = Metrics { boundaries: 1, ..Metrics::default() };
            let Some(pc) = crossing_window(&ph, ct, &pt, i, Mode::Hamming) else {
                mt.skipped_windows += 1;
                return (Vec::new(), mt);
            };
            mt.pc_strings += 1;
            let found = search_pc_hamming(&pc, &pt.pattern, &pt.rpattern, &hp, opts.basic_periodic, marks, &mut mt);
            let ends = found.into_iter().map(|(a, d)| (pc.window_start + a + m, d)).collect::<Vec<_>>();
            (ends, mt)
        },
    );
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

    #[test]
    fn z_choice() {
        assert_eq!(choose_z(10000, 2), 50);
        assert!(is_short(4, 3));
        assert_eq!(choose_z(4, 3), 3);
    }

    #[test]
    fn mark_table_resets() {
        let mut t = MarkTable::default();
        t.begin(10);
        assert_eq!(t.add(3), 1);
        assert_eq!(t.add(3), 2);
        t.reset();
        assert!(t.all_zero());
        t.begin(10);
        assert_eq!(t.get(3), 0);
    }

    #[test]
    fn automaton_finds_all() {
        let pats = vec![vec![1, 2, 1], vec![2, 1, 2]];
        let ac = AhoCorasick::new(&pats);
        let text = [1, 2, 1, 2, 1, 3, 2, 1, 2];
        let mut s = 0;
        let mut found = Vec::new();
        for (i, &c) in text.iter().enumerate() {
            s = ac.step(s, c);
            if let Some(id) = ac.output(s) {
                found.push((i + 1 - 3, id));
            }
        }
        assert_eq!(found, vec![(0, 0), (1, 1), (2, 0), (6, 1)]);
    }

    #[test]
    fn pair_table_counts() {
        let u1 = vec![0, 1, 1];
        let u2 = vec![1, 0];
        let t = PairTable::new(&u1, &u2);
        for i1 in 0..3 {
            for i2 in 0..2 {
                for len in 0..20 {
                    let naive = (0..len).filter(|&x| u1[(i1 + x) % 3] != u2[(i2 + x) % 2]).count() as u64;
                    assert_eq!(t.count(i1, i2, len), naive);
                }
            }
        }
    }

    proptest::proptest! {
        #[test]
        fn search_matches_oracle(t in proptest::collection::vec(0u32..3, 1..400), p in proptest::collection::vec(0u32..3, 1..60), k in 0usize..5) {
            let (cb, ct) = crate::lzindex::lz78_parse(&t);
            let want = crate::harness::oracle_hamming(&t, &p, k);
            for basic in [false, true] {
                let opts = SearchOptions { basic_periodic: basic, ..Default::default() };
                proptest::prop_assert_eq!(search_hamming(&ct, &cb, &p, k, opts).0, want.clone());
            }
        }
    }
}
