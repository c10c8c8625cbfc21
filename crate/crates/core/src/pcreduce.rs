//! Reduction of the compressed text to short pattern-factor windows.
//!
//! Every codeword is written as a few pattern factors (at most one hole in the
//! middle when that would take too many), the codewords are concatenated and
//! adjacent factors that together still occur in `p` are merged. The result
//! tiles the text ([`PhDecomposition`]). Around each codeword boundary a window
//! of at most `4kk+5` consecutive factors ([`PcString`]) holds every occurrence
//! crossing that boundary: an occurrence spanning `2k+2` further factors would
//! contain `k+1` disjoint adjacent pairs, none of which occurs in `p`.
//!
//! Letters absent from `p` become singleton `Foreign` blocks. They never merge
//! and always count as one mismatch (or one error).

use crate::lzindex::{Chunk, CompressedText, PatternTrie};
use crate::textcore::{smallest_period, BreakDecomposition, PatternIndex, PeriodTable, RawScan};
use crate::{Letter, Mode};

/// Structural `k`; the window and peeling budgets use `max(k, 1)`.
pub fn kk(k: usize) -> usize {
    k.max(1)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Piece {
    /// `p[a..b)`
    Factor { a: u32, b: u32 },
    Foreign(Letter),
    Hole { len: u32 },
}

impl Piece {
    pub fn len(&self) -> usize {
        match *self {
            Piece::Factor { a, b } => (b - a) as usize,
            Piece::Foreign(_) => 1,
            Piece::Hole { len } => len as usize,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// One codeword as pattern factors, peeled greedily from the left; if more
/// than `4kk+7` pieces are needed, `2kk+4` from each end around one hole.
pub fn codeword_forms(pt: &PatternTrie, v: u32, kk: usize) -> Vec<Piece> {
    let d = pt.depth(v);
    let budget = 4 * kk + 7;
    let side = 2 * kk + 4;
    let mut left = Vec::new();
    let mut pos = 0;
    let mut left_end_at_side = 0;
    while pos < d {
        let piece = peel_left(pt, v, pos, d);
        pos += piece.len();
        left.push(piece);
        if left.len() == side {
            left_end_at_side = pos;
        }
        if left.len() > budget {
            break;
        }
    }
    if left.len() <= budget {
        return left;
    }
    left.truncate(side);
    let lo = left_end_at_side;
    let mut right = Vec::new();
    let mut end = d;
    while right.len() < side && end > lo {
        let node = pt.ancestor(v, end);
        let c = Chunk { end: node, len: (end - lo) as u32 };
        let (l, occ) = pt.longest_suffix_factor(c);
        let piece = match occ {
            Some(s) => Piece::Factor { a: s as u32, b: (s + l) as u32 },
            None => Piece::Foreign(pt.node_letter(v, end - 1)),
        };
        end -= piece.len();
        right.push(piece);
    }
    right.reverse();
    let mut out = left;
    if end > lo {
        out.push(Piece::Hole { len: (end - lo) as u32 });
    }
    out.extend(right);
    out
}

fn peel_left(pt: &PatternTrie, v: u32, pos: usize, d: usize) -> Piece {
    let c = Chunk { end: v, len: (d - pos) as u32 };
    match pt.longest_prefix_factor(c) {
        (l, Some(s)) => Piece::Factor { a: s as u32, b: (s + l) as u32 },
        _ => Piece::Foreign(pt.node_letter(v, pos)),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PhBlock {
    pub piece: Piece,
    /// Absolute text position of the first letter.
    pub start: usize,
    /// Token whose codeword contains the block start.
    pub token: u32,
}

impl PhBlock {
    pub fn end(&self) -> usize {
        self.start + self.piece.len()
    }
}

#[derive(Debug, Clone)]
pub struct PhDecomposition {
    pub blocks: Vec<PhBlock>,
    pub k: usize,
    pub total_len: usize,
}

impl PhDecomposition {
    /// Index of the block containing text position `x`.
    pub fn block_at(&self, x: usize) -> usize {
        self.blocks.partition_point(|b| b.start <= x) - 1
    }
}

/// Concatenate per-codeword forms, merging adjacent factors whose
/// concatenation occurs in `p` (work stack; each merge re-tests the new top).
pub fn build_ph(ct: &CompressedText, pt: &PatternTrie, k: usize) -> PhDecomposition {
    let kk = kk(k);
    let mut cache: Vec<Option<Vec<Piece>>> = vec![None; pt.text_nodes];
    let mut blocks: Vec<PhBlock> = Vec::new();
    for (ti, &v) in ct.tokens.iter().enumerate() {
        let slot = &mut cache[v as usize];
        if slot.is_none() {
            *slot = Some(codeword_forms(pt, v, kk));
        }
        let mut start = ct.boundary[ti];
        for &piece in slot.as_ref().unwrap() {
            let mut cur = PhBlock { piece, start, token: ti as u32 };
            start += piece.len();
            while let Some(top) = blocks.last() {
                match (top.piece, cur.piece) {
                    (Piece::Factor { a: a1, b: b1 }, Piece::Factor { a: a2, b: b2 }) => {
                        match pt.pattern.locate_concat(a1 as usize, b1 as usize, a2 as usize, b2 as usize) {
                            Some(s) => {
                                let len = (b1 - a1 + b2 - a2) as usize;
                                cur = PhBlock {
                                    piece: Piece::Factor { a: s as u32, b: (s + len) as u32 },
                                    start: top.start,
                                    token: top.token,
                                };
                                blocks.pop();
                            }
                            None => break,
                        }
                    }
                    _ => break,
                }
            }
            blocks.push(cur);
        }
    }
    PhDecomposition { blocks, k, total_len: ct.total_len() }
}

/// Check the four tiling conditions; returns a description of the first failure.
pub fn check_ph(ph: &PhDecomposition, ct: &CompressedText, pt: &PatternTrie, text: &[Letter]) -> Result<(), String> {
    let kk = kk(ph.k);
    let p = pt.pattern.text();
    let mut pos = 0;
    for (i, b) in ph.blocks.iter().enumerate() {
        if b.start != pos {
            return Err(format!("block {i} starts at {} not {pos}", b.start));
        }
        pos = b.end();
        match b.piece {
            Piece::Factor { a, b: e } => {
                if p[a as usize..e as usize] != text[b.start..b.end()] {
                    return Err(format!("block {i} is not the claimed factor"));
                }
            }
            Piece::Foreign(c) => {
                if text[b.start] != c || pt.in_pattern(c) {
                    return Err(format!("block {i} is a bad foreign letter"));
                }
            }
            Piece::Hole { .. } => {
                let t = ct.token_at(b.start);
                if ct.token_at(b.end() - 1) != t {
                    return Err(format!("hole {i} spans codewords"));
                }
                let (cs, ce) = (ct.boundary[t], ct.boundary[t + 1]);
                let before = ph.blocks[..i].iter().rev().take_while(|x| x.start >= cs).count();
                let after = ph.blocks[i + 1..].iter().take_while(|x| x.end() <= ce).count();
                if before < 2 * kk + 3 || after < 2 * kk + 3 {
                    return Err(format!("hole {i} has only {before}/{after} separating blocks"));
                }
                let holes = ph.blocks.iter().filter(|x| matches!(x.piece, Piece::Hole { .. }) && x.start >= cs && x.end() <= ce).count();
                if holes > 1 {
                    return Err(format!("codeword {t} has {holes} holes"));
                }
            }
        }
        if i > 0 {
            if let (Piece::Factor { a: a1, b: b1 }, Piece::Factor { a: a2, b: b2 }) = (ph.blocks[i - 1].piece, b.piece) {
                if pt.pattern.locate_concat(a1 as usize, b1 as usize, a2 as usize, b2 as usize).is_some() {
                    return Err(format!("blocks {} and {i} concatenate to a factor", i - 1));
                }
            }
        }
    }
    if pos != ph.total_len {
        return Err(format!("tiling ends at {pos}, text has {}", ph.total_len));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PcBlock {
    Factor { a: u32, b: u32 },
    Foreign(Letter),
}

impl PcBlock {
    pub fn len(&self) -> usize {
        match *self {
            PcBlock::Factor { a, b } => (b - a) as usize,
            PcBlock::Foreign(_) => 1,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// A text window written as pattern factors. Positions are 0-based offsets
/// into the window string `f`.
#[derive(Debug, Clone)]
pub struct PcString {
    pub blocks: Vec<PcBlock>,
    /// `prefix[i]` = offset of block `i`; `prefix[blocks.len()] = len`.
    pub prefix: Vec<usize>,
    /// Absolute text position of `f[0]`.
    pub window_start: usize,
    /// Offset in `f` of the codeword boundary this window was cut around.
    pub boundary: usize,
}

impl PcString {
    pub fn new(blocks: Vec<PcBlock>, window_start: usize, boundary: usize) -> Self {
        let mut prefix = Vec::with_capacity(blocks.len() + 1);
        let mut acc = 0;
        prefix.push(0);
        for b in &blocks {
            acc += b.len();
            prefix.push(acc);
        }
        PcString { blocks, prefix, window_start, boundary }
    }

    /// Greedy longest-factor parse of an explicit string; letters absent from
    /// `p` become foreign blocks. Quadratic, meant for tests and tools.
    pub fn from_text(p: &PatternIndex, t: &[Letter]) -> Self {
        let mut blocks = Vec::new();
        let mut s = 0;
        while s < t.len() {
            let Some(mut at) = p.locate_factor(&t[s..s + 1]) else {
                blocks.push(PcBlock::Foreign(t[s]));
                s += 1;
                continue;
            };
            let mut e = s + 1;
            while e < t.len() {
                match p.locate_factor(&t[s..e + 1]) {
                    Some(x) => at = x,
                    None => break,
                }
                e += 1;
            }
            blocks.push(PcBlock::Factor { a: at as u32, b: (at + e - s) as u32 });
            s = e;
        }
        PcString::new(blocks, 0, 0)
    }

    pub fn len(&self) -> usize {
        *self.prefix.last().unwrap()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn foreign_count(&self) -> usize {
        self.blocks.iter().filter(|b| matches!(b, PcBlock::Foreign(_))).count()
    }

    /// `(block, offset)` of position `x < len`.
    pub fn locate(&self, x: usize) -> (usize, usize) {
        let b = self.prefix.partition_point(|&s| s <= x) - 1;
        (b, x - self.prefix[b])
    }

    pub fn letter(&self, p: &PatternIndex, x: usize) -> Letter {
        let (b, o) = self.locate(x);
        match self.blocks[b] {
            PcBlock::Factor { a, .. } => p.letter(a as usize + o),
            PcBlock::Foreign(c) => c,
        }
    }

    pub fn extract(&self, p: &PatternIndex, lo: usize, hi: usize) -> Vec<Letter> {
        let mut out = Vec::with_capacity(hi.saturating_sub(lo));
        if lo >= hi {
            return out;
        }
        let (mut b, mut o) = self.locate(lo);
        let mut x = lo;
        while x < hi {
            let take = (self.blocks[b].len() - o).min(hi - x);
            match self.blocks[b] {
                PcBlock::Factor { a, .. } => {
                    let s = a as usize + o;
                    out.extend_from_slice(&p.text()[s..s + take]);
                }
                PcBlock::Foreign(c) => out.push(c),
            }
            x += take;
            b += 1;
            o = 0;
        }
        out
    }

    pub fn decompress(&self, p: &PatternIndex) -> Vec<Letter> {
        self.extract(p, 0, self.len())
    }

    /// LCP of `f[x..]` and `p[p_start..]`, capped at `cap`.
    pub fn lcpref(&self, p: &PatternIndex, x: usize, p_start: usize, cap: usize) -> usize {
        let cap = cap.min(self.len().saturating_sub(x)).min(p.len().saturating_sub(p_start));
        if cap == 0 {
            return 0;
        }
        let (mut b, mut o) = self.locate(x);
        let mut acc = 0;
        while acc < cap {
            let PcBlock::Factor { a, b: e } = self.blocks[b] else { return acc };
            let rem = (e - a) as usize - o;
            let want = rem.min(cap - acc);
            let l = p.factor_lcp(a as usize + o, p_start + acc, want);
            acc += l;
            if l < want {
                return acc;
            }
            b += 1;
            o = 0;
        }
        acc
    }

    /// Longest common suffix of `f[..x_end)` and `p[..p_end)`, capped at `cap`.
    pub fn lcsuf(&self, p: &PatternIndex, x_end: usize, p_end: usize, cap: usize) -> usize {
        let cap = cap.min(x_end).min(p_end);
        if cap == 0 {
            return 0;
        }
        let (mut b, o) = self.locate(x_end - 1);
        // letters available in block b ending at x_end - 1
        let mut have = o + 1;
        let mut acc = 0;
        loop {
            let PcBlock::Factor { a, .. } = self.blocks[b] else { return acc };
            let want = have.min(cap - acc);
            let l = p.factor_lcs(a as usize + have - 1, p_end - 1 - acc, want);
            acc += l;
            if l < want || acc == cap {
                return acc;
            }
            b -= 1;
            have = self.blocks[b].len();
        }
    }

    /// LCP of `f[x..]` and `f[y..]`, capped at `cap`.
    pub fn self_lcp(&self, p: &PatternIndex, x: usize, y: usize, cap: usize) -> usize {
        let n = self.len();
        let cap = cap.min(n.saturating_sub(x)).min(n.saturating_sub(y));
        if cap == 0 {
            return 0;
        }
        let (mut b1, mut o1) = self.locate(x);
        let (mut b2, mut o2) = self.locate(y);
        let mut acc = 0;
        while acc < cap {
            let r1 = self.blocks[b1].len() - o1;
            let r2 = self.blocks[b2].len() - o2;
            let want = r1.min(r2).min(cap - acc);
            let l = match (self.blocks[b1], self.blocks[b2]) {
                (PcBlock::Factor { a: a1, .. }, PcBlock::Factor { a: a2, .. }) => {
                    p.factor_lcp(a1 as usize + o1, a2 as usize + o2, want)
                }
                (PcBlock::Foreign(c1), PcBlock::Foreign(c2)) => usize::from(c1 == c2),
                _ => 0,
            };
            acc += l;
            if l < want {
                return acc;
            }
            o1 += want;
            o2 += want;
            if o1 == self.blocks[b1].len() {
                b1 += 1;
                o1 = 0;
            }
            if o2 == self.blocks[b2].len() {
                b2 += 1;
                o2 = 0;
            }
        }
        acc
    }

    /// The window `f[lo..hi)` as its own pc-string (edge blocks trimmed).
    pub fn slice(&self, lo: usize, hi: usize) -> PcString {
        let mut blocks = Vec::new();
        if lo < hi {
            let (b0, o0) = self.locate(lo);
            let (b1, o1) = self.locate(hi - 1);
            for b in b0..=b1 {
                let s = if b == b0 { o0 } else { 0 };
                let e = if b == b1 { o1 + 1 } else { self.blocks[b].len() };
                blocks.push(match self.blocks[b] {
                    PcBlock::Factor { a, .. } => PcBlock::Factor { a: a + s as u32, b: a + e as u32 },
                    f => f,
                });
            }
        }
        let boundary = self.boundary.clamp(lo, hi) - lo;
        PcString::new(blocks, self.window_start + lo, boundary)
    }

    /// The reversed window over the reversed pattern (of length `m`).
    pub fn reversed(&self, m: usize) -> PcString {
        let blocks = self
            .blocks
            .iter()
            .rev()
            .map(|b| match *b {
                PcBlock::Factor { a, b } => PcBlock::Factor { a: m as u32 - b, b: m as u32 - a },
                f => f,
            })
            .collect();
        PcString::new(blocks, self.window_start, self.len() - self.boundary)
    }
}

/// The window around boundary `i` (`1 ≤ i < n`): at most `2kk+2` blocks on each
/// side of the block holding the boundary, clipped to occurrences that cross
/// the boundary and start at or after the previous one (so each crossing
/// occurrence is seen by exactly one window). `None` if too short to hold one.
pub fn crossing_window(ph: &PhDecomposition, ct: &CompressedText, pt: &PatternTrie, i: usize, mode: Mode) -> Option<PcString> {
    let k = ph.k;
    let kk = kk(k);
    let m = pt.m();
    let (span, min_len) = match mode {
        Mode::Hamming => (m, m),
        Mode::Edit => (m + k, m.saturating_sub(k).max(1)),
    };
    let bi = ct.boundary[i];
    let prev = ct.boundary[i - 1];
    let idx = ph.block_at(bi);
    debug_assert!(!matches!(ph.blocks[idx].piece, Piece::Hole { .. }), "boundary inside a hole");
    let mut lo_blk = idx.saturating_sub(2 * kk + 2);
    let mut hi_blk = (idx + 2 * kk + 2).min(ph.blocks.len() - 1);
    // never reach into a hole
    while let Some(h) = (lo_blk..idx).rev().find(|&j| matches!(ph.blocks[j].piece, Piece::Hole { .. })) {
        lo_blk = h + 1;
    }
    if let Some(h) = (idx + 1..=hi_blk).find(|&j| matches!(ph.blocks[j].piece, Piece::Hole { .. })) {
        hi_blk = h - 1;
    }
    let lo = (bi + 1).saturating_sub(span).max(prev).max(ph.blocks[lo_blk].start);
    let hi = (bi + span - 1).min(ph.total_len).min(ph.blocks[hi_blk].end());
    if hi <= lo || hi - lo < min_len || lo >= bi || hi <= bi {
        return None;
    }
    let mut blocks: Vec<PcBlock> = Vec::with_capacity(hi_blk - lo_blk + 1);
    for b in &ph.blocks[lo_blk..=hi_blk] {
        let s = lo.max(b.start);
        let e = hi.min(b.end());
        if s >= e {
            continue;
        }
        blocks.push(match b.piece {
            Piece::Factor { a, .. } => PcBlock::Factor { a: a + (s - b.start) as u32, b: a + (e - b.start) as u32 },
            Piece::Foreign(c) => PcBlock::Foreign(c),
            Piece::Hole { .. } => unreachable!("hole excluded above"),
        });
    }
    merge_edge(&mut blocks, pt, true);
    merge_edge(&mut blocks, pt, false);
    Some(PcString::new(blocks, lo, bi - lo))
}

fn merge_edge(blocks: &mut Vec<PcBlock>, pt: &PatternTrie, front: bool) {
    if blocks.len() < 2 {
        return;
    }
    let (i, j) = if front { (0, 1) } else { (blocks.len() - 2, blocks.len() - 1) };
    if let (PcBlock::Factor { a: a1, b: b1 }, PcBlock::Factor { a: a2, b: b2 }) = (blocks[i], blocks[j]) {
        if let Some(s) = pt.pattern.locate_concat(a1 as usize, b1 as usize, a2 as usize, b2 as usize) {
            let len = (b1 - a1 + b2 - a2) as usize;
            blocks[i] = PcBlock::Factor { a: s as u32, b: (s + len) as u32 };
            blocks.remove(j);
        }
    }
}

/// Window invariants: block budget (foreign singletons excepted), length
/// bound, adjacent factors never concatenating to a factor of `p`, and the
/// letters matching the text.
pub fn check_pc(pc: &PcString, pt: &PatternTrie, k: usize, mode: Mode, text: &[Letter]) -> Result<(), String> {
    let kk = kk(k);
    let m = pt.m();
    let non_foreign = pc.blocks.len() - pc.foreign_count();
    if non_foreign > 4 * kk + 5 {
        return Err(format!("{non_foreign} factor blocks"));
    }
    let cap = match mode {
        Mode::Hamming => 2 * m,
        Mode::Edit => 2 * m + 2 * k,
    };
    if pc.len() > cap {
        return Err(format!("window length {} > {cap}", pc.len()));
    }
    for w in pc.blocks.windows(2) {
        if let (PcBlock::Factor { a: a1, b: b1 }, PcBlock::Factor { a: a2, b: b2 }) = (w[0], w[1]) {
            if pt.pattern.locate_concat(a1 as usize, b1 as usize, a2 as usize, b2 as usize).is_some() {
                return Err("adjacent blocks concatenate to a factor".into());
            }
        }
    }
    if pc.decompress(&pt.pattern) != text[pc.window_start..pc.window_start + pc.len()] {
        return Err("window letters differ from text".into());
    }
    Ok(())
}

/// Hamming distance of `p` against `f[align..align+m)` by kangaroo jumps;
/// `None` when it exceeds `k`.
pub fn verify_hamming_at(pc: &PcString, p: &PatternIndex, align: usize, k: usize) -> Option<usize> {
    let m = p.len();
    debug_assert!(align + m <= pc.len());
    let mut mism = 0;
    let mut j = 0;
    while j < m {
        j += pc.lcpref(p, align + j, j, m - j);
        if j >= m {
            break;
        }
        mism += 1;
        if mism > k {
            return None;
        }
        j += 1;
    }
    Some(mism)
}

/// Greedy z-break scan over `f[lo..hi)` without decompressing: each window's
/// period comes from its `z` letters, and each periodic run is extended with a
/// single self-LCP. Stops after `limit` breaks (the scan result is then a
/// prefix of the full scan). Break starts are offsets into `f`.
pub fn pc_raw_scan(pc: &PcString, p: &PatternIndex, lo: usize, hi: usize, z: usize, limit: usize) -> RawScan {
    let mut breaks = Vec::new();
    let mut periods = Vec::new();
    let mut i = lo;
    while i + z <= hi && breaks.len() < limit {
        let window = pc.extract(p, i, i + z);
        let q = smallest_period(&window);
        if 2 * q > z {
            periods.push(None);
            breaks.push(i);
            i += z;
            continue;
        }
        periods.push(Some(q));
        // f[i..j) has period q; j is the first position breaking it
        let ext = pc.self_lcp(p, i + q, i, hi - i - q);
        let j = i + q + ext;
        if j >= hi {
            i = hi;
            break;
        }
        let b = j + 1 - z;
        breaks.push(b);
        i = b + z;
    }
    if periods.len() == breaks.len() {
        periods.push(None);
    }
    let _ = i;
    RawScan { breaks, periods }
}

/// Break starts of the greedy scan over all of `f`.
pub fn pc_find_breaks(pc: &PcString, p: &PatternIndex, z: usize, limit: usize) -> Vec<usize> {
    pc_raw_scan(pc, p, 0, pc.len(), z, limit).breaks
}

/// Normalized stretch/break decomposition of `f`, equal to decomposing the
/// decompressed window.
pub fn pc_decompose(pc: &PcString, p: &PatternIndex, z: usize, table: &mut PeriodTable) -> BreakDecomposition {
    let raw = pc_raw_scan(pc, p, 0, pc.len(), z, usize::MAX);
    crate::textcore::normalize(
        pc.len(),
        z,
        &raw,
        |x| pc.letter(p, x),
        |a, b| smallest_period(&pc.extract(p, a, b)),
        table,
    )
}

/// Cut `f` down around its boundary so each side keeps at most `3kk` greedy
/// breaks (scanning outward from the boundary). Valid when `p` has fewer than
/// `2kk` disjoint z-breaks: an occurrence containing `3kk` disjoint text
/// breaks would leave `2kk` of them free of mismatches, i.e. breaks of `p`.
pub fn trim_to_few_breaks(pc: &PcString, p: &PatternIndex, rp: &PatternIndex, z: usize, kk: usize) -> PcString {
    let bd = pc.boundary;
    let n = pc.len();
    let right = pc_raw_scan(pc, p, bd, n, z, 3 * kk).breaks;
    let hi = if right.len() == 3 * kk { right[3 * kk - 1] + z } else { n };
    let rev = pc.reversed(p.len());
    let left = pc_raw_scan(&rev, rp, n - bd, n, z, 3 * kk).breaks;
    let lo = if left.len() == 3 * kk { n - (left[3 * kk - 1] + z) } else { 0 };
    if lo == 0 && hi == n {
        return pc.clone();
    }
    pc.slice(lo, hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lzindex::{decompress, lz78_parse};
    use crate::textcore::find_breaks;

    fn w(s: &str) -> Vec<Letter> {
        s.bytes().map(Letter::from).collect()
    }

    fn setup(text: &str, pat: &str, k: usize) -> (Vec<Letter>, CompressedText, PatternTrie, PhDecomposition) {
        let raw = w(text);
        let (cb, ct) = lz78_parse(&raw);
        let pt = PatternTrie::new(&cb, &w(pat)).unwrap();
        let ph = build_ph(&ct, &pt, k);
        assert_eq!(decompress(&ct, &cb).unwrap(), raw);
        (raw, ct, pt, ph)
    }

    #[test]
    fn text_equal_to_pattern_is_one_block() {
        let (raw, ct, pt, ph) = setup("abracadabra", "abracadabra", 1);
        assert_eq!(ph.blocks.len(), 1);
        check_ph(&ph, &ct, &pt, &raw).unwrap();
    }

    #[test]
    fn repeated_letter_merges() {
        let (raw, ct, pt, ph) = setup(&"a".repeat(40), &"a".repeat(50), 1);
        assert_eq!(ph.blocks.len(), 1);
        check_ph(&ph, &ct, &pt, &raw).unwrap();
    }

    #[test]
    fn holes_appear_in_long_alternating_codewords() {
        // pattern "ab" only; "aa" and "bb" are not factors, so a codeword
        // alternating runs needs many pieces
        let mut s = String::new();
        for _ in 0..60 {
            s.push_str("aabb");
        }
        let raw = w(&s);
        let mut cb = crate::lzindex::Codebook::default();
        let mut v = 0;
        for &c in &raw {
            v = cb.add_child(v, c);
        }
        let pt = PatternTrie::new(&cb, &w("ab")).unwrap();
        let forms = codeword_forms(&pt, v, 1);
        assert!(forms.iter().any(|p| matches!(p, Piece::Hole { .. })));
        assert_eq!(forms.iter().map(|p| p.len()).sum::<usize>(), raw.len());
    }

    #[test]
    fn pc_queries_match_decompressed() {
        let (raw, ct, pt, ph) = setup("abcabdabcabcabxabcabd", "abcabdab", 2);
        check_ph(&ph, &ct, &pt, &raw).unwrap();
        let p = &pt.pattern;
        for i in 1..ct.n() {
            let Some(pc) = crossing_window(&ph, &ct, &pt, i, Mode::Hamming) else { continue };
            check_pc(&pc, &pt, 2, Mode::Hamming, &raw).unwrap();
            let f = pc.decompress(p);
            for x in 0..f.len() {
                for ps in 0..p.len() {
                    let naive = f[x..].iter().zip(&p.text()[ps..]).take_while(|(a, b)| a == b).count();
                    assert_eq!(pc.lcpref(p, x, ps, usize::MAX), naive);
                }
                for y in 0..f.len() {
                    let naive = f[x..].iter().zip(&f[y..]).take_while(|(a, b)| a == b).count();
                    assert_eq!(pc.self_lcp(p, x, y, usize::MAX), naive);
                }
                for pe in 1..=p.len() {
                    let naive = f[..=x].iter().rev().zip(p.text()[..pe].iter().rev()).take_while(|(a, b)| a == b).count();
                    assert_eq!(pc.lcsuf(p, x + 1, pe, usize::MAX), naive);
                }
            }
            assert_eq!(pc_find_breaks(&pc, p, 3, usize::MAX), find_breaks(&f, 3));
        }
    }

    #[test]
    fn hamming_verifier() {
        let p = PatternIndex::new(&w("abc")).unwrap();
        let pc = PcString::new(vec![PcBlock::Factor { a: 0, b: 2 }, PcBlock::Foreign(b'd' as Letter)], 0, 1);
        assert_eq!(verify_hamming_at(&pc, &p, 0, 1), Some(1));
        assert_eq!(verify_hamming_at(&pc, &p, 0, 0), None);
    }
}
