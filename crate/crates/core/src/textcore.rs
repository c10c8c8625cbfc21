//! Uncompressed-string primitives over the pattern.
//!
//! Everything here is 0-based. A [`PatternIndex`] answers longest-common-prefix
//! and longest-common-suffix queries between any two positions of the pattern
//! in constant time (suffix array + LCP + sparse-table RMQ, built once for `p`
//! and once for its reverse). The break machinery ([`find_breaks`],
//! [`decompose`]) writes a string as periodic stretches separated by z-breaks.

use std::collections::HashMap;

use crate::{Error, Letter};

/// Range-minimum structure over a fixed array.
#[derive(Debug, Clone)]
pub struct SparseTable {
    levels: Vec<Vec<u32>>,
}

impl SparseTable {
    pub fn new(values: &[u32]) -> Self {
        let mut levels = vec![values.to_vec()];
        let mut width = 1;
        while 2 * width <= values.len() {
            let prev = levels.last().unwrap();
            let next: Vec<u32> = (0..=values.len() - 2 * width)
                .map(|i| prev[i].min(prev[i + width]))
                .collect();
            levels.push(next);
            width *= 2;
        }
        SparseTable { levels }
    }

    /// Minimum over `lo..=hi`.
    pub fn min(&self, lo: usize, hi: usize) -> u32 {
        debug_assert!(lo <= hi);
        let span = hi - lo + 1;
        let lvl = (usize::BITS - 1 - span.leading_zeros()) as usize;
        let row = &self.levels[lvl];
        row[lo].min(row[hi + 1 - (1 << lvl)])
    }
}

/// Suffix array, its inverse, the LCP array and an RMQ over it.
#[derive(Debug, Clone)]
pub struct SuffixSide {
    pub sa: Vec<u32>,
    pub rank: Vec<u32>,
    /// `lcp[r]` = LCP of suffixes `sa[r-1]` and `sa[r]`; `lcp[0] = 0`.
    pub lcp: Vec<u32>,
    rmq: SparseTable,
}

impl SuffixSide {
    fn build(s: &[Letter]) -> Self {
        let sa = suffix_array(s);
        let mut rank = vec![0u32; s.len()];
        for (r, &p) in sa.iter().enumerate() {
            rank[p as usize] = r as u32;
        }
        let lcp = kasai(s, &sa, &rank);
        let rmq = SparseTable::new(&lcp);
        SuffixSide { sa, rank, lcp, rmq }
    }

    /// LCP of the suffixes starting at `i` and `j` (both `< len`).
    fn lcp_of(&self, i: usize, j: usize, len: usize) -> usize {
        if i == j {
            return len - i;
        }
        let (a, b) = {
            let (ri, rj) = (self.rank[i] as usize, self.rank[j] as usize);
            if ri < rj { (ri, rj) } else { (rj, ri) }
        };
        self.rmq.min(a + 1, b) as usize
    }
}

/// Prefix doubling with two counting-sort passes per round: O(m log m).
fn suffix_array(s: &[Letter]) -> Vec<u32> {
    let n = s.len();
    if n == 0 {
        return Vec::new();
    }
    let mut alphabet: Vec<Letter> = s.to_vec();
    alphabet.sort_unstable();
    alphabet.dedup();
    // rank 0 is reserved for "past the end"
    let mut rank: Vec<usize> = s
        .iter()
        .map(|c| alphabet.binary_search(c).unwrap() + 1)
        .collect();
    let mut sa: Vec<usize> = (0..n).collect();
    let mut tmp = vec![0usize; n];
    let mut buckets = 0;
    let mut k = 1;
    loop {
        let classes = rank.iter().copied().max().unwrap() + 1;
        let key2 = |i: usize| if i + k < n { rank[i + k] } else { 0 };
        // sort by second key, then stable by first key
        let mut count = vec![0usize; classes.max(buckets) + 1];
        for i in 0..n {
            count[key2(i)] += 1;
        }
        let mut acc = 0;
        for c in count.iter_mut() {
            let v = *c;
            *c = acc;
            acc += v;
        }
        for i in 0..n {
            let c = &mut count[key2(i)];
            tmp[*c] = i;
            *c += 1;
        }
        let mut count = vec![0usize; classes + 1];
        for &i in &tmp {
            count[rank[i]] += 1;
        }
        let mut acc = 0;
        for c in count.iter_mut() {
            let v = *c;
            *c = acc;
            acc += v;
        }
        for &i in &tmp {
            let c = &mut count[rank[i]];
            sa[*c] = i;
            *c += 1;
        }
        let mut next = vec![0usize; n];
        let mut cls = 1;
        next[sa[0]] = 1;
        for w in 1..n {
            let (a, b) = (sa[w - 1], sa[w]);
            if rank[a] != rank[b] || key2(a) != key2(b) {
                cls += 1;
            }
            next[b] = cls;
        }
        rank = next;
        buckets = classes;
        if cls == n {
            break;
        }
        k *= 2;
    }
    sa.into_iter().map(|x| x as u32).collect()
}

fn kasai(s: &[Letter], sa: &[u32], rank: &[u32]) -> Vec<u32> {
    let n = s.len();
    let mut lcp = vec![0u32; n];
    let mut h = 0usize;
    for i in 0..n {
        let r = rank[i] as usize;
        if r == 0 {
            h = 0;
            continue;
        }
        let j = sa[r - 1] as usize;
        while i + h < n && j + h < n && s[i + h] == s[j + h] {
            h += 1;
        }
        lcp[r] = h as u32;
        h = h.saturating_sub(1);
    }
    lcp
}

/// Constant-time factor comparisons over the pattern `p` (length `m`).
#[derive(Debug, Clone)]
pub struct PatternIndex {
    text: Vec<Letter>,
    fwd: SuffixSide,
    /// Built over the reversed pattern; answers longest-common-suffix queries.
    rev: SuffixSide,
    first_pos: HashMap<Letter, usize>,
}

impl PatternIndex {
    pub fn new(p: &[Letter]) -> Result<Self, Error> {
        if p.is_empty() {
            return Err(Error::EmptyPattern);
        }
        let rp: Vec<Letter> = p.iter().rev().copied().collect();
        let mut first_pos = HashMap::new();
        for (i, &c) in p.iter().enumerate() {
            first_pos.entry(c).or_insert(i);
        }
        Ok(PatternIndex {
            text: p.to_vec(),
            fwd: SuffixSide::build(p),
            rev: SuffixSide::build(&rp),
            first_pos,
        })
    }

    pub fn len(&self) -> usize {
        self.text.len()
    }

    pub fn is_empty(&self) -> bool {
        self.text.is_empty()
    }

    pub fn text(&self) -> &[Letter] {
        &self.text
    }

    pub fn letter(&self, i: usize) -> Letter {
        self.text[i]
    }

    pub fn sa(&self) -> &[u32] {
        &self.fwd.sa
    }

    pub fn lcp_array(&self) -> &[u32] {
        &self.fwd.lcp
    }

    /// Some position of letter `c` in `p`, if it occurs.
    pub fn position_of(&self, c: Letter) -> Option<usize> {
        self.first_pos.get(&c).copied()
    }

    /// LCP of `p[i..]` and `p[j..]`, capped at `max_len`.
    pub fn factor_lcp(&self, i: usize, j: usize, max_len: usize) -> usize {
        let m = self.len();
        if i >= m || j >= m {
            return 0;
        }
        self.fwd.lcp_of(i, j, m).min(max_len)
    }

    /// Longest common suffix of `p[..=i]` and `p[..=j]`, capped at `max_len`.
    pub fn factor_lcs(&self, i: usize, j: usize, max_len: usize) -> usize {
        let m = self.len();
        if i >= m || j >= m {
            return 0;
        }
        self.rev.lcp_of(m - 1 - i, m - 1 - j, m).min(max_len)
    }

    /// The index of the reversed pattern, sharing no state with `self`.
    pub fn reversed(&self) -> PatternIndex {
        let m = self.len();
        let first_pos = self
            .text
            .iter()
            .enumerate()
            .rev()
            .map(|(i, &c)| (c, m - 1 - i))
            .collect::<Vec<_>>()
            .into_iter()
            .rev()
            .fold(HashMap::new(), |mut acc, (c, i)| {
                acc.entry(c).or_insert(i);
                acc
            });
        PatternIndex {
            text: self.text.iter().rev().copied().collect(),
            fwd: self.rev.clone(),
            rev: self.fwd.clone(),
            first_pos,
        }
    }

    /// Compare the string `w` (given by a length and an LCP oracle against
    /// pattern suffixes plus a letter accessor) with every suffix in sa order.
    /// Returns the sa range `[lo, hi)` of suffixes having `w` as a prefix.
    fn sa_range_by<L, A>(&self, len: usize, lcp_with: L, letter: A) -> (usize, usize)
    where
        L: Fn(usize) -> usize,
        A: Fn(usize) -> Letter,
    {
        let m = self.len();
        let sa = &self.fwd.sa;
        // first suffix that is >= w
        let (mut lo, mut hi) = (0usize, m);
        while lo < hi {
            let mid = (lo + hi) / 2;
            let s = sa[mid] as usize;
            let l = lcp_with(s);
            let suffix_less = if l >= len {
                false
            } else if s + l >= m {
                true
            } else {
                self.text[s + l] < letter(l)
            };
            if suffix_less { lo = mid + 1 } else { hi = mid }
        }
        let start = lo;
        let (mut lo, mut hi) = (start, m);
        while lo < hi {
            let mid = (lo + hi) / 2;
            if lcp_with(sa[mid] as usize) >= len { lo = mid + 1 } else { hi = mid }
        }
        (start, lo)
    }

    /// Leftmost-in-sa occurrence of the concatenation `p[a1..b1) p[a2..b2)`.
    pub fn locate_concat(&self, a1: usize, b1: usize, a2: usize, b2: usize) -> Option<usize> {
        let l1 = b1 - a1;
        let len = l1 + (b2 - a2);
        if len == 0 {
            return Some(0);
        }
        let m = self.len();
        let lcp_with = |s: usize| {
            let x = if l1 == 0 { 0 } else { self.factor_lcp(s, a1, l1) };
            if x < l1 || s + l1 >= m {
                x
            } else {
                l1 + self.factor_lcp(s + l1, a2, b2 - a2)
            }
        };
        let letter = |l: usize| if l < l1 { self.text[a1 + l] } else { self.text[a2 + l - l1] };
        let (lo, hi) = self.sa_range_by(len, lcp_with, letter);
        (lo < hi).then(|| self.fwd.sa[lo] as usize)
    }

    /// Leftmost-in-sa occurrence of the explicit string `w`.
    pub fn locate_factor(&self, w: &[Letter]) -> Option<usize> {
        if w.is_empty() {
            return Some(0);
        }
        let m = self.len();
        let lcp_with = |s: usize| {
            let mut l = 0;
            while l < w.len() && s + l < m && self.text[s + l] == w[l] {
                l += 1;
            }
            l
        };
        let (lo, hi) = self.sa_range_by(w.len(), lcp_with, |l| w[l]);
        (lo < hi).then(|| self.fwd.sa[lo] as usize)
    }

    /// Binary-search insertion of a string into the suffix array; the
    /// neighbours of the insertion point carry the longest prefix of the
    /// string that occurs in `p`. `lcp_with(s)` must return the LCP of the
    /// string with `p[s..]`.
    pub fn longest_prefix_occurrence<L, A>(&self, len: usize, lcp_with: L, letter: A) -> (usize, Option<usize>)
    where
        L: Fn(usize) -> usize,
        A: Fn(usize) -> Letter,
    {
        let m = self.len();
        let sa = &self.fwd.sa;
        let (mut lo, mut hi) = (0usize, m);
        while lo < hi {
            let mid = (lo + hi) / 2;
            let s = sa[mid] as usize;
            let l = lcp_with(s);
            let suffix_less = if l >= len {
                false
            } else if s + l >= m {
                true
            } else {
                self.text[s + l] < letter(l)
            };
            if suffix_less { lo = mid + 1 } else { hi = mid }
        }
        let mut best = (0usize, None);
        for r in [lo.wrapping_sub(1), lo] {
            if r < m {
                let s = sa[r] as usize;
                let l = lcp_with(s).min(len);
                if l > best.0 {
                    best = (l, Some(s));
                }
            }
        }
        best
    }
}

/// Smallest period via the failure function; 0 for the empty string.
pub fn smallest_period(s: &[Letter]) -> usize {
    if s.is_empty() {
        return 0;
    }
    let fail = failure_function(s);
    s.len() - fail[s.len() - 1]
}

/// `fail[i]` = length of the longest proper border of `s[..=i]`.
pub fn failure_function(s: &[Letter]) -> Vec<usize> {
    let mut fail = vec![0usize; s.len()];
    let mut k = 0;
    for i in 1..s.len() {
        while k > 0 && s[i] != s[k] {
            k = fail[k - 1];
        }
        if s[i] == s[k] {
            k += 1;
        }
        fail[i] = k;
    }
    fail
}

/// Start offset of the lexicographically least rotation. Linear two-candidate
/// scan: a mismatch at depth `d` rules out `d + 1` starts for the loser.
pub fn least_rotation(w: &[Letter]) -> usize {
    let n = w.len();
    let (mut i, mut j, mut d) = (0usize, 1usize, 0usize);
    while i < n && j < n && d < n {
        let (a, b) = (w[(i + d) % n], w[(j + d) % n]);
        if a == b {
            d += 1;
            continue;
        }
        if a > b {
            i += d + 1;
        } else {
            j += d + 1;
        }
        if i == j {
            j += 1;
        }
        d = 0;
    }
    i.min(j)
}

/// The lexicographically least cyclic shift of `w`.
pub fn canonical_rotation(w: &[Letter]) -> Vec<Letter> {
    let r = least_rotation(w);
    w[r..].iter().chain(&w[..r]).copied().collect()
}

/// Does the length-z window have smallest period > z/2 ?
fn is_break(window: &[Letter]) -> bool {
    2 * smallest_period(window) > window.len()
}

/// One step of the greedy scan from `i`: `Err(end)` if the periodic run starting
/// at `i` reaches the end of `s`, else `Ok(break_start)`. Also returns the period
/// of the run (`None` when the window at `i` is already a break).
fn scan_portion(s: &[Letter], i: usize, z: usize) -> (Result<usize, usize>, Option<usize>) {
    let q = smallest_period(&s[i..i + z]);
    if 2 * q > z {
        return (Ok(i), None);
    }
    let mut j = i + z;
    while j < s.len() && s[j] == s[j - q] {
        j += 1;
    }
    if j == s.len() {
        (Err(j), Some(q))
    } else {
        (Ok(j + 1 - z), Some(q))
    }
}

/// Greedy left-to-right z-break scan; returns break starts.
///
/// Linear time: each periodic portion is extended one letter at a time against
/// its period, and the first letter breaking the period ends the portion with a
/// break (the length-z window ending there cannot have a period ≤ z/2).
pub fn find_breaks(s: &[Letter], z: usize) -> Vec<usize> {
    assert!(z >= 1);
    let mut out = Vec::new();
    let mut i = 0;
    while i + z <= s.len() {
        match scan_portion(s, i, z).0 {
            Ok(b) => {
                out.push(b);
                i = b + z;
            }
            Err(_) => break,
        }
    }
    out
}

/// Algorithm 1 verbatim (quadratic); used as a reference in tests.
pub fn find_breaks_direct(s: &[Letter], z: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut i = 0;
    while i + z <= s.len() {
        if is_break(&s[i..i + z]) {
            out.push(i);
            i += z;
        } else {
            i += 1;
        }
    }
    out
}

/// Interned canonical period words.
#[derive(Debug, Clone, Default)]
pub struct PeriodTable {
    words: Vec<Vec<Letter>>,
    ids: HashMap<Vec<Letter>, u32>,
}

impl PeriodTable {
    pub fn intern(&mut self, word: Vec<Letter>) -> u32 {
        if let Some(&id) = self.ids.get(&word) {
            return id;
        }
        let id = self.words.len() as u32;
        self.ids.insert(word.clone(), id);
        self.words.push(word);
        id
    }

    pub fn word(&self, id: u32) -> &[Letter] {
        &self.words[id as usize]
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Break {
    pub start: usize,
    pub len: usize,
}

impl Break {
    pub fn end(&self) -> usize {
        self.start + self.len
    }
}

/// A periodic stretch. Letter `start + x` equals `word(canon)[(phase + x) % period]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Stretch {
    pub start: usize,
    pub len: usize,
    /// 0 iff the stretch is empty.
    pub period: usize,
    pub canon: Option<u32>,
    pub phase: usize,
}

impl Stretch {
    pub fn end(&self) -> usize {
        self.start + self.len
    }

    /// Offset into the canonical word of the letter at absolute position `x`.
    pub fn phase_at(&self, x: usize) -> usize {
        (self.phase + x - self.start) % self.period
    }
}

/// `s = stretch[0] break[0] stretch[1] … break[r-1] stretch[r]`.
#[derive(Debug, Clone)]
pub struct BreakDecomposition {
    pub z: usize,
    pub len: usize,
    pub breaks: Vec<Break>,
    pub stretches: Vec<Stretch>,
    /// Number of disjoint z-breaks reported by the greedy scan.
    pub raw_breaks: usize,
}

impl BreakDecomposition {
    /// Index of the stretch containing position `x`, if `x` is not inside a break.
    pub fn stretch_at(&self, x: usize) -> Option<usize> {
        let i = self.breaks.partition_point(|b| b.end() <= x);
        let st = &self.stretches[i];
        (x >= st.start && x < st.end()).then_some(i)
    }

    /// Stretch index of the stretch preceding break `i` is `i`, following it `i + 1`.
    pub fn tile_check(&self) -> bool {
        let mut pos = 0;
        for (i, st) in self.stretches.iter().enumerate() {
            if st.start != pos {
                return false;
            }
            pos = st.end();
            if i < self.breaks.len() {
                if self.breaks[i].start != pos {
                    return false;
                }
                pos = self.breaks[i].end();
            }
        }
        pos == self.len
    }
}

/// Raw greedy-scan output: break starts plus the period of each periodic run
/// (one entry per stretch; `None` for an empty stretch or a short tail).
pub struct RawScan {
    pub breaks: Vec<usize>,
    pub periods: Vec<Option<usize>>,
}

fn raw_scan(s: &[Letter], z: usize) -> RawScan {
    let mut breaks = Vec::new();
    let mut periods = Vec::new();
    let mut i = 0;
    while i + z <= s.len() {
        let (res, q) = scan_portion(s, i, z);
        periods.push(q);
        match res {
            Ok(b) => {
                breaks.push(b);
                i = b + z;
            }
            Err(_) => {
                i = s.len();
                break;
            }
        }
    }
    if periods.len() == breaks.len() {
        periods.push(None);
    }
    let _ = i;
    RawScan { breaks, periods }
}

/// Turn a raw scan into a normalized decomposition: interior stretches become
/// exact powers of their canonical period (the partial copies at either end are
/// merged into the neighbouring breaks, which keeps every break shorter than 2z).
/// `letter(x)` reads the underlying string; `period_of(a, b)` computes the
/// smallest period of `s[a..b)` for short tails.
pub fn normalize<F, P>(
    len: usize,
    z: usize,
    raw: &RawScan,
    letter: F,
    period_of: P,
    table: &mut PeriodTable,
) -> BreakDecomposition
where
    F: Fn(usize) -> Letter,
    P: Fn(usize, usize) -> usize,
{
    let r = raw.breaks.len();
    let mut breaks: Vec<Break> = raw.breaks.iter().map(|&b| Break { start: b, len: z }).collect();
    let mut stretches = Vec::with_capacity(r + 1);
    for i in 0..=r {
        let start = if i == 0 { 0 } else { breaks[i - 1].end() };
        let end = if i < r { breaks[i].start } else { len };
        let slen = end - start;
        if slen == 0 {
            stretches.push(Stretch { start, len: 0, period: 0, canon: None, phase: 0 });
            continue;
        }
        let q = match raw.periods[i] {
            Some(q) => q,
            None => period_of(start, end),
        };
        let word: Vec<Letter> = (start..start + q).map(&letter).collect();
        let rot = least_rotation(&word);
        let canon: Vec<Letter> = word[rot..].iter().chain(&word[..rot]).copied().collect();
        let id = table.intern(canon);
        stretches.push(Stretch { start, len: slen, period: q, canon: Some(id), phase: (q - rot) % q });
    }
    for i in 1..r {
        let st = stretches[i];
        if st.len == 0 {
            continue;
        }
        let q = st.period;
        let x0 = (q - st.phase) % q;
        let copies = if st.len >= x0 { (st.len - x0) / q } else { 0 };
        if copies == 0 {
            let left = x0.min(st.len);
            breaks[i - 1].len += left;
            let right = st.len - left;
            breaks[i].start -= right;
            breaks[i].len += right;
            stretches[i] = Stretch { start: st.start + left, len: 0, period: 0, canon: None, phase: 0 };
        } else {
            let tail = st.len - x0 - copies * q;
            breaks[i - 1].len += x0;
            breaks[i].start -= tail;
            breaks[i].len += tail;
            stretches[i] = Stretch { start: st.start + x0, len: copies * q, period: q, canon: st.canon, phase: 0 };
        }
    }
    BreakDecomposition { z, len, breaks, stretches, raw_breaks: r }
}

/// Stretch/break decomposition of an explicit string.
pub fn decompose(s: &[Letter], z: usize, table: &mut PeriodTable) -> BreakDecomposition {
    let raw = raw_scan(s, z);
    normalize(s.len(), z, &raw, |x| s[x], |a, b| smallest_period(&s[a..b]), table)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> Vec<Letter> {
        s.bytes().map(Letter::from).collect()
    }

    fn naive_lcp(s: &[Letter], i: usize, j: usize) -> usize {
        s[i..].iter().zip(&s[j..]).take_while(|(a, b)| a == b).count()
    }

    fn naive_sa(s: &[Letter]) -> Vec<u32> {
        let mut v: Vec<u32> = (0..s.len() as u32).collect();
        v.sort_by(|&a, &b| s[a as usize..].cmp(&s[b as usize..]));
        v
    }

    #[test]
    fn banana_suffix_order() {
        let p = w("banana");
        let idx = PatternIndex::new(&p).unwrap();
        let order: Vec<Vec<Letter>> = idx.sa().iter().map(|&i| p[i as usize..].to_vec()).collect();
        let expect: Vec<Vec<Letter>> = ["a", "ana", "anana", "banana", "na", "nana"].iter().map(|x| w(x)).collect();
        assert_eq!(order, expect);
        assert_eq!(idx.sa(), naive_sa(&p).as_slice());
    }

    #[test]
    fn single_letter_and_runs() {
        let idx = PatternIndex::new(&w("a")).unwrap();
        assert_eq!(idx.sa(), &[0]);
        let idx = PatternIndex::new(&w("aaaa")).unwrap();
        assert_eq!(idx.sa(), &[3, 2, 1, 0]);
        assert_eq!(&idx.lcp_array()[1..], &[1, 2, 3]);
        assert!(matches!(PatternIndex::new(&[]), Err(Error::EmptyPattern)));
    }

    #[test]
    fn factor_queries() {
        let idx = PatternIndex::new(&w("abaab")).unwrap();
        assert_eq!(idx.factor_lcp(0, 3, usize::MAX), 2);
        assert_eq!(idx.factor_lcp(2, 2, usize::MAX), 3);
        let idx = PatternIndex::new(&w("abab")).unwrap();
        assert_eq!(idx.factor_lcs(1, 3, usize::MAX), 2);
    }

    #[test]
    fn lcp_matches_naive_on_small_alphabets() {
        let mut seed = 7u64;
        for len in 1..120 {
            let s: Vec<Letter> = (0..len)
                .map(|_| {
                    seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                    ((seed >> 33) % 3) as Letter
                })
                .collect();
            let idx = PatternIndex::new(&s).unwrap();
            assert_eq!(idx.sa(), naive_sa(&s).as_slice());
            for i in 0..len {
                for j in 0..len {
                    assert_eq!(idx.factor_lcp(i, j, usize::MAX), naive_lcp(&s, i, j));
                    let lcs = (0..=i.min(j)).take_while(|&t| s[i - t] == s[j - t]).count();
                    assert_eq!(idx.factor_lcs(i, j, usize::MAX), lcs);
                }
            }
            let r = idx.reversed();
            let rs: Vec<Letter> = s.iter().rev().copied().collect();
            assert_eq!(r.text(), rs.as_slice());
            assert_eq!(r.sa(), naive_sa(&rs).as_slice());
        }
    }

    #[test]
    fn periods() {
        assert_eq!(smallest_period(&w("abab")), 2);
        assert_eq!(smallest_period(&w("abaab")), 3);
        assert_eq!(smallest_period(&w("abc")), 3);
        assert_eq!(smallest_period(&[]), 0);
    }

    #[test]
    fn rotations() {
        assert_eq!(canonical_rotation(&w("ba")), w("ab"));
        assert_eq!(canonical_rotation(&w("cab")), w("abc"));
        assert_eq!(canonical_rotation(&w("a")), w("a"));
        assert_eq!(canonical_rotation(&w("bbaab")), w("aabbb"));
    }

    #[test]
    fn breaks_examples() {
        assert_eq!(find_breaks(&w("aaaaaa"), 3), Vec::<usize>::new());
        assert_eq!(find_breaks(&w("aabaabaa"), 4), vec![0, 4]);
        assert_eq!(find_breaks(&w("abcdef"), 3), vec![0, 3]);
        assert_eq!(find_breaks(&w("ab"), 3), Vec::<usize>::new());
    }

    #[test]
    fn locate() {
        let idx = PatternIndex::new(&w("abaab")).unwrap();
        assert_eq!(idx.locate_factor(&w("aab")), Some(2));
        assert_eq!(idx.locate_factor(&w("abaab")), Some(0));
        let idx2 = PatternIndex::new(&w("abc")).unwrap();
        assert_eq!(idx2.locate_factor(&w("ca")), None);
        // "ab" + "a" = "aba" at 0
        assert_eq!(idx.locate_concat(0, 2, 0, 1), Some(0));
        assert_eq!(idx.locate_concat(3, 5, 3, 5), None);
    }

    #[test]
    fn decompose_examples() {
        let mut t = PeriodTable::default();
        let d = decompose(&w("ababababab"), 4, &mut t);
        assert!(d.breaks.is_empty());
        assert_eq!(t.word(d.stretches[0].canon.unwrap()), w("ab").as_slice());

        let s = w("aaaabcaaaa");
        let d = decompose(&s, 4, &mut t);
        assert!(d.tile_check());
        // greedy: "aaab" at 1 and "caaa" at 5, tail "a"
        assert_eq!(d.breaks.iter().map(|b| b.start).collect::<Vec<_>>(), vec![1, 5]);
        assert_eq!(d.stretches[0].len, 1);

        let d = decompose(&w("ab"), 4, &mut t);
        assert_eq!(d.stretches.len(), 1);
        assert_eq!(d.stretches[0].len, 2);
    }

    proptest::proptest! {
        #[test]
        fn stretches_follow_their_canonical_word(s in proptest::collection::vec(0u32..3, 1..120), z in 3usize..9) {
            let mut t = PeriodTable::default();
            let d = decompose(&s, z, &mut t);
            proptest::prop_assert!(d.tile_check());
            for st in d.stretches.iter().filter(|st| st.len > 0) {
                let word = t.word(st.canon.unwrap());
                for x in st.start..st.end() {
                    proptest::prop_assert_eq!(s[x], word[st.phase_at(x)]);
                }
            }
            // interior stretches are whole powers starting at phase 0
            for st in d.stretches.iter().skip(1).take(d.stretches.len().saturating_sub(2)) {
                if st.len > 0 {
                    proptest::prop_assert_eq!(st.phase, 0);
                    proptest::prop_assert_eq!(st.len % st.period, 0);
                }
            }
        }
    }
}
