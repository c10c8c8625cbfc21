//! LZ78/LZW parsing and the compressed-text side of the comparison machinery.
//!
//! Codewords live in a trie ([`Codebook`]); the text is a token list of trie
//! nodes ([`CompressedText`]). [`PatternTrie`] extends the trie by one path
//! spelling the pattern and answers chunk queries: a chunk is the last `len`
//! letters of some root-to-node string.

use std::collections::HashMap;

use crate::textcore::PatternIndex;
use crate::{Error, Letter};

/// Codeword trie. Node 0 is the empty root; `parent[v] < v` for all `v > 0`.
#[derive(Debug, Clone)]
pub struct Codebook {
    pub parent: Vec<u32>,
    pub letter: Vec<Letter>,
    pub depth: Vec<u32>,
    children: HashMap<(u32, Letter), u32>,
}

impl Default for Codebook {
    fn default() -> Self {
        Codebook { parent: vec![0], letter: vec![0], depth: vec![0], children: HashMap::new() }
    }
}

impl Codebook {
    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.len() <= 1
    }

    pub fn child(&self, v: u32, c: Letter) -> Option<u32> {
        self.children.get(&(v, c)).copied()
    }

    /// Returns the child of `v` labelled `c`, creating it if missing.
    pub fn add_child(&mut self, v: u32, c: Letter) -> u32 {
        if let Some(w) = self.child(v, c) {
            return w;
        }
        let w = self.parent.len() as u32;
        self.parent.push(v);
        self.letter.push(c);
        self.depth.push(self.depth[v as usize] + 1);
        self.children.insert((v, c), w);
        w
    }

    /// Root-to-node string.
    pub fn spell(&self, v: u32) -> Vec<Letter> {
        let mut out = Vec::with_capacity(self.depth[v as usize] as usize);
        let mut x = v;
        while x != 0 {
            out.push(self.letter[x as usize]);
            x = self.parent[x as usize];
        }
        out.reverse();
        out
    }
}

#[derive(Debug, Clone, Default)]
pub struct CompressedText {
    pub tokens: Vec<u32>,
    /// `boundary[i]` = text position where token `i` starts; `boundary[n] = N`.
    pub boundary: Vec<usize>,
    pub sigma: u32,
}

impl CompressedText {
    pub fn n(&self) -> usize {
        self.tokens.len()
    }

    /// Decompressed length.
    pub fn total_len(&self) -> usize {
        *self.boundary.last().unwrap_or(&0)
    }

    /// Token containing text position `x`.
    pub fn token_at(&self, x: usize) -> usize {
        self.boundary.partition_point(|&b| b <= x) - 1
    }

    fn from_tokens(tokens: Vec<u32>, cb: &Codebook, sigma: u32) -> Self {
        let mut boundary = Vec::with_capacity(tokens.len() + 1);
        let mut acc = 0usize;
        boundary.push(0);
        for &t in &tokens {
            acc += cb.depth[t as usize] as usize;
            boundary.push(acc);
        }
        CompressedText { tokens, boundary, sigma }
    }
}

/// Greedy LZ78: each phrase is the longest existing codeword plus one letter.
/// The last phrase may be an existing codeword with no fresh letter.
pub fn lz78_parse(raw: &[Letter]) -> (Codebook, CompressedText) {
    let mut cb = Codebook::default();
    let mut tokens = Vec::new();
    let mut cur = 0u32;
    for &c in raw {
        match cb.child(cur, c) {
            Some(w) => cur = w,
            None => {
                tokens.push(cb.add_child(cur, c));
                cur = 0;
            }
        }
    }
    if cur != 0 {
        tokens.push(cur);
    }
    let sigma = raw.iter().copied().max().map_or(0, |m| m + 1);
    let ct = CompressedText::from_tokens(tokens, &cb, sigma);
    (cb, ct)
}

pub fn decompress(ct: &CompressedText, cb: &Codebook) -> Result<Vec<Letter>, Error> {
    let mut out = Vec::with_capacity(ct.total_len());
    for &t in &ct.tokens {
        if t as usize >= cb.len() || t == 0 {
            return Err(Error::UnknownNode(t));
        }
        out.extend(cb.spell(t));
    }
    Ok(out)
}

const MAGIC: &[u8; 4] = b"LZPM";
const VERSION: u8 = 0x01;

/// Serialize as `"LZPM" 0x01 σ n (parent letter)*n`, little-endian u32.
pub fn encode(cb: &Codebook, ct: &CompressedText) -> Vec<u8> {
    let mut out = Vec::with_capacity(13 + 8 * ct.n());
    out.extend_from_slice(MAGIC);
    out.push(VERSION);
    out.extend_from_slice(&ct.sigma.to_le_bytes());
    out.extend_from_slice(&(ct.n() as u32).to_le_bytes());
    for &t in &ct.tokens {
        out.extend_from_slice(&cb.parent[t as usize].to_le_bytes());
        out.extend_from_slice(&cb.letter[t as usize].to_le_bytes());
    }
    out
}

/// Inverse of [`encode`]. A pair naming an existing child reuses that node, so
/// an LZW-style repeated final phrase round-trips.
pub fn decode(bytes: &[u8]) -> Result<(Codebook, CompressedText), Error> {
    if bytes.len() < 4 || &bytes[..4] != MAGIC {
        return Err(Error::BadMagic);
    }
    if bytes.len() < 5 {
        return Err(Error::Truncated);
    }
    if bytes[4] != VERSION {
        return Err(Error::BadVersion(bytes[4]));
    }
    let word = |i: usize| -> Result<u32, Error> {
        let s = bytes.get(5 + 4 * i..9 + 4 * i).ok_or(Error::Truncated)?;
        Ok(u32::from_le_bytes(s.try_into().unwrap()))
    };
    let sigma = word(0)?;
    let n = word(1)? as usize;
    if bytes.len() != 13 + 8 * n {
        return Err(Error::Truncated);
    }
    let mut cb = Codebook::default();
    let mut tokens = Vec::with_capacity(n);
    for i in 0..n {
        let parent = word(2 + 2 * i)?;
        let letter = word(3 + 2 * i)?;
        if parent as usize >= cb.len() {
            return Err(Error::UnknownNode(parent));
        }
        if letter >= sigma {
            return Err(Error::LetterOutOfAlphabet { letter, sigma });
        }
        tokens.push(cb.add_child(parent, letter));
    }
    let ct = CompressedText::from_tokens(tokens, &cb, sigma);
    Ok((cb, ct))
}

/// Last `len` letters of the root-to-`end` string.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Chunk {
    pub end: u32,
    pub len: u32,
}

const FP_MOD: u64 = (1 << 61) - 1;
/// Fixed base for fingerprints; collisions are ~len/2^61 per comparison.
const FP_BASE: u64 = 0x1d_5e0f_9a3c_2b71;

fn mul_mod(a: u64, b: u64) -> u64 {
    let r = (a as u128) * (b as u128);
    let lo = (r as u64) & FP_MOD;
    let hi = (r >> 61) as u64;
    let s = lo + hi;
    if s >= FP_MOD { s - FP_MOD } else { s }
}

fn sub_mod(a: u64, b: u64) -> u64 {
    if a >= b { a - b } else { a + FP_MOD - b }
}

/// The codeword trie extended by the pattern path, with fingerprints and
/// level-ancestor jump tables over all nodes.
#[derive(Debug, Clone)]
pub struct PatternTrie {
    pub trie: Codebook,
    /// Nodes `1..text_nodes` are codewords of the text; later ones are new
    /// nodes added for the pattern path.
    pub text_nodes: usize,
    /// `pattern_path[l]` spells `p[..l]`.
    pub pattern_path: Vec<u32>,
    fp: Vec<u64>,
    pow: Vec<u64>,
    /// `up[j][v]` = ancestor of `v` 2^j levels up (root maps to itself).
    up: Vec<Vec<u32>>,
    pub pattern: PatternIndex,
    pub rpattern: PatternIndex,
}

impl PatternTrie {
    pub fn new(cb: &Codebook, p: &[Letter]) -> Result<Self, Error> {
        let pattern = PatternIndex::new(p)?;
        let rpattern = pattern.reversed();
        let mut trie = cb.clone();
        let text_nodes = trie.len();
        let mut pattern_path = Vec::with_capacity(p.len() + 1);
        pattern_path.push(0u32);
        let mut v = 0;
        for &c in p {
            v = trie.add_child(v, c);
            pattern_path.push(v);
        }
        let nodes = trie.len();
        let max_depth = trie.depth.iter().copied().max().unwrap_or(0) as usize;
        let mut fp = vec![0u64; nodes];
        for w in 1..nodes {
            let par = trie.parent[w] as usize;
            fp[w] = (mul_mod(fp[par], FP_BASE) + trie.letter[w] as u64 + 1) % FP_MOD;
        }
        let mut pow = vec![1u64; max_depth + 1];
        for i in 1..=max_depth {
            pow[i] = mul_mod(pow[i - 1], FP_BASE);
        }
        let levels = (usize::BITS - max_depth.max(1).leading_zeros()) as usize;
        let mut up = vec![trie.parent.clone()];
        for j in 1..levels {
            let prev = &up[j - 1];
            let next: Vec<u32> = (0..nodes).map(|w| prev[prev[w] as usize]).collect();
            up.push(next);
        }
        Ok(PatternTrie { trie, text_nodes, pattern_path, fp, pow, up, pattern, rpattern })
    }

    pub fn m(&self) -> usize {
        self.pattern.len()
    }

    pub fn depth(&self, v: u32) -> usize {
        self.trie.depth[v as usize] as usize
    }

    /// Ancestor of `v` at depth `d` (`d ≤ depth(v)`).
    pub fn ancestor(&self, v: u32, d: usize) -> u32 {
        let mut x = v;
        let mut lift = self.depth(v) - d;
        let mut j = 0;
        while lift > 0 {
            if lift & 1 == 1 {
                x = self.up[j][x as usize];
            }
            lift >>= 1;
            j += 1;
        }
        x
    }

    /// Letter at 0-based `offset` of the root-to-`v` string.
    pub fn node_letter(&self, v: u32, offset: usize) -> Letter {
        self.trie.letter[self.ancestor(v, offset + 1) as usize]
    }

    /// Letter `offset` (0-based) of codeword `tokens[token_idx]`.
    pub fn letter_at(&self, ct: &CompressedText, token_idx: usize, offset: usize) -> Result<Letter, Error> {
        let v = ct.tokens[token_idx];
        let len = self.depth(v);
        if offset >= len {
            return Err(Error::OffsetOutOfRange { offset, len });
        }
        Ok(self.node_letter(v, offset))
    }

    /// Letter `i` (0-based) of a chunk.
    pub fn chunk_letter(&self, c: Chunk, i: usize) -> Letter {
        self.node_letter(c.end, self.depth(c.end) - c.len as usize + i)
    }

    /// Fingerprint of the last `len` letters of the root-to-`v` string.
    fn suffix_fp(&self, v: u32, len: usize) -> u64 {
        let d = self.depth(v);
        let a = self.ancestor(v, d - len);
        sub_mod(self.fp[v as usize], mul_mod(self.fp[a as usize], self.pow[len]))
    }

    pub fn chunk_string(&self, c: Chunk) -> Vec<Letter> {
        let s = self.trie.spell(c.end);
        s[s.len() - c.len as usize..].to_vec()
    }

    /// Longest common suffix of two chunks.
    pub fn chunk_lcsuf(&self, c1: Chunk, c2: Chunk) -> usize {
        let cap = c1.len.min(c2.len) as usize;
        if c1.end == c2.end {
            return cap;
        }
        let (mut lo, mut hi) = (0usize, cap);
        while lo < hi {
            let mid = (lo + hi).div_ceil(2);
            if self.suffix_fp(c1.end, mid) == self.suffix_fp(c2.end, mid) {
                lo = mid;
            } else {
                hi = mid - 1;
            }
        }
        lo
    }

    /// Chunk spelling `p[a..b)`.
    pub fn pattern_chunk(&self, a: usize, b: usize) -> Chunk {
        Chunk { end: self.pattern_path[b], len: (b - a) as u32 }
    }

    /// Longest common prefix of the chunk string and `p[p_start..]`.
    pub fn chunk_pattern_lcpref(&self, c: Chunk, p_start: usize) -> usize {
        let m = self.m();
        if p_start >= m {
            return 0;
        }
        let cap = (c.len as usize).min(m - p_start);
        let top = self.depth(c.end) - c.len as usize;
        let (mut lo, mut hi) = (0usize, cap);
        while lo < hi {
            let mid = (lo + hi).div_ceil(2);
            let chunk_fp = self.suffix_fp(self.ancestor(c.end, top + mid), mid);
            let pat_fp = self.suffix_fp(self.pattern_path[p_start + mid], mid);
            if chunk_fp == pat_fp { lo = mid } else { hi = mid - 1 }
        }
        lo
    }

    /// Longest prefix of the chunk occurring in `p`, with one occurrence start.
    pub fn longest_prefix_factor(&self, c: Chunk) -> (usize, Option<usize>) {
        let len = c.len as usize;
        let res = self.pattern.longest_prefix_occurrence(
            len,
            |s| self.chunk_pattern_lcpref(c, s),
            |l| self.chunk_letter(c, l),
        );
        if res.0 == 0 { (0, None) } else { res }
    }

    /// Longest suffix of the chunk occurring in `p`, with one occurrence start.
    pub fn longest_suffix_factor(&self, c: Chunk) -> (usize, Option<usize>) {
        let m = self.m();
        let len = c.len as usize;
        // suffix s of reversed p  ==  prefix p[..m-s] read backwards
        let (l, s) = self.rpattern.longest_prefix_occurrence(
            len,
            |s| self.chunk_lcsuf(c, Chunk { end: self.pattern_path[m - s], len: (m - s) as u32 }),
            |l| self.chunk_letter(c, len - 1 - l),
        );
        match s {
            Some(s) if l > 0 => (l, Some(m - s - l)),
            _ => (0, None),
        }
    }

    /// Does letter `c` occur in the pattern?
    pub fn in_pattern(&self, c: Letter) -> bool {
        self.pattern.position_of(c).is_some()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> Vec<Letter> {
        s.bytes().map(Letter::from).collect()
    }

    fn phrases(raw: &str) -> Vec<String> {
        let (cb, ct) = lz78_parse(&w(raw));
        ct.tokens
            .iter()
            .map(|&t| cb.spell(t).iter().map(|&c| c as u8 as char).collect())
            .collect()
    }

    #[test]
    fn parse_examples() {
        assert_eq!(phrases("abababa"), ["a", "b", "ab", "aba"]);
        assert_eq!(phrases("aaaa"), ["a", "aa", "a"]);
        assert_eq!(phrases("x"), ["x"]);
    }

    #[test]
    fn round_trip_and_format() {
        let raw = w("the quick brown fox jumps over the lazy dog the end the end");
        let (cb, ct) = lz78_parse(&raw);
        assert_eq!(decompress(&ct, &cb).unwrap(), raw);
        let bytes = encode(&cb, &ct);
        let (cb2, ct2) = decode(&bytes).unwrap();
        assert_eq!(ct2.tokens, ct.tokens);
        assert_eq!(decompress(&ct2, &cb2).unwrap(), raw);
        assert!(matches!(decode(b"LZPX\x01"), Err(Error::BadMagic)));
        assert!(matches!(decode(&bytes[..bytes.len() - 1]), Err(Error::Truncated)));
        let empty = CompressedText::from_tokens(vec![], &cb, 0);
        assert!(decompress(&empty, &cb).unwrap().is_empty());
    }

    #[test]
    fn chunk_queries() {
        let (cb, ct) = lz78_parse(&w("xabyababzabx"));
        let pt = PatternTrie::new(&cb, &w("abaab")).unwrap();
        for (ti, &t) in ct.tokens.iter().enumerate() {
            let s = cb.spell(t);
            for (o, &c) in s.iter().enumerate() {
                assert_eq!(pt.letter_at(&ct, ti, o).unwrap(), c);
            }
        }
        // "aabx" → (3, 2) ; "xaba" → (3, 0)
        let mut t2 = Codebook::default();
        let mut v = 0;
        for c in w("aabx") {
            v = t2.add_child(v, c);
        }
        let mut u = 0;
        for c in w("xaba") {
            u = t2.add_child(u, c);
        }
        let pt2 = PatternTrie::new(&t2, &w("abaab")).unwrap();
        assert_eq!(pt2.longest_prefix_factor(Chunk { end: v, len: 4 }), (3, Some(2)));
        assert_eq!(pt2.longest_suffix_factor(Chunk { end: u, len: 4 }), (3, Some(0)));
        let xa = Chunk { end: u, len: 4 };
        assert_eq!(pt2.longest_prefix_factor(Chunk { end: pt2.ancestor(u, 1), len: 1 }), (0, None));
        assert_eq!(pt2.chunk_lcsuf(xa, pt2.pattern_chunk(0, 3)), 3);
    }

    proptest::proptest! {
        #[test]
        fn parse_encode_decode_round_trip(raw in proptest::collection::vec(0u32..5, 0..400)) {
            let (cb, ct) = lz78_parse(&raw);
            proptest::prop_assert_eq!(ct.total_len(), raw.len());
            proptest::prop_assert_eq!(&decompress(&ct, &cb).unwrap(), &raw);
            let (cb2, ct2) = decode(&encode(&cb, &ct)).unwrap();
            proptest::prop_assert_eq!(decompress(&ct2, &cb2).unwrap(), raw);
        }

        #[test]
        fn letters_and_suffix_queries_match_spelled_codewords(
            raw in proptest::collection::vec(0u32..3, 1..200),
            p in proptest::collection::vec(0u32..3, 1..20),
        ) {
            let (cb, ct) = lz78_parse(&raw);
            let pt = PatternTrie::new(&cb, &p).unwrap();
            for (ti, &t) in ct.tokens.iter().enumerate() {
                let s = cb.spell(t);
                for (o, &c) in s.iter().enumerate() {
                    proptest::prop_assert_eq!(pt.letter_at(&ct, ti, o).unwrap(), c);
                }
                let c = Chunk { end: t, len: s.len() as u32 };
                let direct = s.iter().rev().zip(p.iter().rev()).take_while(|(a, b)| a == b).count();
                proptest::prop_assert_eq!(pt.chunk_lcsuf(c, pt.pattern_chunk(0, p.len())), direct);
            }
        }
    }
}
