//! Block channel codes and zero-error codes.
//!
//! `BlockCode` is the pluggable interface the concatenated constructions
//! encode through; shipped instances are repetition, the (7,4) Hamming
//! code, and the identity (uncoded) map. A capacity-approaching code can be
//! slotted in behind the same interface later. Zero-error codes are
//! independent sets in strong powers of a confusion graph.

use crate::channels::ConfusionGraph;
use crate::{Error, Result};

/// Maximum vertex count for explicit strong-power graphs and exact
/// independent-set search.
pub const STRONG_POWER_VERTEX_BUDGET: usize = 1 << 15;

// ---------------------------------------------------------------------------
// Block codes
// ---------------------------------------------------------------------------

/// A binary block code mapping `s`-bit messages to `t`-bit codewords.
pub trait BlockCode {
    /// Message length `s` in bits.
    fn message_bits(&self) -> usize;

    /// Codeword length `t`.
    fn length(&self) -> usize;

    /// Encodes an `s`-bit message.
    fn encode(&self, msg: &[u8]) -> Vec<u8>;

    /// Decodes a received `t`-bit word to a message, or `None` on failure.
    fn decode(&self, word: &[u8]) -> Option<Vec<u8>>;

    /// Parseable spec string, e.g. `"rep:3"`.
    fn spec(&self) -> String;

    /// Rate `log2(#messages) / t = s / t`.
    fn rate(&self) -> f64 {
        self.message_bits() as f64 / self.length() as f64
    }

    /// All codewords, in message order.
    fn codewords(&self) -> Vec<Vec<u8>> {
        let s = self.message_bits();
        (0..1usize << s)
            .map(|m| {
                let msg: Vec<u8> = (0..s).map(|i| ((m >> i) & 1) as u8).collect();
                self.encode(&msg)
            })
            .collect()
    }
}

/// 1-bit messages repeated `t` times, majority decoding.
#[derive(Debug, Clone)]
pub struct RepetitionCode {
    t: usize,
}

/// No coding: `t` bits in, the same `t` bits out.
#[derive(Debug, Clone)]
pub struct IdentityCode {
    t: usize,
}

/// The (7,4) Hamming code: 4 data bits, 3 parity bits, minimum distance 3,
/// syndrome decoding that corrects any single flip.
#[derive(Debug, Clone)]
pub struct Hamming74;

/// Builds a repetition code of odd or even length `t >= 1`.
pub fn repetition(t: usize) -> Result<RepetitionCode> {
    if t < 1 {
        return Err(Error::domain("repetition length must be at least 1"));
    }
    Ok(RepetitionCode { t })
}

/// Builds the identity (uncoded) map on `t` bits.
pub fn identity(t: usize) -> Result<IdentityCode> {
    if t < 1 {
        return Err(Error::domain("identity code length must be at least 1"));
    }
    Ok(IdentityCode { t })
}

/// Builds the (7,4) Hamming code.
pub fn hamming74() -> Hamming74 {
    Hamming74
}

impl BlockCode for RepetitionCode {
    fn message_bits(&self) -> usize {
        1
    }

    fn length(&self) -> usize {
        self.t
    }

    fn encode(&self, msg: &[u8]) -> Vec<u8> {
        assert_eq!(msg.len(), 1);
        vec![msg[0] & 1; self.t]
    }

    fn decode(&self, word: &[u8]) -> Option<Vec<u8>> {
        assert_eq!(word.len(), self.t);
        let ones = word.iter().filter(|&&b| b == 1).count();
        // Exact ties (even t) go to 0.
        Some(vec![(2 * ones > self.t) as u8])
    }

    fn spec(&self) -> String {
        format!("rep:{}", self.t)
    }
}

impl BlockCode for IdentityCode {
    fn message_bits(&self) -> usize {
        self.t
    }

    fn length(&self) -> usize {
        self.t
    }

    fn encode(&self, msg: &[u8]) -> Vec<u8> {
        assert_eq!(msg.len(), self.t);
        msg.iter().map(|&b| b & 1).collect()
    }

    fn decode(&self, word: &[u8]) -> Option<Vec<u8>> {
        assert_eq!(word.len(), self.t);
        Some(word.to_vec())
    }

    fn spec(&self) -> String {
        format!("identity:{}", self.t)
    }
}

impl Hamming74 {
    // Parity bit j of codeword (d1 d2 d3 d4 p1 p2 p3): rows of the parity
    // part of the systematic generator matrix.
    const PARITY: [[u8; 4]; 3] = [[1, 1, 0, 1], [1, 0, 1, 1], [0, 1, 1, 1]];
}

impl BlockCode for Hamming74 {
    fn message_bits(&self) -> usize {
        4
    }

    fn length(&self) -> usize {
        7
    }

    fn encode(&self, msg: &[u8]) -> Vec<u8> {
        assert_eq!(msg.len(), 4);
        let mut cw: Vec<u8> = msg.iter().map(|&b| b & 1).collect();
        for row in Self::PARITY {
            let p = row.iter().zip(msg).fold(0u8, |acc, (&r, &d)| acc ^ (r & d));
            cw.push(p);
        }
        cw
    }

    fn decode(&self, word: &[u8]) -> Option<Vec<u8>> {
        assert_eq!(word.len(), 7);
        let mut w: Vec<u8> = word.iter().map(|&b| b & 1).collect();
        // Syndrome: recompute parities and compare.
        let mut syndrome = 0usize;
        for (j, row) in Self::PARITY.iter().enumerate() {
            let p = row.iter().zip(&w).fold(0u8, |acc, (&r, &d)| acc ^ (r & d));
            if p != w[4 + j] {
                syndrome |= 1 << j;
            }
        }
        if syndrome != 0 {
            // Map the syndrome to the unique flipped position.
            let pos = (0..7).find(|&i| {
                let col: usize = (0..3)
                    .map(|j| {
                        let bit = if i < 4 {
                            Self::PARITY[j][i]
                        } else {
                            (i - 4 == j) as u8
                        };
                        (bit as usize) << j
                    })
                    .sum();
                col == syndrome
            })?;
            w[pos] ^= 1;
        }
        Some(w[..4].to_vec())
    }

    fn spec(&self) -> String {
        "hamming74".to_string()
    }
}

/// Parses a code spec string: `"rep:3"`, `"hamming74"`, or `"identity:4"`.
pub fn parse_code_spec(spec: &str) -> Result<Box<dyn BlockCode>> {
    let spec = spec.trim();
    if spec == "hamming74" {
        return Ok(Box::new(hamming74()));
    }
    if let Some(arg) = spec.strip_prefix("rep:") {
        let t: usize = arg
            .parse()
            .map_err(|_| Error::format(format!("invalid repetition length '{arg}'")))?;
        return Ok(Box::new(repetition(t)?));
    }
    if let Some(arg) = spec.strip_prefix("identity:") {
        let t: usize = arg
            .parse()
            .map_err(|_| Error::format(format!("invalid identity length '{arg}'")))?;
        return Ok(Box::new(identity(t)?));
    }
    Err(Error::format(format!("unknown code spec '{spec}'")))
}

/// Exact minimum Hamming distance over all codeword pairs.
pub fn min_distance(code: &dyn BlockCode) -> Result<usize> {
    let words = code.codewords();
    if words.len() < 2 {
        return Err(Error::domain("minimum distance needs at least two codewords"));
    }
    let mut best = usize::MAX;
    for i in 0..words.len() {
        for j in i + 1..words.len() {
            let d = words[i]
                .iter()
                .zip(&words[j])
                .filter(|(a, b)| a != b)
                .count();
            best = best.min(d);
        }
    }
    Ok(best)
}

// ---------------------------------------------------------------------------
// Zero-error codes
// ---------------------------------------------------------------------------

/// A zero-error code: equal-length words over a confusion graph's vertex
/// set, pairwise non-confusable in the strong power of the graph.
#[derive(Debug, Clone)]
pub struct ZeroErrorCode {
    graph: ConfusionGraph,
    length: usize,
    codewords: Vec<Vec<u16>>,
}

impl ZeroErrorCode {
    pub fn new(graph: ConfusionGraph, codewords: Vec<Vec<u16>>) -> Result<Self> {
        if codewords.is_empty() {
            return Err(Error::domain("zero-error code must have codewords"));
        }
        let length = codewords[0].len();
        if length == 0 {
            return Err(Error::domain("zero-error codewords must be nonempty"));
        }
        for w in &codewords {
            if w.len() != length {
                return Err(Error::domain("codewords must have equal length"));
            }
            if w.iter().any(|&s| s as usize >= graph.vertex_count()) {
                return Err(Error::domain("codeword symbol outside vertex set"));
            }
        }
        if !is_independent_set(&graph, &codewords)? {
            return Err(Error::domain(
                "codewords are confusable: not an independent set in the strong power",
            ));
        }
        Ok(ZeroErrorCode {
            graph,
            length,
            codewords,
        })
    }

    pub fn graph(&self) -> &ConfusionGraph {
        &self.graph
    }

    pub fn length(&self) -> usize {
        self.length
    }

    pub fn size(&self) -> usize {
        self.codewords.len()
    }

    pub fn codewords(&self) -> &[Vec<u16>] {
        &self.codewords
    }

    /// Rate `log2(size) / length` in bits per symbol.
    pub fn rate(&self) -> f64 {
        (self.size() as f64).log2() / self.length as f64
    }
}

/// True iff no pair of the given equal-length words is adjacent in the
/// strong power of `g`.
pub fn is_independent_set(g: &ConfusionGraph, words: &[Vec<u16>]) -> Result<bool> {
    if words.is_empty() {
        return Ok(true);
    }
    let len = words[0].len();
    for w in words {
        if w.len() != len {
            return Err(Error::domain("words must have equal length"));
        }
        if w.iter().any(|&s| s as usize >= g.vertex_count()) {
            return Err(Error::domain("word symbol outside vertex set"));
        }
    }
    for i in 0..words.len() {
        for j in i + 1..words.len() {
            if words[i] == words[j] || g.confusable(&words[i], &words[j]) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Builds the explicit `k`-fold strong power of a graph. Vertex `v` encodes
/// the word with base-`|V|` digits of `v`, most significant first.
pub fn strong_power(g: &ConfusionGraph, k: usize) -> Result<ConfusionGraph> {
    if k == 0 {
        return Err(Error::domain("strong power exponent must be at least 1"));
    }
    let base = g.vertex_count();
    let mut total = 1usize;
    for _ in 0..k {
        total = total
            .checked_mul(base)
            .filter(|&t| t <= STRONG_POWER_VERTEX_BUDGET)
            .ok_or_else(|| {
                Error::resource(format!(
                    "strong power has more than {STRONG_POWER_VERTEX_BUDGET} vertices"
                ))
            })?;
    }
    let word = |mut v: usize| -> Vec<u16> {
        let mut w = vec![0u16; k];
        for i in (0..k).rev() {
            w[i] = (v % base) as u16;
            v /= base;
        }
        w
    };
    let words: Vec<Vec<u16>> = (0..total).map(word).collect();
    let mut edges = Vec::new();
    for u in 0..total {
        for v in u + 1..total {
            if g.confusable(&words[u], &words[v]) {
                edges.push((u, v));
            }
        }
    }
    ConfusionGraph::new(total, &edges)
}

/// Exact maximum independent set by branch and bound. Exponential in the
/// worst case; intended for the small graphs the zero-error constructions
/// use (e.g. strong powers of the pentagon).
pub fn max_independent_set(g: &ConfusionGraph) -> Vec<usize> {
    let n = g.vertex_count();
    let mut best: Vec<usize> = Vec::new();
    let mut current: Vec<usize> = Vec::new();
    // Order vertices by decreasing degree so pruning bites early.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&v| std::cmp::Reverse((0..n).filter(|&u| g.adjacent(v, u)).count()));

    fn recurse(
        g: &ConfusionGraph,
        order: &[usize],
        from: usize,
        current: &mut Vec<usize>,
        best: &mut Vec<usize>,
    ) {
        if current.len() + (order.len() - from) <= best.len() {
            return;
        }
        if from == order.len() {
            if current.len() > best.len() {
                *best = current.clone();
            }
            return;
        }
        let v = order[from];
        if current.iter().all(|&u| !g.adjacent(u, v)) {
            current.push(v);
            recurse(g, order, from + 1, current, best);
            current.pop();
        }
        recurse(g, order, from + 1, current, best);
    }

    recurse(g, &order, 0, &mut current, &mut best);
    best.sort_unstable();
    best
}

/// The canonical length-2, size-5 zero-error code on the pentagon,
/// recovered by exact search over the 25-vertex strong square.
pub fn pentagon_code() -> ZeroErrorCode {
    let pentagon = ConfusionGraph::cycle(5).expect("pentagon");
    let square = strong_power(&pentagon, 2).expect("within budget");
    let verts = max_independent_set(&square);
    assert_eq!(verts.len(), 5, "independence number of C5^2 is 5");
    let codewords: Vec<Vec<u16>> = verts
        .iter()
        .map(|&v| vec![(v / 5) as u16, (v % 5) as u16])
        .collect();
    ZeroErrorCode::new(pentagon, codewords).expect("search output is independent")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn repetition_corrects_single_flip() {
        let code = repetition(3).unwrap();
        for msg in [[0u8], [1u8]] {
            let cw = code.encode(&msg);
            for flip in 0..3 {
                let mut w = cw.clone();
                w[flip] ^= 1;
                assert_eq!(code.decode(&w).unwrap(), msg.to_vec());
            }
        }
    }

    #[test]
    fn repetition_corrects_below_half() {
        // every error pattern of weight < t/2 decodes correctly
        for t in [3usize, 5, 7, 9] {
            let code = repetition(t).unwrap();
            for msg in [[0u8], [1u8]] {
                let cw = code.encode(&msg);
                for pattern in 0..(1usize << t) {
                    let weight = pattern.count_ones() as usize;
                    if 2 * weight >= t {
                        continue;
                    }
                    let w: Vec<u8> = cw
                        .iter()
                        .enumerate()
                        .map(|(i, &b)| b ^ ((pattern >> i) & 1) as u8)
                        .collect();
                    assert_eq!(code.decode(&w).unwrap(), msg.to_vec());
                }
            }
        }
    }

    #[test]
    fn hamming74_distance_and_correction() {
        let code = hamming74();
        assert_eq!(min_distance(&code).unwrap(), 3);
        for m in 0..16u8 {
            let msg: Vec<u8> = (0..4).map(|i| (m >> i) & 1).collect();
            let cw = code.encode(&msg);
            assert_eq!(code.decode(&cw).unwrap(), msg);
            for flip in 0..7 {
                let mut w = cw.clone();
                w[flip] ^= 1;
                assert_eq!(code.decode(&w).unwrap(), msg, "flip at {flip}");
            }
        }
    }

    #[test]
    fn identity_is_rate_one() {
        let code = identity(4).unwrap();
        assert_eq!(code.rate(), 1.0);
        assert_eq!(min_distance(&code).unwrap(), 1);
    }

    #[test]
    fn repetition_distance() {
        assert_eq!(min_distance(&repetition(5).unwrap()).unwrap(), 5);
    }

    #[test]
    fn decode_encode_roundtrip_all_codes() {
        let codes: Vec<Box<dyn BlockCode>> = vec![
            Box::new(repetition(5).unwrap()),
            Box::new(hamming74()),
            Box::new(identity(3).unwrap()),
        ];
        for code in &codes {
            for m in 0..(1usize << code.message_bits()) {
                let msg: Vec<u8> = (0..code.message_bits()).map(|i| ((m >> i) & 1) as u8).collect();
                assert_eq!(code.decode(&code.encode(&msg)).unwrap(), msg);
            }
        }
    }

    #[test]
    fn spec_strings_round_trip() {
        for spec in ["rep:3", "hamming74", "identity:4"] {
            let code = parse_code_spec(spec).unwrap();
            assert_eq!(code.spec(), spec);
        }
        assert!(parse_code_spec("turbo:9").is_err());
    }

    #[test]
    fn pentagon_independence_numbers() {
        let pentagon = ConfusionGraph::cycle(5).unwrap();
        assert_eq!(max_independent_set(&pentagon).len(), 2);
        let square = strong_power(&pentagon, 2).unwrap();
        assert_eq!(max_independent_set(&square).len(), 5);
    }

    #[test]
    fn pentagon_code_is_independent() {
        let code = pentagon_code();
        assert_eq!(code.size(), 5);
        assert_eq!(code.length(), 2);
        assert!(is_independent_set(code.graph(), code.codewords()).unwrap());
        // rate is log2(5)/2
        assert!((code.rate() - 5.0f64.log2() / 2.0).abs() < 1e-12);
    }

    #[test]
    fn independent_set_examples() {
        let pentagon = ConfusionGraph::cycle(5).unwrap();
        // adjacent singletons are not independent
        assert!(!is_independent_set(&pentagon, &[vec![0], vec![1]]).unwrap());
        // a lone word always is
        assert!(is_independent_set(&pentagon, &[vec![3]]).unwrap());
        // {00, 12, 24, 31, 43} is the classic independent set of C5^2
        let words = vec![vec![0, 0], vec![1, 2], vec![2, 4], vec![3, 1], vec![4, 3]];
        assert!(is_independent_set(&pentagon, &words).unwrap());
    }

    #[test]
    fn strong_power_budget() {
        let pentagon = ConfusionGraph::cycle(5).unwrap();
        assert!(strong_power(&pentagon, 8).is_err());
    }
}
