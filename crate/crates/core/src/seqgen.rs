//! Raw sequence generation and window decoding.
//!
//! Three sequence families live here: maximal-length LFSR sequences from a
//! primitive polynomial, the disjoint cycle decomposition an irreducible
//! non-primitive polynomial induces, and de Bruijn sequences over arbitrary
//! alphabets with an indexed decoder.
//!
//! Phases are 1-based: `window(m, k)` reads symbols at cyclic positions
//! `m, m+1, ..., m+k-1` with indices taken modulo the sequence length.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::gf2::Gf2Poly;
use crate::{Error, Result};

/// Default ceiling on generated sequence lengths (symbols).
pub const DEFAULT_LENGTH_BUDGET: usize = 1 << 24;

/// How a sequence was generated; stored alongside it so runs reproduce.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Construction {
    Lfsr { poly: String, init: String },
    LfsrCycle { poly: String, cycle: usize },
    DeBruijn { order: usize, rule: String },
    Random { seed: u64 },
    Concat { code: String, l: usize, tau: usize, inner: String },
    ZeroError { r: usize, t: usize },
    CrtProduct { n_u: usize, n_v: usize },
    Manual,
}

/// The greedy generation rule used for de Bruijn sequences.
pub const DEBRUIJN_RULE: &str = "greedy-prefer-largest";

/// A cyclic sequence over the alphabet `0..q`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CyclicSequence {
    alphabet: usize,
    symbols: Vec<u16>,
    construction: Construction,
}

impl CyclicSequence {
    pub fn new(alphabet: usize, symbols: Vec<u16>, construction: Construction) -> Result<Self> {
        if alphabet < 2 {
            return Err(Error::domain("alphabet size must be at least 2"));
        }
        if symbols.is_empty() {
            return Err(Error::domain("sequence must be nonempty"));
        }
        if let Some(&bad) = symbols.iter().find(|&&s| s as usize >= alphabet) {
            return Err(Error::domain(format!(
                "symbol {bad} outside alphabet of size {alphabet}"
            )));
        }
        Ok(CyclicSequence {
            alphabet,
            symbols,
            construction,
        })
    }

    pub fn alphabet_size(&self) -> usize {
        self.alphabet
    }

    pub fn n(&self) -> usize {
        self.symbols.len()
    }

    pub fn symbols(&self) -> &[u16] {
        &self.symbols
    }

    pub fn construction(&self) -> &Construction {
        &self.construction
    }

    pub fn is_binary(&self) -> bool {
        self.alphabet == 2
    }

    /// Symbol at 0-based cyclic offset.
    #[inline]
    pub fn at(&self, index0: usize) -> u16 {
        self.symbols[index0 % self.symbols.len()]
    }

    /// The length-`k` window starting at 1-based phase `m`, cyclically.
    pub fn window(&self, m: usize, k: usize) -> Vec<u16> {
        assert!(m >= 1 && m <= self.n(), "phase {m} out of range 1..={}", self.n());
        (0..k).map(|i| self.at(m - 1 + i)).collect()
    }

    /// All `n` length-`k` windows packed into `u64` words, one entry per
    /// phase, for fast Hamming-distance scans over binary sequences.
    pub fn packed_windows(&self, k: usize) -> Vec<Vec<u64>> {
        assert!(self.is_binary());
        let words = k.div_ceil(64);
        (1..=self.n())
            .map(|m| {
                let mut packed = vec![0u64; words];
                for i in 0..k {
                    if self.at(m - 1 + i) == 1 {
                        packed[i / 64] |= 1u64 << (i % 64);
                    }
                }
                packed
            })
            .collect()
    }

    /// Hamming weight of the window at phase `m`.
    pub fn window_weight(&self, m: usize, k: usize) -> usize {
        (0..k).filter(|&i| self.at(m - 1 + i) != 0).count()
    }
}

// ---------------------------------------------------------------------------
// LFSR sequences
// ---------------------------------------------------------------------------

/// Generates the maximal-length sequence of a primitive polynomial.
///
/// The sequence has length `n = 2^r - 1` and satisfies the feedback
/// recursion cyclically: the symbol `r` steps ahead of any window is the
/// inner product of that window with the low coefficients of `a`. Every
/// nonzero length-`r` pattern occurs exactly once.
pub fn lfsr_generate(a: &Gf2Poly, init: &[u8]) -> Result<CyclicSequence> {
    if !a.is_primitive() {
        return Err(Error::domain(format!(
            "polynomial {a} is not primitive; use lfsr_cycles for irreducible non-primitive polynomials"
        )));
    }
    let r = a.degree().unwrap();
    if init.len() != r {
        return Err(Error::domain(format!(
            "initial state must have length {r}, got {}",
            init.len()
        )));
    }
    if init.iter().all(|&b| b == 0) {
        return Err(Error::domain("initial state must not be all-zero"));
    }
    if r > 24 {
        return Err(Error::resource("LFSR generation limited to degree <= 24"));
    }
    let taps = a.low_coeffs();
    let n = (1usize << r) - 1;
    let mut bits: Vec<u16> = init.iter().map(|&b| (b & 1) as u16).collect();
    while bits.len() < n {
        let j = bits.len() - r;
        let mut next = 0u16;
        for (i, &t) in taps.iter().enumerate() {
            next ^= (t as u16) & bits[j + i];
        }
        bits.push(next);
    }
    bits.truncate(n);
    CyclicSequence::new(
        2,
        bits,
        Construction::Lfsr {
            poly: a.to_string(),
            init: init.iter().map(|&b| char::from(b'0' + (b & 1))).collect(),
        },
    )
}

/// Decomposes the nonzero LFSR state space of an irreducible non-primitive
/// polynomial into its disjoint cycles.
///
/// Returns `s = (2^r - 1) / t` sequences of length `t = order(a)`; their
/// length-`r` windows, across all cycles, partition the nonzero r-bit
/// patterns.
pub fn lfsr_cycles(a: &Gf2Poly) -> Result<Vec<CyclicSequence>> {
    let r = a
        .degree()
        .ok_or_else(|| Error::domain("zero polynomial has no cycles"))?;
    if r < 1 || !a.is_irreducible()? {
        return Err(Error::domain("cycle decomposition requires an irreducible polynomial"));
    }
    if a.is_primitive() {
        return Err(Error::domain(
            "polynomial is primitive; use lfsr_generate for the single maximal cycle",
        ));
    }
    if r > 24 {
        return Err(Error::resource("cycle decomposition limited to degree <= 24"));
    }
    let t = a.order()? as usize;
    let taps = a.low_coeffs();
    let total = (1usize << r) - 1;
    let mut visited = vec![false; 1 << r];
    let mut cycles = Vec::with_capacity(total / t);
    for start in 1..(1usize << r) {
        if visited[start] {
            continue;
        }
        // Run the register for t steps, recording the output bit stream and
        // marking every state on the cycle.
        let mut state = start;
        let mut bits = Vec::with_capacity(t);
        for _ in 0..t {
            visited[state] = true;
            bits.push((state & 1) as u16);
            let mut next = 0usize;
            for (i, &tap) in taps.iter().enumerate() {
                if tap == 1 {
                    next ^= (state >> i) & 1;
                }
            }
            state = (state >> 1) | (next << (r - 1));
        }
        debug_assert_eq!(state, start, "cycle did not close after {t} steps");
        cycles.push(CyclicSequence::new(
            2,
            bits,
            Construction::LfsrCycle {
                poly: a.to_string(),
                cycle: cycles.len(),
            },
        )?);
    }
    debug_assert_eq!(cycles.len() * t, total);
    Ok(cycles)
}

// ---------------------------------------------------------------------------
// de Bruijn sequences
// ---------------------------------------------------------------------------

/// Phase lookup for a de Bruijn sequence: a bijection between all `q^r`
/// length-`r` windows and the phases `1..=q^r`.
#[derive(Debug, Clone)]
pub struct DeBruijnIndex {
    alphabet: usize,
    order: usize,
    phase_by_code: Vec<u32>,
}

impl DeBruijnIndex {
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn alphabet_size(&self) -> usize {
        self.alphabet
    }

    /// The unique phase whose window equals the given one.
    pub fn decode(&self, window: &[u16]) -> Result<usize> {
        if window.len() != self.order {
            return Err(Error::domain(format!(
                "window length {} does not match order {}",
                window.len(),
                self.order
            )));
        }
        let mut code = 0usize;
        for &s in window {
            if s as usize >= self.alphabet {
                return Err(Error::domain(format!("symbol {s} outside alphabet")));
            }
            code = code * self.alphabet + s as usize;
        }
        Ok(self.phase_by_code[code] as usize)
    }
}

/// Generates a de Bruijn sequence of the given alphabet size and order,
/// along with its phase index.
///
/// Uses the greedy prefer-largest rule: starting from `0^r`, repeatedly
/// append the largest symbol whose induced length-`r` window has not
/// occurred yet. The resulting cyclic sequence of length `q^r` contains
/// every length-`r` string exactly once.
pub fn debruijn_generate(q: usize, r: usize) -> Result<(CyclicSequence, DeBruijnIndex)> {
    debruijn_generate_with_budget(q, r, DEFAULT_LENGTH_BUDGET)
}

pub fn debruijn_generate_with_budget(
    q: usize,
    r: usize,
    budget: usize,
) -> Result<(CyclicSequence, DeBruijnIndex)> {
    if q < 2 {
        return Err(Error::domain("alphabet size must be at least 2"));
    }
    if r < 1 {
        return Err(Error::domain("order must be at least 1"));
    }
    if q > u16::MAX as usize + 1 {
        return Err(Error::domain("alphabet size exceeds symbol range"));
    }
    let len = checked_pow(q, r, budget)?;

    let pow_top = len / q; // q^{r-1}
    let mut used = vec![false; len];
    let mut seq: Vec<u16> = vec![0; r];
    let mut code = 0usize; // code of the last r symbols
    used[0] = true;
    while seq.len() < len + r - 1 {
        let suffix = code % pow_top;
        let mut advanced = false;
        for c in (0..q).rev() {
            let cand = suffix * q + c;
            if !used[cand] {
                used[cand] = true;
                seq.push(c as u16);
                code = cand;
                advanced = true;
                break;
            }
        }
        if !advanced {
            break;
        }
    }
    if seq.len() != len + r - 1 && !(r == 1 && seq.len() == len) {
        return Err(Error::domain(format!(
            "greedy construction stalled at length {} (expected {})",
            seq.len(),
            len + r - 1
        )));
    }
    seq.truncate(len);

    let sequence = CyclicSequence::new(
        q,
        seq,
        Construction::DeBruijn {
            order: r,
            rule: DEBRUIJN_RULE.to_string(),
        },
    )?;
    let index = build_debruijn_index(&sequence, r)?;
    Ok((sequence, index))
}

/// Builds the dense window-to-phase table for a de Bruijn sequence.
fn build_debruijn_index(seq: &CyclicSequence, r: usize) -> Result<DeBruijnIndex> {
    let q = seq.alphabet_size();
    let len = seq.n();
    let mut phase_by_code = vec![u32::MAX; len];
    let mut code = 0usize;
    let pow_top = len / q;
    for i in 0..r {
        code = code * q + seq.at(i) as usize;
    }
    for m0 in 0..len {
        if phase_by_code[code] != u32::MAX {
            return Err(Error::domain(format!(
                "window at phase {} duplicates phase {}",
                m0 + 1,
                phase_by_code[code] + 1
            )));
        }
        phase_by_code[code] = m0 as u32 + 1;
        code = (code % pow_top) * q + seq.at(m0 + r) as usize;
    }
    Ok(DeBruijnIndex {
        alphabet: q,
        order: r,
        phase_by_code,
    })
}

fn checked_pow(q: usize, r: usize, budget: usize) -> Result<usize> {
    let mut acc = 1usize;
    for _ in 0..r {
        acc = acc
            .checked_mul(q)
            .filter(|&v| v <= budget)
            .ok_or_else(|| {
                Error::resource(format!("q^r = {q}^{r} exceeds length budget {budget}"))
            })?;
    }
    Ok(acc)
}

// ---------------------------------------------------------------------------
// Generic window index
// ---------------------------------------------------------------------------

/// Phase lookup over any cyclic sequence whose length-`w` windows are all
/// distinct (de Bruijn sequences and m-sequences with `w >= r` qualify).
#[derive(Debug, Clone)]
pub struct WindowIndex {
    window_len: usize,
    map: HashMap<Vec<u16>, u32>,
}

impl WindowIndex {
    pub fn build(seq: &CyclicSequence, window_len: usize) -> Result<Self> {
        let mut map = HashMap::with_capacity(seq.n());
        for m in 1..=seq.n() {
            let w = seq.window(m, window_len);
            if let Some(prev) = map.insert(w, m as u32) {
                return Err(Error::domain(format!(
                    "length-{window_len} windows are not distinct (phases {prev} and {m})"
                )));
            }
        }
        Ok(WindowIndex { window_len, map })
    }

    pub fn window_len(&self) -> usize {
        self.window_len
    }

    /// The phase of the given window, if it occurs.
    pub fn decode(&self, window: &[u16]) -> Option<usize> {
        if window.len() != self.window_len {
            return None;
        }
        self.map.get(window).map(|&m| m as usize)
    }
}

// ---------------------------------------------------------------------------
// Sequence file format
// ---------------------------------------------------------------------------

/// On-disk JSON form of a sequence. Field names and order are fixed.
#[derive(Serialize, Deserialize)]
pub struct SequenceFile {
    pub alphabet: usize,
    pub n: usize,
    pub symbols: Vec<u16>,
    pub construction: Construction,
}

impl From<&CyclicSequence> for SequenceFile {
    fn from(seq: &CyclicSequence) -> Self {
        SequenceFile {
            alphabet: seq.alphabet_size(),
            n: seq.n(),
            symbols: seq.symbols().to_vec(),
            construction: seq.construction().clone(),
        }
    }
}

impl SequenceFile {
    pub fn into_sequence(self) -> Result<CyclicSequence> {
        if self.n != self.symbols.len() {
            return Err(Error::format(format!(
                "declared length {} does not match {} symbols",
                self.n,
                self.symbols.len()
            )));
        }
        CyclicSequence::new(self.alphabet, self.symbols, self.construction)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    fn poly(s: &str) -> Gf2Poly {
        Gf2Poly::from_bit_str(s).unwrap()
    }

    #[test]
    fn lfsr_card_trick_length() {
        // z^5+z^4+z^2+z+1 with any nonzero seed gives the length-31 sequence
        let a = poly("111011");
        let seq = lfsr_generate(&a, &[1, 0, 0, 0, 0]).unwrap();
        assert_eq!(seq.n(), 31);
    }

    #[test]
    fn lfsr_degree3_windows_cover_nonzero_patterns() {
        let a = poly("1101");
        let seq = lfsr_generate(&a, &[1, 0, 0]).unwrap();
        assert_eq!(seq.n(), 7);
        let windows: HashSet<Vec<u16>> = (1..=7).map(|m| seq.window(m, 3)).collect();
        assert_eq!(windows.len(), 7);
        assert!(!windows.contains(&vec![0, 0, 0]));
    }

    #[test]
    fn lfsr_degree1() {
        let seq = lfsr_generate(&poly("11"), &[1]).unwrap();
        assert_eq!(seq.symbols(), &[1]);
    }

    #[test]
    fn lfsr_rejects_bad_inputs() {
        assert!(lfsr_generate(&poly("1101"), &[0, 0, 0]).is_err());
        assert!(lfsr_generate(&poly("11111"), &[1, 0, 0, 0]).is_err());
    }

    #[test]
    fn lfsr_satisfies_recursion_cyclically() {
        let a = poly("111011");
        let taps = a.low_coeffs();
        let seq = lfsr_generate(&a, &[1, 1, 0, 1, 0]).unwrap();
        let r = 5;
        for j in 0..seq.n() {
            let mut expect = 0u16;
            for (i, &t) in taps.iter().enumerate() {
                expect ^= (t as u16) & seq.at(j + i);
            }
            assert_eq!(seq.at(j + r), expect, "recursion fails at offset {j}");
        }
    }

    #[test]
    fn cycles_of_z4_z3_z2_z_1() {
        // order 5, so 3 disjoint cycles of length 5
        let cycles = lfsr_cycles(&poly("11111")).unwrap();
        assert_eq!(cycles.len(), 3);
        let mut seen = HashSet::new();
        for c in &cycles {
            assert_eq!(c.n(), 5);
            for m in 1..=c.n() {
                let w = c.window(m, 4);
                assert_ne!(w, vec![0, 0, 0, 0]);
                assert!(seen.insert(w), "window repeated across cycles");
            }
        }
        assert_eq!(seen.len(), 15);
    }

    #[test]
    fn cycles_of_z6_z3_1() {
        let cycles = lfsr_cycles(&poly("1001001")).unwrap();
        assert_eq!(cycles.len(), 7);
        assert!(cycles.iter().all(|c| c.n() == 9));
        let mut seen = HashSet::new();
        for c in &cycles {
            for m in 1..=c.n() {
                assert!(seen.insert(c.window(m, 6)));
            }
        }
        assert_eq!(seen.len(), 63);
    }

    #[test]
    fn cycles_reject_primitive_and_reducible() {
        assert!(lfsr_cycles(&poly("1101")).is_err());
        assert!(lfsr_cycles(&poly("101")).is_err());
    }

    #[test]
    fn debruijn_binary_order5() {
        let (seq, idx) = debruijn_generate(2, 5).unwrap();
        assert_eq!(seq.n(), 32);
        let phases: HashSet<usize> = (1..=32)
            .map(|m| idx.decode(&seq.window(m, 5)).unwrap())
            .collect();
        assert_eq!(phases.len(), 32);
        for m in 1..=32 {
            assert_eq!(idx.decode(&seq.window(m, 5)).unwrap(), m);
        }
    }

    #[test]
    fn debruijn_order1_is_alphabet() {
        let (seq, _) = debruijn_generate(2, 1).unwrap();
        let mut syms = seq.symbols().to_vec();
        syms.sort_unstable();
        assert_eq!(syms, vec![0, 1]);
    }

    #[test]
    fn debruijn_ternary_order2_has_all_pairs() {
        let (seq, _) = debruijn_generate(3, 2).unwrap();
        assert_eq!(seq.n(), 9);
        let mut seen = HashSet::new();
        for m in 1..=9 {
            seen.insert(seq.window(m, 2));
        }
        assert_eq!(seen.len(), 9);
    }

    #[test]
    fn debruijn_decode_tracks_rotation() {
        let (seq, idx) = debruijn_generate(2, 4).unwrap();
        let n = seq.n();
        // Rotating the sequence by j shifts every decoded phase by j mod n.
        let j = 5;
        let rotated: Vec<u16> = (0..n).map(|i| seq.at(i + j)).collect();
        let rot = CyclicSequence::new(2, rotated, Construction::Manual).unwrap();
        for m in 1..=n {
            let decoded = idx.decode(&rot.window(m, 4)).unwrap();
            assert_eq!((decoded - 1) % n, (m - 1 + j) % n);
        }
    }

    #[test]
    fn debruijn_budget_enforced() {
        match debruijn_generate_with_budget(2, 30, 1 << 20) {
            Err(crate::Error::Resource(_)) => {}
            other => panic!("expected resource error, got {other:?}"),
        }
    }

    #[test]
    fn debruijn_property_exhaustive_small() {
        for (q, r) in [(2, 8), (3, 4), (4, 3), (5, 2)] {
            let (seq, idx) = debruijn_generate(q, r).unwrap();
            assert_eq!(seq.n(), q.pow(r as u32));
            let mut counts: HashMap<Vec<u16>, usize> = HashMap::new();
            for m in 1..=seq.n() {
                *counts.entry(seq.window(m, r)).or_default() += 1;
            }
            assert_eq!(counts.len(), seq.n(), "q={q} r={r}");
            assert!(counts.values().all(|&c| c == 1));
            for m in 1..=seq.n() {
                assert_eq!(idx.decode(&seq.window(m, r)).unwrap(), m);
            }
        }
    }

    #[test]
    fn lfsr_windows_distinct_and_nonzero_through_degree_16() {
        // at window length r, the n windows are exactly the nonzero r-bit
        // patterns; spot-check one primitive polynomial per degree
        for (r, bits) in [
            (8usize, "101110001"),
            (12, "1100101000001"),
            (16, "10110100000000001"),
        ] {
            let a = poly(bits);
            assert!(a.is_primitive(), "degree {r}");
            let mut init = vec![0u8; r];
            init[0] = 1;
            let seq = lfsr_generate(&a, &init).unwrap();
            let mut seen = vec![false; 1 << r];
            for m in 1..=seq.n() {
                let code = seq
                    .window(m, r)
                    .iter()
                    .fold(0usize, |acc, &b| (acc << 1) | b as usize);
                assert_ne!(code, 0, "zero window at phase {m}");
                assert!(!seen[code], "repeated window at phase {m}");
                seen[code] = true;
            }
        }
    }

    #[test]
    fn lfsr_window_xor_closure_sampled_pairs() {
        // the window multiset plus the zero word is a linear code: the XOR
        // of any two windows is another window (or zero); sampled pairs at
        // degrees past the exhaustive range
        use rand::{Rng, SeedableRng};
        for (r, bits) in [(12usize, "1100101000001"), (16, "11010000000010001")] {
            let a = poly(bits);
            let mut init = vec![0u8; r];
            init[0] = 1;
            let seq = lfsr_generate(&a, &init).unwrap();
            let n = seq.n();
            for k in [r, 2 * r, 4 * r] {
                let windows: HashSet<Vec<u16>> = (1..=n).map(|m| seq.window(m, k)).collect();
                assert_eq!(windows.len(), n);
                let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(4 + r as u64);
                for _ in 0..200 {
                    let m1 = rng.random_range(1..=n);
                    let m2 = rng.random_range(1..=n);
                    let xor: Vec<u16> = seq
                        .window(m1, k)
                        .iter()
                        .zip(&seq.window(m2, k))
                        .map(|(&x, &y)| x ^ y)
                        .collect();
                    let ok = xor.iter().all(|&b| b == 0) || windows.contains(&xor);
                    assert!(ok, "r={r} k={k}: xor of windows {m1},{m2} escapes the code");
                }
            }
        }
    }

    #[test]
    fn debruijn_property_at_megabit_scale() {
        // generation validates the bijection between windows and phases;
        // order 20 exercises the construction at the 2^20 budget boundary
        let (seq, idx) = debruijn_generate(2, 20).unwrap();
        assert_eq!(seq.n(), 1 << 20);
        for m in [1usize, 12345, 500_000, 1 << 20] {
            assert_eq!(idx.decode(&seq.window(m, 20)).unwrap(), m);
        }
    }

    #[test]
    fn window_index_round_trip() {
        let a = poly("11001");
        let seq = lfsr_generate(&a, &[1, 0, 0, 0]).unwrap();
        let idx = WindowIndex::build(&seq, 6).unwrap();
        for m in 1..=seq.n() {
            assert_eq!(idx.decode(&seq.window(m, 6)), Some(m));
        }
        assert_eq!(idx.decode(&[0, 0, 0, 0, 0, 0]), None);
    }

    #[test]
    fn sequence_file_round_trip() {
        let (seq, _) = debruijn_generate(3, 2).unwrap();
        let file = SequenceFile::from(&seq);
        let json = serde_json::to_string(&file).unwrap();
        assert!(json.starts_with(r#"{"alphabet":3,"n":9,"symbols":"#));
        let back: SequenceFile = serde_json::from_str(&json).unwrap();
        assert_eq!(back.into_sequence().unwrap(), seq);
    }
}
