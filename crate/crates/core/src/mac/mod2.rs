//! Zero-error schemes for the mod-2 adder from two distinct primitive
//! polynomials, with syndrome detection.
//!
//! User `i` transmits the maximal-length sequence of a primitive polynomial
//! of degree `r_i`. With `k >= r1 + r2` the two induced codebooks intersect
//! trivially, every observed sum decomposes uniquely, and detection is
//! successive cancellation: the syndrome of the sum against user 1's
//! parity-check matrix identifies user 2's window (user 1's windows all lie
//! in the null space), subtracting it exposes user 1's window, and its
//! first `r1` bits index the phase.

use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::gf2::Gf2Poly;
use crate::seqgen::{lfsr_generate, CyclicSequence};
use crate::{Error, Result};

use super::{MacDetection, MacDetectorConfig, MacScheme};

/// Exhaustion ceiling for the unique-sum check.
pub const UNIQUE_SUM_BUDGET: usize = 1 << 24;

/// Runtime state of the syndrome detector.
pub struct SyndromeDetector {
    poly1: Gf2Poly,
    poly2: Gf2Poly,
    k: usize,
    r1: usize,
    /// Rows of the banded parity-check matrix, bit-packed.
    h_rows: Vec<Vec<u64>>,
    /// Syndrome of user 2's window at each phase, to that phase.
    syndrome_table: HashMap<Vec<u64>, u32>,
    /// First `r1` bits of user 1's window at each phase, to that phase.
    state_index: HashMap<u64, u32>,
}

/// Serialized form; all tables rebuild from the polynomials.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SyndromeSpec {
    pub poly1: String,
    pub poly2: String,
}

impl SyndromeDetector {
    pub(crate) fn to_spec(&self) -> SyndromeSpec {
        SyndromeSpec {
            poly1: self.poly1.to_string(),
            poly2: self.poly2.to_string(),
        }
    }

    pub(crate) fn rebuild(
        spec: &SyndromeSpec,
        seq1: &CyclicSequence,
        seq2: &CyclicSequence,
        k: usize,
    ) -> Result<Self> {
        let poly1 = Gf2Poly::parse_spec(&spec.poly1)?;
        let poly2 = Gf2Poly::parse_spec(&spec.poly2)?;
        SyndromeDetector::build(poly1, poly2, seq1, seq2, k)
    }

    fn build(
        poly1: Gf2Poly,
        poly2: Gf2Poly,
        seq1: &CyclicSequence,
        seq2: &CyclicSequence,
        k: usize,
    ) -> Result<Self> {
        let r1 = poly1.degree().unwrap_or(0);
        if r1 == 0 || r1 > 63 {
            return Err(Error::domain("degree of the first polynomial out of range"));
        }
        // Banded parity-check rows: coefficients a_0..a_{r1-1}, then 1, at
        // offsets j..j+r1. Every window of sequence 1 satisfies all rows.
        let words = k.div_ceil(64);
        let coeffs = poly1.low_coeffs();
        let mut h_rows = Vec::with_capacity(k - r1);
        for j in 0..k - r1 {
            let mut row = vec![0u64; words];
            for (i, &c) in coeffs.iter().enumerate() {
                if c == 1 {
                    row[(j + i) / 64] |= 1 << ((j + i) % 64);
                }
            }
            row[(j + r1) / 64] |= 1 << ((j + r1) % 64);
            h_rows.push(row);
        }

        let mut syndrome_table = HashMap::with_capacity(seq2.n());
        for m2 in 1..=seq2.n() {
            let s = syndrome_of(&h_rows, &pack(&seq2.window(m2, k)));
            if s.iter().all(|&w| w == 0) {
                return Err(Error::domain(format!(
                    "window {m2} of sequence 2 lies in sequence 1's code"
                )));
            }
            if syndrome_table.insert(s, m2 as u32).is_some() {
                return Err(Error::domain(
                    "syndrome map is not injective on sequence 2's windows",
                ));
            }
        }

        let mut state_index = HashMap::with_capacity(seq1.n());
        for m1 in 1..=seq1.n() {
            let state = seq1
                .window(m1, r1)
                .iter()
                .enumerate()
                .fold(0u64, |acc, (i, &b)| acc | ((b as u64) << i));
            state_index.insert(state, m1 as u32);
        }

        Ok(SyndromeDetector {
            poly1,
            poly2,
            k,
            r1,
            h_rows,
            syndrome_table,
            state_index,
        })
    }
}

fn pack(bits: &[u16]) -> Vec<u64> {
    let mut packed = vec![0u64; bits.len().div_ceil(64)];
    for (i, &b) in bits.iter().enumerate() {
        if b != 0 {
            packed[i / 64] |= 1 << (i % 64);
        }
    }
    packed
}

fn syndrome_of(h_rows: &[Vec<u64>], packed: &[u64]) -> Vec<u64> {
    let mut syndrome = vec![0u64; h_rows.len().div_ceil(64)];
    for (j, row) in h_rows.iter().enumerate() {
        let parity: u32 = row
            .iter()
            .zip(packed)
            .map(|(a, b)| (a & b).count_ones())
            .sum();
        if parity % 2 == 1 {
            syndrome[j / 64] |= 1 << (j % 64);
        }
    }
    syndrome
}

/// Builds a mod-2 adder scheme from two distinct primitive polynomials with
/// `r1 + r2 <= k <= min(n1, n2)`.
pub fn build_mod2_two_primitives(a1: &Gf2Poly, a2: &Gf2Poly, k: usize) -> Result<MacScheme> {
    if a1 == a2 {
        return Err(Error::domain("the two polynomials must be distinct"));
    }
    if !a1.is_primitive() || !a2.is_primitive() {
        return Err(Error::domain("both polynomials must be primitive"));
    }
    let r1 = a1.degree().unwrap();
    let r2 = a2.degree().unwrap();
    if k < r1 + r2 {
        return Err(Error::domain(format!(
            "window length {k} below r1 + r2 = {}",
            r1 + r2
        )));
    }
    let mut init1 = vec![0u8; r1];
    init1[0] = 1;
    let mut init2 = vec![0u8; r2];
    init2[0] = 1;
    let seq1 = lfsr_generate(a1, &init1)?;
    let seq2 = lfsr_generate(a2, &init2)?;
    if k > seq1.n() || k > seq2.n() {
        return Err(Error::domain(format!(
            "window length {k} exceeds a sequence length ({}, {})",
            seq1.n(),
            seq2.n()
        )));
    }
    let detector = SyndromeDetector::build(a1.clone(), a2.clone(), &seq1, &seq2, k)?;
    MacScheme::new(seq1, seq2, k, MacDetectorConfig::Syndrome(detector))
}

/// Syndrome detection on an observed mod-2 sum.
///
/// Computes `s = H y`; a zero syndrome is ambiguous (the other user's
/// contribution vanished, which no valid observation produces) and yields
/// the error symbol, as does any syndrome outside the precomputed table.
/// The recovered window for user 1 is checked in full before the phases
/// are declared.
pub fn detect_mod2_syndrome(
    scheme: &MacScheme,
    det: &SyndromeDetector,
    y: &[u16],
) -> MacDetection {
    if y.len() != det.k || y.iter().any(|&b| b > 1) {
        return MacDetection::Error;
    }
    let packed_y = pack(y);
    let s = syndrome_of(&det.h_rows, &packed_y);
    if s.iter().all(|&w| w == 0) {
        return MacDetection::Error;
    }
    let m2 = match det.syndrome_table.get(&s) {
        Some(&m2) => m2 as usize,
        None => return MacDetection::Error,
    };
    let w2 = scheme.window2(m2);
    let w1: Vec<u16> = y.iter().zip(&w2).map(|(&a, &b)| a ^ b).collect();
    let state = w1[..det.r1]
        .iter()
        .enumerate()
        .fold(0u64, |acc, (i, &b)| acc | ((b as u64) << i));
    let m1 = match det.state_index.get(&state) {
        Some(&m1) => m1 as usize,
        None => return MacDetection::Error,
    };
    if scheme.window1(m1) != w1 {
        return MacDetection::Error;
    }
    MacDetection::Phases(m1, m2)
}

/// Exhaustively checks that all `n1 * n2` pairwise window sums are
/// distinct, i.e. that every observable sum decomposes uniquely.
pub fn verify_unique_sum_decomposition(scheme: &MacScheme) -> Result<bool> {
    let n1 = scheme.n1();
    let n2 = scheme.n2();
    if n1.saturating_mul(n2) > UNIQUE_SUM_BUDGET {
        return Err(Error::resource(format!(
            "{} pairs exceed the exhaustion budget {UNIQUE_SUM_BUDGET}",
            n1 * n2
        )));
    }
    let w1: Vec<Vec<u64>> = (1..=n1).map(|m| pack(&scheme.window1(m))).collect();
    let w2: Vec<Vec<u64>> = (1..=n2).map(|m| pack(&scheme.window2(m))).collect();
    let mut seen = HashSet::with_capacity(n1 * n2);
    for a in &w1 {
        for b in &w2 {
            let sum: Vec<u64> = a.iter().zip(b).map(|(x, y)| x ^ y).collect();
            if !seen.insert(sum) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(s: &str) -> Gf2Poly {
        Gf2Poly::from_bit_str(s).unwrap()
    }

    fn small_scheme() -> MacScheme {
        build_mod2_two_primitives(&poly("1101"), &poly("11001"), 7).unwrap()
    }

    #[test]
    fn dimensions_and_rates() {
        let s = small_scheme();
        assert_eq!((s.n1(), s.n2(), s.k()), (7, 15, 7));
        assert!((s.rate1() - 7f64.log2() / 7.0).abs() < 1e-12);
        assert!((s.rate2() - 15f64.log2() / 7.0).abs() < 1e-12);
    }

    #[test]
    fn all_105_sums_distinct() {
        assert!(verify_unique_sum_decomposition(&small_scheme()).unwrap());
    }

    #[test]
    fn all_105_pairs_decode() {
        let s = small_scheme();
        for m1 in 1..=s.n1() {
            let w1 = s.window1(m1);
            for m2 in 1..=s.n2() {
                let y: Vec<u16> = w1
                    .iter()
                    .zip(&s.window2(m2))
                    .map(|(&a, &b)| a ^ b)
                    .collect();
                assert_eq!(s.detect(&y), MacDetection::Phases(m1, m2));
            }
        }
    }

    #[test]
    fn swapped_roles_also_work() {
        let s = build_mod2_two_primitives(&poly("11001"), &poly("1101"), 7).unwrap();
        assert_eq!((s.n1(), s.n2()), (15, 7));
        for m1 in [1usize, 8, 15] {
            for m2 in [1usize, 4, 7] {
                let y: Vec<u16> = s
                    .window1(m1)
                    .iter()
                    .zip(&s.window2(m2))
                    .map(|(&a, &b)| a ^ b)
                    .collect();
                assert_eq!(s.detect(&y), MacDetection::Phases(m1, m2));
            }
        }
    }

    #[test]
    fn lone_user_window_is_rejected() {
        // y = window of user 1 alone means user 2 contributed nothing,
        // which is not a valid observation: zero syndrome
        let s = small_scheme();
        assert_eq!(s.detect(&s.window1(3)), MacDetection::Error);
    }

    #[test]
    fn user1_windows_lie_in_the_null_space() {
        let s = small_scheme();
        let det = match s.detector() {
            MacDetectorConfig::Syndrome(d) => d,
            _ => unreachable!(),
        };
        for m1 in 1..=s.n1() {
            let syn = syndrome_of(&det.h_rows, &pack(&s.window1(m1)));
            assert!(syn.iter().all(|&w| w == 0));
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(build_mod2_two_primitives(&poly("1101"), &poly("1101"), 7).is_err());
        assert!(build_mod2_two_primitives(&poly("1101"), &poly("11001"), 6).is_err());
        // z^4+z^3+z^2+z+1 is irreducible but not primitive
        assert!(build_mod2_two_primitives(&poly("1101"), &poly("11111"), 7).is_err());
    }

    #[test]
    fn codebooks_are_disjoint() {
        // C1 and C2 share no window for k >= r1 + r2
        let s = small_scheme();
        let set1: HashSet<Vec<u16>> = (1..=s.n1()).map(|m| s.window1(m)).collect();
        for m2 in 1..=s.n2() {
            assert!(!set1.contains(&s.window2(m2)));
        }
    }

    #[test]
    fn syndrome_injective_across_degree_pairs() {
        // the builder rejects any syndrome collision, so a successful
        // build certifies injectivity; sweep degree pairs at k = r1 + r2
        use crate::gf2::primitive_polys;
        for (r1, r2) in [(3usize, 4usize), (4, 5), (5, 6), (6, 7), (10, 10)] {
            let a1 = primitive_polys(r1).into_iter().next().unwrap();
            let a2 = primitive_polys(r2).into_iter().last().unwrap();
            assert_ne!(a1, a2);
            let s = build_mod2_two_primitives(&a1, &a2, r1 + r2).unwrap();
            assert_eq!(s.n1(), (1 << r1) - 1);
            assert_eq!(s.n2(), (1 << r2) - 1);
        }
    }

    #[test]
    fn three_user_unique_decomposition() {
        // three distinct primitive polynomials, k = r1+r2+r3: all triple
        // sums distinct
        let polys = [poly("1101"), poly("11001"), poly("101001")];
        let k = 3 + 4 + 5;
        let seqs: Vec<CyclicSequence> = polys
            .iter()
            .map(|p| {
                let r = p.degree().unwrap();
                let mut init = vec![0u8; r];
                init[0] = 1;
                lfsr_generate(p, &init).unwrap()
            })
            .collect();
        let mut seen = HashSet::new();
        for m1 in 1..=seqs[0].n() {
            let w1 = seqs[0].window(m1, k);
            for m2 in 1..=seqs[1].n() {
                let w2 = seqs[1].window(m2, k);
                for m3 in 1..=seqs[2].n() {
                    let w3 = seqs[2].window(m3, k);
                    let sum: Vec<u16> = (0..k).map(|i| w1[i] ^ w2[i] ^ w3[i]).collect();
                    assert!(seen.insert(sum), "collision at ({m1},{m2},{m3})");
                }
            }
        }
        assert_eq!(seen.len(), 7 * 15 * 31);
    }

    #[test]
    fn scheme_json_round_trip() {
        let s = small_scheme();
        let json = serde_json::to_string(&s.to_file()).unwrap();
        let back: crate::mac::MacSchemeFile = serde_json::from_str(&json).unwrap();
        let restored = back.into_scheme().unwrap();
        for (m1, m2) in [(1usize, 1usize), (5, 9), (7, 15)] {
            let y: Vec<u16> = restored
                .window1(m1)
                .iter()
                .zip(&restored.window2(m2))
                .map(|(&a, &b)| a ^ b)
                .collect();
            assert_eq!(restored.detect(&y), MacDetection::Phases(m1, m2));
        }
    }
}
