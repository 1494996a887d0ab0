//! Minimum-distance schemes for adversarial noise, and randomized search
//! for sequences meeting a distance target.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

use crate::gf2::Gf2Poly;
use crate::seqgen::{lfsr_generate, Construction, CyclicSequence};
use crate::{Error, Result};

use super::{DetectorConfig, Scheme};

/// Builds a minimum-distance scheme over the maximal-length sequence of a
/// primitive polynomial. The induced codebook of `k`-windows, together with
/// the all-zero word, is a linear code; its minimum distance governs the
/// adversary weight the scheme corrects.
pub fn build_adversarial(a: &Gf2Poly, k: usize) -> Result<Scheme> {
    if !a.is_primitive() {
        return Err(Error::domain(format!("{a} is not primitive")));
    }
    let r = a.degree().unwrap();
    let n = (1usize << r) - 1;
    if k < r || k > n {
        return Err(Error::domain(format!(
            "window length {k} outside {r}..={n} for degree {r}"
        )));
    }
    let mut init = vec![0u8; r];
    init[0] = 1;
    let seq = lfsr_generate(a, &init)?;
    Scheme::new(seq, k, DetectorConfig::MinDistance)
}

/// Exact minimum Hamming distance over all pairs of the scheme's windows.
pub fn scheme_min_distance(s: &Scheme) -> Result<usize> {
    if !s.sequence().is_binary() {
        return Err(Error::domain("minimum distance requires a binary scheme"));
    }
    if s.n() < 2 {
        return Err(Error::domain("minimum distance needs at least two windows"));
    }
    let packed = s.sequence().packed_windows(s.k());
    let mut best = usize::MAX;
    for i in 0..packed.len() {
        for j in i + 1..packed.len() {
            let d: usize = packed[i]
                .iter()
                .zip(&packed[j])
                .map(|(a, b)| (a ^ b).count_ones() as usize)
                .sum();
            if d < best {
                best = d;
                if best == 0 {
                    return Ok(0);
                }
            }
        }
    }
    Ok(best)
}

/// Outcome of the randomized sequence search.
pub enum LllSearchOutcome {
    Found { scheme: Scheme, attempts: usize },
    Exhausted { attempts: usize },
}

/// Draws length-`n` sequences i.i.d. uniform until one has minimum window
/// distance strictly greater than `d`, or gives up after `max_attempts`.
///
/// Failure is an ordinary value, not an error: for parameter points far
/// outside the existence bound the success probability is negligible.
pub fn lll_random_search(
    k: usize,
    d: usize,
    target_n: usize,
    max_attempts: usize,
    seed: u64,
) -> Result<LllSearchOutcome> {
    if k < 1 || target_n < k || target_n < 2 {
        return Err(Error::domain("need 1 <= k <= n and n >= 2"));
    }
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    for attempt in 1..=max_attempts {
        let bits: Vec<u16> = (0..target_n).map(|_| rng.random_range(0..2u16)).collect();
        let seq = CyclicSequence::new(2, bits, Construction::Random { seed })?;
        let scheme = Scheme::with_min_distance_detector(seq, k)?;
        if scheme_min_distance(&scheme)? > d {
            return Ok(LllSearchOutcome::Found {
                scheme,
                attempts: attempt,
            });
        }
    }
    Ok(LllSearchOutcome::Exhausted {
        attempts: max_attempts,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{error_patterns, transmit_adversarial, AdversarialBudget, AdversaryStrategy};
    use crate::seqgen::debruijn_generate;
    use crate::DetectionResult;

    fn card_trick_scheme() -> Scheme {
        build_adversarial(&Gf2Poly::from_bit_str("111011").unwrap(), 9).unwrap()
    }

    #[test]
    fn card_trick_parameters() {
        let s = card_trick_scheme();
        assert_eq!(s.n(), 31);
        assert_eq!(scheme_min_distance(&s).unwrap(), 3);
        assert!((s.rate() - 31f64.log2() / 9.0).abs() < 1e-12);
    }

    #[test]
    fn min_window_length_gives_distance_one() {
        let s = build_adversarial(&Gf2Poly::from_bit_str("111011").unwrap(), 5).unwrap();
        assert_eq!(scheme_min_distance(&s).unwrap(), 1);
    }

    #[test]
    fn noiseless_detection_round_trip() {
        let s = card_trick_scheme();
        for m in 1..=s.n() {
            assert_eq!(s.detect(&s.window(m)), DetectionResult::Phase(m));
        }
    }

    #[test]
    fn duplicated_windows_have_distance_zero() {
        let seq = CyclicSequence::new(2, vec![0, 1, 0, 1], Construction::Manual).unwrap();
        let s = Scheme::with_min_distance_detector(seq, 2).unwrap();
        assert_eq!(scheme_min_distance(&s).unwrap(), 0);
    }

    #[test]
    fn debruijn_scheme_at_order_has_distance_one() {
        let (seq, _) = debruijn_generate(2, 5).unwrap();
        let s = Scheme::with_min_distance_detector(seq, 5).unwrap();
        assert_eq!(scheme_min_distance(&s).unwrap(), 1);
    }

    #[test]
    fn single_flips_always_corrected_at_distance_3() {
        // every phase, every error pattern of weight <= 1
        let s = card_trick_scheme();
        for m in 1..=s.n() {
            let w = s.window(m);
            for pattern in error_patterns(s.k(), 1).unwrap() {
                let mut y = w.clone();
                for &pos in &pattern {
                    y[pos] ^= 1;
                }
                assert_eq!(s.detect(&y), DetectionResult::Phase(m));
            }
        }
    }

    #[test]
    fn worst_case_adversary_finds_no_single_flip_misdetection() {
        let s = card_trick_scheme();
        let budget = AdversarialBudget::new(1.0 / 9.0).unwrap();
        for m in 1..=s.n() {
            let w = s.window(m);
            let fooled = |y: &[u16]| s.detect(y) != DetectionResult::Phase(m);
            let out =
                transmit_adversarial(&budget, &w, AdversaryStrategy::WorstCaseExhaustive(&fooled))
                    .unwrap();
            // the adversary gave up and passed the window through
            assert_eq!(out, w);
        }
    }

    #[test]
    fn random_search_distinct_windows() {
        // d = 0 only asks for distinct windows
        match lll_random_search(12, 0, 16, 10_000, 1).unwrap() {
            LllSearchOutcome::Found { scheme, .. } => {
                assert!(scheme_min_distance(&scheme).unwrap() >= 1);
                assert_eq!(scheme.n(), 16);
            }
            LllSearchOutcome::Exhausted { .. } => panic!("search should succeed quickly"),
        }
    }

    #[test]
    fn random_search_distance_two() {
        // E[pairs at distance <= 2] ~ 0.18 here, so success comes fast
        match lll_random_search(18, 2, 24, 10_000, 7).unwrap() {
            LllSearchOutcome::Found { scheme, .. } => {
                assert!(scheme_min_distance(&scheme).unwrap() > 2);
            }
            LllSearchOutcome::Exhausted { .. } => panic!("search should succeed"),
        }
    }

    #[test]
    fn random_search_impossible_distance() {
        // d >= k can never be exceeded
        match lll_random_search(8, 8, 12, 50, 3).unwrap() {
            LllSearchOutcome::Exhausted { attempts } => assert_eq!(attempts, 50),
            LllSearchOutcome::Found { .. } => panic!("distance above k is impossible"),
        }
    }
}
