//! Phase detection sequences: a cyclic length-`n` sequence together with a
//! detector that recovers the start position (the *phase*) of any length-`k`
//! contiguous window from a noisy observation of that window.
//!
//! The crate provides:
//!
//! - [`gf2`] — exact arithmetic on polynomials over GF(2) (irreducibility,
//!   multiplicative order, primitivity),
//! - [`seqgen`] — LFSR maximal-length sequences, cycle decompositions, and
//!   de Bruijn sequences with indexed window decoding,
//! - [`channels`] — noise models: DMCs, adversarial bit flips, two-user
//!   multiple-access channels, and confusion graphs,
//! - [`codes`] — pluggable block channel codes and zero-error codes
//!   (independent sets in strong graph powers),
//! - [`p2p`] — point-to-point scheme families: minimum-distance LFSR
//!   schemes, the concatenated probabilistic construction, the zero-error
//!   construction, and randomized search,
//! - [`mac`] — multiple-access schemes: CRT rate splitting with successive
//!   detection and mod-2 constructions with syndrome detection,
//! - [`bounds`] — entropy, existence bounds, Krawtchouk-based feasibility
//!   tests, channel capacity, and MAC rate-region tests.
//!
//! Phases are 1-based throughout: a phase `m` ranges over `1..=n` and
//! `window(m, k)` reads `k` symbols cyclically starting at position `m`.
//! All randomness flows through explicit seeded generators, so every
//! simulation is reproducible from its seed.

pub mod bounds;
pub mod channels;
pub mod codes;
pub mod gf2;
pub mod mac;
pub mod p2p;
pub mod seqgen;

mod error;

pub use error::{Error, Result};

/// Outcome of running a detector on one observed window: the estimated
/// phase, or the dedicated error symbol.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DetectionResult {
    /// Estimated phase in `1..=n`.
    Phase(usize),
    /// The detector declined to decide (the error symbol).
    Error,
}

impl DetectionResult {
    pub fn phase(self) -> Option<usize> {
        match self {
            DetectionResult::Phase(m) => Some(m),
            DetectionResult::Error => None,
        }
    }
}
