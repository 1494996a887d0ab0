//! Two-user multiple-access phase detection schemes.
//!
//! Two constructions are provided:
//!
//! - mod-2 adder schemes from two distinct primitive polynomials, detected
//!   by syndrome decoding against the parity-check structure of the first
//!   sequence's induced linear code ([`build_mod2_two_primitives`],
//!   [`detect_mod2_syndrome`]),
//! - rate splitting: user 1 is split into two virtual layers `u` and `v`
//!   combined through coprime-length residue indexing, and the three layer
//!   sequences are detected successively ([`build_rate_splitting`]).

mod mod2;
mod split;

pub use mod2::{
    build_mod2_two_primitives, detect_mod2_syndrome, verify_unique_sum_decomposition,
    SyndromeDetector,
};
pub use split::{
    build_rate_splitting, crt_combine, CrtMap, SplitLayerParams, SplitSpec, SuccessiveDetector,
    SymbolMap,
};

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::seqgen::{CyclicSequence, SequenceFile};
use crate::{Error, Result};

/// A two-user scheme: one sequence per user, a shared window length, and a
/// joint detector.
pub struct MacScheme {
    seq1: CyclicSequence,
    seq2: CyclicSequence,
    k: usize,
    detector: MacDetectorConfig,
}

pub enum MacDetectorConfig {
    Syndrome(SyndromeDetector),
    Successive(SuccessiveDetector),
}

/// Outcome of joint detection: both phases, or the error symbol.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MacDetection {
    Phases(usize, usize),
    Error,
}

impl MacScheme {
    pub(crate) fn new(
        seq1: CyclicSequence,
        seq2: CyclicSequence,
        k: usize,
        detector: MacDetectorConfig,
    ) -> Result<Self> {
        if k < 1 {
            return Err(Error::domain("window length must be positive"));
        }
        Ok(MacScheme {
            seq1,
            seq2,
            k,
            detector,
        })
    }

    pub fn seq1(&self) -> &CyclicSequence {
        &self.seq1
    }

    pub fn seq2(&self) -> &CyclicSequence {
        &self.seq2
    }

    pub fn n1(&self) -> usize {
        self.seq1.n()
    }

    pub fn n2(&self) -> usize {
        self.seq2.n()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn rate1(&self) -> f64 {
        (self.n1() as f64).log2() / self.k as f64
    }

    pub fn rate2(&self) -> f64 {
        (self.n2() as f64).log2() / self.k as f64
    }

    pub fn detector(&self) -> &MacDetectorConfig {
        &self.detector
    }

    /// The window user 1 transmits at phase `m1`.
    pub fn window1(&self, m1: usize) -> Vec<u16> {
        self.seq1.window(m1, self.k)
    }

    /// The window user 2 transmits at phase `m2`.
    pub fn window2(&self, m2: usize) -> Vec<u16> {
        self.seq2.window(m2, self.k)
    }

    /// Runs the scheme's detector on one observed window.
    pub fn detect(&self, y: &[u16]) -> MacDetection {
        if y.len() != self.k {
            return MacDetection::Error;
        }
        match &self.detector {
            MacDetectorConfig::Syndrome(det) => detect_mod2_syndrome(self, det, y),
            MacDetectorConfig::Successive(det) => split::detect_successive(self, det, y),
        }
    }

    // -- persistence ---------------------------------------------------------

    pub fn to_file(&self) -> MacSchemeFile {
        let (detector, syndrome, successive) = match &self.detector {
            MacDetectorConfig::Syndrome(det) => ("syndrome".to_string(), Some(det.to_spec()), None),
            MacDetectorConfig::Successive(det) => {
                ("successive".to_string(), None, Some(det.to_spec()))
            }
        };
        MacSchemeFile {
            seq1: SequenceFile::from(&self.seq1),
            seq2: SequenceFile::from(&self.seq2),
            k: self.k,
            detector,
            syndrome,
            successive,
        }
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let json = serde_json::to_string_pretty(&self.to_file())?;
        fs::write(path, json)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let file: MacSchemeFile = serde_json::from_str(&fs::read_to_string(path)?)?;
        file.into_scheme()
    }
}

/// Regenerates both user sequences from the detector's parameters and
/// compares them with the stored ones, catching silent corruption of a
/// scheme file.
pub fn verify_construction(scheme: &MacScheme) -> Result<bool> {
    match scheme.detector() {
        MacDetectorConfig::Syndrome(det) => {
            let spec = det.to_spec();
            let a1 = crate::gf2::Gf2Poly::parse_spec(&spec.poly1)?;
            let a2 = crate::gf2::Gf2Poly::parse_spec(&spec.poly2)?;
            let regen = |a: &crate::gf2::Gf2Poly| -> Result<CyclicSequence> {
                let r = a.degree().unwrap_or(0);
                let mut init = vec![0u8; r];
                init[0] = 1;
                crate::seqgen::lfsr_generate(a, &init)
            };
            Ok(regen(&a1)?.symbols() == scheme.seq1().symbols()
                && regen(&a2)?.symbols() == scheme.seq2().symbols())
        }
        MacDetectorConfig::Successive(det) => {
            let (seq1, seq2) = det.expected_sequences()?;
            Ok(seq1.symbols() == scheme.seq1().symbols()
                && seq2.symbols() == scheme.seq2().symbols())
        }
    }
}

/// On-disk JSON form of a two-user scheme.
#[derive(Serialize, Deserialize)]
pub struct MacSchemeFile {
    pub seq1: SequenceFile,
    pub seq2: SequenceFile,
    pub k: usize,
    pub detector: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub syndrome: Option<mod2::SyndromeSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub successive: Option<split::SuccessiveSpec>,
}

impl MacSchemeFile {
    pub fn into_scheme(self) -> Result<MacScheme> {
        let seq1 = self.seq1.into_sequence()?;
        let seq2 = self.seq2.into_sequence()?;
        let detector = match self.detector.as_str() {
            "syndrome" => {
                let spec = self
                    .syndrome
                    .ok_or_else(|| Error::format("missing syndrome configuration"))?;
                MacDetectorConfig::Syndrome(SyndromeDetector::rebuild(&spec, &seq1, &seq2, self.k)?)
            }
            "successive" => {
                let spec = self
                    .successive
                    .ok_or_else(|| Error::format("missing successive configuration"))?;
                MacDetectorConfig::Successive(SuccessiveDetector::rebuild(&spec)?)
            }
            other => return Err(Error::format(format!("unknown detector '{other}'"))),
        };
        MacScheme::new(seq1, seq2, self.k, detector)
    }
}
