//! Point-to-point phase detection schemes.
//!
//! A scheme pairs a cyclic sequence with a window length `k` and a
//! detector. Three families are provided:
//!
//! - minimum-distance schemes over LFSR maximal-length sequences, for
//!   adversarial bit flips ([`build_adversarial`]),
//! - the concatenated construction — de Bruijn symbols protected by a block
//!   channel code with a periodic synchronization word — for probabilistic
//!   noise ([`build_concat`]),
//! - the zero-error construction — guarded zero-error codewords laid out
//!   along a de Bruijn sequence with a never-confusable synchronization
//!   block ([`build_zero_error`]),
//!
//! plus a randomized search that draws uniform sequences until one meets a
//! distance target ([`lll_random_search`]).

mod adversarial;
mod concat;
mod zero_error;

pub use adversarial::{build_adversarial, lll_random_search, scheme_min_distance, LllSearchOutcome};
pub use concat::{build_concat, detect_concat, ConcatDetector, ConcatParams, InnerKind};
pub use zero_error::{
    build_zero_error, detect_zero_error, sync_never_confusable, verify_zero_error_exhaustive,
    verify_zero_error_sampled, ZeroErrorDetector, ZeroErrorParams,
};

pub(crate) use concat::{build_layer, detect_generic, layer_from_parts, BlockDecode};

use std::collections::HashSet;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::codes::parse_code_spec;
use crate::gf2::Gf2Poly;
use crate::seqgen::{lfsr_generate, Construction, CyclicSequence, SequenceFile};
use crate::{DetectionResult, Error, Result};

/// A point-to-point scheme: sequence, window length, and detector.
pub struct Scheme {
    sequence: CyclicSequence,
    k: usize,
    detector: DetectorConfig,
}

/// Detector configuration, one variant per scheme family.
pub enum DetectorConfig {
    /// Nearest window by Hamming distance; ties yield the error symbol.
    MinDistance,
    Concat(ConcatDetector),
    ZeroError(ZeroErrorDetector),
}

impl Scheme {
    pub fn new(sequence: CyclicSequence, k: usize, detector: DetectorConfig) -> Result<Self> {
        if k < 1 || k > sequence.n() {
            return Err(Error::domain(format!(
                "window length {k} outside 1..=n = {}",
                sequence.n()
            )));
        }
        Ok(Scheme {
            sequence,
            k,
            detector,
        })
    }

    /// A scheme over any sequence using the minimum-distance detector.
    pub fn with_min_distance_detector(sequence: CyclicSequence, k: usize) -> Result<Self> {
        Scheme::new(sequence, k, DetectorConfig::MinDistance)
    }

    pub fn sequence(&self) -> &CyclicSequence {
        &self.sequence
    }

    pub fn n(&self) -> usize {
        self.sequence.n()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Rate `log2(n) / k` in bits per symbol.
    pub fn rate(&self) -> f64 {
        (self.n() as f64).log2() / self.k as f64
    }

    pub fn detector(&self) -> &DetectorConfig {
        &self.detector
    }

    /// The transmitted window for phase `m`.
    pub fn window(&self, m: usize) -> Vec<u16> {
        self.sequence.window(m, self.k)
    }

    /// Runs the scheme's detector on one observed window.
    pub fn detect(&self, y: &[u16]) -> DetectionResult {
        if y.len() != self.k {
            return DetectionResult::Error;
        }
        match &self.detector {
            DetectorConfig::MinDistance => self.detect_min_distance(y),
            DetectorConfig::Concat(det) => detect_concat(self, det, y),
            DetectorConfig::ZeroError(det) => detect_zero_error(self, det, y),
        }
    }

    fn detect_min_distance(&self, y: &[u16]) -> DetectionResult {
        let n = self.n();
        let mut best = usize::MAX;
        let mut best_m = 0;
        let mut tied = false;
        for m in 1..=n {
            let d = (0..self.k)
                .filter(|&i| self.sequence.at(m - 1 + i) != y[i])
                .count();
            if d < best {
                best = d;
                best_m = m;
                tied = false;
            } else if d == best {
                tied = true;
            }
        }
        if tied {
            DetectionResult::Error
        } else {
            DetectionResult::Phase(best_m)
        }
    }

    // -- persistence ---------------------------------------------------------

    pub fn to_file(&self) -> SchemeFile {
        let seq = SequenceFile::from(&self.sequence);
        let (detector, sync) = match &self.detector {
            DetectorConfig::MinDistance => (DetectorSpec::MinDistance, Vec::new()),
            DetectorConfig::Concat(det) => (det.to_spec(), det.sync().to_vec()),
            DetectorConfig::ZeroError(det) => (det.to_spec(), det.sync_block()),
        };
        SchemeFile {
            alphabet: seq.alphabet,
            n: seq.n,
            symbols: seq.symbols,
            construction: seq.construction,
            k: self.k,
            detector,
            sync,
        }
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let json = serde_json::to_string_pretty(&self.to_file())?;
        fs::write(path, json)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let file: SchemeFile = serde_json::from_str(&fs::read_to_string(path)?)?;
        file.into_scheme()
    }
}

/// Regenerates whatever the construction metadata pins down and compares
/// it against the stored sequence, catching silent corruption of a scheme
/// file. Returns `None` when the construction is not reproducible from its
/// metadata (e.g. a sequence found by random search).
pub fn verify_construction(scheme: &Scheme) -> Result<Option<bool>> {
    match (scheme.sequence().construction(), scheme.detector()) {
        (_, DetectorConfig::Concat(det)) => {
            let expect = det.expected_symbols()?;
            Ok(Some(expect == scheme.sequence().symbols()))
        }
        (_, DetectorConfig::ZeroError(det)) => {
            let expect = det.expected_symbols()?;
            Ok(Some(expect == scheme.sequence().symbols()))
        }
        (Construction::Lfsr { poly, init }, _) => {
            let a = Gf2Poly::parse_spec(poly)?;
            let init_bits: Vec<u8> = init.chars().map(|c| (c == '1') as u8).collect();
            let expect = lfsr_generate(&a, &init_bits)?;
            Ok(Some(expect.symbols() == scheme.sequence().symbols()))
        }
        (Construction::DeBruijn { order, .. }, _) => {
            let n = scheme.n();
            let q = scheme.sequence().alphabet_size();
            if n != q.pow(*order as u32) {
                return Ok(Some(false));
            }
            let mut seen = HashSet::with_capacity(n);
            for m in 1..=n {
                if !seen.insert(scheme.sequence().window(m, *order)) {
                    return Ok(Some(false));
                }
            }
            Ok(Some(true))
        }
        _ => Ok(None),
    }
}

/// On-disk JSON form of a scheme: the sequence fields followed by the
/// window length, detector configuration, and stored sync word.
#[derive(Serialize, Deserialize)]
pub struct SchemeFile {
    pub alphabet: usize,
    pub n: usize,
    pub symbols: Vec<u16>,
    pub construction: Construction,
    pub k: usize,
    pub detector: DetectorSpec,
    pub sync: Vec<u16>,
}

/// Serialized detector configuration. Derived tables (window indexes) are
/// rebuilt deterministically on load.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum DetectorSpec {
    MinDistance,
    Concat {
        code: String,
        l: usize,
        tau: usize,
        inner: InnerSpec,
    },
    ZeroError {
        r: usize,
        beta: u16,
        gamma: u16,
        vertices: usize,
        edges: Vec<(usize, usize)>,
        codewords: Vec<Vec<u16>>,
        /// Outputs reachable from each input with positive probability.
        support: Vec<Vec<usize>>,
    },
}

/// Serialized inner-sequence choice for the concatenated construction.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum InnerSpec {
    DeBruijn { order: usize },
    Mseq { poly: String },
}

impl SchemeFile {
    pub fn into_scheme(self) -> Result<Scheme> {
        let sequence = SequenceFile {
            alphabet: self.alphabet,
            n: self.n,
            symbols: self.symbols,
            construction: self.construction,
        }
        .into_sequence()?;
        let detector = match self.detector {
            DetectorSpec::MinDistance => DetectorConfig::MinDistance,
            DetectorSpec::Concat {
                code,
                l,
                tau,
                inner,
            } => {
                let code = parse_code_spec(&code)?;
                let inner = match inner {
                    InnerSpec::DeBruijn { order } => InnerKind::DeBruijn { order },
                    InnerSpec::Mseq { poly } => InnerKind::MSeq(Gf2Poly::parse_spec(&poly)?),
                };
                DetectorConfig::Concat(ConcatDetector::rebuild(code, l, tau, inner, self.sync)?)
            }
            DetectorSpec::ZeroError {
                r,
                beta,
                gamma,
                vertices,
                edges,
                codewords,
                support,
            } => DetectorConfig::ZeroError(ZeroErrorDetector::rebuild(
                r, beta, gamma, vertices, &edges, codewords, &support,
            )?),
        };
        Scheme::new(sequence, self.k, detector)
    }
}
