//! The concatenated construction for probabilistic noise.
//!
//! An inner position-coded sequence (a binary de Bruijn sequence of order
//! `r = s*l`, or a maximal-length LFSR sequence) is chopped into length-`s`
//! chunks, each encoded into a length-`t` codeword by a block channel code.
//! After every `l` code blocks a synchronization word `b^{3*tau}` is
//! inserted; the detector knows its middle third. The detection window
//!
//! ```text
//! k = l*t + 3*tau + max(t, tau)
//! ```
//!
//! always contains a complete middle sync chunk and at least `l` complete
//! code blocks. Detection locates the sync by maximum-likelihood score over
//! window positions (smallest index on ties), decodes `l` consecutive
//! blocks off the implied block boundary, looks the recovered `l*s` inner
//! bits up in the window index, and converts the block's sequence position
//! back to the phase of the window start.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

use crate::codes::BlockCode;
use crate::gf2::Gf2Poly;
use crate::seqgen::{
    debruijn_generate, lfsr_generate, Construction, CyclicSequence, DeBruijnIndex, WindowIndex,
};
use crate::{DetectionResult, Error, Result};

use super::{DetectorConfig, DetectorSpec, InnerSpec, Scheme};

/// Which position-coded sequence feeds the construction.
pub enum InnerKind {
    /// Binary de Bruijn sequence of order `r = s*l`, length `2^r`.
    DeBruijn { order: usize },
    /// Maximal-length sequence of a primitive polynomial, length `2^r - 1`.
    /// Odd lengths come from this variant, which matters when two
    /// constructed sequences must have coprime lengths.
    MSeq(Gf2Poly),
}

/// Parameters of the concatenated construction.
pub struct ConcatParams {
    /// The block channel code (message bits `s`, length `t`).
    pub code: Box<dyn BlockCode>,
    /// Code blocks per synchronization period (`l`).
    pub blocks_per_sync: usize,
    /// Sync chunk length `tau`; the full sync word is `3*tau` symbols.
    pub sync_chunk: usize,
    /// Inner sequence choice.
    pub inner: InnerKind,
}

impl ConcatParams {
    /// The standard parameterization: de Bruijn inner sequence of order
    /// `s * l`.
    pub fn new(code: Box<dyn BlockCode>, blocks_per_sync: usize, sync_chunk: usize) -> Self {
        let order = code.message_bits() * blocks_per_sync;
        ConcatParams {
            code,
            blocks_per_sync,
            sync_chunk,
            inner: InnerKind::DeBruijn { order },
        }
    }
}

// ---------------------------------------------------------------------------
// Layout
// ---------------------------------------------------------------------------

/// Geometry of an assembled sequence: `blocks` code blocks of length `t`,
/// a `3*tau` sync word after every block whose chunk index is divisible by
/// `l` (so block 0 is followed by the first sync).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct ConcatLayout {
    pub t: usize,
    pub tau: usize,
    pub l: usize,
    pub blocks: usize,
}

impl ConcatLayout {
    pub fn sync_len(&self) -> usize {
        3 * self.tau
    }

    pub fn period(&self) -> usize {
        self.l * self.t + self.sync_len()
    }

    pub fn n(&self) -> usize {
        self.blocks * self.t + (self.blocks / self.l) * self.sync_len()
    }

    pub fn window_len(&self) -> usize {
        self.l * self.t + self.sync_len() + self.t.max(self.tau)
    }

    /// 0-based sequence offset of the block with chunk index `beta`.
    pub fn block_start(&self, beta: usize) -> usize {
        beta * self.t + beta.div_ceil(self.l) * self.sync_len()
    }

    /// Complete code blocks inside a length-`k` window, given the window
    /// offset of any sync word start (possibly negative or past the end).
    /// Returns `(window_offset, index_within_group)` pairs in window order;
    /// consecutive entries correspond to consecutive chunk indices.
    pub fn complete_blocks(&self, sync_anchor: isize, k: usize) -> Vec<(usize, usize)> {
        let period = self.period() as isize;
        let mut out = Vec::new();
        let span = k as isize / period + 2;
        for j in -span..=span {
            let sync_start = sync_anchor + j * period;
            for i in 0..self.l {
                let start = sync_start + self.sync_len() as isize + (i * self.t) as isize;
                if start >= 0 && start + self.t as isize <= k as isize {
                    out.push((start as usize, i));
                }
            }
        }
        out.sort_unstable();
        out
    }
}

// ---------------------------------------------------------------------------
// Detector state
// ---------------------------------------------------------------------------

enum InnerIndex {
    DeBruijn { order: usize, index: DeBruijnIndex },
    MSeq { poly: Gf2Poly, index: WindowIndex },
}

/// Runtime state of the concatenated detector.
pub struct ConcatDetector {
    code: Box<dyn BlockCode>,
    layout: ConcatLayout,
    sync: Vec<u16>,
    inner: InnerIndex,
}

impl ConcatDetector {
    pub(crate) fn layout(&self) -> &ConcatLayout {
        &self.layout
    }

    pub fn sync(&self) -> &[u16] {
        &self.sync
    }

    /// Middle third of the sync word, the part the detector matches on.
    pub fn sync_mid(&self) -> &[u16] {
        &self.sync[self.layout.tau..2 * self.layout.tau]
    }

    pub fn code(&self) -> &dyn BlockCode {
        self.code.as_ref()
    }

    pub(crate) fn to_spec(&self) -> DetectorSpec {
        DetectorSpec::Concat {
            code: self.code.spec(),
            l: self.layout.l,
            tau: self.layout.tau,
            inner: self.inner_spec(),
        }
    }

    pub(crate) fn inner_spec(&self) -> InnerSpec {
        match &self.inner {
            InnerIndex::DeBruijn { order, .. } => InnerSpec::DeBruijn { order: *order },
            InnerIndex::MSeq { poly, .. } => InnerSpec::Mseq {
                poly: poly.to_string(),
            },
        }
    }

    /// Reconstructs detector state from serialized parameters; the inner
    /// sequence and its index are regenerated deterministically.
    pub(crate) fn rebuild(
        code: Box<dyn BlockCode>,
        l: usize,
        tau: usize,
        inner: InnerKind,
        sync: Vec<u16>,
    ) -> Result<Self> {
        if sync.len() != 3 * tau {
            return Err(Error::format(format!(
                "sync word has {} symbols, expected {}",
                sync.len(),
                3 * tau
            )));
        }
        let (inner_seq, inner_index) = build_inner(&inner, code.message_bits(), l)?;
        let layout = ConcatLayout {
            t: code.length(),
            tau,
            l,
            blocks: inner_seq.n() / code.message_bits(),
        };
        Ok(ConcatDetector {
            code,
            layout,
            sync,
            inner: inner_index,
        })
    }

    /// Window length the layout implies.
    pub fn window_len(&self) -> usize {
        self.layout.window_len()
    }

    /// Reassembles the sequence this detector's parameters imply.
    pub(crate) fn expected_symbols(&self) -> Result<Vec<u16>> {
        let inner = match &self.inner {
            InnerIndex::DeBruijn { order, .. } => InnerKind::DeBruijn { order: *order },
            InnerIndex::MSeq { poly, .. } => InnerKind::MSeq(poly.clone()),
        };
        let (inner_seq, _) = build_inner(&inner, self.code.message_bits(), self.layout.l)?;
        Ok(assemble(
            &inner_seq,
            self.code.as_ref(),
            self.layout.l,
            &self.sync,
        ))
    }

    pub(crate) fn decode_inner(&self, bits: &[u16]) -> Option<usize> {
        match &self.inner {
            InnerIndex::DeBruijn { index, .. } => index.decode(bits).ok().map(|m| m - 1),
            InnerIndex::MSeq { index, .. } => index.decode(bits).map(|m| m - 1),
        }
    }
}

fn build_inner(kind: &InnerKind, s: usize, l: usize) -> Result<(CyclicSequence, InnerIndex)> {
    match kind {
        InnerKind::DeBruijn { order } => {
            if *order != s * l {
                return Err(Error::domain(format!(
                    "de Bruijn order {order} must equal s*l = {}",
                    s * l
                )));
            }
            if *order > 24 {
                return Err(Error::resource("inner de Bruijn order limited to 24"));
            }
            let (seq, index) = debruijn_generate(2, *order)?;
            Ok((
                seq,
                InnerIndex::DeBruijn {
                    order: *order,
                    index,
                },
            ))
        }
        InnerKind::MSeq(poly) => {
            let r = poly
                .degree()
                .ok_or_else(|| Error::domain("zero polynomial"))?;
            if l * s < r {
                return Err(Error::domain(format!(
                    "decoded run l*s = {} shorter than the polynomial degree {r}",
                    l * s
                )));
            }
            let mut init = vec![0u8; r];
            init[0] = 1;
            let seq = lfsr_generate(poly, &init)?;
            let index = WindowIndex::build(&seq, l * s)?;
            Ok((
                seq,
                InnerIndex::MSeq {
                    poly: poly.clone(),
                    index,
                },
            ))
        }
    }
}

// ---------------------------------------------------------------------------
// Construction
// ---------------------------------------------------------------------------

const SYNC_DRAW_ATTEMPTS: usize = 64;

fn windows_distinct(symbols: &[u16], k: usize) -> bool {
    let n = symbols.len();
    let words = k.div_ceil(64);
    let mut seen = std::collections::HashSet::with_capacity(n);
    for m0 in 0..n {
        let mut packed = vec![0u64; words];
        for i in 0..k {
            if symbols[(m0 + i) % n] != 0 {
                packed[i / 64] |= 1 << (i % 64);
            }
        }
        if !seen.insert(packed) {
            return false;
        }
    }
    true
}

fn assemble(inner_seq: &CyclicSequence, code: &dyn BlockCode, l: usize, sync: &[u16]) -> Vec<u16> {
    let s = code.message_bits();
    let blocks = inner_seq.n() / s;
    let mut symbols = Vec::new();
    for beta in 0..blocks {
        let msg: Vec<u8> = (0..s).map(|i| inner_seq.at(beta * s + i) as u8).collect();
        symbols.extend(code.encode(&msg).iter().map(|&b| b as u16));
        if beta % l == 0 {
            symbols.extend_from_slice(sync);
        }
    }
    symbols
}

/// Builds the sequence and detector for one concatenated layer; the sync
/// symbols are drawn i.i.d. from `sync_dist` (an arbitrary Bernoulli) and
/// redrawn until every window of the assembled sequence is distinct, since
/// a collision would make the colliding phases undetectable even without
/// noise. Most draws are fine.
pub(crate) fn build_layer(
    params: ConcatParams,
    sync_dist: [f64; 2],
    seed: u64,
) -> Result<(CyclicSequence, ConcatDetector)> {
    let s = params.code.message_bits();
    let t = params.code.length();
    let l = params.blocks_per_sync;
    let tau = params.sync_chunk;
    if s == 0 || t == 0 || l == 0 || tau == 0 {
        return Err(Error::domain("all construction parameters must be positive"));
    }
    let (inner_seq, inner_index) = build_inner(&params.inner, s, l)?;
    let inner_len = inner_seq.n();
    if inner_len % s != 0 {
        return Err(Error::domain(format!(
            "message length {s} does not divide the inner sequence length {inner_len}"
        )));
    }
    let blocks = inner_len / s;
    if blocks % l != 0 {
        return Err(Error::domain(format!(
            "blocks per sync {l} does not divide the block count {blocks}"
        )));
    }
    let layout = ConcatLayout { t, tau, l, blocks };
    let k = layout.window_len();
    if k > layout.n() {
        return Err(Error::domain(format!(
            "window length {k} exceeds sequence length {}",
            layout.n()
        )));
    }

    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut chosen = None;
    for _ in 0..SYNC_DRAW_ATTEMPTS {
        let sync: Vec<u16> = (0..3 * tau)
            .map(|_| (rng.random::<f64>() >= sync_dist[0]) as u16)
            .collect();
        let symbols = assemble(&inner_seq, params.code.as_ref(), l, &sync);
        debug_assert_eq!(symbols.len(), layout.n());
        if windows_distinct(&symbols, k) {
            chosen = Some((sync, symbols));
            break;
        }
    }
    let (sync, symbols) = chosen.ok_or_else(|| {
        Error::domain(format!(
            "no collision-free sync word found in {SYNC_DRAW_ATTEMPTS} draws; \
             parameters leave too little sequence diversity"
        ))
    })?;

    let inner_name = match &params.inner {
        InnerKind::DeBruijn { order } => format!("debruijn:{order}"),
        InnerKind::MSeq(p) => format!("mseq:{p}"),
    };
    let sequence = CyclicSequence::new(
        2,
        symbols,
        Construction::Concat {
            code: params.code.spec(),
            l,
            tau,
            inner: inner_name,
        },
    )?;
    let detector = ConcatDetector {
        code: params.code,
        layout,
        sync,
        inner: inner_index,
    };
    Ok((sequence, detector))
}

/// Rebuilds a layer from stored parameters and its stored sync word.
pub(crate) fn layer_from_parts(
    code: Box<dyn BlockCode>,
    l: usize,
    tau: usize,
    inner: InnerKind,
    sync: Vec<u16>,
) -> Result<(CyclicSequence, ConcatDetector)> {
    if sync.len() != 3 * tau {
        return Err(Error::format(format!(
            "sync word has {} symbols, expected {}",
            sync.len(),
            3 * tau
        )));
    }
    let (inner_seq, _) = build_inner(&inner, code.message_bits(), l)?;
    let symbols = assemble(&inner_seq, code.as_ref(), l, &sync);
    let inner_name = match &inner {
        InnerKind::DeBruijn { order } => format!("debruijn:{order}"),
        InnerKind::MSeq(p) => format!("mseq:{p}"),
    };
    let sequence = CyclicSequence::new(
        2,
        symbols,
        Construction::Concat {
            code: code.spec(),
            l,
            tau,
            inner: inner_name,
        },
    )?;
    let detector = ConcatDetector::rebuild(code, l, tau, inner, sync)?;
    Ok((sequence, detector))
}

/// Builds a concatenated scheme with a uniformly drawn sync word.
///
/// The inner sequence must chop into an integral number of chunks and
/// groups: `s` must divide the inner length and `l` the block count,
/// otherwise the assembled length would not be an integer and the call
/// fails with a domain error.
pub fn build_concat(params: ConcatParams, seed: u64) -> Result<Scheme> {
    let (sequence, detector) = build_layer(params, [0.5, 0.5], seed)?;
    let k = detector.layout.window_len();
    Scheme::new(sequence, k, DetectorConfig::Concat(detector))
}

// ---------------------------------------------------------------------------
// Detection
// ---------------------------------------------------------------------------

/// Block decoding policy for the generic detector.
pub(crate) enum BlockDecode<'a> {
    /// Hard-decision decoding through the code's own decoder (binary
    /// observations).
    Hard(&'a dyn BlockCode),
    /// Maximum-likelihood over the codeword list with a per-position
    /// symbol score (ties to the smallest message index).
    Ml {
        codewords: &'a [Vec<u8>],
        score: &'a dyn Fn(usize, u16, u16) -> f64,
    },
}

/// Shared detection engine.
///
/// Stage 1 scores every window position of the sync middle chunk; the
/// stored chunk can recur by coincidence inside payload regions, so every
/// position tied at the best score is treated as a sync hypothesis. Stage 2
/// decodes, for each hypothesis, `l` consecutive complete blocks off the
/// implied block boundary and looks the recovered `l*s` inner bits up in
/// the window index. The hypothesis whose implied phase reconstructs the
/// observation best (highest `recon_score`) wins, ties to the smallest
/// sync index; on a noiseless channel the true phase reconstructs exactly
/// and is therefore always returned. Returns the 0-based phase.
pub(crate) fn detect_generic(
    layout: &ConcatLayout,
    s: usize,
    y: &[u16],
    sync_mid: &[u16],
    sync_score: &dyn Fn(usize, u16, u16) -> f64,
    block_decode: &BlockDecode<'_>,
    decode_inner: &dyn Fn(&[u16]) -> Option<usize>,
    recon_score: &dyn Fn(usize) -> f64,
) -> Option<usize> {
    let k = y.len();
    let tau = sync_mid.len();
    if k < tau {
        return None;
    }

    // Stage 1: all window positions tied at the best sync score.
    let mut best_score = f64::NEG_INFINITY;
    let mut tier: Vec<usize> = Vec::new();
    for w in 0..=(k - tau) {
        let mut score = 0.0;
        for (i, &b) in sync_mid.iter().enumerate() {
            score += sync_score(w + i, y[w + i], b);
            if score == f64::NEG_INFINITY {
                break;
            }
        }
        if score > best_score {
            best_score = score;
            tier.clear();
        }
        if score == best_score && score > f64::NEG_INFINITY {
            tier.push(w);
        }
    }

    // Stage 2: complete the pipeline for each hypothesis and keep the one
    // that reconstructs the observation best.
    let mut best: Option<(usize, f64)> = None;
    for &w1 in &tier {
        if let Some(m0) = decode_at_sync(layout, s, y, w1, block_decode, decode_inner) {
            let score = recon_score(m0);
            if best.map_or(true, |(_, b)| score > b) {
                best = Some((m0, score));
            }
        }
    }
    best.map(|(m0, _)| m0)
}

/// Decodes assuming the sync middle chunk starts at window offset `w1`.
fn decode_at_sync(
    layout: &ConcatLayout,
    s: usize,
    y: &[u16],
    w1: usize,
    block_decode: &BlockDecode<'_>,
    decode_inner: &dyn Fn(&[u16]) -> Option<usize>,
) -> Option<usize> {
    let k = y.len();
    let sync_anchor = w1 as isize - layout.tau as isize;
    let blocks = layout.complete_blocks(sync_anchor, k);
    if blocks.len() < layout.l {
        return None;
    }
    let mut bits = Vec::with_capacity(layout.l * s);
    for &(offset, _) in blocks.iter().take(layout.l) {
        let word = &y[offset..offset + layout.t];
        let msg = match block_decode {
            BlockDecode::Hard(code) => {
                let hard: Vec<u8> = word.iter().map(|&v| (v != 0) as u8).collect();
                code.decode(&hard)?
            }
            BlockDecode::Ml { codewords, score } => {
                let mut best = None;
                let mut best_score = f64::NEG_INFINITY;
                for (m, cw) in codewords.iter().enumerate() {
                    let mut sc = 0.0;
                    for (i, &c) in cw.iter().enumerate() {
                        sc += score(offset + i, word[i], c as u16);
                        if sc == f64::NEG_INFINITY {
                            break;
                        }
                    }
                    if sc > best_score {
                        best_score = sc;
                        best = Some(m);
                    }
                }
                if best_score == f64::NEG_INFINITY {
                    return None;
                }
                index_to_bits(best?, s)
            }
        };
        bits.extend(msg.iter().map(|&b| b as u16));
    }

    // Inner lookup; a decoded run that does not align to a chunk boundary
    // exposes a false sync hypothesis.
    let pos0 = decode_inner(&bits)?;
    if pos0 % s != 0 {
        return None;
    }
    let beta0 = (pos0 / s) % layout.blocks;
    let first_offset = blocks[0].0 as isize;
    let n = layout.n() as isize;
    let m0 = (layout.block_start(beta0) as isize - first_offset).rem_euclid(n);
    Some(m0 as usize)
}

pub(crate) fn index_to_bits(m: usize, s: usize) -> Vec<u8> {
    (0..s).map(|i| ((m >> i) & 1) as u8).collect()
}

/// Runs the concatenated detector: sync location by minimum Hamming
/// distance to the stored middle chunk (the ML rule for any symmetric
/// binary channel), block decoding through the code's decoder, tied sync
/// hypotheses resolved by full-window reconstruction distance.
pub fn detect_concat(scheme: &Scheme, det: &ConcatDetector, y: &[u16]) -> DetectionResult {
    if y.len() != scheme.k() || y.iter().any(|&v| v > 1) {
        return DetectionResult::Error;
    }
    let hamming = |_pos: usize, obs: u16, sym: u16| if obs == sym { 0.0 } else { -1.0 };
    let decode = BlockDecode::Hard(det.code());
    let seq = scheme.sequence();
    let recon = |m0: usize| -> f64 {
        -((0..y.len()).filter(|&i| seq.at(m0 + i) != y[i]).count() as f64)
    };
    match detect_generic(
        det.layout(),
        det.code().message_bits(),
        y,
        det.sync_mid(),
        &hamming,
        &decode,
        &|bits| det.decode_inner(bits),
        &recon,
    ) {
        Some(m0) => DetectionResult::Phase(m0 + 1),
        None => DetectionResult::Error,
    }
}
