//! The zero-error construction.
//!
//! Each codeword of a zero-error code is sandwiched between two guard
//! symbols `gamma`, the augmented blocks are concatenated along a de Bruijn
//! sequence over the codeword alphabet, and a synchronization block
//! `beta^(t+2)` is inserted after every `r` blocks, where `(beta, gamma)`
//! is a non-edge of the confusion graph. No window of the sequence other
//! than a true sync block is ever confusable with `beta^(t+2)`, so the
//! detector finds the block boundary with zero error; the codewords then
//! decode with zero error by independence, and the phase follows from the
//! layout.
//!
//! When `r` does not divide the de Bruijn length `q^r`, the de Bruijn cycle
//! is traversed `r / gcd(r, q^r)` times so the sync cadence closes up
//! cyclically; the de Bruijn position and the block index modulo `r`
//! then determine the absolute block index by the Chinese remainder
//! theorem. With divisibility the factor is 1 and the layout is the plain
//! one.

use rand::Rng;
use rand::RngCore;

use crate::channels::{confusion_graph, ConfusionGraph, Dmc};
use crate::codes::ZeroErrorCode;
use crate::seqgen::{debruijn_generate, Construction, CyclicSequence, DeBruijnIndex};
use crate::{DetectionResult, Error, Result};

use super::{DetectorConfig, DetectorSpec, Scheme};

/// Parameters of the zero-error construction.
pub struct ZeroErrorParams {
    /// The zero-error code; its graph must contain every edge of the
    /// channel's confusion graph.
    pub code: ZeroErrorCode,
    /// Synchronization symbol.
    pub beta: u16,
    /// Guard symbol; `(beta, gamma)` must be a non-edge of the channel's
    /// confusion graph.
    pub gamma: u16,
    /// de Bruijn order over the codeword alphabet.
    pub debruijn_order: usize,
    /// The channel the scheme will run over; its support sets drive the
    /// exact consistency tests at detection time.
    pub channel: Dmc,
}

/// Runtime state of the zero-error detector.
pub struct ZeroErrorDetector {
    code: ZeroErrorCode,
    beta: u16,
    gamma: u16,
    r: usize,
    repeats: usize,
    index: DeBruijnIndex,
    /// `support[x][y]`: is output `y` reachable from input `x`.
    support: Vec<Vec<bool>>,
}

impl ZeroErrorDetector {
    pub fn code(&self) -> &ZeroErrorCode {
        &self.code
    }

    pub fn beta(&self) -> u16 {
        self.beta
    }

    pub fn gamma(&self) -> u16 {
        self.gamma
    }

    pub fn order(&self) -> usize {
        self.r
    }

    fn t(&self) -> usize {
        self.code.length()
    }

    fn block_len(&self) -> usize {
        self.t() + 2
    }

    /// Total augmented blocks in the sequence.
    fn total_blocks(&self) -> usize {
        self.repeats * self.db_len()
    }

    fn db_len(&self) -> usize {
        self.code.size().pow(self.r as u32)
    }

    fn period(&self) -> usize {
        (self.r + 1) * self.block_len()
    }

    /// 0-based sequence offset of the block with index `g`.
    fn block_start(&self, g: usize) -> usize {
        (g + g.div_ceil(self.r)) * self.block_len()
    }

    /// The sync block `beta^(t+2)`.
    pub fn sync_block(&self) -> Vec<u16> {
        vec![self.beta; self.block_len()]
    }

    /// Reassembles the sequence this detector's parameters imply.
    pub(crate) fn expected_symbols(&self) -> Result<Vec<u16>> {
        let (db, _) = debruijn_generate(self.code.size(), self.r)?;
        let db_len = db.n();
        let block_len = self.block_len();
        let mut symbols = Vec::new();
        for g in 0..self.total_blocks() {
            let sym = db.at(g % db_len) as usize;
            symbols.push(self.gamma);
            symbols.extend_from_slice(&self.code.codewords()[sym]);
            symbols.push(self.gamma);
            if g % self.r == 0 {
                symbols.extend(std::iter::repeat(self.beta).take(block_len));
            }
        }
        Ok(symbols)
    }

    /// Per-input lists of outputs reachable with positive probability.
    pub fn to_support_rows(&self) -> Vec<Vec<usize>> {
        self.support
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .filter(|(_, &p)| p)
                    .map(|(y, _)| y)
                    .collect()
            })
            .collect()
    }

    #[inline]
    fn consistent(&self, x: u16, y: u16) -> bool {
        self.support[x as usize][y as usize]
    }

    pub(crate) fn to_spec(&self) -> DetectorSpec {
        DetectorSpec::ZeroError {
            r: self.r,
            beta: self.beta,
            gamma: self.gamma,
            vertices: self.code.graph().vertex_count(),
            edges: self.code.graph().edges(),
            codewords: self.code.codewords().to_vec(),
            support: self
                .support
                .iter()
                .map(|row| {
                    row.iter()
                        .enumerate()
                        .filter(|(_, &p)| p)
                        .map(|(y, _)| y)
                        .collect()
                })
                .collect(),
        }
    }

    pub(crate) fn rebuild(
        r: usize,
        beta: u16,
        gamma: u16,
        vertices: usize,
        edges: &[(usize, usize)],
        codewords: Vec<Vec<u16>>,
        support_lists: &[Vec<usize>],
    ) -> Result<Self> {
        let graph = ConfusionGraph::new(vertices, edges)?;
        let code = ZeroErrorCode::new(graph, codewords)?;
        if support_lists.len() != vertices {
            return Err(Error::format("support table does not match vertex count"));
        }
        let ny = support_lists
            .iter()
            .flat_map(|l| l.iter().copied())
            .max()
            .map_or(0, |m| m + 1);
        let mut support = vec![vec![false; ny]; vertices];
        for (x, list) in support_lists.iter().enumerate() {
            for &y in list {
                support[x][y] = true;
            }
        }
        let (_, index) = debruijn_generate(code.size(), r)?;
        let db_len = code.size().pow(r as u32);
        let repeats = r / gcd(r, db_len);
        Ok(ZeroErrorDetector {
            code,
            beta,
            gamma,
            r,
            repeats,
            index,
            support,
        })
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Builds a zero-error scheme with window length `k = (r+2)(t+2)`.
pub fn build_zero_error(params: ZeroErrorParams) -> Result<Scheme> {
    let ZeroErrorParams {
        code,
        beta,
        gamma,
        debruijn_order: r,
        channel,
    } = params;
    let verts = code.graph().vertex_count();
    if channel.input_size() != verts {
        return Err(Error::domain(
            "channel input alphabet does not match the code's graph",
        ));
    }
    // Every confusable input pair of the channel must be an edge of the
    // code's graph, otherwise the code's independence says nothing about
    // this channel.
    let channel_graph = confusion_graph(&channel);
    for u in 0..verts {
        for v in u + 1..verts {
            if channel_graph.adjacent(u, v) && !code.graph().adjacent(u, v) {
                return Err(Error::domain(format!(
                    "channel confuses ({u},{v}) but the code's graph has no such edge"
                )));
            }
        }
    }
    if beta == gamma || beta as usize >= verts || gamma as usize >= verts {
        return Err(Error::domain("beta and gamma must be distinct vertices"));
    }
    if channel_graph.adjacent(beta as usize, gamma as usize) {
        return Err(Error::domain("beta and gamma must not be confusable"));
    }
    if r < 1 {
        return Err(Error::domain("de Bruijn order must be at least 1"));
    }
    if code.size() < 2 {
        return Err(Error::domain("zero-error code must have at least 2 codewords"));
    }

    let (db, index) = debruijn_generate(code.size(), r)?;
    let db_len = db.n();
    let repeats = r / gcd(r, db_len);
    let total_blocks = repeats * db_len;
    let t = code.length();
    let block_len = t + 2;
    let n = (total_blocks + total_blocks / r) * block_len;
    if n > crate::seqgen::DEFAULT_LENGTH_BUDGET {
        return Err(Error::resource(format!("sequence length {n} exceeds budget")));
    }

    let mut symbols = Vec::with_capacity(n);
    for g in 0..total_blocks {
        let sym = db.at(g % db_len) as usize;
        symbols.push(gamma);
        symbols.extend_from_slice(&code.codewords()[sym]);
        symbols.push(gamma);
        if g % r == 0 {
            symbols.extend(std::iter::repeat(beta).take(block_len));
        }
    }
    debug_assert_eq!(symbols.len(), n);

    let sequence = CyclicSequence::new(verts, symbols, Construction::ZeroError { r, t })?;
    let k = (r + 2) * block_len;
    if k > sequence.n() {
        return Err(Error::domain(format!(
            "window length {k} exceeds sequence length {}",
            sequence.n()
        )));
    }
    let support = (0..verts)
        .map(|x| {
            (0..channel.output_size())
                .map(|y| channel.prob(y, x) > 0.0)
                .collect()
        })
        .collect();
    let detector = ZeroErrorDetector {
        code,
        beta,
        gamma,
        r,
        repeats,
        index,
        support,
    };
    Scheme::new(sequence, k, DetectorConfig::ZeroError(detector))
}

/// Runs the zero-error detector.
///
/// Finds the smallest window offset whose length-`(t+2)` output segment is
/// consistent with `beta^(t+2)` under the channel support (by the guard
/// structure this is always a true sync block), decodes `r` consecutive
/// complete codeword blocks by support consistency, looks up the de Bruijn
/// position, anchors the absolute block index, and inverts the layout. Any
/// ambiguity yields the error symbol rather than a guess; on observations
/// actually reachable from the sequence this never happens.
pub fn detect_zero_error(scheme: &Scheme, det: &ZeroErrorDetector, y: &[u16]) -> DetectionResult {
    let k = scheme.k();
    let block_len = det.block_len();
    let t = det.t();
    if y.len() != k || y.iter().any(|&v| (v as usize) >= det.support[0].len().max(1)) {
        return DetectionResult::Error;
    }

    // Stage 1: first window offset consistent with the sync block.
    let beta = det.beta;
    let w1 = (0..=(k - block_len))
        .find(|&w| (0..block_len).all(|i| det.consistent(beta, y[w + i])));
    let w1 = match w1 {
        Some(w) => w,
        None => return DetectionResult::Error,
    };

    // Stage 2: complete codeword blocks, window order. Blocks after the
    // sync at offset w1 + (1 + i) * block_len carry within-group index i.
    let period = det.period() as isize;
    let span = k as isize / period + 2;
    let mut blocks: Vec<(usize, usize)> = Vec::new();
    for j in -span..=span {
        let sync_start = w1 as isize + j * period;
        for i in 0..det.r {
            let start = sync_start + ((1 + i) * block_len) as isize;
            if start >= 0 && start + block_len as isize <= k as isize {
                blocks.push((start as usize, i));
            }
        }
    }
    blocks.sort_unstable();
    if blocks.len() < det.r {
        return DetectionResult::Error;
    }

    // Stage 3: decode r consecutive blocks by support consistency.
    let mut symbols = Vec::with_capacity(det.r);
    for &(offset, _) in blocks.iter().take(det.r) {
        if !det.consistent(det.gamma, y[offset]) || !det.consistent(det.gamma, y[offset + t + 1]) {
            return DetectionResult::Error;
        }
        let inner = &y[offset + 1..offset + 1 + t];
        let mut found = None;
        for (sym, cw) in det.code.codewords().iter().enumerate() {
            if cw.iter().zip(inner).all(|(&c, &o)| det.consistent(c, o)) {
                if found.is_some() {
                    return DetectionResult::Error;
                }
                found = Some(sym as u16);
            }
        }
        match found {
            Some(sym) => symbols.push(sym),
            None => return DetectionResult::Error,
        }
    }

    // Stage 4: de Bruijn position plus block index mod r pin the absolute
    // block index; invert the layout.
    let pos0 = match det.index.decode(&symbols) {
        Ok(m) => m - 1,
        Err(_) => return DetectionResult::Error,
    };
    let (first_offset, i0) = blocks[0];
    let rho0 = (1 + i0) % det.r;
    let db_len = det.db_len();
    let total = det.total_blocks();
    let mut g0 = None;
    for x in 0..det.repeats {
        let cand = pos0 + x * db_len;
        if cand % det.r == rho0 {
            g0 = Some(cand);
            break;
        }
    }
    let g0 = match g0 {
        Some(g) => g % total,
        None => return DetectionResult::Error,
    };
    let n = scheme.n() as isize;
    let m0 = (det.block_start(g0) as isize - first_offset as isize).rem_euclid(n);
    DetectionResult::Phase(m0 as usize + 1)
}

/// Structural zero-error guarantee: no window of the sequence other than a
/// true sync block is confusable with `beta^(t+2)` in the channel's
/// confusion graph.
pub fn sync_never_confusable(scheme: &Scheme, channel: &Dmc) -> Result<bool> {
    let det = match scheme.detector() {
        DetectorConfig::ZeroError(d) => d,
        _ => return Err(Error::domain("not a zero-error scheme")),
    };
    let g = confusion_graph(channel);
    let sync = det.sync_block();
    let block_len = det.block_len();
    for m in 1..=scheme.n() {
        let w = scheme.sequence().window(m, block_len);
        if w != sync && g.confusable(&w, &sync) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Exhaustively enumerates, for every phase, every channel output the
/// window can produce, and checks the detector recovers the phase each
/// time. Fails with a resource error if the enumeration exceeds `budget`
/// detector runs.
pub fn verify_zero_error_exhaustive(scheme: &Scheme, channel: &Dmc, budget: u64) -> Result<bool> {
    let k = scheme.k();
    let supports: Vec<Vec<u16>> = (0..channel.input_size())
        .map(|x| channel.support(x).iter().map(|&y| y as u16).collect())
        .collect();
    // Count outputs per phase first.
    let mut total: u64 = 0;
    for m in 1..=scheme.n() {
        let mut count: u64 = 1;
        for &x in &scheme.window(m) {
            count = count.saturating_mul(supports[x as usize].len() as u64);
            if count > budget {
                return Err(Error::resource(format!(
                    "more than {budget} reachable outputs; use sampled verification"
                )));
            }
        }
        total = total.saturating_add(count);
        if total > budget {
            return Err(Error::resource(format!(
                "more than {budget} reachable outputs; use sampled verification"
            )));
        }
    }
    for m in 1..=scheme.n() {
        let w = scheme.window(m);
        let choices: Vec<&[u16]> = w.iter().map(|&x| supports[x as usize].as_slice()).collect();
        let mut picks = vec![0usize; k];
        loop {
            let y: Vec<u16> = (0..k).map(|i| choices[i][picks[i]]).collect();
            if scheme.detect(&y) != DetectionResult::Phase(m) {
                return Ok(false);
            }
            // odometer over the per-position support sets
            let mut pos = 0;
            loop {
                if pos == k {
                    break;
                }
                picks[pos] += 1;
                if picks[pos] < choices[pos].len() {
                    break;
                }
                picks[pos] = 0;
                pos += 1;
            }
            if pos == k {
                break;
            }
        }
    }
    Ok(true)
}

/// Samples `trials` uniformly random (phase, reachable output) pairs and
/// checks the detector recovers the phase each time.
pub fn verify_zero_error_sampled(
    scheme: &Scheme,
    channel: &Dmc,
    trials: u64,
    rng: &mut dyn RngCore,
) -> Result<bool> {
    let supports: Vec<Vec<u16>> = (0..channel.input_size())
        .map(|x| channel.support(x).iter().map(|&y| y as u16).collect())
        .collect();
    for _ in 0..trials {
        let m = rng.random_range(1..=scheme.n());
        let y: Vec<u16> = scheme
            .window(m)
            .iter()
            .map(|&x| {
                let s = &supports[x as usize];
                s[rng.random_range(0..s.len())]
            })
            .collect();
        if scheme.detect(&y) != DetectionResult::Phase(m) {
            return Ok(false);
        }
    }
    Ok(true)
}
