//! Rate splitting with successive detection.
//!
//! User 1 is split into two virtual binary layers `u` and `v` plus a
//! mapping `x1(u, v)`; user 2 keeps its own layer. Each layer is a
//! concatenated phase detection sequence for its effective channel, and the
//! `u` and `v` sequences are combined into the transmitted `x1` sequence by
//! residue indexing: position `m` of the product sequence reads position
//! `m mod n_u` of `u` and `m mod n_v` of `v`. With `n_u` and `n_v` coprime
//! the phase of the product sequence is in bijection with the phase pair,
//! and any window of the product is the symbol map applied to a `u` window
//! and a `v` window.
//!
//! Binary de Bruijn layer lengths are always even, so coprimality is
//! reached by backing the `v` layer with a maximal-length (odd-length)
//! inner sequence and nudging its sync chunk length until the two lengths
//! are coprime.
//!
//! Detection is successive: the `u` phase first, then user 2's phase
//! conditioned on the recovered `u` window, then the `v` phase conditioned
//! on both, each by maximum-likelihood scoring through the corresponding
//! effective channel; finally the two residues are recombined.

use serde::{Deserialize, Serialize};

use crate::channels::Mac;
use crate::codes::{parse_code_spec, BlockCode};
use crate::gf2::Gf2Poly;
use crate::p2p::{build_layer, detect_generic, layer_from_parts, BlockDecode, ConcatDetector,
    ConcatParams, InnerKind};
use crate::p2p::InnerSpec;
use crate::seqgen::{Construction, CyclicSequence};
use crate::{Error, Result};

use super::{MacDetection, MacDetectorConfig, MacScheme};

// ---------------------------------------------------------------------------
// Residue indexing
// ---------------------------------------------------------------------------

/// Bijection between phases of a length-`n_u * n_v` sequence and phase
/// pairs of its two coprime-length factors. Phases are 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrtMap {
    pub n_u: usize,
    pub n_v: usize,
}

impl CrtMap {
    pub fn new(n_u: usize, n_v: usize) -> Result<Self> {
        if n_u == 0 || n_v == 0 {
            return Err(Error::domain("factor lengths must be positive"));
        }
        if gcd(n_u, n_v) != 1 {
            return Err(Error::domain(format!(
                "factor lengths {n_u} and {n_v} are not coprime"
            )));
        }
        Ok(CrtMap { n_u, n_v })
    }

    pub fn product(&self) -> usize {
        self.n_u * self.n_v
    }

    /// The factor phases read at product phase `m`.
    pub fn phase_to_pair(&self, m: usize) -> (usize, usize) {
        ((m - 1) % self.n_u + 1, (m - 1) % self.n_v + 1)
    }

    /// The unique product phase with the given residues.
    pub fn pair_to_phase(&self, m_u: usize, m_v: usize) -> usize {
        let a = (m_u - 1) as i128;
        let b = (m_v - 1) as i128;
        let nu = self.n_u as i128;
        let nv = self.n_v as i128;
        let (_, inv, _) = ext_gcd(nu, nv);
        let t = ((b - a) * inv).rem_euclid(nv);
        ((a + nu * t) % (nu * nv)) as usize + 1
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Returns `(g, x, y)` with `a*x + b*y = g`.
fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    if b == 0 {
        (a, 1, 0)
    } else {
        let (g, x, y) = ext_gcd(b, a % b);
        (g, y, x - (a / b) * y)
    }
}

/// A symbol-by-symbol map from layer-symbol pairs to a channel input.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymbolMap {
    table: Vec<Vec<u16>>,
    out_alphabet: usize,
}

impl SymbolMap {
    pub fn new(table: Vec<Vec<u16>>, out_alphabet: usize) -> Result<Self> {
        if table.is_empty() || table[0].is_empty() {
            return Err(Error::domain("mapping table must be nonempty"));
        }
        let cols = table[0].len();
        for row in &table {
            if row.len() != cols {
                return Err(Error::domain("mapping table must be rectangular"));
            }
            if row.iter().any(|&x| x as usize >= out_alphabet) {
                return Err(Error::domain("mapping output outside alphabet"));
            }
        }
        Ok(SymbolMap {
            table,
            out_alphabet,
        })
    }

    pub fn rows(&self) -> usize {
        self.table.len()
    }

    pub fn cols(&self) -> usize {
        self.table[0].len()
    }

    pub fn out_alphabet(&self) -> usize {
        self.out_alphabet
    }

    #[inline]
    pub fn apply(&self, u: u16, v: u16) -> u16 {
        self.table[u as usize][v as usize]
    }
}

/// Combines two coprime-length sequences through a symbol map: the output
/// has length `n_u * n_v` and its symbol at phase `m` is
/// `f(u at m mod n_u, v at m mod n_v)`. Every window of the output is the
/// map applied position-wise to a `u` window and a `v` window.
pub fn crt_combine(u: &CyclicSequence, v: &CyclicSequence, f: &SymbolMap) -> Result<CyclicSequence> {
    if gcd(u.n(), v.n()) != 1 {
        return Err(Error::domain(format!(
            "sequence lengths {} and {} are not coprime",
            u.n(),
            v.n()
        )));
    }
    if u.symbols().iter().any(|&s| s as usize >= f.rows())
        || v.symbols().iter().any(|&s| s as usize >= f.cols())
    {
        return Err(Error::domain("sequence symbol outside the mapping table"));
    }
    let n = u.n() * v.n();
    let symbols: Vec<u16> = (0..n)
        .map(|i| f.apply(u.at(i % u.n()), v.at(i % v.n())))
        .collect();
    CyclicSequence::new(
        f.out_alphabet().max(2),
        symbols,
        Construction::CrtProduct {
            n_u: u.n(),
            n_v: v.n(),
        },
    )
}

// ---------------------------------------------------------------------------
// Split specification
// ---------------------------------------------------------------------------

/// The split: a MAC, marginal input pmfs for the two virtual layers of
/// user 1 and for user 2, and the symbol map assembling user 1's input.
pub struct SplitSpec {
    pub mac: Mac,
    pub pu: Vec<f64>,
    pub pv: Vec<f64>,
    pub px2: Vec<f64>,
    pub map: SymbolMap,
}

/// Construction parameters for one layer.
pub struct SplitLayerParams {
    pub code: Box<dyn BlockCode>,
    pub blocks_per_sync: usize,
    pub sync_chunk: usize,
    pub inner: InnerKind,
}

/// One layer at runtime: degenerate (a silent, single-phase user) or a
/// concatenated sequence with its detector.
enum Layer {
    Degenerate,
    Coded {
        seq: CyclicSequence,
        det: ConcatDetector,
    },
}

impl Layer {
    fn n(&self) -> usize {
        match self {
            Layer::Degenerate => 1,
            Layer::Coded { seq, .. } => seq.n(),
        }
    }

    fn symbol_at(&self, index0: usize) -> u16 {
        match self {
            Layer::Degenerate => 0,
            Layer::Coded { seq, .. } => seq.at(index0),
        }
    }

    fn sequence(&self) -> Result<CyclicSequence> {
        match self {
            Layer::Degenerate => {
                CyclicSequence::new(2, vec![0], Construction::Manual)
            }
            Layer::Coded { seq, .. } => Ok(seq.clone()),
        }
    }
}

/// Runtime state of the successive detector.
pub struct SuccessiveDetector {
    mac: Mac,
    pu: Vec<f64>,
    pv: Vec<f64>,
    px2: Vec<f64>,
    map: SymbolMap,
    u: Layer,
    x2: Layer,
    v: Layer,
    crt: CrtMap,
    /// log p(y | u), marginalized over v and x2: `[u][y]`.
    score_u: Vec<Vec<f64>>,
    /// log p(y | u, x2), marginalized over v: `[u][x2][y]`.
    score_x2: Vec<Vec<Vec<f64>>>,
    /// log p(y | u, x2, v): `[u][x2][v][y]`.
    score_v: Vec<Vec<Vec<Vec<f64>>>>,
}

/// Serialized form: everything needed to reassemble the layers.
#[derive(Serialize, Deserialize)]
pub struct SuccessiveSpec {
    pub mac: Mac,
    pub pu: Vec<f64>,
    pub pv: Vec<f64>,
    pub px2: Vec<f64>,
    pub map: SymbolMap,
    pub u_layer: Option<LayerSpec>,
    pub x2_layer: Option<LayerSpec>,
    pub v_layer: Option<LayerSpec>,
}

#[derive(Serialize, Deserialize)]
pub struct LayerSpec {
    pub code: String,
    pub l: usize,
    pub tau: usize,
    pub inner: InnerSpec,
    pub sync: Vec<u16>,
}

fn layer_to_spec(layer: &Layer) -> Option<LayerSpec> {
    match layer {
        Layer::Degenerate => None,
        Layer::Coded { det, .. } => Some(LayerSpec {
            code: det.code().spec(),
            l: det.layout().l,
            tau: det.layout().tau,
            inner: det.inner_spec(),
            sync: det.sync().to_vec(),
        }),
    }
}

fn layer_from_spec(spec: &Option<LayerSpec>) -> Result<Layer> {
    match spec {
        None => Ok(Layer::Degenerate),
        Some(spec) => {
            let code = parse_code_spec(&spec.code)?;
            let inner = match &spec.inner {
                InnerSpec::DeBruijn { order } => InnerKind::DeBruijn { order: *order },
                InnerSpec::Mseq { poly } => InnerKind::MSeq(Gf2Poly::parse_spec(poly)?),
            };
            let (seq, det) = layer_from_parts(code, spec.l, spec.tau, inner, spec.sync.clone())?;
            Ok(Layer::Coded { seq, det })
        }
    }
}

impl SuccessiveDetector {
    pub(crate) fn to_spec(&self) -> SuccessiveSpec {
        SuccessiveSpec {
            mac: self.mac.clone(),
            pu: self.pu.clone(),
            pv: self.pv.clone(),
            px2: self.px2.clone(),
            map: self.map.clone(),
            u_layer: layer_to_spec(&self.u),
            x2_layer: layer_to_spec(&self.x2),
            v_layer: layer_to_spec(&self.v),
        }
    }

    pub(crate) fn rebuild(spec: &SuccessiveSpec) -> Result<Self> {
        let u = layer_from_spec(&spec.u_layer)?;
        let x2 = layer_from_spec(&spec.x2_layer)?;
        let v = layer_from_spec(&spec.v_layer)?;
        SuccessiveDetector::assemble(
            spec.mac.clone(),
            spec.pu.clone(),
            spec.pv.clone(),
            spec.px2.clone(),
            spec.map.clone(),
            u,
            x2,
            v,
        )
    }

    #[allow(clippy::too_many_arguments)]
    fn assemble(
        mac: Mac,
        pu: Vec<f64>,
        pv: Vec<f64>,
        px2: Vec<f64>,
        map: SymbolMap,
        u: Layer,
        x2: Layer,
        v: Layer,
    ) -> Result<Self> {
        let crt = CrtMap::new(u.n(), v.n())?;
        let nu_sym = map.rows();
        let nv_sym = map.cols();
        let nx2 = mac.x2_size();
        let ny = mac.y_size();

        let ln = |p: f64| if p > 0.0 { p.ln() } else { f64::NEG_INFINITY };

        let mut score_u = vec![vec![0.0; ny]; nu_sym];
        for us in 0..nu_sym {
            for y in 0..ny {
                let mut p = 0.0;
                for (vs, &qv) in pv.iter().enumerate() {
                    for (x2s, &q2) in px2.iter().enumerate() {
                        p += qv * q2 * mac.prob(y, map.apply(us as u16, vs as u16) as usize, x2s);
                    }
                }
                score_u[us][y] = ln(p);
            }
        }

        let mut score_x2 = vec![vec![vec![0.0; ny]; nx2]; nu_sym];
        for us in 0..nu_sym {
            for x2s in 0..nx2 {
                for y in 0..ny {
                    let mut p = 0.0;
                    for (vs, &qv) in pv.iter().enumerate() {
                        p += qv * mac.prob(y, map.apply(us as u16, vs as u16) as usize, x2s);
                    }
                    score_x2[us][x2s][y] = ln(p);
                }
            }
        }

        let mut score_v = vec![vec![vec![vec![0.0; ny]; nv_sym]; nx2]; nu_sym];
        for us in 0..nu_sym {
            for x2s in 0..nx2 {
                for vs in 0..nv_sym {
                    for y in 0..ny {
                        score_v[us][x2s][vs][y] =
                            ln(mac.prob(y, map.apply(us as u16, vs as u16) as usize, x2s));
                    }
                }
            }
        }

        Ok(SuccessiveDetector {
            mac,
            pu,
            pv,
            px2,
            map,
            u,
            x2,
            v,
            crt,
            score_u,
            score_x2,
            score_v,
        })
    }

    pub fn crt(&self) -> &CrtMap {
        &self.crt
    }

    /// The channel the scheme was designed for.
    pub fn channel(&self) -> &Mac {
        &self.mac
    }

    /// Recomputes the two user sequences the layer parameters imply.
    pub(crate) fn expected_sequences(&self) -> Result<(CyclicSequence, CyclicSequence)> {
        let u_seq = self.u.sequence()?;
        let v_seq = self.v.sequence()?;
        let seq1 = crt_combine(&u_seq, &v_seq, &self.map)?;
        let seq2 = self.x2.sequence()?;
        Ok((seq1, seq2))
    }
}

// ---------------------------------------------------------------------------
// Construction
// ---------------------------------------------------------------------------

const COPRIME_TAU_ATTEMPTS: usize = 64;

fn check_pmf(pmf: &[f64], name: &str) -> Result<()> {
    if pmf.is_empty() || pmf.iter().any(|&p| p < 0.0) {
        return Err(Error::domain(format!("{name} must be a nonnegative pmf")));
    }
    let sum: f64 = pmf.iter().sum();
    if (sum - 1.0).abs() > 1e-9 {
        return Err(Error::domain(format!("{name} must sum to 1")));
    }
    Ok(())
}

fn is_point_mass_at_zero(pmf: &[f64]) -> bool {
    pmf[0] == 1.0
}

fn sync_dist(pmf: &[f64]) -> [f64; 2] {
    [pmf[0], 1.0 - pmf[0]]
}

/// Builds a rate-splitting scheme over the given MAC.
///
/// A `None` layer is degenerate: its pmf must put all mass on symbol 0 and
/// it contributes a single phase. The `v` layer's sync chunk is incremented
/// until its sequence length is coprime to the `u` layer's (an odd-length
/// inner sequence for `v` makes this reachable).
pub fn build_rate_splitting(
    split: SplitSpec,
    u_params: Option<SplitLayerParams>,
    x2_params: Option<SplitLayerParams>,
    v_params: Option<SplitLayerParams>,
    seed: u64,
) -> Result<MacScheme> {
    let SplitSpec {
        mac,
        pu,
        pv,
        px2,
        map,
    } = split;
    check_pmf(&pu, "p(u)")?;
    check_pmf(&pv, "p(v)")?;
    check_pmf(&px2, "p(x2)")?;
    if map.rows() != pu.len() || map.cols() != pv.len() {
        return Err(Error::domain("mapping table does not match the layer pmfs"));
    }
    if map.out_alphabet() > mac.x1_size() {
        return Err(Error::domain("mapping output exceeds the channel's first input"));
    }
    if px2.len() != mac.x2_size() {
        return Err(Error::domain("p(x2) does not match the channel's second input"));
    }
    for (params, pmf, name) in [
        (&u_params, &pu, "u"),
        (&x2_params, &px2, "x2"),
        (&v_params, &pv, "v"),
    ] {
        match params {
            None => {
                if !is_point_mass_at_zero(pmf) {
                    return Err(Error::domain(format!(
                        "degenerate layer {name} requires a point mass at symbol 0"
                    )));
                }
            }
            Some(_) => {
                if pmf.len() != 2 {
                    return Err(Error::domain(format!(
                        "coded layer {name} requires a binary alphabet"
                    )));
                }
            }
        }
    }

    let u = match u_params {
        None => Layer::Degenerate,
        Some(p) => {
            let (seq, det) = build_layer(to_concat_params(p), sync_dist(&pu), seed)?;
            Layer::Coded { seq, det }
        }
    };
    let x2 = match x2_params {
        None => Layer::Degenerate,
        Some(p) => {
            let (seq, det) = build_layer(to_concat_params(p), sync_dist(&px2), seed ^ 0x9e3779b9)?;
            Layer::Coded { seq, det }
        }
    };
    let v = match v_params {
        None => Layer::Degenerate,
        Some(p) => {
            let n_u = u.n();
            let mut found = None;
            let mut last_err = None;
            for delta in 0..COPRIME_TAU_ATTEMPTS {
                let params = ConcatParams {
                    code: parse_code_spec(&p.code.spec())?,
                    blocks_per_sync: p.blocks_per_sync,
                    sync_chunk: p.sync_chunk + delta,
                    inner: clone_inner(&p.inner)?,
                };
                match build_layer(params, sync_dist(&pv), seed ^ 0x517cc1b7) {
                    Ok((seq, det)) => {
                        if gcd(n_u, seq.n()) == 1 {
                            found = Some(Layer::Coded { seq, det });
                            break;
                        }
                    }
                    Err(e) => last_err = Some(e),
                }
            }
            match found {
                Some(layer) => layer,
                None => {
                    return Err(last_err.unwrap_or_else(|| {
                        Error::domain(format!(
                            "no sync chunk within {COPRIME_TAU_ATTEMPTS} increments makes the \
                             layer lengths coprime"
                        ))
                    }))
                }
            }
        }
    };

    // window length: the largest any layer needs
    let mut k = 0usize;
    for layer in [&u, &x2, &v] {
        if let Layer::Coded { det, .. } = layer {
            k = k.max(det.window_len());
        }
    }
    if k == 0 {
        return Err(Error::domain("at least one layer must be coded"));
    }

    let u_seq = u.sequence()?;
    let v_seq = v.sequence()?;
    let seq1 = crt_combine(&u_seq, &v_seq, &map)?;
    let seq2 = x2.sequence()?;
    if k > seq1.n() || (seq2.n() > 1 && k > seq2.n()) {
        return Err(Error::domain(format!(
            "window length {k} exceeds a user sequence length ({}, {})",
            seq1.n(),
            seq2.n()
        )));
    }

    let detector = SuccessiveDetector::assemble(mac, pu, pv, px2, map, u, x2, v)?;
    MacScheme::new(seq1, seq2, k, MacDetectorConfig::Successive(detector))
}

fn to_concat_params(p: SplitLayerParams) -> ConcatParams {
    ConcatParams {
        code: p.code,
        blocks_per_sync: p.blocks_per_sync,
        sync_chunk: p.sync_chunk,
        inner: p.inner,
    }
}

fn clone_inner(inner: &InnerKind) -> Result<InnerKind> {
    Ok(match inner {
        InnerKind::DeBruijn { order } => InnerKind::DeBruijn { order: *order },
        InnerKind::MSeq(p) => InnerKind::MSeq(p.clone()),
    })
}

// ---------------------------------------------------------------------------
// Detection
// ---------------------------------------------------------------------------

fn detect_layer(
    seq: &CyclicSequence,
    det: &ConcatDetector,
    y: &[u16],
    scorer: &dyn Fn(usize, u16, u16) -> f64,
) -> Option<usize> {
    let kl = det.window_len();
    if y.len() < kl {
        return None;
    }
    let y = &y[..kl];
    let codewords = det.code().codewords();
    let decode = BlockDecode::Ml {
        codewords: &codewords,
        score: scorer,
    };
    let recon = |m0: usize| (0..kl).map(|i| scorer(i, y[i], seq.at(m0 + i))).sum::<f64>();
    detect_generic(
        det.layout(),
        det.code().message_bits(),
        y,
        det.sync_mid(),
        scorer,
        &decode,
        &|bits| det.decode_inner(bits),
        &recon,
    )
}

/// Successive detection: `u` phase, then user 2 conditioned on the
/// recovered `u` window, then `v` conditioned on both; the product phase
/// follows by residue recombination.
pub(crate) fn detect_successive(
    scheme: &MacScheme,
    det: &SuccessiveDetector,
    y: &[u16],
) -> MacDetection {
    let k = scheme.k();
    if y.iter().any(|&v| v as usize >= det.mac.y_size()) {
        return MacDetection::Error;
    }

    // Stage 1: the u layer against p(y | u).
    let m_u = match &det.u {
        Layer::Degenerate => 1usize,
        Layer::Coded { seq, det: cdet } => {
            let scorer =
                |_pos: usize, obs: u16, sym: u16| det.score_u[sym as usize][obs as usize];
            match detect_layer(seq, cdet, y, &scorer) {
                Some(m0) => m0 + 1,
                None => return MacDetection::Error,
            }
        }
    };
    let u_win: Vec<u16> = (0..k).map(|i| det.u.symbol_at(m_u - 1 + i)).collect();

    // Stage 2: user 2 against p(y | u, x2).
    let m_2 = match &det.x2 {
        Layer::Degenerate => 1usize,
        Layer::Coded { seq, det: cdet } => {
            let scorer = |pos: usize, obs: u16, sym: u16| {
                det.score_x2[u_win[pos] as usize][sym as usize][obs as usize]
            };
            match detect_layer(seq, cdet, y, &scorer) {
                Some(m0) => m0 + 1,
                None => return MacDetection::Error,
            }
        }
    };
    let x2_win: Vec<u16> = (0..k).map(|i| det.x2.symbol_at(m_2 - 1 + i)).collect();

    // Stage 3: the v layer against p(y | u, x2, v).
    let m_v = match &det.v {
        Layer::Degenerate => 1usize,
        Layer::Coded { seq, det: cdet } => {
            let scorer = |pos: usize, obs: u16, sym: u16| {
                det.score_v[u_win[pos] as usize][x2_win[pos] as usize][sym as usize][obs as usize]
            };
            match detect_layer(seq, cdet, y, &scorer) {
                Some(m0) => m0 + 1,
                None => return MacDetection::Error,
            }
        }
    };

    let m1 = det.crt.pair_to_phase(m_u, m_v);
    MacDetection::Phases(m1, m_2)
}
