//! Noise models: discrete memoryless channels, adversarial bit flips,
//! two-user multiple-access channels, and the confusion graphs a DMC
//! induces on its input alphabet.
//!
//! Channel models are immutable; transmission is pure given a seeded
//! generator, so simulations reproduce exactly from their seeds.

use rand::Rng;
use rand::RngCore;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Tolerance for row-stochasticity checks on probability matrices.
pub const PROB_TOLERANCE: f64 = 1e-12;

/// Enumeration limits for the exhaustive worst-case adversary.
pub const WORST_CASE_MAX_LEN: usize = 24;
pub const WORST_CASE_MAX_WEIGHT: usize = 3;

// ---------------------------------------------------------------------------
// Discrete memoryless channels
// ---------------------------------------------------------------------------

/// A discrete memoryless channel given as a row-stochastic matrix; row `x`
/// holds the conditional distribution over outputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dmc {
    matrix: Vec<Vec<f64>>,
}

impl Dmc {
    pub fn new(matrix: Vec<Vec<f64>>) -> Result<Self> {
        if matrix.is_empty() || matrix[0].is_empty() {
            return Err(Error::domain("channel matrix must be nonempty"));
        }
        let cols = matrix[0].len();
        for (x, row) in matrix.iter().enumerate() {
            if row.len() != cols {
                return Err(Error::domain("channel matrix rows must have equal length"));
            }
            if row.iter().any(|&p| !(0.0..=1.0).contains(&p)) {
                return Err(Error::domain(format!("row {x} has entries outside [0,1]")));
            }
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > PROB_TOLERANCE {
                return Err(Error::domain(format!(
                    "row {x} sums to {sum}, not 1 within {PROB_TOLERANCE}"
                )));
            }
        }
        Ok(Dmc { matrix })
    }

    /// Binary symmetric channel with crossover probability `p`.
    pub fn bsc(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::domain(format!(
                "crossover probability {p} outside [0,1]"
            )));
        }
        Dmc::new(vec![vec![1.0 - p, p], vec![p, 1.0 - p]])
    }

    /// Noiseless channel on `n` symbols.
    pub fn identity(n: usize) -> Self {
        let matrix = (0..n)
            .map(|x| (0..n).map(|y| if x == y { 1.0 } else { 0.0 }).collect())
            .collect();
        Dmc { matrix }
    }

    /// The cyclic "typewriter" channel on `n` symbols: input `x` produces
    /// `x` or `x+1 mod n`, each with probability 1/2. For `n = 5` its
    /// confusion graph is the pentagon.
    pub fn cyclic_typewriter(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::domain("typewriter channel needs at least 2 symbols"));
        }
        let matrix = (0..n)
            .map(|x| {
                let mut row = vec![0.0; n];
                row[x] = 0.5;
                row[(x + 1) % n] = 0.5;
                row
            })
            .collect();
        Dmc::new(matrix)
    }

    pub fn input_size(&self) -> usize {
        self.matrix.len()
    }

    pub fn output_size(&self) -> usize {
        self.matrix[0].len()
    }

    #[inline]
    pub fn prob(&self, y: usize, x: usize) -> f64 {
        self.matrix[x][y]
    }

    pub fn row(&self, x: usize) -> &[f64] {
        &self.matrix[x]
    }

    /// True iff every row is a point mass.
    pub fn is_deterministic(&self) -> bool {
        self.matrix
            .iter()
            .all(|row| row.iter().all(|&p| p == 0.0 || p == 1.0))
    }

    /// Outputs reachable from `x` with positive probability.
    pub fn support(&self, x: usize) -> Vec<usize> {
        self.matrix[x]
            .iter()
            .enumerate()
            .filter(|(_, &p)| p > 0.0)
            .map(|(y, _)| y)
            .collect()
    }

    fn sample_row(&self, x: usize, rng: &mut dyn RngCore) -> u16 {
        let u: f64 = rng.random();
        let mut acc = 0.0;
        for (y, &p) in self.matrix[x].iter().enumerate() {
            acc += p;
            if u < acc {
                return y as u16;
            }
        }
        (self.output_size() - 1) as u16
    }
}

/// Sends a symbol array through the channel, each position drawn
/// independently from its input's row. Deterministic given the generator
/// state.
pub fn transmit_dmc(ch: &Dmc, input: &[u16], rng: &mut dyn RngCore) -> Result<Vec<u16>> {
    let n = ch.input_size();
    input
        .iter()
        .map(|&x| {
            if x as usize >= n {
                return Err(Error::domain(format!("input symbol {x} outside alphabet")));
            }
            Ok(ch.sample_row(x as usize, rng))
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Adversarial noise
// ---------------------------------------------------------------------------

/// Adversarial flip budget: at most `floor(p * k)` positions of a
/// length-`k` binary word may be flipped.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdversarialBudget {
    p: f64,
}

impl AdversarialBudget {
    pub fn new(p: f64) -> Result<Self> {
        if !(0.0..0.5).contains(&p) {
            return Err(Error::domain(format!("flip fraction {p} outside [0, 1/2)")));
        }
        Ok(AdversarialBudget { p })
    }

    pub fn fraction(&self) -> f64 {
        self.p
    }

    pub fn max_flips(&self, k: usize) -> usize {
        (self.p * k as f64).floor() as usize
    }
}

/// How the adversary picks its flips.
pub enum AdversaryStrategy<'a> {
    /// Flips exactly `floor(p*k)` distinct positions chosen uniformly.
    RandomPositions(&'a mut dyn RngCore),
    /// Tries every error pattern of weight up to the budget and returns the
    /// first output the given predicate marks as a misdetection; if none
    /// fools it, the input passes through unchanged. Only available for
    /// `k <= 24` and budgets up to weight 3.
    WorstCaseExhaustive(&'a dyn Fn(&[u16]) -> bool),
}

/// Applies adversarial bit flips within the budget.
pub fn transmit_adversarial(
    budget: &AdversarialBudget,
    input: &[u16],
    strategy: AdversaryStrategy<'_>,
) -> Result<Vec<u16>> {
    if input.iter().any(|&b| b > 1) {
        return Err(Error::domain("adversarial channel requires binary input"));
    }
    let k = input.len();
    let w = budget.max_flips(k);
    match strategy {
        AdversaryStrategy::RandomPositions(rng) => {
            let mut out = input.to_vec();
            let mut positions: Vec<usize> = (0..k).collect();
            for i in 0..w {
                let j = rng.random_range(i..k);
                positions.swap(i, j);
                out[positions[i]] ^= 1;
            }
            Ok(out)
        }
        AdversaryStrategy::WorstCaseExhaustive(misdetects) => {
            for pattern in error_patterns(k, w)? {
                if pattern.is_empty() {
                    continue;
                }
                let mut out = input.to_vec();
                for &pos in &pattern {
                    out[pos] ^= 1;
                }
                if misdetects(&out) {
                    return Ok(out);
                }
            }
            Ok(input.to_vec())
        }
    }
}

/// All error patterns (position sets) of weight `0..=max_weight` on `k`
/// positions, in increasing weight order.
pub fn error_patterns(k: usize, max_weight: usize) -> Result<Vec<Vec<usize>>> {
    if k > WORST_CASE_MAX_LEN || max_weight > WORST_CASE_MAX_WEIGHT {
        return Err(Error::resource(format!(
            "exhaustive error patterns limited to k <= {WORST_CASE_MAX_LEN}, weight <= {WORST_CASE_MAX_WEIGHT}"
        )));
    }
    let mut out = vec![vec![]];
    if max_weight >= 1 {
        for i in 0..k {
            out.push(vec![i]);
        }
    }
    if max_weight >= 2 {
        for i in 0..k {
            for j in i + 1..k {
                out.push(vec![i, j]);
            }
        }
    }
    if max_weight >= 3 {
        for i in 0..k {
            for j in i + 1..k {
                for l in j + 1..k {
                    out.push(vec![i, j, l]);
                }
            }
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Multiple-access channels
// ---------------------------------------------------------------------------

/// A two-user discrete memoryless multiple-access channel, given as the
/// tensor `p(y | x1, x2)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mac {
    tensor: Vec<Vec<Vec<f64>>>,
}

impl Mac {
    pub fn new(tensor: Vec<Vec<Vec<f64>>>) -> Result<Self> {
        if tensor.is_empty() || tensor[0].is_empty() || tensor[0][0].is_empty() {
            return Err(Error::domain("MAC tensor must be nonempty"));
        }
        let x2n = tensor[0].len();
        let yn = tensor[0][0].len();
        for (x1, slice) in tensor.iter().enumerate() {
            if slice.len() != x2n {
                return Err(Error::domain("ragged MAC tensor"));
            }
            for (x2, row) in slice.iter().enumerate() {
                if row.len() != yn {
                    return Err(Error::domain("ragged MAC tensor"));
                }
                if row.iter().any(|&p| !(0.0..=1.0).contains(&p)) {
                    return Err(Error::domain(format!(
                        "entry outside [0,1] at slice ({x1},{x2})"
                    )));
                }
                let sum: f64 = row.iter().sum();
                if (sum - 1.0).abs() > PROB_TOLERANCE {
                    return Err(Error::domain(format!(
                        "slice ({x1},{x2}) sums to {sum}, not 1 within {PROB_TOLERANCE}"
                    )));
                }
            }
        }
        Ok(Mac { tensor })
    }

    pub fn x1_size(&self) -> usize {
        self.tensor.len()
    }

    pub fn x2_size(&self) -> usize {
        self.tensor[0].len()
    }

    pub fn y_size(&self) -> usize {
        self.tensor[0][0].len()
    }

    #[inline]
    pub fn prob(&self, y: usize, x1: usize, x2: usize) -> f64 {
        self.tensor[x1][x2][y]
    }

    pub fn transmit(&self, in1: &[u16], in2: &[u16], rng: &mut dyn RngCore) -> Result<Vec<u16>> {
        if in1.len() != in2.len() {
            return Err(Error::domain("MAC inputs must have equal length"));
        }
        in1.iter()
            .zip(in2)
            .map(|(&x1, &x2)| {
                if x1 as usize >= self.x1_size() || x2 as usize >= self.x2_size() {
                    return Err(Error::domain("MAC input symbol outside alphabet"));
                }
                let row = &self.tensor[x1 as usize][x2 as usize];
                let u: f64 = rng.random();
                let mut acc = 0.0;
                for (y, &p) in row.iter().enumerate() {
                    acc += p;
                    if u < acc {
                        return Ok(y as u16);
                    }
                }
                Ok((self.y_size() - 1) as u16)
            })
            .collect()
    }
}

/// The binary mod-2 adder: `Y = X1 xor X2`, deterministic.
pub fn mod2_mac() -> Mac {
    let mut tensor = vec![vec![vec![0.0; 2]; 2]; 2];
    for x1 in 0..2usize {
        for x2 in 0..2usize {
            tensor[x1][x2][x1 ^ x2] = 1.0;
        }
    }
    Mac { tensor }
}

/// The push-to-talk MAC: `p(0|0,0) = p(1|0,1) = p(1|1,0) = 1` and
/// `p(0|1,1) = p(1|1,1) = 1/2`.
pub fn push_to_talk() -> Mac {
    let mut tensor = vec![vec![vec![0.0; 2]; 2]; 2];
    tensor[0][0][0] = 1.0;
    tensor[0][1][1] = 1.0;
    tensor[1][0][1] = 1.0;
    tensor[1][1][0] = 0.5;
    tensor[1][1][1] = 0.5;
    Mac { tensor }
}

// ---------------------------------------------------------------------------
// Confusion graphs
// ---------------------------------------------------------------------------

/// The confusion graph of a channel: vertices are inputs, with an edge
/// between two distinct inputs iff some output is reachable from both.
/// Zero-error codes are independent sets in strong powers of this graph.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionGraph {
    vertices: usize,
    adj: Vec<Vec<bool>>,
}

impl ConfusionGraph {
    pub fn new(vertices: usize, edges: &[(usize, usize)]) -> Result<Self> {
        if vertices == 0 {
            return Err(Error::domain("graph must have at least one vertex"));
        }
        let mut adj = vec![vec![false; vertices]; vertices];
        for &(u, v) in edges {
            if u >= vertices || v >= vertices {
                return Err(Error::domain(format!("edge ({u},{v}) outside vertex set")));
            }
            if u == v {
                return Err(Error::domain("self-loops are not allowed"));
            }
            adj[u][v] = true;
            adj[v][u] = true;
        }
        Ok(ConfusionGraph { vertices, adj })
    }

    pub fn edgeless(vertices: usize) -> Self {
        ConfusionGraph {
            vertices,
            adj: vec![vec![false; vertices]; vertices],
        }
    }

    /// The cycle graph `C_n`.
    pub fn cycle(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::domain("cycle graph needs at least 3 vertices"));
        }
        let edges: Vec<(usize, usize)> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        ConfusionGraph::new(n, &edges)
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices
    }

    #[inline]
    pub fn adjacent(&self, u: usize, v: usize) -> bool {
        self.adj[u][v]
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for u in 0..self.vertices {
            for v in u + 1..self.vertices {
                if self.adj[u][v] {
                    out.push((u, v));
                }
            }
        }
        out
    }

    /// Strong-product adjacency on equal-length words: `u` and `v` are
    /// confusable iff they differ somewhere and every coordinate pair is
    /// equal or adjacent.
    pub fn confusable(&self, u: &[u16], v: &[u16]) -> bool {
        debug_assert_eq!(u.len(), v.len());
        if u == v {
            return false;
        }
        u.iter()
            .zip(v)
            .all(|(&a, &b)| a == b || self.adj[a as usize][b as usize])
    }
}

/// Builds the confusion graph of a DMC.
pub fn confusion_graph(ch: &Dmc) -> ConfusionGraph {
    let n = ch.input_size();
    let mut adj = vec![vec![false; n]; n];
    for u in 0..n {
        for v in u + 1..n {
            let overlap = (0..ch.output_size()).any(|y| ch.prob(y, u) > 0.0 && ch.prob(y, v) > 0.0);
            adj[u][v] = overlap;
            adj[v][u] = overlap;
        }
    }
    ConfusionGraph { vertices: n, adj }
}
