//! Computable bounds and capacity quantities.
//!
//! Everything a desk-scale study of phase detection sequences needs to
//! compare against: binary entropy, the local-lemma existence bound on
//! sequence length, Krawtchouk polynomials with the exact-rational
//! feasibility test they enter, the logarithmic integral appearing in the
//! linear-scheme rate bound, channel capacity by alternating maximization,
//! and the two-user MAC rate-region membership test restricted to product
//! input distributions.
//!
//! All logarithms are base 2. The feasibility test runs in exact rational
//! arithmetic so its verdicts do not depend on floating-point rounding.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::channels::{Dmc, Mac};
use crate::{Error, Result};

/// Exact rational number of unbounded size.
pub type RationalBig = BigRational;

/// A point in the two-user rate plane, bits per symbol.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegionPoint {
    pub r1: f64,
    pub r2: f64,
}

impl RegionPoint {
    pub fn new(r1: f64, r2: f64) -> Result<Self> {
        if r1 < 0.0 || r2 < 0.0 {
            return Err(Error::domain("rates must be nonnegative"));
        }
        Ok(RegionPoint { r1, r2 })
    }
}

// ---------------------------------------------------------------------------
// Entropy and elementary bounds
// ---------------------------------------------------------------------------

/// Binary entropy `h(p) = -p log2 p - (1-p) log2 (1-p)`, with `0 log 0 = 0`.
pub fn binary_entropy(p: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::domain(format!("probability {p} outside [0,1]")));
    }
    let term = |x: f64| if x == 0.0 { 0.0 } else { -x * x.log2() };
    Ok(term(p) + term(1.0 - p))
}

/// Result of the random-coding achievable rate `1 - h(2p)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GvRate {
    pub rate: f64,
    /// Set when `p >= 1/4` forced the rate to 0.
    pub clamped: bool,
}

/// Achievable rate `1 - h(2p)` for adversarial flip fraction `p`; returns
/// 0 with a flag once `p >= 1/4`.
pub fn gv_rate(p: f64) -> Result<GvRate> {
    if !(0.0..=0.5).contains(&p) {
        return Err(Error::domain(format!("flip fraction {p} outside [0, 1/2]")));
    }
    if p >= 0.25 {
        return Ok(GvRate {
            rate: 0.0,
            clamped: p > 0.25,
        });
    }
    Ok(GvRate {
        rate: 1.0 - binary_entropy(2.0 * p)?,
        clamped: false,
    })
}

/// Exact binomial coefficient.
pub fn binomial(n: usize, k: usize) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let mut acc = BigUint::one();
    for i in 0..k.min(n - k) {
        acc = acc * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    acc
}

/// Largest sequence length guaranteed to admit a minimum-distance-`d`
/// scheme at window length `k`:
/// `floor(2^k / (16 k * sum_{i=0}^{d} C(k,i)))`, exactly.
pub fn lll_max_n(k: usize, d: usize) -> Result<BigUint> {
    if k == 0 || d > k {
        return Err(Error::domain("need k >= 1 and 0 <= d <= k"));
    }
    let mut ball = BigUint::zero();
    for i in 0..=d {
        ball += binomial(k, i);
    }
    let numerator = BigUint::one() << k;
    Ok(numerator / (BigUint::from(16 * k) * ball))
}

/// Base-2 logarithm of a positive big integer, to f64 precision.
pub fn log2_biguint(n: &BigUint) -> f64 {
    let bits = n.bits();
    if bits <= 53 {
        return n.to_f64().unwrap().log2();
    }
    let shift = bits - 53;
    let top = (n >> shift).to_f64().unwrap();
    top.log2() + shift as f64
}

// ---------------------------------------------------------------------------
// Krawtchouk polynomials and the linear-scheme feasibility test
// ---------------------------------------------------------------------------

/// Generalized binomial coefficient `C(z, i) = z(z-1)...(z-i+1) / i!` at a
/// rational point.
pub fn generalized_binomial(z: &RationalBig, i: usize) -> RationalBig {
    let mut acc = RationalBig::one();
    for j in 0..i {
        let factor = z - RationalBig::from(BigInt::from(j));
        acc *= factor / RationalBig::from(BigInt::from(j + 1));
    }
    acc
}

/// Krawtchouk polynomial of block length `k` and degree `t` at the rational
/// point `z`: `sum_{j=0}^t (-1)^j C(z, j) C(k - z, t - j)`, exactly.
pub fn krawtchouk(k: usize, t: usize, z: &RationalBig) -> Result<RationalBig> {
    if t > k {
        return Err(Error::domain("need 0 <= t <= k"));
    }
    let k_rat = RationalBig::from(BigInt::from(k));
    let mut acc = RationalBig::zero();
    for j in 0..=t {
        let term = generalized_binomial(z, j) * generalized_binomial(&(&k_rat - z), t - j);
        if j % 2 == 0 {
            acc += term;
        } else {
            acc -= term;
        }
    }
    Ok(acc)
}

/// Feasibility of an `(n = 2^r - 1, k)` linear scheme with minimum distance
/// `2t + 1` whose feedback polynomial has `c` nonzero coefficients:
///
/// `2^r * K_t(ic)^2 * C((k-r)/c^2, i) * c^{2i} / C(k, t) <= 2^k`
///
/// must hold for every `i >= 1` with `i * c^2 <= k - r`. Evaluated in exact
/// rational arithmetic. With no `i` in range the condition is vacuously
/// satisfied.
pub fn thm4_feasible(r: usize, t: usize, c: usize, k: usize) -> Result<bool> {
    if c < 1 || k < r || t > k {
        return Err(Error::domain("need c >= 1, k >= r, t <= k"));
    }
    let pow2k = RationalBig::from(BigInt::from(BigUint::one() << k));
    let pow2r = RationalBig::from(BigInt::from(BigUint::one() << r));
    let choose_kt = RationalBig::from(BigInt::from(binomial(k, t)));
    let z_point = RationalBig::new(BigInt::from(k - r), BigInt::from(c * c));
    let c_big = BigInt::from(c);

    let mut i = 1usize;
    while i * c * c <= k - r {
        let kr = krawtchouk(k, t, &RationalBig::from(BigInt::from(i * c)))?;
        let lhs = &pow2r * (&kr * &kr) * generalized_binomial(&z_point, i)
            * RationalBig::from(c_big.pow(2 * i as u32))
            / &choose_kt;
        if lhs > pow2k {
            return Ok(false);
        }
        i += 1;
    }
    Ok(true)
}

/// Smallest window length `k` with a nonempty constraint set (`k >= r + c^2`)
/// at which the feasibility test passes, scanning up to `k_max`.
///
/// Window lengths below `r + c^2` satisfy the test vacuously and are not
/// considered witnesses.
pub fn thm4_min_k(r: usize, t: usize, c: usize, k_max: usize) -> Result<Option<usize>> {
    for k in (r + c * c)..=k_max {
        if thm4_feasible(r, t, c, k)? {
            return Ok(Some(k));
        }
    }
    Ok(None)
}

// ---------------------------------------------------------------------------
// The logarithmic integral of the linear-scheme rate bound
// ---------------------------------------------------------------------------

/// `Int(p, lambda) = integral_0^lambda log2((1-2p + sqrt((1-2p)^2 - 4(1-y)y)) / (2(1-y))) dy`,
/// by adaptive Simpson quadrature to absolute tolerance 1e-9.
pub fn int_p_lambda(p: f64, lambda: f64) -> Result<f64> {
    if !(0.0 < p && p < 0.5) {
        return Err(Error::domain(format!("need 0 < p < 1/2, got {p}")));
    }
    if lambda < 0.0 {
        return Err(Error::domain("need lambda >= 0"));
    }
    if lambda == 0.0 {
        return Ok(0.0);
    }
    let a = 1.0 - 2.0 * p;
    // The discriminant a^2 - 4y(1-y) is minimized on [0, lambda] at
    // y = min(lambda, 1/2).
    let worst = lambda.min(0.5);
    if a * a < 4.0 * worst * (1.0 - worst) - 1e-15 {
        return Err(Error::domain(format!(
            "integrand undefined: (1-2p)^2 < 4y(1-y) at y = {worst}"
        )));
    }
    let f = move |y: f64| {
        let disc = (a * a - 4.0 * (1.0 - y) * y).max(0.0);
        ((a + disc.sqrt()) / (2.0 * (1.0 - y))).log2()
    };
    Ok(adaptive_simpson(&f, 0.0, lambda, 1e-9))
}

fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson(f: &dyn Fn(f64) -> f64, a: f64, fa: f64, b: f64, fb: f64) -> (f64, f64, f64) {
        let m = 0.5 * (a + b);
        let fm = f(m);
        ((b - a) / 6.0 * (fa + 4.0 * fm + fb), m, fm)
    }
    fn recurse(
        f: &dyn Fn(f64) -> f64,
        a: f64,
        fa: f64,
        b: f64,
        fb: f64,
        whole: f64,
        m: f64,
        fm: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let (left, lm, flm) = simpson(f, a, fa, m, fm);
        let (right, rm, frm) = simpson(f, m, fm, b, fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        recurse(f, a, fa, m, fm, left, lm, flm, tol / 2.0, depth - 1)
            + recurse(f, m, fm, b, fb, right, rm, frm, tol / 2.0, depth - 1)
    }
    let fa = f(a);
    let fb = f(b);
    let (whole, m, fm) = simpson(f, a, fa, b, fb);
    recurse(f, a, fa, b, fb, whole, m, fm, tol, 48)
}

// ---------------------------------------------------------------------------
// The weight-3 linear-scheme rate condition
// ---------------------------------------------------------------------------

/// Left-hand side of the weight-3 condition at witness `mu`:
/// `2 mu log2(3) + h(9 mu / (1-R)) (1-R)/9 + 2 Int(p, 3 mu)`.
pub fn newub_lhs(p: f64, rate: f64, mu: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&rate) {
        return Err(Error::domain("rate must lie in [0, 1)"));
    }
    let cap = (1.0 - rate) / 9.0;
    if !(0.0..=cap + 1e-15).contains(&mu) {
        return Err(Error::domain(format!("mu = {mu} outside [0, (1-R)/9 = {cap}]")));
    }
    let h_arg = (9.0 * mu / (1.0 - rate)).min(1.0);
    Ok(2.0 * mu * 3.0f64.log2()
        + binary_entropy(h_arg)? * (1.0 - rate) / 9.0
        + 2.0 * int_p_lambda(p, 3.0 * mu)?)
}

/// True iff `(p, R)` is infeasible for weight-3 linear schemes, witnessed
/// by `mu`: the LHS at `mu` exceeds `1 - h(p) - R`.
pub fn newub_violated(p: f64, rate: f64, mu: f64) -> Result<bool> {
    let rhs = 1.0 - binary_entropy(p)? - rate;
    Ok(newub_lhs(p, rate, mu)? > rhs)
}

/// Scans `mu` over `[0, (1-R)/9]` with the given step and returns the
/// witness with the largest violation margin, if any point violates.
pub fn newub_grid_search(p: f64, rate: f64, step: f64) -> Result<Option<f64>> {
    let mut best: Option<(f64, f64)> = None;
    for (mu, margin) in newub_grid(p, rate, step)? {
        if margin > 0.0 && best.map_or(true, |(_, m)| margin > m) {
            best = Some((mu, margin));
        }
    }
    Ok(best.map(|(mu, _)| mu))
}

/// Every violating grid point in `[0, (1-R)/9]` at the given step.
pub fn newub_violations(p: f64, rate: f64, step: f64) -> Result<Vec<f64>> {
    Ok(newub_grid(p, rate, step)?
        .into_iter()
        .filter(|&(_, margin)| margin > 0.0)
        .map(|(mu, _)| mu)
        .collect())
}

fn newub_grid(p: f64, rate: f64, step: f64) -> Result<Vec<(f64, f64)>> {
    if step <= 0.0 {
        return Err(Error::domain("grid step must be positive"));
    }
    let cap = (1.0 - rate) / 9.0;
    let rhs = 1.0 - binary_entropy(p)? - rate;
    let mut out = Vec::new();
    let mut mu = 0.0;
    while mu <= cap + 1e-15 {
        let point = mu.min(cap);
        out.push((point, newub_lhs(p, rate, point)? - rhs));
        mu += step;
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Channel capacity
// ---------------------------------------------------------------------------

/// Mutual information `I(X; Y)` in bits for input distribution `px` over
/// the channel.
pub fn mutual_information(px: &[f64], ch: &Dmc) -> Result<f64> {
    if px.len() != ch.input_size() {
        return Err(Error::domain("input pmf length does not match channel"));
    }
    let sum: f64 = px.iter().sum();
    if px.iter().any(|&p| p < 0.0) || (sum - 1.0).abs() > 1e-9 {
        return Err(Error::domain("input pmf must be nonnegative and sum to 1"));
    }
    let ny = ch.output_size();
    let mut qy = vec![0.0; ny];
    for (x, &p) in px.iter().enumerate() {
        for y in 0..ny {
            qy[y] += p * ch.prob(y, x);
        }
    }
    let mut info = 0.0;
    for (x, &p) in px.iter().enumerate() {
        if p == 0.0 {
            continue;
        }
        for y in 0..ny {
            let pyx = ch.prob(y, x);
            if pyx > 0.0 {
                info += p * pyx * (pyx / qy[y]).log2();
            }
        }
    }
    Ok(info)
}

/// Capacity estimate with the maximizing input distribution.
#[derive(Debug, Clone)]
pub struct CapacityResult {
    pub capacity: f64,
    pub input_dist: Vec<f64>,
    pub iterations: usize,
}

const CAPACITY_TOLERANCE: f64 = 1e-12;
const CAPACITY_MAX_ITERS: usize = 100_000;

/// Channel capacity `max_{p(x)} I(X; Y)` by alternating maximization,
/// iterated until the standard upper/lower capacity gap falls below 1e-12.
pub fn dmc_capacity(ch: &Dmc) -> CapacityResult {
    let nx = ch.input_size();
    let ny = ch.output_size();
    let mut px = vec![1.0 / nx as f64; nx];
    let mut iterations = 0;
    let mut capacity = 0.0;
    for iter in 1..=CAPACITY_MAX_ITERS {
        iterations = iter;
        let mut qy = vec![0.0; ny];
        for x in 0..nx {
            for y in 0..ny {
                qy[y] += px[x] * ch.prob(y, x);
            }
        }
        // Per-input divergence D(p(.|x) || q) in bits.
        let mut div = vec![0.0; nx];
        for (x, d) in div.iter_mut().enumerate() {
            for y in 0..ny {
                let pyx = ch.prob(y, x);
                if pyx > 0.0 {
                    *d += pyx * (pyx / qy[y]).log2();
                }
            }
        }
        let lower: f64 = px.iter().zip(&div).map(|(&p, &d)| p * d).sum();
        let upper = div.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        capacity = lower;
        if upper - lower <= CAPACITY_TOLERANCE {
            break;
        }
        // Multiplicative update p(x) <- p(x) 2^{D_x}, renormalized.
        let mut total = 0.0;
        for x in 0..nx {
            px[x] *= (div[x] * std::f64::consts::LN_2).exp();
            total += px[x];
        }
        for p in px.iter_mut() {
            *p /= total;
        }
    }
    CapacityResult {
        capacity,
        input_dist: px,
        iterations,
    }
}

// ---------------------------------------------------------------------------
// MAC rate region (product input distributions)
// ---------------------------------------------------------------------------

/// The three mutual-information bounds of the two-user region at a product
/// input distribution: `(I(X1;Y|X2), I(X2;Y|X1), I(X1,X2;Y))`.
pub fn mac_information_bounds(mac: &Mac, p1: &[f64], p2: &[f64]) -> Result<(f64, f64, f64)> {
    if p1.len() != mac.x1_size() || p2.len() != mac.x2_size() {
        return Err(Error::domain("input pmf lengths do not match channel"));
    }
    for pmf in [p1, p2] {
        let sum: f64 = pmf.iter().sum();
        if pmf.iter().any(|&p| p < 0.0) || (sum - 1.0).abs() > 1e-9 {
            return Err(Error::domain("input pmfs must be nonnegative and sum to 1"));
        }
    }
    let ny = mac.y_size();

    // I(X1;Y|X2) = sum_x2 p2(x2) I(X1;Y | X2 = x2), and symmetrically.
    let mut i1_given2 = 0.0;
    for (x2, &q2) in p2.iter().enumerate() {
        if q2 == 0.0 {
            continue;
        }
        let rows: Vec<Vec<f64>> = (0..mac.x1_size())
            .map(|x1| (0..ny).map(|y| mac.prob(y, x1, x2)).collect())
            .collect();
        i1_given2 += q2 * conditional_mi(p1, &rows);
    }
    let mut i2_given1 = 0.0;
    for (x1, &q1) in p1.iter().enumerate() {
        if q1 == 0.0 {
            continue;
        }
        let rows: Vec<Vec<f64>> = (0..mac.x2_size())
            .map(|x2| (0..ny).map(|y| mac.prob(y, x1, x2)).collect())
            .collect();
        i2_given1 += q1 * conditional_mi(p2, &rows);
    }

    // I(X1,X2;Y) = H(Y) - H(Y|X1,X2)
    let mut qy = vec![0.0; ny];
    let mut h_y_given_x = 0.0;
    for (x1, &q1) in p1.iter().enumerate() {
        for (x2, &q2) in p2.iter().enumerate() {
            let w = q1 * q2;
            if w == 0.0 {
                continue;
            }
            for y in 0..ny {
                let pyx = mac.prob(y, x1, x2);
                qy[y] += w * pyx;
                if pyx > 0.0 {
                    h_y_given_x -= w * pyx * pyx.log2();
                }
            }
        }
    }
    let h_y = -qy.iter().filter(|&&q| q > 0.0).map(|&q| q * q.log2()).sum::<f64>();
    Ok((i1_given2, i2_given1, h_y - h_y_given_x))
}

fn conditional_mi(px: &[f64], rows: &[Vec<f64>]) -> f64 {
    let ny = rows[0].len();
    let mut qy = vec![0.0; ny];
    for (x, &p) in px.iter().enumerate() {
        for y in 0..ny {
            qy[y] += p * rows[x][y];
        }
    }
    let mut info = 0.0;
    for (x, &p) in px.iter().enumerate() {
        if p == 0.0 {
            continue;
        }
        for y in 0..ny {
            let pyx = rows[x][y];
            if pyx > 0.0 {
                info += p * pyx * (pyx / qy[y]).log2();
            }
        }
    }
    info
}

const REGION_SLACK: f64 = 1e-12;

/// True iff the rate point satisfies all three bounds at the given product
/// input distribution.
pub fn mac_ve_region_contains(
    mac: &Mac,
    p1: &[f64],
    p2: &[f64],
    pt: RegionPoint,
) -> Result<bool> {
    let (i1, i2, i12) = mac_information_bounds(mac, p1, p2)?;
    Ok(pt.r1 <= i1 + REGION_SLACK
        && pt.r2 <= i2 + REGION_SLACK
        && pt.r1 + pt.r2 <= i12 + REGION_SLACK)
}

/// Grid search over product Bernoulli input distributions for a binary MAC:
/// true iff some grid point admits the rate pair. `resolution` is the
/// number of grid cells per axis (so 100 tests 101 values of each
/// parameter).
pub fn mac_ve_region_contains_any(mac: &Mac, pt: RegionPoint, resolution: usize) -> Result<bool> {
    if mac.x1_size() != 2 || mac.x2_size() != 2 {
        return Err(Error::domain(
            "grid search over input pmfs is implemented for binary-input MACs",
        ));
    }
    if resolution == 0 {
        return Err(Error::domain("grid resolution must be positive"));
    }
    for i in 0..=resolution {
        let a = i as f64 / resolution as f64;
        for j in 0..=resolution {
            let b = j as f64 / resolution as f64;
            if mac_ve_region_contains(mac, &[1.0 - a, a], &[1.0 - b, b], pt)? {
                return Ok(true);
            }
        }
    }
    Ok(false)
}
