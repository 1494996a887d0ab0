//! Exact arithmetic on polynomials over GF(2).
//!
//! Coefficients are stored as a packed bit vector, lowest power first.
//! Irreducibility is decided by trial division against every candidate
//! divisor of degree up to `r/2`, which costs `O(2^{r/2})` divisions and is
//! comfortable at the degrees this toolkit targets (r up to ~20).
//! Multiplicative order factors `2^r - 1` by trial division and strips
//! prime factors from the exponent.

use std::fmt;
use std::str::FromStr;

use crate::{Error, Result};

/// A binary polynomial, e.g. `z^5 + z^4 + z^2 + z + 1`.
///
/// Bit `i` of the packed words is the coefficient of `z^i`. The
/// representation is kept normalized: the highest stored word is nonzero
/// unless the polynomial is zero (whose degree is `None`).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Gf2Poly {
    words: Vec<u64>,
}

impl Gf2Poly {
    pub fn zero() -> Self {
        Gf2Poly { words: Vec::new() }
    }

    pub fn one() -> Self {
        Gf2Poly { words: vec![1] }
    }

    /// The monomial `z`.
    pub fn z() -> Self {
        Gf2Poly { words: vec![2] }
    }

    fn from_words(mut words: Vec<u64>) -> Self {
        while words.last() == Some(&0) {
            words.pop();
        }
        Gf2Poly { words }
    }

    /// Builds a polynomial from the exponents of its nonzero terms.
    pub fn from_exponents(exponents: &[usize]) -> Self {
        let mut p = Gf2Poly::zero();
        for &e in exponents {
            p.toggle(e);
        }
        p
    }

    /// Parses an ascending-power bit string, `"101011"` meaning
    /// `1 + z^2 + z^4 + z^5`.
    pub fn from_bit_str(s: &str) -> Result<Self> {
        if s.is_empty() {
            return Err(Error::format("empty polynomial string"));
        }
        let mut p = Gf2Poly::zero();
        for (i, ch) in s.chars().enumerate() {
            match ch {
                '0' => {}
                '1' => p.toggle(i),
                _ => return Err(Error::format(format!("invalid bit '{ch}' in polynomial"))),
            }
        }
        Ok(p)
    }

    /// Parses either an ascending-power bit string (`"110101"`) or a
    /// comma-separated exponent list (`"0,2,4,5"`). A string consisting
    /// solely of the characters `0` and `1` with no comma is read as a bit
    /// string.
    pub fn parse_spec(s: &str) -> Result<Self> {
        let s = s.trim();
        if !s.contains(',') && s.chars().all(|c| c == '0' || c == '1') {
            return Gf2Poly::from_bit_str(s);
        }
        let mut exps = Vec::new();
        for part in s.split(',') {
            let e: usize = part
                .trim()
                .parse()
                .map_err(|_| Error::format(format!("invalid exponent '{part}'")))?;
            exps.push(e);
        }
        Ok(Gf2Poly::from_exponents(&exps))
    }

    fn toggle(&mut self, power: usize) {
        let word = power / 64;
        if word >= self.words.len() {
            self.words.resize(word + 1, 0);
        }
        self.words[word] ^= 1u64 << (power % 64);
        while self.words.last() == Some(&0) {
            self.words.pop();
        }
    }

    pub fn coeff(&self, power: usize) -> bool {
        self.words
            .get(power / 64)
            .map_or(false, |w| (w >> (power % 64)) & 1 == 1)
    }

    pub fn is_zero(&self) -> bool {
        self.words.is_empty()
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        let last = *self.words.last()?;
        Some((self.words.len() - 1) * 64 + (63 - last.leading_zeros() as usize))
    }

    /// Number of nonzero coefficients.
    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Exponents of the nonzero terms, ascending.
    pub fn exponents(&self) -> Vec<usize> {
        let deg = match self.degree() {
            Some(d) => d,
            None => return Vec::new(),
        };
        (0..=deg).filter(|&i| self.coeff(i)).collect()
    }

    /// Coefficients `a_0..a_{r-1}` below the leading term, as bits.
    pub fn low_coeffs(&self) -> Vec<u8> {
        let deg = self.degree().unwrap_or(0);
        (0..deg).map(|i| self.coeff(i) as u8).collect()
    }

    pub fn add(&self, other: &Gf2Poly) -> Gf2Poly {
        let n = self.words.len().max(other.words.len());
        let mut words = vec![0u64; n];
        for (i, w) in words.iter_mut().enumerate() {
            *w = self.words.get(i).copied().unwrap_or(0) ^ other.words.get(i).copied().unwrap_or(0);
        }
        Gf2Poly::from_words(words)
    }

    fn shifted(&self, bits: usize) -> Gf2Poly {
        if self.is_zero() {
            return Gf2Poly::zero();
        }
        let word_shift = bits / 64;
        let bit_shift = bits % 64;
        let mut words = vec![0u64; self.words.len() + word_shift + 1];
        for (i, &w) in self.words.iter().enumerate() {
            words[i + word_shift] |= w << bit_shift;
            if bit_shift > 0 {
                words[i + word_shift + 1] |= w >> (64 - bit_shift);
            }
        }
        Gf2Poly::from_words(words)
    }

    /// Carry-less product over GF(2).
    pub fn multiply(&self, other: &Gf2Poly) -> Gf2Poly {
        if self.is_zero() || other.is_zero() {
            return Gf2Poly::zero();
        }
        let (short, long) = if self.weight() <= other.weight() {
            (self, other)
        } else {
            (other, self)
        };
        let mut acc = Gf2Poly::zero();
        for e in short.exponents() {
            acc = acc.add(&long.shifted(e));
        }
        acc
    }

    /// Quotient and remainder of `self / divisor`.
    pub fn div_rem(&self, divisor: &Gf2Poly) -> Result<(Gf2Poly, Gf2Poly)> {
        let ddeg = divisor
            .degree()
            .ok_or_else(|| Error::domain("division by zero polynomial"))?;
        let mut rem = self.clone();
        let mut quot = Gf2Poly::zero();
        while let Some(rdeg) = rem.degree() {
            if rdeg < ddeg {
                break;
            }
            let shift = rdeg - ddeg;
            quot.toggle(shift);
            rem = rem.add(&divisor.shifted(shift));
        }
        Ok((quot, rem))
    }

    pub fn rem(&self, modulus: &Gf2Poly) -> Result<Gf2Poly> {
        Ok(self.div_rem(modulus)?.1)
    }

    pub fn divides(&self, other: &Gf2Poly) -> bool {
        match other.rem(self) {
            Ok(r) => r.is_zero(),
            Err(_) => false,
        }
    }

    /// `z^e mod self`, by square and multiply.
    fn z_pow_mod(&self, e: u64) -> Result<Gf2Poly> {
        let mut result = Gf2Poly::one().rem(self)?;
        let mut base = Gf2Poly::z().rem(self)?;
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                result = result.multiply(&base).rem(self)?;
            }
            base = base.multiply(&base).rem(self)?;
            e >>= 1;
        }
        Ok(result)
    }

    /// True iff the polynomial has no nontrivial factor over GF(2).
    ///
    /// Trial division against every polynomial of degree `1..=r/2`.
    pub fn is_irreducible(&self) -> Result<bool> {
        let deg = self.degree().unwrap_or(0);
        if deg == 0 {
            return Err(Error::domain(
                "irreducibility is undefined for constant polynomials",
            ));
        }
        if deg == 1 {
            return Ok(true);
        }
        // A polynomial with zero constant term is divisible by z.
        if !self.coeff(0) {
            return Ok(false);
        }
        for d in 1..=deg / 2 {
            // Candidates of degree d, encoded as integers with the top bit set.
            for bits in (1u64 << d)..(1u64 << (d + 1)) {
                let cand = Gf2Poly::from_words(vec![bits]);
                if cand.divides(self) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// Multiplicative order: the smallest `t >= 1` with `self | z^t + 1`.
    ///
    /// Requires an irreducible polynomial with nonzero constant term. The
    /// order divides `2^r - 1`, which is factored by trial division; prime
    /// factors are then stripped from the exponent while `z^t = 1` holds.
    pub fn order(&self) -> Result<u64> {
        let deg = self
            .degree()
            .ok_or_else(|| Error::domain("order of zero polynomial"))?;
        if deg == 0 {
            return Err(Error::domain("order is undefined for constants"));
        }
        if !self.coeff(0) {
            return Err(Error::domain("order requires a nonzero constant term"));
        }
        if !self.is_irreducible()? {
            return Err(Error::domain("order requires an irreducible polynomial"));
        }
        if deg > 63 {
            return Err(Error::resource("order computation limited to degree <= 63"));
        }
        let group = (1u64 << deg) - 1;
        let mut t = group;
        for p in prime_factors(group) {
            while t % p == 0 && self.z_pow_mod(t / p)?.is_one() {
                t /= p;
            }
        }
        Ok(t)
    }

    fn is_one(&self) -> bool {
        self.words == [1]
    }

    /// True iff irreducible of degree `r` with order `2^r - 1`.
    pub fn is_primitive(&self) -> bool {
        let deg = match self.degree() {
            Some(d) if d >= 1 => d,
            _ => return false,
        };
        if deg > 63 || !self.coeff(0) {
            return false;
        }
        match self.is_irreducible() {
            Ok(true) => {}
            _ => return false,
        }
        match self.order() {
            Ok(t) => t == (1u64 << deg) - 1,
            Err(_) => false,
        }
    }
}

impl fmt::Display for Gf2Poly {
    /// Ascending-power bit string: `1 + z^2 + z^4 + z^5` prints as `"101011"`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.degree() {
            None => write!(f, "0"),
            Some(deg) => {
                for i in 0..=deg {
                    write!(f, "{}", self.coeff(i) as u8)?;
                }
                Ok(())
            }
        }
    }
}

impl fmt::Debug for Gf2Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Gf2Poly({self})")
    }
}

impl FromStr for Gf2Poly {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Gf2Poly::from_bit_str(s)
    }
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut factors = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            factors.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        factors.push(n);
    }
    factors
}

/// Every irreducible polynomial of the given degree with nonzero constant
/// term, in increasing bit-pattern order.
pub fn irreducible_polys(degree: usize) -> Vec<Gf2Poly> {
    assert!(degree >= 1 && degree <= 24, "degree out of supported range");
    let mut out = Vec::new();
    for bits in (1u64 << degree)..(1u64 << (degree + 1)) {
        if bits & 1 == 0 {
            continue;
        }
        let p = Gf2Poly::from_words(vec![bits]);
        if p.is_irreducible().unwrap_or(false) {
            out.push(p);
        }
    }
    out
}

/// Every primitive polynomial of the given degree.
pub fn primitive_polys(degree: usize) -> Vec<Gf2Poly> {
    irreducible_polys(degree)
        .into_iter()
        .filter(|p| p.is_primitive())
        .collect()
}
