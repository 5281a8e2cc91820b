//! Sparse bivariate integer polynomials.
//!
//! Text grammar (shared with the command line): terms of the form
//! `[±][c*]m1[^a][*m2[^b]]` joined by `+` or `-`, whitespace ignored, e.g.
//! `2*m1*m2 - m2^4`. Factors may appear in any order and repeat; like terms are merged.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith::{Rational, Real};
use crate::error::domain;
use crate::{Error, Result};

/// Largest exponent allowed on either variable.
pub const MAX_EXPONENT: u32 = 64;

/// Exponent pair `(γ1, γ2)` of the monomial `m1^γ1 m2^γ2`.
pub type Exponent = (u32, u32);

/// Variable selector for axis decompositions and partial sums.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Axis {
    First,
    Second,
}

impl Axis {
    pub fn other(self) -> Axis {
        match self {
            Axis::First => Axis::Second,
            Axis::Second => Axis::First,
        }
    }
}

/// Polynomial `Σ c_{γ1,γ2} m1^γ1 m2^γ2` with arbitrary-precision coefficients.
///
/// No stored coefficient is zero.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Poly2 {
    terms: BTreeMap<Exponent, BigInt>,
}

impl Poly2 {
    pub fn zero() -> Self {
        Poly2::default()
    }

    pub fn monomial(c: impl Into<BigInt>, a: u32, b: u32) -> Result<Self> {
        Poly2::from_terms([((a, b), c.into())])
    }

    /// Builds a polynomial, merging repeated exponents and dropping zero coefficients.
    pub fn from_terms<I, C>(terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Exponent, C)>,
        C: Into<BigInt>,
    {
        let mut map: BTreeMap<Exponent, BigInt> = BTreeMap::new();
        for ((a, b), c) in terms {
            if a > MAX_EXPONENT || b > MAX_EXPONENT {
                return Err(domain!("exponent ({a},{b}) exceeds {MAX_EXPONENT}"));
            }
            *map.entry((a, b)).or_insert_with(BigInt::zero) += c.into();
        }
        map.retain(|_, c| !c.is_zero());
        Ok(Poly2 { terms: map })
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (Exponent, &BigInt)> + '_ {
        self.terms.iter().map(|(e, c)| (*e, c))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, a: u32, b: u32) -> BigInt {
        self.terms.get(&(a, b)).cloned().unwrap_or_default()
    }

    /// `S_P`, the exponents with nonzero coefficient.
    pub fn support(&self) -> BTreeSet<Exponent> {
        self.terms.keys().copied().collect()
    }

    pub fn constant_term(&self) -> BigInt {
        self.coefficient(0, 0)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|(a, b)| a + b).max().unwrap_or(0)
    }

    /// `(d1, d2)`: the degrees in `m1` and in `m2` separately.
    pub fn partial_degrees(&self) -> (u32, u32) {
        let d1 = self.terms.keys().map(|e| e.0).max().unwrap_or(0);
        let d2 = self.terms.keys().map(|e| e.1).max().unwrap_or(0);
        (d1, d2)
    }

    /// Degenerate means no mixed monomial, i.e. `P = P1(m1) + P2(m2)`.
    pub fn is_degenerate(&self) -> Result<bool> {
        self.require_vanishing_constant()?;
        Ok(!self.terms.keys().any(|&(a, b)| a > 0 && b > 0))
    }

    pub fn require_vanishing_constant(&self) -> Result<()> {
        if self.constant_term().is_zero() {
            Ok(())
        } else {
            Err(domain!("the polynomial must satisfy P(0,0) = 0, found constant term {}", self.constant_term()))
        }
    }

    /// Term-by-term exact value at an integer point.
    pub fn evaluate(&self, m1: i64, m2: i64) -> BigInt {
        let (x, y) = (BigInt::from(m1), BigInt::from(m2));
        self.terms
            .iter()
            .map(|(&(a, b), c)| c * num_traits::pow(x.clone(), a as usize) * num_traits::pow(y.clone(), b as usize))
            .sum()
    }

    /// Same value by nested Horner evaluation, first in `m2` within each `m1` power.
    pub fn evaluate_horner(&self, m1: i64, m2: i64) -> BigInt {
        let x = BigInt::from(m1);
        let y = BigInt::from(m2);
        let rows = self.axis_decompose(Axis::First);
        // rows: γ1 -> polynomial in m2; evaluate each by Horner, then Horner over γ1.
        let d1 = rows.keys().max().copied().unwrap_or(0);
        let mut acc = BigInt::zero();
        for g in (0..=d1).rev() {
            acc *= &x;
            if let Some(row) = rows.get(&g) {
                acc += row.evaluate_big(&y);
            }
        }
        acc
    }

    /// Fast checked evaluation; `None` on overflow.
    pub fn evaluate_i128(&self, m1: i64, m2: i64) -> Option<i128> {
        let mut acc: i128 = 0;
        for (&(a, b), c) in &self.terms {
            let c = c.to_i128()?;
            let t = (m1 as i128).checked_pow(a)?.checked_mul((m2 as i128).checked_pow(b)?)?;
            acc = acc.checked_add(c.checked_mul(t)?)?;
        }
        Some(acc)
    }

    /// Floating-point value at a real point.
    pub fn evaluate_f64(&self, x: f64, y: f64) -> f64 {
        self.terms
            .iter()
            .map(|(&(a, b), c)| c.to_f64().unwrap_or(f64::NAN) * libm::pow(x, a as f64) * libm::pow(y, b as f64))
            .sum()
    }

    /// Rewrites `P` as a polynomial in one variable with coefficients in the other.
    ///
    /// `Axis::Second` returns `{γ2 ↦ P_{1,γ2}}` with `P = Σ P_{1,γ2}(m1) m2^γ2`;
    /// `Axis::First` returns `{γ1 ↦ P_{2,γ1}}` with `P = Σ P_{2,γ1}(m2) m1^γ1`.
    pub fn axis_decompose(&self, axis: Axis) -> BTreeMap<u32, UniPoly> {
        let mut rows: BTreeMap<u32, Vec<(u32, BigInt)>> = BTreeMap::new();
        for (&(a, b), c) in &self.terms {
            let (key, power) = match axis {
                Axis::Second => (b, a),
                Axis::First => (a, b),
            };
            rows.entry(key).or_default().push((power, c.clone()));
        }
        rows.into_iter().map(|(k, v)| (k, UniPoly::from_sparse(v))).collect()
    }

    /// `(ẽ1, ẽ2) = (deg P_{1,d2}, deg P_{2,d1})`: the top `m1`-degree among terms of top
    /// `m2`-degree and vice versa.
    pub fn leading_partial_exponents(&self) -> (u32, u32) {
        let (d1, d2) = self.partial_degrees();
        let e1 = self.terms.keys().filter(|e| e.1 == d2).map(|e| e.0).max().unwrap_or(0);
        let e2 = self.terms.keys().filter(|e| e.0 == d1).map(|e| e.1).max().unwrap_or(0);
        (e1, e2)
    }

    /// `P_ξ = ξ P`. Exact fractions keep an exact tag for modular phase evaluation.
    pub fn scale(&self, xi: &Real) -> RealPoly2 {
        match xi {
            Real::Exact(r) => RealPoly2::scaled_exact(self, *r),
            Real::Float(x) => RealPoly2::scaled_float(self, *x),
        }
    }

    pub fn neg(&self) -> Poly2 {
        Poly2 { terms: self.terms.iter().map(|(e, c)| (*e, -c)).collect() }
    }

    pub fn add(&self, other: &Poly2) -> Poly2 {
        let mut terms = self.terms.clone();
        for (e, c) in &other.terms {
            *terms.entry(*e).or_insert_with(BigInt::zero) += c;
        }
        terms.retain(|_, c| !c.is_zero());
        Poly2 { terms }
    }

    /// gcd of all coefficients (0 for the zero polynomial).
    pub fn content(&self) -> BigInt {
        self.terms.values().fold(BigInt::zero(), |g, c| g.gcd(c))
    }
}

impl fmt::Display for Poly2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (&(a, b), c)) in self.terms.iter().enumerate() {
            let negative = c.is_negative();
            let mag = c.abs();
            match (i, negative) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            let mut factors: Vec<String> = Vec::new();
            if !mag.is_one() || (a == 0 && b == 0) {
                factors.push(alloc::format!("{mag}"));
            }
            for (name, p) in [("m1", a), ("m2", b)] {
                match p {
                    0 => {}
                    1 => factors.push(String::from(name)),
                    _ => factors.push(alloc::format!("{name}^{p}")),
                }
            }
            f.write_str(&factors.join("*"))?;
        }
        Ok(())
    }
}

impl FromStr for Poly2 {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Parser::new(s).parse()
    }
}

/// Parses the polynomial grammar; see the module docs.
pub fn parse(text: &str) -> Result<Poly2> {
    text.parse()
}

struct Parser<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(s: &'a str) -> Self {
        Parser { bytes: s.as_bytes(), pos: 0 }
    }

    fn error<T>(&self, message: &str) -> Result<T> {
        Err(Error::Parse { position: self.pos, message: String::from(message) })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.bytes.get(self.pos).copied()
    }

    fn number(&mut self) -> Result<BigUint> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return self.error("expected a number");
        }
        let digits = core::str::from_utf8(&self.bytes[start..self.pos]).unwrap_or("0");
        Ok(digits.parse::<BigUint>().unwrap_or_default())
    }

    fn exponent(&mut self) -> Result<u32> {
        if self.peek() != Some(b'^') {
            return Ok(1);
        }
        self.pos += 1;
        let n = self.number()?;
        match n.to_u32() {
            Some(k) if k <= MAX_EXPONENT => Ok(k),
            _ => self.error("exponent exceeds 64"),
        }
    }

    fn factor(&mut self, coeff: &mut BigInt, exps: &mut Exponent) -> Result<()> {
        match self.peek() {
            Some(c) if c.is_ascii_digit() => {
                *coeff *= BigInt::from_biguint(Sign::Plus, self.number()?);
                Ok(())
            }
            Some(b'm') => {
                self.pos += 1;
                let which = self.bytes.get(self.pos).copied();
                let slot = match which {
                    Some(b'1') => &mut exps.0,
                    Some(b'2') => &mut exps.1,
                    _ => return self.error("expected variable m1 or m2"),
                };
                self.pos += 1;
                let k = self.exponent()?;
                *slot += k;
                if *slot > MAX_EXPONENT {
                    return self.error("exponent exceeds 64");
                }
                Ok(())
            }
            Some(_) => self.error("expected a coefficient or m1/m2"),
            None => self.error("unexpected end of input"),
        }
    }

    fn parse(mut self) -> Result<Poly2> {
        let mut terms: Vec<(Exponent, BigInt)> = Vec::new();
        if self.peek().is_none() {
            return self.error("empty polynomial");
        }
        let mut first = true;
        loop {
            let mut sign = BigInt::one();
            match self.peek() {
                Some(b'+') => self.pos += 1,
                Some(b'-') => {
                    self.pos += 1;
                    sign = -sign;
                }
                Some(_) if first => {}
                Some(_) => return self.error("expected `+` or `-` between terms"),
                None => break,
            }
            first = false;
            let mut coeff = sign;
            let mut exps = (0, 0);
            self.factor(&mut coeff, &mut exps)?;
            while self.peek() == Some(b'*') {
                self.pos += 1;
                self.factor(&mut coeff, &mut exps)?;
            }
            terms.push((exps, coeff));
        }
        Poly2::from_terms(terms)
    }
}

/// Univariate integer polynomial, coefficients from the constant term up.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct UniPoly {
    coeffs: Vec<BigInt>,
}

impl UniPoly {
    pub fn new<C: Into<BigInt>>(coeffs: impl IntoIterator<Item = C>) -> Self {
        let mut coeffs: Vec<BigInt> = coeffs.into_iter().map(Into::into).collect();
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        UniPoly { coeffs }
    }

    fn from_sparse(terms: Vec<(u32, BigInt)>) -> Self {
        let deg = terms.iter().map(|t| t.0).max().unwrap_or(0) as usize;
        let mut coeffs = alloc::vec![BigInt::zero(); deg + 1];
        for (p, c) in terms {
            coeffs[p as usize] += c;
        }
        UniPoly::new(coeffs)
    }

    pub fn monomial(c: i64, power: u32) -> Self {
        let mut coeffs = alloc::vec![BigInt::zero(); power as usize + 1];
        coeffs[power as usize] = BigInt::from(c);
        UniPoly::new(coeffs)
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn evaluate_big(&self, x: &BigInt) -> BigInt {
        self.coeffs.iter().rev().fold(BigInt::zero(), |acc, c| acc * x + c)
    }

    pub fn evaluate(&self, x: i64) -> BigInt {
        self.evaluate_big(&BigInt::from(x))
    }

    pub fn evaluate_i128(&self, x: i64) -> Option<i128> {
        let mut acc: i128 = 0;
        for c in self.coeffs.iter().rev() {
            acc = acc.checked_mul(x as i128)?.checked_add(c.to_i128()?)?;
        }
        Some(acc)
    }

    /// Lifts to a bivariate polynomial in the chosen variable.
    pub fn lift(&self, axis: Axis) -> Poly2 {
        let terms = self.coeffs.iter().enumerate().map(|(p, c)| {
            let e = match axis {
                Axis::First => (p as u32, 0),
                Axis::Second => (0, p as u32),
            };
            (e, c.clone())
        });
        Poly2::from_terms(terms).unwrap_or_default()
    }
}

/// Exact fractional coefficients `numerator / modulus` of a scaled polynomial.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactCoefficients {
    pub modulus: BigUint,
    /// Numerators reduced into `[0, modulus)`.
    pub numerators: Vec<(Exponent, BigUint)>,
}

/// Polynomial with real coefficients, optionally carrying exact rational coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct RealPoly2 {
    terms: Vec<(Exponent, f64)>,
    exact: Option<ExactCoefficients>,
}

impl RealPoly2 {
    /// Real coefficients; zero entries are dropped and exponents merged.
    pub fn from_real_terms(terms: impl IntoIterator<Item = (Exponent, f64)>) -> Result<Self> {
        let mut map: BTreeMap<Exponent, f64> = BTreeMap::new();
        for (e, c) in terms {
            if !c.is_finite() {
                return Err(domain!("non-finite coefficient at {e:?}"));
            }
            *map.entry(e).or_insert(0.0) += c;
        }
        map.retain(|_, c| *c != 0.0);
        Ok(RealPoly2 { terms: map.into_iter().collect(), exact: None })
    }

    /// Exact rational coefficients (phases reduced modulo the lcm of the denominators).
    pub fn from_rational_terms(terms: impl IntoIterator<Item = (Exponent, Rational)>) -> Result<Self> {
        let mut map: BTreeMap<Exponent, Rational> = BTreeMap::new();
        for (e, c) in terms {
            let slot = map.entry(e).or_insert(Rational::ZERO);
            *slot = slot.checked_add(&c)?;
        }
        map.retain(|_, c| c.num() != 0);
        let modulus = map.values().fold(BigUint::one(), |l, c| l.lcm(&BigUint::from(c.den() as u64)));
        let numerators = map
            .iter()
            .map(|(e, c)| {
                let scale = BigInt::from(modulus.clone()) / BigInt::from(c.den());
                let n = (BigInt::from(c.num()) * scale).mod_floor(&BigInt::from(modulus.clone()));
                (*e, n.to_biguint().unwrap_or_default())
            })
            .filter(|(_, n)| !n.is_zero())
            .collect();
        let terms = map.iter().map(|(e, c)| (*e, c.to_f64())).collect();
        Ok(RealPoly2 { terms, exact: Some(ExactCoefficients { modulus, numerators }) })
    }

    fn scaled_exact(p: &Poly2, xi: Rational) -> Self {
        let q = BigInt::from(xi.den());
        let modulus = q.to_biguint().unwrap_or_else(BigUint::one);
        let a = BigInt::from(xi.num());
        let numerators = p
            .terms()
            .map(|(e, c)| (e, (c * &a).mod_floor(&q).to_biguint().unwrap_or_default()))
            .filter(|(_, n)| !n.is_zero())
            .collect();
        let terms = p
            .terms()
            .map(|(e, c)| (e, c.to_f64().unwrap_or(f64::NAN) * xi.to_f64()))
            .filter(|(_, c)| *c != 0.0)
            .collect();
        RealPoly2 { terms, exact: Some(ExactCoefficients { modulus, numerators }) }
    }

    fn scaled_float(p: &Poly2, xi: f64) -> Self {
        let terms = p
            .terms()
            .map(|(e, c)| (e, c.to_f64().unwrap_or(f64::NAN) * xi))
            .filter(|(_, c)| *c != 0.0)
            .collect();
        RealPoly2 { terms, exact: None }
    }

    pub fn zero() -> Self {
        RealPoly2 { terms: Vec::new(), exact: None }
    }

    pub fn terms(&self) -> &[(Exponent, f64)] {
        &self.terms
    }

    pub fn exact(&self) -> Option<&ExactCoefficients> {
        self.exact.as_ref()
    }

    pub fn is_exact(&self) -> bool {
        self.exact.is_some()
    }

    pub fn coefficient(&self, a: u32, b: u32) -> f64 {
        self.terms.iter().find(|(e, _)| *e == (a, b)).map(|t| t.1).unwrap_or(0.0)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn evaluate(&self, x: f64, y: f64) -> f64 {
        self.terms.iter().map(|&((a, b), c)| c * libm::pow(x, a as f64) * libm::pow(y, b as f64)).sum()
    }

    pub fn neg(&self) -> RealPoly2 {
        let terms = self.terms.iter().map(|&(e, c)| (e, -c)).collect();
        let exact = self.exact.as_ref().map(|ex| ExactCoefficients {
            modulus: ex.modulus.clone(),
            numerators: ex
                .numerators
                .iter()
                .map(|(e, n)| (*e, (&ex.modulus - n) % &ex.modulus))
                .filter(|(_, n)| !n.is_zero())
                .collect(),
        });
        RealPoly2 { terms, exact }
    }
}

/// Univariate real polynomial, coefficients from the constant term up.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct RealUniPoly {
    coeffs: Vec<f64>,
}

impl RealUniPoly {
    pub fn new(coeffs: impl IntoIterator<Item = f64>) -> Self {
        let mut coeffs: Vec<f64> = coeffs.into_iter().collect();
        while coeffs.last() == Some(&0.0) {
            coeffs.pop();
        }
        RealUniPoly { coeffs }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn evaluate(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c)
    }

    pub fn derivative(&self) -> RealUniPoly {
        RealUniPoly::new(self.coeffs.iter().enumerate().skip(1).map(|(k, c)| k as f64 * c))
    }
}
