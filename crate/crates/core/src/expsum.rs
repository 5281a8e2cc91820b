//! One- and two-parameter exponential sums.
//!
//! Phases are never formed as floating-point products. Rational coefficients `a/q` are
//! reduced modulo `q` in integer arithmetic, and a double coefficient is read as the exact
//! dyadic `M·2^E` it represents and reduced modulo `2^-E`. Only the final residue in
//! `[0, 1)` is converted to a double, so a phase `ξ m1² m2³` with `m ≈ 2^10` keeps its full
//! 53 bits of fractional precision.
//!
//! Double sums are organised by rows: the outer variable is fixed, the polynomial collapses
//! to a univariate polynomial in the inner variable, and that row is summed by Horner's
//! rule. The same rows back the partitioned API ([`DoubleSumPlan`]), which lets callers
//! evaluate disjoint outer ranges independently and merge them in a fixed order.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::Range;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::arith::Real;
use crate::error::{contract, domain};
use crate::poly::{Axis, Exponent, RealPoly2, RealUniPoly};
use crate::quad::{GaussLegendre, DEFAULT_ORDER};
use crate::sum::{e, roots_of_unity, ComplexSum, NeumaierSum};
use crate::{Complex, Result};

/// How the phases of a sum were reduced.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mode {
    /// Rational coefficients, phases reduced exactly modulo the common denominator.
    ExactPhase,
    /// Double coefficients (phases still reduced exactly as dyadic rationals).
    FloatPhase,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::ExactPhase => "exact-rational-phase",
            Mode::FloatPhase => "float-phase",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExpSumValue {
    pub value: Complex,
    pub mode: Mode,
    pub term_count: u64,
    /// `term_count · 8 ulp` of the largest running magnitude in float mode, zero otherwise.
    pub error_budget: f64,
}

/// Largest modulus for which the roots of unity are tabulated.
pub const TABLE_LIMIT: u64 = 1 << 16;
/// Largest number of monomials `n^i` in a Weyl sum.
pub const MAX_WEYL_DEGREE: usize = 8;

/// `e(t / modulus)` for a residue folded so that `t` and `-t` give exact conjugates.
trait Ring {
    type T: Clone;
    fn zero(&self) -> Self::T;
    fn add(&self, a: &Self::T, b: &Self::T) -> Self::T;
    fn mul(&self, a: &Self::T, b: &Self::T) -> Self::T;
    fn embed(&self, m: i64) -> Self::T;
    fn angle(&self, t: &Self::T) -> Complex;
}

struct ModU64 {
    q: u64,
    table: Option<Vec<Complex>>,
}

impl ModU64 {
    fn new(q: u64) -> Self {
        let table = (q <= TABLE_LIMIT).then(|| roots_of_unity(q));
        ModU64 { q, table }
    }
}

impl Ring for ModU64 {
    type T = u64;
    fn zero(&self) -> u64 {
        0
    }
    fn add(&self, a: &u64, b: &u64) -> u64 {
        ((*a as u128 + *b as u128) % self.q as u128) as u64
    }
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        ((*a as u128 * *b as u128) % self.q as u128) as u64
    }
    fn embed(&self, m: i64) -> u64 {
        (m as i128).rem_euclid(self.q as i128) as u64
    }
    fn angle(&self, t: &u64) -> Complex {
        match &self.table {
            Some(table) => table[*t as usize],
            None => crate::sum::e_ratio(*t, self.q),
        }
    }
}

/// Residues modulo `2^bits`, `bits <= 128`, kept in wrapping `u128` arithmetic.
struct Dyadic {
    bits: u32,
}

impl Dyadic {
    fn mask(&self, t: u128) -> u128 {
        if self.bits == 128 {
            t
        } else {
            t & ((1u128 << self.bits) - 1)
        }
    }
}

impl Ring for Dyadic {
    type T = u128;
    fn zero(&self) -> u128 {
        0
    }
    fn add(&self, a: &u128, b: &u128) -> u128 {
        a.wrapping_add(*b)
    }
    fn mul(&self, a: &u128, b: &u128) -> u128 {
        a.wrapping_mul(*b)
    }
    fn embed(&self, m: i64) -> u128 {
        m as i128 as u128
    }
    fn angle(&self, t: &u128) -> Complex {
        let t = self.mask(*t);
        if self.bits == 0 || t == 0 {
            return Complex::new(1.0, 0.0);
        }
        let half = 1u128 << (self.bits - 1);
        let scale = libm::ldexp(1.0, -(self.bits as i32));
        if t == half {
            Complex::new(-1.0, 0.0)
        } else if t < half {
            e(t as f64 * scale)
        } else {
            let back = self.mask(t.wrapping_neg());
            e(back as f64 * scale).conj()
        }
    }
}

struct BigMod {
    q: BigUint,
}

impl Ring for BigMod {
    type T = BigUint;
    fn zero(&self) -> BigUint {
        BigUint::zero()
    }
    fn add(&self, a: &BigUint, b: &BigUint) -> BigUint {
        (a + b) % &self.q
    }
    fn mul(&self, a: &BigUint, b: &BigUint) -> BigUint {
        (a * b) % &self.q
    }
    fn embed(&self, m: i64) -> BigUint {
        let q = num_bigint::BigInt::from(self.q.clone());
        num_bigint::BigInt::from(m).mod_floor(&q).to_biguint().unwrap_or_default()
    }
    fn angle(&self, t: &BigUint) -> Complex {
        if t.is_zero() {
            return Complex::new(1.0, 0.0);
        }
        let twice = t << 1u32;
        if twice == self.q {
            return Complex::new(-1.0, 0.0);
        }
        let ratio = |x: &BigUint| -> f64 {
            let scaled = (x << 64u32) / &self.q;
            scaled.to_f64().unwrap_or(0.0) * libm::ldexp(1.0, -64)
        };
        if twice < self.q {
            e(ratio(t))
        } else {
            e(ratio(&(&self.q - t))).conj()
        }
    }
}

/// Coefficients of a scaled polynomial in one of the residue rings.
enum Engine {
    Small(ModU64, Vec<(Exponent, u64)>),
    Dyadic(Dyadic, Vec<(Exponent, u128)>),
    Big(BigMod, Vec<(Exponent, BigUint)>),
}

/// `(sign, mantissa, exponent)` with `x = ±mantissa · 2^exponent` and odd mantissa.
fn decode(x: f64) -> (bool, u64, i32) {
    let bits = x.to_bits();
    let negative = bits >> 63 == 1;
    let raw_exp = ((bits >> 52) & 0x7ff) as i32;
    let frac = bits & ((1u64 << 52) - 1);
    let (mut m, mut exp) = if raw_exp == 0 { (frac, -1074) } else { (frac | (1u64 << 52), raw_exp - 1075) };
    if m == 0 {
        return (false, 0, 0);
    }
    let tz = m.trailing_zeros();
    m >>= tz;
    exp += tz as i32;
    (negative, m, exp)
}

impl Engine {
    fn new(q: &RealPoly2) -> Engine {
        if let Some(ex) = q.exact() {
            if let Some(m) = ex.modulus.to_u64() {
                let coeffs = ex.numerators.iter().map(|(e, n)| (*e, n.to_u64().unwrap_or(0))).collect();
                return Engine::Small(ModU64::new(m), coeffs);
            }
            return Engine::Big(BigMod { q: ex.modulus.clone() }, ex.numerators.clone());
        }
        // Integral coefficients contribute nothing modulo 1.
        let fractional: Vec<(Exponent, bool, u64, u32)> = q
            .terms()
            .iter()
            .filter_map(|&(e, c)| {
                let (neg, m, exp) = decode(c);
                (m != 0 && exp < 0).then_some((e, neg, m, (-exp) as u32))
            })
            .collect();
        let bits = fractional.iter().map(|t| t.3).max().unwrap_or(0);
        if bits <= 128 {
            let ring = Dyadic { bits };
            let coeffs = fractional
                .iter()
                .map(|&(e, neg, m, l)| {
                    let n = (m as u128) << (bits - l);
                    (e, if neg { n.wrapping_neg() } else { n })
                })
                .collect();
            Engine::Dyadic(ring, coeffs)
        } else {
            let modulus = BigUint::one() << bits;
            let coeffs = fractional
                .iter()
                .map(|&(e, neg, m, l)| {
                    let n = BigUint::from(m) << (bits - l);
                    (e, if neg { (&modulus - n) % &modulus } else { n })
                })
                .collect();
            Engine::Big(BigMod { q: modulus }, coeffs)
        }
    }
}

/// Per-row partial results of a double sum.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Block {
    pub sum: ComplexSum,
    /// `Σ_rows |row sum|`.
    pub abs: NeumaierSum,
    pub terms: u64,
    /// Largest magnitude of any running partial sum, for the float error budget.
    pub peak: f64,
}

impl Block {
    /// Merges blocks pairwise in a fixed balanced tree, so the result depends only on the
    /// sequence of blocks, not on who computed them.
    pub fn combine(mut blocks: Vec<Block>) -> Block {
        if blocks.is_empty() {
            return Block::default();
        }
        while blocks.len() > 1 {
            let mut next = Vec::with_capacity(blocks.len().div_ceil(2));
            let mut it = blocks.into_iter();
            while let Some(a) = it.next() {
                next.push(match it.next() {
                    Some(b) => a.merge(&b),
                    None => a,
                });
            }
            blocks = next;
        }
        blocks.pop().unwrap_or_default()
    }

    fn merge(&self, other: &Block) -> Block {
        let sum = self.sum + other.sum;
        let peak = self.peak.max(other.peak).max(sum.value().norm());
        Block { sum, abs: self.abs + other.abs, terms: self.terms + other.terms, peak }
    }
}

/// A prepared double sum `Σ_{m1 ∈ (K1, M1]} Σ_{m2 ∈ (K2, M2]} e(Q(m1, m2))`.
pub struct DoubleSumPlan {
    engine: Engine,
    mode: Mode,
    outer_axis: Axis,
    outer: Range<i64>,
    inner: Range<i64>,
}

fn range(k: i64, m: i64) -> Range<i64> {
    k + 1..m + 1
}

impl DoubleSumPlan {
    /// `outer_axis` selects the variable of the outer loop (and of the absolute values in
    /// [`DoubleSumPlan::finish_abs`]).
    pub fn new(q: &RealPoly2, k1: i64, m1: i64, k2: i64, m2: i64, outer_axis: Axis) -> Result<Self> {
        if !(0 <= k1 && k1 <= m1 && 0 <= k2 && k2 <= m2) {
            return Err(domain!("ranges need 0 <= K1 <= M1 and 0 <= K2 <= M2, got ({k1}, {m1}, {k2}, {m2})"));
        }
        let mode = if q.is_exact() { Mode::ExactPhase } else { Mode::FloatPhase };
        let (outer, inner) = match outer_axis {
            Axis::First => (range(k1, m1), range(k2, m2)),
            Axis::Second => (range(k2, m2), range(k1, m1)),
        };
        Ok(DoubleSumPlan { engine: Engine::new(q), mode, outer_axis, outer, inner })
    }

    pub fn outer_range(&self) -> Range<i64> {
        self.outer.clone()
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    /// Splits the outer range into `parts` contiguous pieces of nearly equal length.
    pub fn partition(&self, parts: usize) -> Vec<Range<i64>> {
        let parts = parts.max(1) as i64;
        let len = self.outer.end - self.outer.start;
        (0..parts)
            .map(|i| self.outer.start + len * i / parts..self.outer.start + len * (i + 1) / parts)
            .filter(|r| !r.is_empty())
            .collect()
    }

    /// Sums the rows whose outer index lies in `outer` (which must be inside the plan's range).
    pub fn evaluate_block(&self, outer: Range<i64>) -> Block {
        let outer = outer.start.max(self.outer.start)..outer.end.min(self.outer.end);
        match &self.engine {
            Engine::Small(ring, c) => self.rows(ring, c, outer),
            Engine::Dyadic(ring, c) => self.rows(ring, c, outer),
            Engine::Big(ring, c) => self.rows(ring, c, outer),
        }
    }

    fn rows<R: Ring>(&self, ring: &R, coeffs: &[(Exponent, R::T)], outer: Range<i64>) -> Block {
        let split = |e: &Exponent| match self.outer_axis {
            Axis::First => (e.0, e.1),
            Axis::Second => (e.1, e.0),
        };
        let inner_degree = coeffs.iter().map(|(e, _)| split(e).1).max().unwrap_or(0) as usize;
        let mut block = Block::default();
        for x in outer {
            // Row polynomial in the inner variable: Σ_b (Σ_a c_{a,b} x^a) y^b.
            let xr = ring.embed(x);
            let mut row = vec![ring.zero(); inner_degree + 1];
            for (e, c) in coeffs {
                let (a, b) = split(e);
                let mut t = c.clone();
                for _ in 0..a {
                    t = ring.mul(&t, &xr);
                }
                row[b as usize] = ring.add(&row[b as usize], &t);
            }
            let mut row_sum = ComplexSum::new();
            for y in self.inner.clone() {
                let yr = ring.embed(y);
                let mut acc = ring.zero();
                for c in row.iter().rev() {
                    acc = ring.add(&ring.mul(&acc, &yr), c);
                }
                row_sum += ring.angle(&acc);
            }
            let value = row_sum.value();
            block.sum = block.sum + row_sum;
            block.abs += value.norm();
            block.terms += (self.inner.end - self.inner.start) as u64;
            block.peak = block.peak.max(value.norm()).max(block.sum.value().norm());
        }
        block
    }

    fn budget(&self, block: &Block) -> f64 {
        match self.mode {
            Mode::ExactPhase => 0.0,
            Mode::FloatPhase => block.terms as f64 * 8.0 * f64::EPSILON * block.peak.max(1.0),
        }
    }

    pub fn finish_sum(&self, block: &Block) -> ExpSumValue {
        ExpSumValue { value: block.sum.value(), mode: self.mode, term_count: block.terms, error_budget: self.budget(block) }
    }

    /// `Σ_outer |Σ_inner e(Q)|`.
    pub fn finish_abs(&self, block: &Block) -> f64 {
        block.abs.value()
    }

    /// Single-partition evaluation of the whole range.
    pub fn evaluate(&self) -> Block {
        self.evaluate_block(self.outer.clone())
    }
}

/// `S_{K1,M1,K2,M2}(Q)`, computed sequentially.
pub fn double_sum(q: &RealPoly2, k1: i64, m1: i64, k2: i64, m2: i64) -> Result<ExpSumValue> {
    let plan = DoubleSumPlan::new(q, k1, m1, k2, m2, Axis::First)?;
    Ok(plan.finish_sum(&plan.evaluate()))
}

/// `Σ_{outer} |Σ_{inner} e(Q)|` with the chosen outer variable.
pub fn double_sum_abs(q: &RealPoly2, k1: i64, m1: i64, k2: i64, m2: i64, outer_axis: Axis) -> Result<f64> {
    let plan = DoubleSumPlan::new(q, k1, m1, k2, m2, outer_axis)?;
    Ok(plan.finish_abs(&plan.evaluate()))
}

/// `Σ_{n=K+1}^{N} e(ξ_1 n + … + ξ_k n^k)`.
pub fn weyl_sum(xi: &[Real], n: u64, k: u64) -> Result<ExpSumValue> {
    if xi.len() > MAX_WEYL_DEGREE {
        return Err(domain!("at most {MAX_WEYL_DEGREE} coefficients, got {}", xi.len()));
    }
    if k >= n {
        return Err(domain!("need K < N, got K = {k}, N = {n}"));
    }
    let poly = if let Some(rs) = xi.iter().map(Real::as_rational).collect::<Option<Vec<_>>>() {
        RealPoly2::from_rational_terms(rs.into_iter().enumerate().map(|(i, r)| ((i as u32 + 1, 0), r)))?
    } else {
        RealPoly2::from_real_terms(xi.iter().enumerate().map(|(i, x)| ((i as u32 + 1, 0), x.to_f64())))?
    };
    // One row (m2 = 1) whose inner variable is n.
    let plan = DoubleSumPlan::new(&poly, k as i64, n as i64, 0, 1, Axis::Second)?;
    Ok(plan.finish_sum(&plan.evaluate()))
}

/// `|Σ_{a<n≤b} e(φ(n)) − ∫_a^b e(φ(s)) ds|` under the hypotheses that `φ'` is monotonic
/// with `|φ'| ≤ 1/2` on `[a, b]`.
pub fn sum_integral_gap(phase: &RealUniPoly, a: f64, b: f64) -> Result<f64> {
    if !(a.is_finite() && b.is_finite() && b > a) {
        return Err(domain!("need finite a < b, got ({a}, {b})"));
    }
    let d1 = phase.derivative();
    let d2 = d1.derivative();
    let monotone = if phase.degree() <= 3 {
        d2.evaluate(a) * d2.evaluate(b) >= 0.0
    } else {
        let samples = 1000;
        let values: Vec<f64> = (0..=samples).map(|i| d2.evaluate(a + (b - a) * i as f64 / samples as f64)).collect();
        values.iter().all(|v| *v >= 0.0) || values.iter().all(|v| *v <= 0.0)
    };
    if !monotone {
        return Err(contract!("the derivative of the phase is not monotonic on [{a}, {b}]"));
    }
    let slope = libm::fabs(d1.evaluate(a)).max(libm::fabs(d1.evaluate(b)));
    if slope > 0.5 {
        return Err(contract!("|phase'| reaches {slope} > 1/2 on [{a}, {b}]"));
    }
    let mut sum = ComplexSum::new();
    let first = libm::floor(a) as i64 + 1;
    let last = libm::floor(b) as i64;
    for n in first..=last {
        sum += e(phase.evaluate(n as f64));
    }
    let rule = GaussLegendre::new(DEFAULT_ORDER);
    let mut f = |s: f64| Ok(e(phase.evaluate(s)));
    let integral = rule.adaptive(&mut f, a, b, 1e-12)?;
    Ok((sum.value() - integral).norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::Rational;
    use crate::poly::Poly2;

    fn rat(a: i64, q: i64) -> Real {
        Real::Exact(Rational::new(a, q).unwrap())
    }

    fn close(z: Complex, re: f64, im: f64) -> bool {
        (z - Complex::new(re, im)).norm() < 1e-12
    }

    #[test]
    fn weyl_examples() {
        let s = weyl_sum(&[rat(1, 2)], 4, 0).unwrap();
        assert_eq!(s.mode, Mode::ExactPhase);
        assert!(close(s.value, 0.0, 0.0));
        let s = weyl_sum(&[Real::Float(0.0); 3], 9, 0).unwrap();
        assert!(close(s.value, 9.0, 0.0));
        assert!(close(weyl_sum(&[rat(1, 3)], 3, 0).unwrap().value, 0.0, 0.0));
        assert_eq!(weyl_sum(&[rat(1, 3)], 10, 4).unwrap().term_count, 6);
        assert!(weyl_sum(&[rat(1, 3)], 3, 3).is_err());
    }

    #[test]
    fn weyl_matches_direct_float_for_small_arguments() {
        let xi = [Real::Float(0.1234567), Real::Float(-0.0071)];
        let got = weyl_sum(&xi, 200, 0).unwrap().value;
        let mut want = Complex::new(0.0, 0.0);
        for n in 1..=200 {
            let n = n as f64;
            want += e(0.1234567 * n - 0.0071 * n * n);
        }
        assert!((got - want).norm() < 1e-9);
    }

    #[test]
    fn double_sum_examples() {
        let zero = RealPoly2::zero();
        assert!(close(double_sum(&zero, 0, 3, 0, 5).unwrap().value, 15.0, 0.0));
        let p: Poly2 = "m1*m2".parse().unwrap();
        let half = p.scale(&rat(1, 2));
        assert!(close(double_sum(&half, 0, 2, 0, 2).unwrap().value, 2.0, 0.0));
        assert!((double_sum_abs(&half, 0, 2, 0, 2, Axis::First).unwrap() - 2.0).abs() < 1e-12);
        assert!((double_sum_abs(&zero, 1, 4, 2, 7, Axis::Second).unwrap() - 15.0).abs() < 1e-12);
        let int: Poly2 = "3*m1^2*m2 - m2^5".parse().unwrap();
        let s = double_sum(&int.scale(&Real::Float(1.0)), 2, 9, 0, 4).unwrap();
        assert!(close(s.value, 28.0, 0.0));
    }

    #[test]
    fn dyadic_reduction_is_exact_for_large_arguments() {
        // 0.75 * m with m = 2^40 + 1 has phase 0.75 exactly.
        let p = RealPoly2::from_real_terms([((1, 0), 0.75)]).unwrap();
        let m = (1i64 << 40) + 1;
        let s = double_sum(&p, m - 1, m, 0, 1).unwrap();
        assert!(close(s.value, 0.0, -1.0));
    }

    #[test]
    fn conjugation_is_exact() {
        let p: Poly2 = "m1^2*m2^3 + 5*m1*m2".parse().unwrap();
        let xi = rat(3, 17);
        let a = double_sum(&p.scale(&xi), 0, 20, 0, 13).unwrap().value;
        let b = double_sum(&p.neg().scale(&xi), 0, 20, 0, 13).unwrap().value;
        assert_eq!(a, b.conj());
    }

    #[test]
    fn partitioned_blocks_reproduce_sequential_sum() {
        let p: Poly2 = "m1^2*m2^3 - 2*m1*m2".parse().unwrap();
        let q = p.scale(&Real::Float(0.618033988749895));
        let plan = DoubleSumPlan::new(&q, 0, 50, 0, 40, Axis::First).unwrap();
        let whole = plan.finish_sum(&plan.evaluate());
        let blocks: Vec<Block> = plan.partition(4).into_iter().map(|r| plan.evaluate_block(r)).collect();
        let merged = plan.finish_sum(&Block::combine(blocks.clone()));
        assert!((whole.value - merged.value).norm() < 1e-10);
        let again = plan.finish_sum(&Block::combine(blocks));
        assert_eq!(merged.value, again.value);
    }

    #[test]
    fn sum_integral_examples() {
        let zero = RealUniPoly::new([]);
        assert!((sum_integral_gap(&zero, 0.0, 7.5).unwrap() - 0.5).abs() < 1e-12);
        let quarter = RealUniPoly::new([0.0, 0.25]);
        assert!(sum_integral_gap(&quarter, 0.0, 8.0).unwrap() < 1e-12);
        let tenth = RealUniPoly::new([0.0, 0.1]);
        let gap = sum_integral_gap(&tenth, 0.0, 10.0).unwrap();
        assert!(gap <= 3.0);
        let steep = RealUniPoly::new([0.0, 0.9]);
        assert!(matches!(sum_integral_gap(&steep, 0.0, 4.0), Err(crate::Error::Contract(_))));
        let wiggly = RealUniPoly::new([0.0, 0.0, 0.0, 0.01]);
        assert!(sum_integral_gap(&wiggly, -2.0, 2.0).is_err());
    }

    #[test]
    fn decode_round_trips() {
        for x in [0.75, -3.0e-5, 1.0, 1e300, 5e-324, -0.618033988749895] {
            let (neg, m, e) = decode(x);
            let back = libm::ldexp(m as f64, e);
            assert_eq!(if neg { -back } else { back }, x);
        }
    }
}
