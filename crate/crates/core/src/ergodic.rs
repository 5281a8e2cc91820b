//! Polynomial averages on the integer shift system `T x = x − 1`.
//!
//! For a finitely supported `f: ℤ → ℂ` the average over a rectangle `Q` of parameters is
//! `A f(x) = |Q|⁻¹ Σ_{m ∈ Q} f(x − P(m))`. Rectangles are either the full `[M1] × [M2]`
//! or the truncated `(M1/τ, M1] × (M2/τ, M2]`, with all floors taken exactly.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::arith::{Rational, Real};
use crate::error::domain;
use crate::expsum::double_sum;
use crate::newton::NewtonDiagram;
use crate::poly::{Axis, Poly2, UniPoly};
use crate::sum::ComplexSum;
use crate::{Complex, Result};

/// A finitely supported function on the integers; absent points are zero.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct FiniteFunction {
    values: BTreeMap<i64, Complex>,
}

impl FiniteFunction {
    /// Zero values are dropped.
    pub fn new(values: impl IntoIterator<Item = (i64, Complex)>) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (x, v) in values {
            if !(v.re.is_finite() && v.im.is_finite()) {
                return Err(domain!("non-finite value at {x}"));
            }
            if v != Complex::new(0.0, 0.0) {
                map.insert(x, v);
            }
        }
        Ok(FiniteFunction { values: map })
    }

    /// `δ_x`.
    pub fn delta(x: i64) -> Self {
        FiniteFunction { values: [(x, Complex::new(1.0, 0.0))].into_iter().collect() }
    }

    pub fn get(&self, x: i64) -> Complex {
        self.values.get(&x).copied().unwrap_or_default()
    }

    fn get_big(&self, x: &BigInt) -> Complex {
        x.to_i64().map(|x| self.get(x)).unwrap_or_default()
    }

    pub fn support(&self) -> impl Iterator<Item = (i64, Complex)> + '_ {
        self.values.iter().map(|(x, v)| (*x, *v))
    }

    pub fn l1(&self) -> f64 {
        self.values.values().map(|v| v.norm()).sum()
    }
}

/// Which rectangle of parameters is averaged over.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Region {
    /// `[M1] × [M2]`.
    Full,
    /// `([M1] ∖ [M1/τ]) × ([M2] ∖ [M2/τ])` for a rational `τ > 1`.
    Truncated(Rational),
}

#[derive(Clone, Debug, PartialEq)]
pub struct AverageSpec {
    pub p: Poly2,
    pub m1: Real,
    pub m2: Real,
    pub region: Region,
}

/// Half-open integer range `(low, high]`.
pub type Span = (i64, i64);

fn floor_i64(x: &BigRational) -> Result<i64> {
    x.floor().to_integer().to_i64().ok_or_else(|| domain!("scale {x} is too large"))
}

/// `(⌊M/τ⌋, ⌊M⌋]`, or `(0, ⌊M⌋]` for the full region.
pub fn span(m: &Real, region: Region) -> Result<Span> {
    let big = m.to_big();
    if big < BigRational::one() {
        return Err(domain!("scales must be at least 1, got {m}"));
    }
    let high = floor_i64(&big)?;
    let low = match region {
        Region::Full => 0,
        Region::Truncated(tau) => {
            if tau <= Rational::ONE {
                return Err(domain!("τ must exceed 1, got {tau}"));
            }
            floor_i64(&(big / tau.to_big()))?
        }
    };
    Ok((low, high))
}

impl AverageSpec {
    pub fn new(p: Poly2, m1: Real, m2: Real, region: Region) -> Self {
        AverageSpec { p, m1, m2, region }
    }

    /// The two spans, rejecting an empty rectangle.
    pub fn spans(&self) -> Result<(Span, Span)> {
        let s1 = span(&self.m1, self.region)?;
        let s2 = span(&self.m2, self.region)?;
        if s1.0 >= s1.1 || s2.0 >= s2.1 {
            return Err(domain!("the averaging region for M = ({}, {}) is empty", self.m1, self.m2));
        }
        Ok((s1, s2))
    }

    pub fn cardinality(&self) -> Result<u64> {
        let ((a, b), (c, d)) = self.spans()?;
        Ok((b - a) as u64 * (d - c) as u64)
    }
}

fn value_at(p: &Poly2, m1: i64, m2: i64) -> BigInt {
    match p.evaluate_i128(m1, m2) {
        Some(v) => BigInt::from(v),
        None => p.evaluate(m1, m2),
    }
}

/// Unnormalized `Σ_{m ∈ span1 × span2} f(x − P(m))`.
pub fn shift_sum(p: &Poly2, s1: Span, s2: Span, f: &FiniteFunction, x: i64) -> Complex {
    let x = BigInt::from(x);
    let mut acc = ComplexSum::new();
    for m1 in s1.0 + 1..=s1.1 {
        for m2 in s2.0 + 1..=s2.1 {
            acc += f.get_big(&(&x - value_at(p, m1, m2)));
        }
    }
    acc.value()
}

/// `|region|⁻¹ Σ_{m ∈ region} f(x − P(m))`.
pub fn shift_average(spec: &AverageSpec, f: &FiniteFunction, x: i64) -> Result<Complex> {
    let (s1, s2) = spec.spans()?;
    Ok(shift_sum(&spec.p, s1, s2, f, x) / spec.cardinality()? as f64)
}

/// `|region|⁻¹ Σ_{m ∈ region} e(θ P(m))`.
pub fn character_average(spec: &AverageSpec, theta: &Real) -> Result<Complex> {
    let ((a, b), (c, d)) = spec.spans()?;
    let s = double_sum(&spec.p.scale(theta), a, b, c, d)?;
    Ok(s.value / spec.cardinality()? as f64)
}

/// A point `(τ^{n1}, τ^{n2})` of the lacunary grid.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GridPoint {
    pub exponents: (u32, u32),
    pub m1: BigRational,
    pub m2: BigRational,
}

impl GridPoint {
    pub fn to_f64(&self) -> (f64, f64) {
        (self.m1.to_f64().unwrap_or(f64::NAN), self.m2.to_f64().unwrap_or(f64::NAN))
    }
}

/// `𝕊_τ(j)` cut at `bound`: the `(τ^{n1}, τ^{n2})` with `(n1, n2) ∈ S(j)` and both ≤ bound.
pub fn sector_grid(diagram: &NewtonDiagram, j: usize, tau: Rational, bound: &Real) -> Result<Vec<GridPoint>> {
    if !(1..=diagram.len()).contains(&j) {
        return Err(domain!("sector index {j} outside 1..={}", diagram.len()));
    }
    if tau <= Rational::ONE {
        return Err(domain!("τ must exceed 1, got {tau}"));
    }
    let bound = bound.to_big();
    let t = tau.to_big();
    let mut powers = Vec::new();
    let mut p = BigRational::one();
    while p <= bound {
        powers.push(p.clone());
        p = &p * &t;
    }
    let mut out = Vec::new();
    for (n1, a) in powers.iter().enumerate() {
        for (n2, b) in powers.iter().enumerate() {
            if diagram.in_closed_sector(j, (n1 as u32, n2 as u32)) {
                out.push(GridPoint { exponents: (n1 as u32, n2 as u32), m1: a.clone(), m2: b.clone() });
            }
        }
    }
    Ok(out)
}

/// `|A^{P}_{M1,M2} f(x) − A^{P1}_{M1}(A^{P2}_{M2} f)(x)|` over full regions.
///
/// Zero (up to rounding) when `P = P1(m1) + P2(m2)`; a mixed `P` gives a control instance.
pub fn composition_gap(p: &Poly2, p1: &UniPoly, p2: &UniPoly, f: &FiniteFunction, m1: &Real, m2: &Real, x: i64) -> Result<f64> {
    let s1 = span(m1, Region::Full)?;
    let s2 = span(m2, Region::Full)?;
    let joint = shift_sum(p, s1, s2, f, x) / ((s1.1 * s2.1) as f64);
    let x = BigInt::from(x);
    let mut outer = ComplexSum::new();
    for a in 1..=s1.1 {
        let y = &x - p1.evaluate(a);
        let mut inner = ComplexSum::new();
        for b in 1..=s2.1 {
            inner += f.get_big(&(&y - p2.evaluate(b)));
        }
        outer += inner.value() / s2.1 as f64;
    }
    let nested = outer.value() / s1.1 as f64;
    Ok((joint - nested).norm())
}

/// The factorization gap for `P = P1(m1) + P2(m2)`.
pub fn degenerate_factorization_gap(p1: &UniPoly, p2: &UniPoly, f: &FiniteFunction, m1: &Real, m2: &Real, x: i64) -> Result<f64> {
    for (name, u) in [("P1", p1), ("P2", p2)] {
        if !u.evaluate(0).is_zero() {
            return Err(domain!("{name}(0) must vanish"));
        }
    }
    let p = p1.lift(Axis::First).add(&p2.lift(Axis::Second));
    composition_gap(&p, p1, p2, f, m1, m2, x)
}

/// Full-rectangle sum at `(τ^{n1}, τ^{n2})` and the sum of the truncated-rectangle sums over
/// all `(l1, l2) ≤ (n1, n2)`; the two agree because the truncated spans tile `[⌊τ^n⌋]`.
pub fn lacunary_decomposition(p: &Poly2, f: &FiniteFunction, x: i64, tau: Rational, n: (u32, u32)) -> Result<(Complex, Complex)> {
    let power = |k: u32| -> Result<Real> { Ok(Real::Exact(tau.checked_pow(k)?)) };
    let full = shift_sum(p, span(&power(n.0)?, Region::Full)?, span(&power(n.1)?, Region::Full)?, f, x);
    let mut pieces = ComplexSum::new();
    for l1 in 0..=n.0 {
        for l2 in 0..=n.1 {
            let s1 = span(&power(l1)?, Region::Truncated(tau))?;
            let s2 = span(&power(l2)?, Region::Truncated(tau))?;
            pieces += shift_sum(p, s1, s2, f, x);
        }
    }
    Ok((full, pieces.value()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(s: &str) -> Poly2 {
        s.parse().unwrap()
    }

    fn r(x: f64) -> Real {
        Real::Float(x)
    }

    #[test]
    fn shift_average_examples() {
        let spec = AverageSpec::new(poly("m1*m2"), r(2.0), r(2.0), Region::Full);
        let d = FiniteFunction::delta(0);
        assert_eq!(shift_average(&spec, &d, 0).unwrap(), Complex::new(0.0, 0.0));
        assert_eq!(shift_average(&spec, &d, 1).unwrap(), Complex::new(0.25, 0.0));
        let ones = FiniteFunction::new((-10..=10).map(|x| (x, Complex::new(1.0, 0.0)))).unwrap();
        assert_eq!(shift_average(&spec, &ones, 6).unwrap(), Complex::new(1.0, 0.0));
    }

    #[test]
    fn truncated_spans() {
        let half = Rational::new(3, 2).unwrap();
        assert_eq!(span(&r(10.0), Region::Truncated(half)).unwrap(), (6, 10));
        assert_eq!(span(&r(2.7), Region::Full).unwrap(), (0, 2));
        let spec = AverageSpec::new(poly("m1"), r(1.0), r(4.0), Region::Truncated(Rational::integer(2)));
        assert_eq!(spec.spans().unwrap(), ((0, 1), (2, 4)));
        let empty = AverageSpec::new(poly("m1"), r(1.5), r(4.0), Region::Truncated(Rational::integer(4)));
        assert!(shift_average(&empty, &FiniteFunction::delta(0), 0).is_ok());
        let empty = AverageSpec::new(poly("m1"), r(3.0), r(3.0), Region::Truncated(Rational::new(11, 10).unwrap()));
        assert!(empty.spans().is_ok());
        let none = AverageSpec::new(poly("m1"), r(1.0), r(1.0), Region::Truncated(Rational::new(1, 1).unwrap()));
        assert!(none.spans().is_err());
    }

    #[test]
    fn character_average_examples() {
        let spec = AverageSpec::new(poly("m1*m2"), r(2.0), r(2.0), Region::Full);
        assert_eq!(character_average(&spec, &Real::Float(0.0)).unwrap(), Complex::new(1.0, 0.0));
        let half = Real::Exact(Rational::new(1, 2).unwrap());
        assert!((character_average(&spec, &half).unwrap() - Complex::new(0.5, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn sector_grid_examples() {
        let one = NewtonDiagram::build(&poly("m1^2*m2^3")).unwrap();
        let two = Rational::integer(2);
        let g = sector_grid(&one, 1, two, &r(4.0)).unwrap();
        assert_eq!(g.len(), 9);
        let d = NewtonDiagram::build(&poly("m1^3*m2 + m1*m2^3")).unwrap();
        let g = sector_grid(&d, 1, two, &r(8.0)).unwrap();
        assert!(g.iter().all(|p| p.exponents.1 >= p.exponents.0));
        assert_eq!(g.len(), 10);
        assert!(sector_grid(&d, 1, two, &r(0.5)).unwrap().is_empty());
    }

    #[test]
    fn factorization_examples() {
        let p1 = UniPoly::monomial(1, 2);
        let p2 = UniPoly::monomial(1, 3);
        for x in -3..12 {
            assert_eq!(degenerate_factorization_gap(&p1, &p2, &FiniteFunction::delta(0), &r(2.0), &r(2.0), x).unwrap(), 0.0);
        }
        let gap = composition_gap(&poly("m1*m2"), &UniPoly::monomial(1, 1), &UniPoly::monomial(1, 1), &FiniteFunction::delta(0), &r(2.0), &r(2.0), 2)
            .unwrap();
        assert!((gap - 0.25).abs() < 1e-15);
    }

    #[test]
    fn lacunary_tiling() {
        let f = FiniteFunction::new((-40..40).map(|x| (x, Complex::new((x % 7) as f64, (x % 3) as f64)))).unwrap();
        for tau in [Rational::integer(2), Rational::new(3, 2).unwrap()] {
            let (full, pieces) = lacunary_decomposition(&poly("m1^2 - m1*m2"), &f, 3, tau, (4, 3)).unwrap();
            assert_eq!(full, pieces);
        }
    }
}
