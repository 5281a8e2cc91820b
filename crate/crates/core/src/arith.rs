//! Reduced fractions, real frequencies, and rational approximation.

use alloc::string::ToString;
use core::cmp::Ordering;
use core::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{contract, domain};
use crate::Result;

/// Maximum number of continued-fraction convergents examined by [`dirichlet_approx`].
pub const MAX_CONVERGENTS: usize = 64;

/// A fraction `a/q` in lowest terms with `q >= 1`.
///
/// Points of `Q ∩ T` are stored torus-normalized (`0 <= a < q`), see [`Rational::torus`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Rational {
    num: i64,
    den: i64,
}

impl Rational {
    pub const ZERO: Rational = Rational { num: 0, den: 1 };
    pub const ONE: Rational = Rational { num: 1, den: 1 };

    /// Reduced fraction `a/q`. A negative `q` flips both signs.
    pub fn new(a: i64, q: i64) -> Result<Self> {
        if q == 0 {
            return Err(domain!("denominator must be nonzero"));
        }
        Self::from_i128(a as i128, q as i128)
    }

    pub fn integer(a: i64) -> Self {
        Rational { num: a, den: 1 }
    }

    fn from_i128(a: i128, q: i128) -> Result<Self> {
        debug_assert!(q != 0);
        let g = a.gcd(&q);
        let (mut a, mut q) = (a / g, q / g);
        if q < 0 {
            a = -a;
            q = -q;
        }
        let num = i64::try_from(a).map_err(|_| domain!("numerator {a} overflows i64"))?;
        let den = i64::try_from(q).map_err(|_| domain!("denominator {q} overflows i64"))?;
        Ok(Rational { num, den })
    }

    pub fn num(&self) -> i64 {
        self.num
    }

    pub fn den(&self) -> i64 {
        self.den
    }

    /// Representative in `[0, 1)`.
    pub fn torus(&self) -> Self {
        Rational { num: self.num.rem_euclid(self.den), den: self.den }
    }

    pub fn is_torus_normalized(&self) -> bool {
        0 <= self.num && self.num < self.den
    }

    pub fn is_integer(&self) -> bool {
        self.den == 1
    }

    pub fn to_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }

    pub fn to_big(&self) -> BigRational {
        BigRational::new(BigInt::from(self.num), BigInt::from(self.den))
    }

    /// Exact conversion back from a big rational, failing when it does not fit in `i64`.
    pub fn from_big(x: &BigRational) -> Result<Self> {
        let num = x.numer().to_i64().ok_or_else(|| domain!("{x} does not fit a machine fraction"))?;
        let den = x.denom().to_i64().ok_or_else(|| domain!("{x} does not fit a machine fraction"))?;
        Rational::new(num, den)
    }

    pub fn floor(&self) -> i64 {
        self.num.div_euclid(self.den)
    }

    pub fn ceil(&self) -> i64 {
        -((-self.num).div_euclid(self.den))
    }

    pub fn checked_add(&self, rhs: &Rational) -> Result<Rational> {
        let a = self.num as i128 * rhs.den as i128 + rhs.num as i128 * self.den as i128;
        Self::from_i128(a, self.den as i128 * rhs.den as i128)
    }

    pub fn checked_sub(&self, rhs: &Rational) -> Result<Rational> {
        self.checked_add(&Rational { num: -rhs.num, den: rhs.den })
    }

    pub fn checked_mul(&self, rhs: &Rational) -> Result<Rational> {
        Self::from_i128(self.num as i128 * rhs.num as i128, self.den as i128 * rhs.den as i128)
    }

    pub fn checked_div(&self, rhs: &Rational) -> Result<Rational> {
        if rhs.num == 0 {
            return Err(domain!("division by zero"));
        }
        Self::from_i128(self.num as i128 * rhs.den as i128, self.den as i128 * rhs.num as i128)
    }

    pub fn checked_pow(&self, n: u32) -> Result<Rational> {
        let num = (self.num as i128).checked_pow(n);
        let den = (self.den as i128).checked_pow(n);
        match (num, den) {
            (Some(a), Some(q)) => Self::from_i128(a, q),
            _ => Err(domain!("({self})^{n} overflows")),
        }
    }

    pub fn recip(&self) -> Result<Rational> {
        Rational::ONE.checked_div(self)
    }

    pub fn neg(&self) -> Rational {
        Rational { num: -self.num, den: self.den }
    }
}

impl Ord for Rational {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.num as i128 * other.den as i128).cmp(&(other.num as i128 * self.den as i128))
    }
}

impl PartialOrd for Rational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl core::str::FromStr for Rational {
    type Err = crate::Error;

    /// Accepts `a/q` or a plain integer.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let parse = |t: &str| {
            t.trim().parse::<i64>().map_err(|_| crate::Error::Parse {
                position: 0,
                message: alloc::format!("`{s}` is not a fraction a/q"),
            })
        };
        match s.split_once('/') {
            Some((a, q)) => Rational::new(parse(a)?, parse(q)?),
            None => Ok(Rational::integer(parse(s)?)),
        }
    }
}

/// A real argument: either a double or an exact fraction.
///
/// Every double is itself a dyadic rational, so all threshold comparisons below are done
/// exactly on the value the caller actually passed.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Real {
    Float(f64),
    Exact(Rational),
}

impl Real {
    pub fn float(x: f64) -> Result<Self> {
        if x.is_finite() {
            Ok(Real::Float(x))
        } else {
            Err(domain!("non-finite real {x}"))
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Real::Float(x) => *x,
            Real::Exact(r) => r.to_f64(),
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Real::Exact(_))
    }

    pub fn as_rational(&self) -> Option<Rational> {
        match self {
            Real::Exact(r) => Some(*r),
            Real::Float(_) => None,
        }
    }

    /// The exact value as a big rational.
    pub fn to_big(&self) -> BigRational {
        match self {
            Real::Float(x) => BigRational::from_float(*x).unwrap_or_else(BigRational::zero),
            Real::Exact(r) => r.to_big(),
        }
    }

    pub fn floor(&self) -> BigInt {
        self.to_big().floor().to_integer()
    }

    pub fn neg(&self) -> Real {
        match self {
            Real::Float(x) => Real::Float(-x),
            Real::Exact(r) => Real::Exact(r.neg()),
        }
    }

    /// `self + k` for an integer shift, staying exact when possible.
    pub fn shift(&self, k: i64) -> Real {
        match self {
            Real::Float(x) => Real::Float(x + k as f64),
            Real::Exact(r) => Real::Exact(Rational { num: r.num + k * r.den, den: r.den }),
        }
    }
}

impl From<f64> for Real {
    fn from(x: f64) -> Self {
        Real::Float(x)
    }
}

impl From<Rational> for Real {
    fn from(r: Rational) -> Self {
        Real::Exact(r)
    }
}

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Real::Float(x) => write!(f, "{x}"),
            Real::Exact(r) => write!(f, "{r}"),
        }
    }
}

/// `a/q` in lowest terms, optionally reduced mod 1 into `[0, 1)`.
pub fn reduce(a: i64, q: i64, torus_normalize: bool) -> Result<Rational> {
    if q <= 0 {
        return Err(domain!("denominator must be positive, got {q}"));
    }
    let r = Rational::new(a, q)?;
    Ok(if torus_normalize { r.torus() } else { r })
}

/// gcd of `q` and every entry of `a`.
pub fn coefficient_gcd(a: &[i64], q: u64) -> u64 {
    a.iter().fold(q, |g, &x| g.gcd(&x.unsigned_abs()))
}

fn within_dirichlet_bound(x: &BigRational, p: &BigInt, q: &BigInt, q_max: &BigInt) -> bool {
    // |x - p/q| <= 1/(q Q)  <=>  |q x - p| * Q <= 1
    let diff = (x * BigRational::from_integer(q.clone()) - BigRational::from_integer(p.clone())).abs();
    diff * BigRational::from_integer(q_max.clone()) <= BigRational::one()
}

/// Reduced `a/q` with `1 <= q <= q_max` and `|xi - a/q| <= 1/(q q_max)`.
///
/// Walks the continued-fraction convergents of the exact value of `xi` (at most
/// [`MAX_CONVERGENTS`] of them) and keeps the last one whose denominator is within range.
/// If that candidate somehow misses the bound, an exhaustive scan over `q <= q_max` is used.
pub fn dirichlet_approx(xi: &Real, q_max: u64) -> Result<Rational> {
    if q_max == 0 {
        return Err(domain!("resolution must be at least 1"));
    }
    let x = xi.to_big();
    let cap = BigInt::from(q_max);

    let (mut h_prev, mut k_prev) = (BigInt::one(), BigInt::zero());
    let mut rest = x.clone();
    let a0 = rest.floor().to_integer();
    let (mut h, mut k) = (a0.clone(), BigInt::one());
    rest -= BigRational::from_integer(a0);
    for _ in 1..MAX_CONVERGENTS {
        if rest.is_zero() {
            break;
        }
        rest = rest.recip();
        let a = rest.floor().to_integer();
        rest -= BigRational::from_integer(a.clone());
        let k_next = &a * &k + &k_prev;
        if k_next > cap {
            break;
        }
        let h_next = &a * &h + &h_prev;
        h_prev = core::mem::replace(&mut h, h_next);
        k_prev = core::mem::replace(&mut k, k_next);
    }

    if within_dirichlet_bound(&x, &h, &k, &cap) {
        return Rational::from_big(&BigRational::new(h, k));
    }
    for q in 1..=q_max {
        let qb = BigInt::from(q);
        let p = (&x * BigRational::from_integer(qb.clone())).round().to_integer();
        if within_dirichlet_bound(&x, &p, &qb, &cap) {
            return Rational::from_big(&BigRational::new(p, qb));
        }
    }
    Err(crate::Error::Inconsistent("no Dirichlet approximation found".to_string()))
}

/// Rescaled approximation of `scale * theta` given a good approximation `a/q` of `theta`.
///
/// Preconditions: `|theta - a/q| <= 1/q^2`, `(a, q) = 1`, `0 <= a < q <= m`.
/// The result `a'/q'` is torus-normalized and satisfies `|scale*theta - a'/q'| <= 1/(2 q' m)`
/// (mod 1) and `q/(2 scale) <= q' <= 2m`. When several denominators qualify the smallest
/// one is returned.
pub fn rescale_approx(theta: &Real, a_over_q: Rational, scale: u64, m: u64) -> Result<Rational> {
    let (a, q) = (a_over_q.num(), a_over_q.den());
    if scale == 0 || m == 0 {
        return Err(domain!("scale and M must be positive"));
    }
    if !(0 <= a && a < q) {
        return Err(contract!("need 0 <= a < q, got {a_over_q}"));
    }
    if q as u64 > m {
        return Err(contract!("need q <= M, got q = {q} > M = {m}"));
    }
    let theta_big = theta.to_big();
    let qb = BigRational::from_integer(BigInt::from(q));
    let dist = (&theta_big - a_over_q.to_big()).abs();
    if dist * &qb * &qb > BigRational::one() {
        return Err(contract!("need |theta - a/q| <= 1/q^2 for a/q = {a_over_q}"));
    }

    let x = theta_big * BigRational::from_integer(BigInt::from(scale));
    let two_m = 2 * m;
    // q' >= q / (2 scale)
    let lower = ((q as u64) + 2 * scale - 1) / (2 * scale);
    let lower = lower.max(1);
    let fits = |qq: u64| -> Option<Rational> {
        let qb = BigInt::from(qq);
        let p = (&x * BigRational::from_integer(qb.clone())).round().to_integer();
        // |qq x - p| * 2 M <= 1
        let diff = (&x * BigRational::from_integer(qb.clone()) - BigRational::from_integer(p.clone())).abs();
        if diff * BigRational::from_integer(BigInt::from(two_m)) <= BigRational::one() {
            let r = BigRational::new(p, qb);
            let r = Rational::from_big(&r).ok()?;
            Some(r.torus())
        } else {
            None
        }
    };

    // Dirichlet at resolution 2M gives a witness for the first bound and q' <= 2M; the
    // scan then looks for the smallest admissible reduced denominator at or below it.
    let witness = dirichlet_approx_big(&x, two_m)?;
    let witness_den = witness.den() as u64;
    let upper = if witness_den >= lower { witness_den } else { two_m };
    (lower..=upper)
        .find_map(|qq| fits(qq).filter(|r| r.den() as u64 == qq))
        .ok_or_else(|| {
            contract!("no a'/q' with q' in [{lower}, {two_m}] approximates {scale}*theta to 1/(2 q' M)")
        })
}

fn dirichlet_approx_big(x: &BigRational, q_max: u64) -> Result<Rational> {
    // Reduce mod 1 first so the numerator stays small for huge scale * theta.
    let frac = x - x.floor();
    let r = match Rational::from_big(&frac) {
        Ok(r) => dirichlet_approx(&Real::Exact(r), q_max)?,
        Err(_) => {
            let f = frac.to_f64().unwrap_or(0.0);
            dirichlet_approx(&Real::Float(f), q_max)?
        }
    };
    Ok(r)
}

/// Signed distance from `x` to the nearest integer, in `[-1/2, 1/2)`.
pub fn torus_offset(x: f64) -> f64 {
    let r = x - libm::floor(x + 0.5);
    if r >= 0.5 {
        r - 1.0
    } else {
        r
    }
}

/// `||x||`, the distance to the nearest integer.
pub fn torus_norm(x: f64) -> f64 {
    libm::fabs(torus_offset(x))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(a: i64, q: i64) -> Rational {
        Rational::new(a, q).unwrap()
    }

    #[test]
    fn reduce_examples() {
        assert_eq!(reduce(2, 4, false).unwrap(), r(1, 2));
        assert_eq!(reduce(0, 5, false).unwrap(), r(0, 1));
        assert_eq!(reduce(-3, 6, true).unwrap(), r(1, 2));
        assert!(matches!(reduce(1, 0, false), Err(crate::Error::Domain(_))));
    }

    #[test]
    fn reduce_is_one_periodic_on_the_torus() {
        for q in 1..30 {
            for a in -40..40 {
                assert_eq!(reduce(a, q, true).unwrap(), reduce(a + q, q, true).unwrap());
            }
        }
    }

    #[test]
    fn dirichlet_examples() {
        assert_eq!(dirichlet_approx(&Real::Float(0.5), 10).unwrap(), r(1, 2));
        let xi = core::f64::consts::PI - 3.0;
        let got = dirichlet_approx(&Real::Float(xi), 10).unwrap();
        assert_eq!(got, r(1, 7));
        assert!((xi - 1.0 / 7.0).abs() <= 1.0 / 70.0);
        assert!(((xi - 1.0 / 7.0).abs() - 0.00126).abs() < 1e-5);
        assert_eq!(dirichlet_approx(&Real::Exact(r(1, 3)), 2).unwrap(), r(0, 1));
    }

    /// Exhaustive oracle: some q <= Q satisfies the bound, and the returned one does.
    #[test]
    fn dirichlet_bound_holds_on_rational_grid() {
        for q_max in 1..25u64 {
            for den in 1..40i64 {
                for num in -den..2 * den {
                    let x = r(num, den);
                    let got = dirichlet_approx(&Real::Exact(x), q_max).unwrap();
                    assert!(got.den() >= 1 && got.den() as u64 <= q_max);
                    let diff = x.checked_sub(&got).unwrap();
                    // |diff| * q * Q <= 1
                    let lhs = diff.num().abs() as i128 * got.den() as i128 * q_max as i128;
                    assert!(lhs <= diff.den() as i128, "{x} ~ {got} at Q={q_max}");
                }
            }
        }
    }

    #[test]
    fn rescale_examples() {
        let got = rescale_approx(&Real::Exact(r(1, 3)), r(1, 3), 2, 3).unwrap();
        assert_eq!(got, r(2, 3));
        let got = rescale_approx(&Real::Exact(r(1, 2)), r(1, 2), 2, 2).unwrap();
        assert_eq!(got, r(0, 1));
        let got = rescale_approx(&Real::Exact(r(5, 7)), r(5, 7), 3, 7).unwrap();
        assert_eq!(got, r(1, 7));
    }

    #[test]
    fn rescale_rejects_bad_hypotheses() {
        assert!(matches!(
            rescale_approx(&Real::Float(0.9), r(1, 3), 2, 3),
            Err(crate::Error::Contract(_))
        ));
        assert!(matches!(
            rescale_approx(&Real::Exact(r(1, 5)), r(1, 5), 2, 3),
            Err(crate::Error::Contract(_))
        ));
    }

    /// Exhaustive oracle over q' for exact rational theta: both bounds hold and nothing
    /// smaller qualifies.
    #[test]
    fn rescale_bounds_and_minimality() {
        for q in 1..12i64 {
            for a in 0..q {
                if coefficient_gcd(&[a], q as u64) != 1 {
                    continue;
                }
                for scale in 1..6u64 {
                    for m in q as u64..(q as u64 + 4) {
                        let theta = r(a, q);
                        let got = rescale_approx(&Real::Exact(theta), theta, scale, m).unwrap();
                        let x = theta.checked_mul(&Rational::integer(scale as i64)).unwrap();
                        let qp = got.den();
                        assert!(2 * scale as i64 * qp >= q && qp as u64 <= 2 * m);
                        let d = torus_offset(x.checked_sub(&got).unwrap().to_f64());
                        assert!(d.abs() <= 1.0 / (2.0 * qp as f64 * m as f64) + 1e-15);
                        for smaller in 1..qp {
                            if 2 * scale as i64 * smaller < q {
                                continue;
                            }
                            let ok = (0..=smaller).any(|b| {
                                let d = torus_offset(x.to_f64() - b as f64 / smaller as f64);
                                d.abs() <= 1.0 / (2.0 * smaller as f64 * m as f64) - 1e-15
                            });
                            assert!(!ok, "smaller q'={smaller} works for theta={theta} scale={scale} M={m}");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn coefficient_gcd_examples() {
        assert_eq!(coefficient_gcd(&[2, 4, 6], 8), 2);
        assert_eq!(coefficient_gcd(&[0, 0], 5), 5);
        assert_eq!(coefficient_gcd(&[3, 5], 7), 1);
        assert_eq!(coefficient_gcd(&[], 9), 9);
    }

    #[test]
    fn rational_parsing_and_order() {
        assert_eq!("3/6".parse::<Rational>().unwrap(), r(1, 2));
        assert_eq!("-4".parse::<Rational>().unwrap(), Rational::integer(-4));
        assert!(r(1, 3) < r(1, 2));
        assert_eq!(r(-1, 3).floor(), -1);
        assert_eq!(r(7, 3).ceil(), 3);
    }
}
