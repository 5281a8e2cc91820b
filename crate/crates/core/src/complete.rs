//! Complete and partial Gauss sums, and Vinogradov mean-value counts.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::ToPrimitive;

use crate::arith::{Rational, Real};
use crate::error::{domain, resource};
use crate::expsum::weyl_sum;
use crate::poly::{Axis, Poly2};
use crate::sum::{e, e_ratio, ComplexSum, NeumaierSum};
use crate::{Complex, Result};

/// Coefficients of `P` reduced modulo `q`.
fn reduced_terms(p: &Poly2, q: u64) -> Vec<((u32, u32), u64)> {
    let m = BigInt::from(q);
    p.terms()
        .map(|(e, c)| (e, c.mod_floor(&m).to_u64().unwrap_or(0)))
        .filter(|(_, c)| *c != 0)
        .collect()
}

fn mulmod(a: u64, b: u64, q: u64) -> u64 {
    ((a as u128 * b as u128) % q as u128) as u64
}

fn powmod(mut base: u64, mut exp: u32, q: u64) -> u64 {
    let mut acc = 1 % q;
    base %= q;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mulmod(acc, base, q);
        }
        base = mulmod(base, base, q);
        exp >>= 1;
    }
    acc
}

fn residue(terms: &[((u32, u32), u64)], x: u64, y: u64, q: u64) -> u64 {
    terms.iter().fold(0, |acc, &((a, b), c)| {
        let t = mulmod(c, mulmod(powmod(x, a, q), powmod(y, b, q), q), q);
        (acc + t) % q
    })
}

/// Value distribution of `P(r1, r2) mod q` over `(r1, r2) ∈ [q]²`.
///
/// Every complete sum with denominator `q` is a linear functional of this histogram:
/// `q² G(a/q) = Σ_t N(t) e(a t / q)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GaussTable {
    q: u64,
    counts: Vec<u64>,
}

/// Largest modulus accepted by [`GaussTable`].
pub const MAX_GAUSS_MODULUS: u64 = 1 << 12;

impl GaussTable {
    pub fn new(p: &Poly2, q: u64) -> Result<Self> {
        if q == 0 || q > MAX_GAUSS_MODULUS {
            return Err(domain!("modulus {q} outside 1..={MAX_GAUSS_MODULUS}"));
        }
        let terms = reduced_terms(p, q);
        let mut counts = vec![0u64; q as usize];
        for r1 in 1..=q {
            // Row coefficients in r2 for fixed r1.
            let mut row: BTreeMap<u32, u64> = BTreeMap::new();
            for &((a, b), c) in &terms {
                let v = row.entry(b).or_insert(0);
                *v = (*v + mulmod(c, powmod(r1, a, q), q)) % q;
            }
            for r2 in 1..=q {
                let t = row.iter().fold(0, |acc, (&b, &c)| (acc + mulmod(c, powmod(r2, b, q), q)) % q);
                counts[t as usize] += 1;
            }
        }
        Ok(GaussTable { q, counts })
    }

    pub fn modulus(&self) -> u64 {
        self.q
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    /// `G(a/q)` for any numerator `a` (reduced modulo `q` first).
    pub fn value(&self, a: i64) -> Complex {
        let q = self.q;
        let a = (a as i128).rem_euclid(q as i128) as u64;
        let mut acc = ComplexSum::new();
        for (t, &n) in self.counts.iter().enumerate() {
            if n != 0 {
                acc += e_ratio(mulmod(a, t as u64, q), q) * n as f64;
            }
        }
        acc.value() / (q as f64 * q as f64)
    }
}

/// `G(a/q) = q⁻² Σ_{r1, r2 ∈ [q]} e((a/q) P(r1, r2))`.
pub fn gauss_sum(p: &Poly2, a_over_q: Rational) -> Result<Complex> {
    let r = a_over_q.torus();
    let q = r.den() as u64;
    Ok(GaussTable::new(p, q)?.value(r.num()))
}

/// `G^1_{m}(a/q) = q⁻¹ Σ_{r2 ∈ [q]} e((a/q) P(m, r2))` for `Axis::First` (the first variable
/// frozen at `frozen`), and the transpose for `Axis::Second`.
pub fn partial_gauss(p: &Poly2, a_over_q: Rational, frozen: i64, axis: Axis) -> Result<Complex> {
    let r = a_over_q.torus();
    let q = r.den() as u64;
    let a = r.num() as u64;
    let terms = reduced_terms(p, q);
    let m = (frozen as i128).rem_euclid(q as i128) as u64;
    let mut acc = ComplexSum::new();
    for s in 1..=q {
        let t = match axis {
            Axis::First => residue(&terms, m, s, q),
            Axis::Second => residue(&terms, s, m, q),
        };
        acc += e_ratio(mulmod(a, t, q), q);
    }
    Ok(acc.value() / q as f64)
}

/// `M⁻¹ Σ_{m=1}^{M} |G^axis_m(a/q)|`.
pub fn averaged_partial(p: &Poly2, a_over_q: Rational, m: u64, axis: Axis) -> Result<f64> {
    if m == 0 {
        return Err(domain!("M must be positive"));
    }
    let mut acc = NeumaierSum::new();
    for frozen in 1..=m {
        acc += partial_gauss(p, a_over_q, frozen as i64, axis)?.norm();
    }
    Ok(acc.value() / m as f64)
}

/// Dyadic envelopes `max_{q ∈ [Q, 2Q], (a, q) = 1} |G(a/q)|` and the fitted decay exponent.
#[derive(Clone, Debug, PartialEq)]
pub struct DecayProfile {
    /// `(Q, envelope)` in increasing `Q`.
    pub envelopes: Vec<(u64, f64)>,
    /// Least-squares slope of `−log envelope` against `log Q`.
    pub delta_hat: f64,
}

pub fn decay_profile(p: &Poly2, levels: &[u64]) -> Result<DecayProfile> {
    let mut cache: BTreeMap<u64, f64> = BTreeMap::new();
    let mut envelopes = Vec::with_capacity(levels.len());
    for &big_q in levels {
        if big_q == 0 {
            return Err(domain!("dyadic level must be positive"));
        }
        let mut best: f64 = 0.0;
        for q in big_q..=2 * big_q {
            let peak = match cache.get(&q) {
                Some(v) => *v,
                None => {
                    let table = GaussTable::new(p, q)?;
                    let v = (0..q as i64)
                        .filter(|a| (*a as u64).gcd(&q) == 1)
                        .map(|a| table.value(a).norm())
                        .fold(0.0, f64::max);
                    cache.insert(q, v);
                    v
                }
            };
            best = best.max(peak);
        }
        envelopes.push((big_q, best));
    }
    let pts: Vec<(f64, f64)> = envelopes
        .iter()
        .filter(|(_, v)| *v > 0.0)
        .map(|&(q, v)| (libm::log(q as f64), -libm::log(v)))
        .collect();
    let n = pts.len() as f64;
    let delta_hat = if pts.len() < 2 {
        0.0
    } else {
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
        sxy / sxx
    };
    Ok(DecayProfile { envelopes, delta_hat })
}

/// Default bound on the work of a Vinogradov computation (support size times fan-out).
pub const WORK_CAP: u128 = 100_000_000;

/// `J_{s,k}(N; λ)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VinogradovCount {
    pub s: u32,
    pub k: u32,
    pub n: u64,
    pub lambda: Vec<i64>,
    pub count: BigUint,
}

type Key = [i64; 3];

/// The representation function `r_s(μ) = #{x ∈ [N]^s : Σ_j (x_j, …, x_j^k) = μ}`.
#[derive(Clone, Debug)]
pub struct VinogradovTable {
    s: u32,
    k: u32,
    n: u64,
    r: BTreeMap<Key, u64>,
}

fn binomial(n: u128, k: u128) -> u128 {
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul(n - i) / (i + 1);
    }
    acc
}

impl VinogradovTable {
    /// Builds `r_s` by `s`-fold sparse convolution. The work guard bounds
    /// `C(N+s−1, s) · N`, the number of updates in the last convolution step.
    pub fn new(s: u32, k: u32, n: u64, cap: u128) -> Result<Self> {
        if !(1..=6).contains(&s) || !(1..=3).contains(&k) || n < 2 {
            return Err(domain!("need 1 <= s <= 6, 1 <= k <= 3, N >= 2; got s={s}, k={k}, N={n}"));
        }
        let support = binomial(n as u128 + s as u128 - 1, s as u128);
        if support.saturating_mul(n as u128) > cap {
            return Err(resource!(
                "J_(s={s},k={k})(N={n}) needs about {} updates, above the cap {cap}",
                support.saturating_mul(n as u128)
            ));
        }
        let point = |x: i64| -> Key {
            let mut key = [0i64; 3];
            let mut pw = 1i64;
            for slot in key.iter_mut().take(k as usize) {
                pw *= x;
                *slot = pw;
            }
            key
        };
        let mut r: BTreeMap<Key, u64> = BTreeMap::new();
        r.insert([0; 3], 1);
        for _ in 0..s {
            let mut next: BTreeMap<Key, u64> = BTreeMap::new();
            for (mu, c) in &r {
                for x in 1..=n as i64 {
                    let p = point(x);
                    let key = [mu[0] + p[0], mu[1] + p[1], mu[2] + p[2]];
                    *next.entry(key).or_insert(0) += c;
                }
            }
            r = next;
        }
        Ok(VinogradovTable { s, k, n, r })
    }

    pub fn representation(&self) -> impl Iterator<Item = (&[i64], u64)> + '_ {
        self.r.iter().map(|(key, c)| (&key[..self.k as usize], *c))
    }

    fn key(&self, lambda: &[i64]) -> Result<Key> {
        if lambda.len() != self.k as usize {
            return Err(domain!("λ has length {}, expected k = {}", lambda.len(), self.k));
        }
        let mut key = [0i64; 3];
        key[..lambda.len()].copy_from_slice(lambda);
        Ok(key)
    }

    /// `J(λ) = Σ_μ r(μ) r(μ + λ)`.
    pub fn count(&self, lambda: &[i64]) -> Result<VinogradovCount> {
        let l = self.key(lambda)?;
        let mut total: u128 = 0;
        for (mu, c) in &self.r {
            let shifted = [mu[0] + l[0], mu[1] + l[1], mu[2] + l[2]];
            if let Some(d) = self.r.get(&shifted) {
                total += *c as u128 * *d as u128;
            }
        }
        Ok(VinogradovCount { s: self.s, k: self.k, n: self.n, lambda: lambda.to_vec(), count: BigUint::from(total) })
    }

    /// Every nonzero `J(λ)`, by correlating the support with itself.
    pub fn full_table(&self, cap: u128) -> Result<BTreeMap<Vec<i64>, u128>> {
        let size = self.r.len() as u128;
        if size * size > cap {
            return Err(resource!("the full J table needs {} pair updates, above the cap {cap}", size * size));
        }
        let mut out: BTreeMap<Vec<i64>, u128> = BTreeMap::new();
        for (x, cx) in &self.r {
            for (y, cy) in &self.r {
                let lambda: Vec<i64> = (0..self.k as usize).map(|i| x[i] - y[i]).collect();
                *out.entry(lambda).or_insert(0) += *cx as u128 * *cy as u128;
            }
        }
        Ok(out)
    }
}

/// `J_{s,k}(N; λ)` with the default work cap.
pub fn vinogradov_count(s: u32, k: u32, n: u64, lambda: &[i64]) -> Result<VinogradovCount> {
    if lambda.len() != k as usize {
        return Err(domain!("λ has length {}, expected k = {k}", lambda.len()));
    }
    let table = VinogradovTable::new(s, k, n, WORK_CAP)?;
    table.count(lambda)
}

/// Both sides of `|S_k(ξ; N)|^{2s} = Σ_λ J_{s,k}(N; λ) e(ξ·λ)` with the `J` table built once.
#[derive(Clone, Debug)]
pub struct MomentIdentity {
    s: u32,
    k: u32,
    n: u64,
    table: BTreeMap<Vec<i64>, u128>,
}

impl MomentIdentity {
    pub fn new(s: u32, k: u32, n: u64) -> Result<Self> {
        let table = VinogradovTable::new(s, k, n, WORK_CAP)?.full_table(WORK_CAP)?;
        Ok(MomentIdentity { s, k, n, table })
    }

    pub fn table(&self) -> &BTreeMap<Vec<i64>, u128> {
        &self.table
    }

    /// `(|S_k(ξ; N)|^{2s}, Σ_λ J(λ) e(ξ·λ))`.
    pub fn sides(&self, xi: &[Real]) -> Result<(f64, Complex)> {
        if xi.len() != self.k as usize {
            return Err(domain!("ξ has length {}, expected k = {}", xi.len(), self.k));
        }
        let lhs = libm::pow(weyl_sum(xi, self.n, 0)?.value.norm_sqr(), self.s as f64);
        let x: Vec<f64> = xi.iter().map(Real::to_f64).collect();
        let mut rhs = ComplexSum::new();
        for (lambda, c) in &self.table {
            let phase: f64 = lambda.iter().zip(&x).map(|(l, t)| *l as f64 * t).sum();
            rhs += e(phase) * *c as f64;
        }
        Ok((lhs, rhs.value()))
    }

    pub fn gap(&self, xi: &[Real]) -> Result<f64> {
        let (lhs, rhs) = self.sides(xi)?;
        Ok((Complex::new(lhs, 0.0) - rhs).norm())
    }
}

/// `| |S_k(ξ; N)|^{2s} − Σ_λ J_{s,k}(N; λ) e(ξ·λ) |`.
pub fn moment_identity_gap(s: u32, k: u32, n: u64, xi: &[Real]) -> Result<f64> {
    MomentIdentity::new(s, k, n)?.gap(xi)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(s: &str) -> Poly2 {
        s.parse().unwrap()
    }

    fn rat(a: i64, q: i64) -> Rational {
        Rational::new(a, q).unwrap()
    }

    #[test]
    fn gauss_examples() {
        let g = gauss_sum(&poly("m1*m2"), rat(1, 3)).unwrap();
        assert!((g - Complex::new(1.0 / 3.0, 0.0)).norm() < 1e-14);
        let g = gauss_sum(&poly("m1^2*m2^3"), rat(1, 2)).unwrap();
        assert!((g - Complex::new(0.5, 0.0)).norm() < 1e-14);
        let g = gauss_sum(&poly("7*m1^3*m2 - m2^2"), Rational::ZERO).unwrap();
        assert_eq!(g, Complex::new(1.0, 0.0));
    }

    #[test]
    fn gauss_matches_direct_enumeration() {
        let p = poly("m1^2*m2^3 + 3*m1*m2 - m2^2");
        for q in 1..20i64 {
            for a in 0..q {
                if a.gcd(&q) != 1 {
                    continue;
                }
                let mut direct = Complex::new(0.0, 0.0);
                for r1 in 1..=q {
                    for r2 in 1..=q {
                        let v = p.evaluate(r1, r2).mod_floor(&BigInt::from(q)).to_f64().unwrap();
                        direct += e(a as f64 * v / q as f64);
                    }
                }
                direct /= (q * q) as f64;
                assert!((gauss_sum(&p, rat(a, q)).unwrap() - direct).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn partial_examples() {
        let p = poly("m1*m2");
        assert!((partial_gauss(&p, rat(1, 3), 3, Axis::First).unwrap() - Complex::new(1.0, 0.0)).norm() < 1e-14);
        assert!(partial_gauss(&p, rat(1, 3), 1, Axis::First).unwrap().norm() < 1e-14);
        assert_eq!(partial_gauss(&p, Rational::ZERO, 5, Axis::Second).unwrap(), Complex::new(1.0, 0.0));
        assert!((averaged_partial(&p, rat(1, 3), 3, Axis::First).unwrap() - 1.0 / 3.0).abs() < 1e-14);
        assert!((averaged_partial(&p, rat(1, 3), 6, Axis::First).unwrap() - 1.0 / 3.0).abs() < 1e-14);
        assert!((averaged_partial(&p, Rational::ZERO, 11, Axis::First).unwrap() - 1.0).abs() < 1e-14);
    }

    fn brute_force_j(s: usize, k: u32, n: i64, lambda: &[i64]) -> u64 {
        let total = (n as u64).pow(2 * s as u32);
        let mut count = 0;
        for code in 0..total {
            let mut c = code;
            let mut diff = vec![0i64; k as usize];
            for slot in 0..2 * s {
                let x = (c % n as u64) as i64 + 1;
                c /= n as u64;
                let sign = if slot < s { 1 } else { -1 };
                for (i, d) in diff.iter_mut().enumerate() {
                    *d += sign * x.pow(i as u32 + 1);
                }
            }
            if diff == lambda {
                count += 1;
            }
        }
        count
    }

    #[test]
    fn vinogradov_examples() {
        for n in 2..8 {
            assert_eq!(vinogradov_count(1, 2, n, &[0, 0]).unwrap().count, BigUint::from(n));
        }
        assert_eq!(vinogradov_count(2, 2, 3, &[0, 0]).unwrap().count, BigUint::from(15u32));
        for lambda in -6..=6i64 {
            let want = (7 - lambda.abs()).max(0) as u64;
            assert_eq!(vinogradov_count(1, 1, 7, &[lambda]).unwrap().count, BigUint::from(want));
        }
    }

    #[test]
    fn vinogradov_matches_brute_force() {
        for (s, k, n) in [(2, 2, 4), (2, 3, 3), (3, 2, 3), (2, 1, 5)] {
            let table = VinogradovTable::new(s, k, n, WORK_CAP).unwrap();
            for lambda in [vec![0i64; k as usize], (1..=k as i64).collect(), (1..=k as i64).map(|i| -i * i).collect()] {
                let got = table.count(&lambda).unwrap().count;
                assert_eq!(got, BigUint::from(brute_force_j(s as usize, k, n as i64, &lambda)));
            }
        }
    }

    #[test]
    fn cap_is_enforced() {
        assert!(matches!(VinogradovTable::new(6, 3, 200, WORK_CAP), Err(crate::Error::Resource(_))));
    }

    #[test]
    fn moment_identity_examples() {
        assert_eq!(moment_identity_gap(2, 2, 6, &[Real::Float(0.0), Real::Float(0.0)]).unwrap(), 0.0);
        let gap = moment_identity_gap(1, 1, 12, &[Real::Float(0.3717)]).unwrap();
        assert!(gap <= 1e-9 * 144.0);
        let gap = moment_identity_gap(2, 2, 8, &[Real::Float(0.123), Real::Float(-0.771)]).unwrap();
        assert!(gap <= 1e-8 * 4096.0);
    }
}
