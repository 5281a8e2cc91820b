//! Ionescu–Wainger denominator sets `P_{≤l}` and fraction sets `Σ_{≤l}^d`.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::One;

use crate::arith::Rational;
use crate::error::{domain, resource};
use crate::report::Check;
use crate::Result;

/// Default bound on the elements of `P_{≤l}`.
pub const DEFAULT_CAP: u64 = 1_000_000;
/// Default bound on `#Σ_{≤l}^d`.
pub const DEFAULT_SIGMA_CAP: u64 = 5_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct IWParams {
    pub rho: Rational,
    /// `D = ⌊2/ρ⌋ + 1`.
    pub d: u32,
    pub l: u32,
    /// `N0 = ⌊2^{ρl/2}⌋ + 1`.
    pub n0: u64,
    pub cap: u64,
}

/// `⌊2^{ρl/2}⌋` for `ρ = p/q`: the largest `n` with `n^{2q} ≤ 2^{pl}`.
fn floor_root(rho: Rational, l: u32) -> u64 {
    let (p, q) = (rho.num() as u32, rho.den() as u32);
    let target = BigUint::one() << (p as usize * l as usize);
    let fits = |n: u64| num_traits::pow(BigUint::from(n), 2 * q as usize) <= target;
    let mut n = 1u64;
    while fits(n + 1) {
        n += 1;
    }
    n
}

impl IWParams {
    pub fn new(rho: Rational, l: u32, cap: u64) -> Result<Self> {
        if !(rho > Rational::ZERO && rho < Rational::ONE) {
            return Err(domain!("ρ must lie in (0, 1), got {rho}"));
        }
        if l > 40 {
            return Err(domain!("level {l} is beyond desk scale"));
        }
        let d = (2 * rho.den() / rho.num()) as u32 + 1;
        let n0 = floor_root(rho, l) + 1;
        Ok(IWParams { rho, d, l, n0, cap })
    }

    pub fn at_level(&self, l: u32) -> Result<Self> {
        IWParams::new(self.rho, l, self.cap)
    }

    /// `Q0 = (N0!)^D`.
    pub fn q0(&self) -> BigUint {
        let fact: BigUint = (1..=self.n0).map(BigUint::from).product();
        num_traits::pow(fact, self.d as usize)
    }

    /// Primes in `(N0, 2^l]`.
    pub fn medium_primes(&self) -> Vec<u64> {
        primes_up_to(1u64 << self.l).into_iter().filter(|&p| p > self.n0).collect()
    }

    /// `Q_{≤l} = lcm P_{≤l} = Q0 · Π_{p ∈ (N0, 2^l]} p^D`.
    pub fn lcm(&self) -> BigUint {
        self.medium_primes().into_iter().fold(self.q0(), |acc, p| acc * num_traits::pow(BigUint::from(p), self.d as usize))
    }

    /// `log2 Q_{≤l}`.
    pub fn log2_lcm(&self) -> f64 {
        let q = self.lcm();
        let bits = q.bits();
        let shift = bits.saturating_sub(53);
        let top: BigUint = &q >> shift;
        libm::log2(num_traits::ToPrimitive::to_f64(&top).unwrap_or(1.0)) + shift as f64
    }
}

fn primes_up_to(n: u64) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    let mut sieve = vec![true; n as usize + 1];
    sieve[0] = false;
    sieve[1] = false;
    let mut i = 2;
    while i * i <= n as usize {
        if sieve[i] {
            for j in (i * i..=n as usize).step_by(i) {
                sieve[j] = false;
            }
        }
        i += 1;
    }
    (0..=n).filter(|&k| sieve[k as usize]).collect()
}

/// Exponent of `p` in `n!`.
fn legendre(n: u64, p: u64) -> u32 {
    let mut e = 0;
    let mut pk = p;
    while pk <= n {
        e += (n / pk) as u32;
        pk = match pk.checked_mul(p) {
            Some(v) => v,
            None => break,
        };
    }
    e
}

/// `P_{≤l}` listed up to its cap.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DenominatorSet {
    pub params: IWParams,
    /// Sorted, deduplicated.
    pub elements: Vec<u64>,
    /// Some element of the full set exceeds the cap and is not listed.
    pub truncated: bool,
}

impl DenominatorSet {
    pub fn contains(&self, q: u64) -> bool {
        self.elements.binary_search(&q).is_ok()
    }
}

/// Products `Π p_i^{e_i}` over `(prime, max exponent)` factors, each `≤ cap`.
/// `max_factors` bounds how many distinct primes appear. Returns the products and
/// whether any was dropped for exceeding the cap.
fn products(factors: &[(u64, u32)], max_factors: usize, cap: u64) -> (Vec<u64>, bool) {
    let mut out = vec![1u64];
    let mut truncated = false;
    fn walk(factors: &[(u64, u32)], left: usize, acc: u64, cap: u64, out: &mut Vec<u64>, truncated: &mut bool) {
        if left == 0 {
            return;
        }
        for (i, &(p, emax)) in factors.iter().enumerate() {
            let mut v = acc;
            for _ in 0..emax {
                match v.checked_mul(p).filter(|&x| x <= cap) {
                    Some(x) => {
                        v = x;
                        out.push(v);
                        walk(&factors[i + 1..], left - 1, v, cap, out, truncated);
                    }
                    None => {
                        *truncated = true;
                        break;
                    }
                }
            }
        }
    }
    walk(factors, max_factors, 1, cap, &mut out, &mut truncated);
    (out, truncated)
}

/// Enumerates `P_{≤l} = {Q w ≤ cap : Q | (N0!)^D, w ∈ W_{≤l} ∪ {1}}`.
pub fn build_p_le(params: &IWParams) -> Result<DenominatorSet> {
    let top = 1u64 << params.l;
    if params.cap < top {
        return Err(domain!("cap {} cannot contain [2^{}] = [1, {top}]", params.cap, params.l));
    }
    let small: Vec<(u64, u32)> = primes_up_to(params.n0)
        .into_iter()
        .map(|p| (p, params.d * legendre(params.n0, p)))
        .collect();
    let (divisors, t1) = products(&small, small.len(), params.cap);
    let medium: Vec<(u64, u32)> = params.medium_primes().into_iter().map(|p| (p, params.d)).collect();
    let (ws, t2) = products(&medium, params.d as usize, params.cap);
    let mut truncated = t1 || t2;
    let mut set = BTreeSet::new();
    let mut sorted = divisors;
    sorted.sort_unstable();
    for w in ws {
        for &q in &sorted {
            match q.checked_mul(w).filter(|&x| x <= params.cap) {
                Some(x) => {
                    set.insert(x);
                }
                None => {
                    truncated = true;
                    break;
                }
            }
        }
    }
    Ok(DenominatorSet { params: *params, elements: set.into_iter().collect(), truncated })
}

/// A reduced fraction tuple `a/q` with `a ∈ [0, q)^d` and `gcd(a_1, …, a_d, q) = 1`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FractionTuple {
    pub numerators: Vec<u64>,
    pub q: u64,
}

/// Jordan's totient `J_d(q) = #{a ∈ [0, q)^d : gcd(a, q) = 1}`.
pub fn jordan_totient(q: u64, d: u32) -> u128 {
    let mut n = q;
    let mut acc: u128 = (q as u128).pow(d);
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            acc = acc / (p as u128).pow(d) * ((p as u128).pow(d) - 1);
            while n % p == 0 {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        acc = acc / (n as u128).pow(d) * ((n as u128).pow(d) - 1);
    }
    acc
}

fn gcd_all(a: &[u64], q: u64) -> u64 {
    a.iter().fold(q, |g, x| g.gcd(x))
}

/// `Σ_{≤l}^d` for `d ∈ {1, 2}`, refusing to enumerate more than `cap` tuples.
pub fn build_sigma(set: &DenominatorSet, d: u32, cap: u64) -> Result<Vec<FractionTuple>> {
    if !(1..=2).contains(&d) {
        return Err(domain!("fraction tuples of dimension {d} are not supported (d must be 1 or 2)"));
    }
    let size: u128 = set.elements.iter().map(|&q| jordan_totient(q, d)).sum();
    if size > cap as u128 {
        return Err(resource!(
            "Σ at level {} has {size} tuples of dimension {d}, above the cap {cap}; its size grows like 2^(C (d+1) 2^(ρl))",
            set.params.l
        ));
    }
    let mut out = Vec::with_capacity(size as usize);
    for &q in &set.elements {
        if d == 1 {
            out.extend((0..q).filter(|a| a.gcd(&q) == 1).map(|a| FractionTuple { numerators: vec![a], q }));
        } else {
            for a1 in 0..q {
                for a2 in 0..q {
                    if gcd_all(&[a1, a2], q) == 1 {
                        out.push(FractionTuple { numerators: vec![a1, a2], q });
                    }
                }
            }
        }
    }
    Ok(out)
}

/// `Σ_l^d = Σ_{≤l}^d ∖ Σ_{≤l−1}^d`: the tuples whose denominator lies in `P_l`.
pub fn sigma_level(current: &DenominatorSet, previous: Option<&DenominatorSet>, d: u32, cap: u64) -> Result<Vec<FractionTuple>> {
    let all = build_sigma(current, d, cap)?;
    Ok(match previous {
        None => all,
        Some(prev) => all.into_iter().filter(|t| !prev.contains(t.q)).collect(),
    })
}

/// The structural checks on a chain `P_{≤0}, …, P_{≤L}` given explicitly.
///
/// `levels[l]` is the listed `P_{≤l}`; `truncated[l]` says whether it was cut at a cap.
pub fn check_levels(levels: &[Vec<u64>], truncated: &[bool]) -> Vec<Check> {
    let mut checks = Vec::new();
    for (l, set) in levels.iter().enumerate() {
        let has = |s: &Vec<u64>, q: u64| s.binary_search(&q).is_ok();
        if l > 0 {
            let prev = &levels[l - 1];
            // Elements of the previous level above this level's cap cannot be listed.
            let limit = set.last().copied().unwrap_or(0);
            let missing = prev.iter().filter(|&&q| !has(set, q) && !(truncated[l] && q > limit)).count();
            checks.push(
                Check::count(format!("nesting l={l}"), missing as u64, 0)
                    .with_detail(format!("{missing} elements of P_<={} missing from P_<={l}", l - 1)),
            );
        }
        let top = 1u64 << l;
        let absent: Vec<u64> = (1..=top).filter(|&q| !has(set, q)).collect();
        checks.push(
            Check::count(format!("initial segment l={l}"), absent.len() as u64, 0)
                .with_detail(format!("[1, {top}] minus P_<={l}: {absent:?}")),
        );
        let mut bad = 0usize;
        for &q in set {
            let mut k = 1;
            while k * k <= q {
                if q % k == 0 && (!has(set, k) || !has(set, q / k)) {
                    bad += 1;
                }
                k += 1;
            }
        }
        checks.push(
            Check::count(format!("divisor closure l={l}"), bad as u64, 0).with_detail(format!("{bad} divisor pairs missing")),
        );
        let fresh: Vec<u64> = match l {
            0 => set.clone(),
            _ => set.iter().copied().filter(|&q| !has(&levels[l - 1], q)).collect(),
        };
        let floor = if l == 0 { 0 } else { 1u64 << (l - 1) };
        let low = fresh.iter().filter(|&&q| q <= floor).count();
        checks.push(
            Check::count(format!("new denominators exceed 2^(l-1) l={l}"), low as u64, 0)
                .with_detail(format!("{low} of {} elements of P_{l} are <= 2^(l-1)", fresh.len())),
        );
    }
    checks
}

/// Builds `P_{≤l}` for `l ≤ l_max` and runs [`check_levels`] on the chain.
pub fn verify_iw_properties(rho: Rational, cap: u64, l_max: u32) -> Result<(Vec<DenominatorSet>, Vec<Check>)> {
    let sets: Vec<DenominatorSet> =
        (0..=l_max).map(|l| IWParams::new(rho, l, cap).and_then(|p| build_p_le(&p))).collect::<Result<_>>()?;
    let levels: Vec<Vec<u64>> = sets.iter().map(|s| s.elements.clone()).collect();
    let truncated: Vec<bool> = sets.iter().map(|s| s.truncated).collect();
    let checks = check_levels(&levels, &truncated);
    Ok((sets, checks))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn half() -> Rational {
        Rational::new(1, 2).unwrap()
    }

    #[test]
    fn parameters() {
        let p = IWParams::new(half(), 2, DEFAULT_CAP).unwrap();
        assert_eq!((p.d, p.n0), (5, 2));
        assert_eq!(p.q0(), BigUint::from(32u32));
        assert_eq!(p.medium_primes(), vec![3]);
        // 2^{ρl/2} = 2 exactly at l = 4, and 4 at l = 8.
        assert_eq!(IWParams::new(half(), 4, DEFAULT_CAP).unwrap().n0, 3);
        assert_eq!(IWParams::new(half(), 8, DEFAULT_CAP).unwrap().n0, 5);
        let quarter = IWParams::new(Rational::new(1, 4).unwrap(), 3, DEFAULT_CAP).unwrap();
        assert_eq!((quarter.d, quarter.n0), (9, 2));
    }

    #[test]
    fn level_two_set() {
        let p = IWParams::new(half(), 2, DEFAULT_CAP).unwrap();
        let set = build_p_le(&p).unwrap();
        let mut want: Vec<u64> = Vec::new();
        for w in [1u64, 3, 9, 27, 81, 243] {
            for q in [1u64, 2, 4, 8, 16, 32] {
                want.push(q * w);
            }
        }
        want.sort_unstable();
        assert_eq!(set.elements, want);
        assert!(!set.truncated);
        assert!((1..=4).all(|q| set.contains(q)));
    }

    #[test]
    fn level_zero_set_and_sigma() {
        let p = IWParams::new(half(), 0, DEFAULT_CAP).unwrap();
        let set = build_p_le(&p).unwrap();
        assert_eq!(set.elements, vec![1, 2, 4, 8, 16, 32]);
        let sigma = build_sigma(&set, 1, DEFAULT_SIGMA_CAP).unwrap();
        assert_eq!(sigma.len(), 32);
        assert_eq!(sigma.iter().filter(|t| t.q == 1).collect::<Vec<_>>(), vec![&FractionTuple { numerators: vec![0], q: 1 }]);
        let next = build_p_le(&p.at_level(1).unwrap()).unwrap();
        let sigma1 = build_sigma(&next, 1, DEFAULT_SIGMA_CAP).unwrap();
        assert!(sigma.iter().all(|t| sigma1.contains(t)));
    }

    #[test]
    fn sigma_counts_match_totients() {
        let set = build_p_le(&IWParams::new(half(), 2, DEFAULT_CAP).unwrap()).unwrap();
        for d in [1, 2] {
            let small = DenominatorSet { elements: set.elements.iter().copied().filter(|&q| q <= 100).collect(), ..set.clone() };
            let sigma = build_sigma(&small, d, DEFAULT_SIGMA_CAP).unwrap();
            let want: u128 = small.elements.iter().map(|&q| jordan_totient(q, d)).sum();
            assert_eq!(sigma.len() as u128, want);
            for t in &sigma {
                assert_eq!(gcd_all(&t.numerators, t.q), 1);
            }
        }
        assert!(matches!(build_sigma(&set, 2, 1000), Err(crate::Error::Resource(_))));
    }

    #[test]
    fn properties_hold() {
        for (rho, l_max) in [(half(), 3), (Rational::new(1, 4).unwrap(), 2)] {
            let (_, checks) = verify_iw_properties(rho, DEFAULT_CAP, l_max).unwrap();
            for c in &checks {
                assert!(c.passed, "{c:?}");
            }
        }
    }

    #[test]
    fn broken_fixture_fails_initial_segment() {
        let (sets, _) = verify_iw_properties(half(), DEFAULT_CAP, 2).unwrap();
        let mut levels: Vec<Vec<u64>> = sets.iter().map(|s| s.elements.clone()).collect();
        levels[2].retain(|&q| q != 3);
        let checks = check_levels(&levels, &[false; 3]);
        let seg = checks.iter().find(|c| c.name == "initial segment l=2").unwrap();
        assert!(!seg.passed);
    }

    #[test]
    fn cap_below_initial_segment_is_rejected() {
        let p = IWParams::new(half(), 3, 5).unwrap();
        assert!(build_p_le(&p).is_err());
    }

    #[test]
    fn lcm_matches_listed_set() {
        let p = IWParams::new(half(), 3, u64::MAX / 4).unwrap();
        let set = build_p_le(&p).unwrap();
        assert!(!set.truncated);
        let l = set.elements.iter().fold(BigUint::one(), |acc, &q| acc.lcm(&BigUint::from(q)));
        assert_eq!(l, p.lcm());
    }
}
