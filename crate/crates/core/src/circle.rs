//! Multipliers of the circle method on `ℤ`.
//!
//! * the discrete multiplier `m_{M1,M2}(ξ) = Σ e(ξ P(m)) χ_{M1}(m1) χ_{M2}(m2)` with
//!   `χ_N` the normalized indicator of `(N/τ, N]`, and its one-variable partials;
//! * the continuous multiplier `𝔪_{M1,M2}(ξ)`, the same average with the sum replaced by
//!   an integral over `[1/τ, 1]²`;
//! * the cutoff `η_{≤n}`, the projection `Δ_{≤l,≤n}` and the periodized approximant `Φ`;
//! * threshold bookkeeping, major/minor arc classification and the transition error
//!   between `m^1` and `G^1 · 𝔪^1`.

use alloc::string::String;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive};

use crate::arith::{dirichlet_approx, torus_offset, Rational, Real};
use crate::complete::{gauss_sum, partial_gauss};
use crate::error::{contract, domain, resource};
use crate::ergodic::{span, Region, Span};
use crate::expsum::double_sum;
use crate::iw::{build_p_le, build_sigma, IWParams};
use crate::newton::NewtonDiagram;
use crate::poly::{Axis, Exponent, Poly2};
use crate::quad::{GaussLegendre, DEFAULT_ORDER};
use crate::sum::e;
use crate::{Complex, Result};

pub const DEFAULT_TOL: f64 = 1e-10;
pub const DEFAULT_BETA: f64 = 4.0;
/// `ρ = 1/100`.
pub const DEFAULT_RHO: (i64, i64) = (1, 100);

/// Attached to reports that run with the default `β` and `ρ`.
pub const DESK_SCALE_WARNING: &str =
    "β = 4 and ρ = 1/100 are desk-scale defaults; the circle-method constants only take effect asymptotically";

/// Describes the cutoff used by every `η`-dependent output.
pub const ETA_DESCRIPTION: &str = "η(t) = 1 on |t| ≤ 1, 0 on |t| ≥ 2, 1 − s(|t| − 1) between, s(u) = 6u⁵ − 15u⁴ + 10u³";

/// Rejects `β ρ ≥ 1/1000`.
pub fn validate_beta_rho(beta: f64, rho: Rational) -> Result<()> {
    if !(beta.is_finite() && beta > 0.0) {
        return Err(domain!("β must be positive, got {beta}"));
    }
    if rho <= Rational::ZERO {
        return Err(domain!("ρ must be positive, got {rho}"));
    }
    if beta * rho.to_f64() * 1000.0 >= 1.0 {
        return Err(domain!("β ρ = {} does not satisfy β ρ < 1/1000", beta * rho.to_f64()));
    }
    Ok(())
}

/// Which variable of a partial multiplier is held at an integer value.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Frozen {
    pub axis: Axis,
    pub value: i64,
}

fn tau_check(tau: Rational) -> Result<()> {
    if tau <= Rational::ONE {
        return Err(domain!("τ must exceed 1, got {tau}"));
    }
    Ok(())
}

fn region_span(m: &Real, tau: Rational) -> Result<Span> {
    let s = span(m, Region::Truncated(tau))?;
    if s.0 >= s.1 {
        return Err(domain!("(M/τ, M] ∩ ℤ is empty for M = {m}, τ = {tau}"));
    }
    Ok(s)
}

/// `m_{M1,M2}(ξ)`, or `m^1_{m1,M2}(ξ)` / `m^2_{M1,m2}(ξ)` when one variable is frozen.
///
/// The frozen variable's scale is ignored.
pub fn discrete_multiplier(p: &Poly2, xi: &Real, m1: &Real, m2: &Real, tau: Rational, frozen: Option<Frozen>) -> Result<Complex> {
    tau_check(tau)?;
    let point = |v: i64| (v - 1, v);
    let (s1, s2) = match frozen {
        None => (region_span(m1, tau)?, region_span(m2, tau)?),
        Some(Frozen { axis: Axis::First, value }) => (point(value), region_span(m2, tau)?),
        Some(Frozen { axis: Axis::Second, value }) => (region_span(m1, tau)?, point(value)),
    };
    let count = ((s1.1 - s1.0) as f64) * ((s2.1 - s2.0) as f64);
    let s = double_sum(&p.scale(xi), s1.0, s1.1, s2.0, s2.1)?;
    Ok(s.value / count)
}

/// `𝔪_{M1,M2}(ξ) = (1 − τ⁻¹)⁻² ∫∫_{[τ⁻¹, 1]²} e(ξ P(M1 y1, M2 y2)) dy`, or the one-variable
/// partial `(1 − τ⁻¹)⁻¹ ∫ e(ξ P(m1, M2 y2)) dy2` (and its transpose) when a variable is frozen.
///
/// Adaptive Gauss–Legendre of order 32, nested for the double integral.
pub fn continuous_multiplier(
    p: &Poly2,
    xi: &Real,
    m1: &Real,
    m2: &Real,
    tau: Rational,
    tol: f64,
    frozen: Option<Frozen>,
) -> Result<Complex> {
    tau_check(tau)?;
    if !(tol > 0.0) {
        return Err(domain!("tolerance must be positive, got {tol}"));
    }
    let (a, b) = (1.0 / tau.to_f64(), 1.0);
    let width = b - a;
    let phase = p.scale(xi);
    let (x1, x2) = (m1.to_f64(), m2.to_f64());
    let gl = GaussLegendre::new(DEFAULT_ORDER);
    let one_dim = |g: &mut dyn FnMut(f64) -> f64| -> Result<Complex> {
        let mut f = |y: f64| Ok(e(g(y)));
        Ok(gl.adaptive(&mut f, a, b, tol * width)? / width)
    };
    match frozen {
        Some(Frozen { axis: Axis::First, value }) => one_dim(&mut |y| phase.evaluate(value as f64, x2 * y)),
        Some(Frozen { axis: Axis::Second, value }) => one_dim(&mut |y| phase.evaluate(x1 * y, value as f64)),
        None => {
            let mut outer = |y1: f64| -> Result<Complex> {
                let mut inner = |y2: f64| Ok(e(phase.evaluate(x1 * y1, x2 * y2)));
                gl.adaptive(&mut inner, a, b, 0.5 * tol * width)
            };
            Ok(gl.adaptive(&mut outer, a, b, 0.5 * tol * width * width)? / (width * width))
        }
    }
}

fn smoothstep(u: f64) -> f64 {
    u * u * u * (10.0 + u * (-15.0 + 6.0 * u))
}

/// The fixed bump `η`: even, `1` on `[−1, 1]`, `0` off `(−2, 2)`, quintic smoothstep between.
pub fn eta(t: f64) -> f64 {
    let t = t.abs();
    if t <= 1.0 {
        1.0
    } else if t >= 2.0 {
        0.0
    } else {
        1.0 - smoothstep(t - 1.0)
    }
}

/// `η_{≤n}(ξ) = η(2^{−n} ξ)`.
pub fn cutoff_eta(n: i32, xi: f64) -> f64 {
    eta(libm::ldexp(xi, -n))
}

/// Exact `ξ − a/q` reduced into `[−1/2, 1/2)`, converted to a double.
fn exact_torus_offset(xi: &BigRational, center: &BigRational) -> f64 {
    let d = xi - center;
    let half = BigRational::new(BigInt::from(1), BigInt::from(2));
    let shift = (&d + &half).floor();
    (d - shift).to_f64().unwrap_or(f64::NAN)
}

/// Torus offsets to every fraction that might carry a nonzero bump, refined exactly.
fn near_offsets<'a>(centers: &'a [Rational], n: i32, xi: &Real) -> impl Iterator<Item = (Rational, f64)> + 'a {
    let reach = libm::ldexp(2.0, n) * (1.0 + 1e-9) + 1e-12;
    let x = xi.to_f64();
    let big = xi.to_big();
    centers.iter().filter_map(move |c| {
        if torus_offset(x - c.to_f64()).abs() > reach {
            return None;
        }
        Some((*c, exact_torus_offset(&big, &c.to_big())))
    })
}

/// `Δ_{≤l,≤n}(ξ)` together with its complement.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProjectionValue {
    pub value: f64,
    pub complement: f64,
    /// The bumps overlap: `2^{n+1}` is at least half the minimal gap of `Σ_{≤l}`.
    pub overlap: bool,
}

/// `Δ_{≤l,≤n} = Σ_{a/q ∈ Σ_{≤l}} η_{≤n}(· − a/q)` with `Σ_{≤l}` materialized once.
#[derive(Clone, Debug)]
pub struct Projection {
    centers: Vec<Rational>,
    n: i32,
    min_gap: f64,
}

impl Projection {
    pub fn new(params: &IWParams, n: i32) -> Result<Self> {
        let set = build_p_le(params)?;
        if set.truncated {
            return Err(resource!("P_≤{} is cut at the cap {}, so Σ_≤{} is incomplete", params.l, params.cap, params.l));
        }
        let sigma = build_sigma(&set, 1, params.cap)?;
        let mut centers = sigma
            .iter()
            .map(|t| Rational::new(t.numerators[0] as i64, t.q as i64))
            .collect::<Result<Vec<_>>>()?;
        centers.sort();
        let min_gap = if centers.len() < 2 {
            1.0
        } else {
            let mut gap = 1.0 - centers[centers.len() - 1].to_f64() + centers[0].to_f64();
            for w in centers.windows(2) {
                gap = gap.min(w[1].checked_sub(&w[0])?.to_f64());
            }
            gap
        };
        Ok(Projection { centers, n, min_gap })
    }

    pub fn centers(&self) -> &[Rational] {
        &self.centers
    }

    pub fn min_gap(&self) -> f64 {
        self.min_gap
    }

    pub fn overlapping(&self) -> bool {
        libm::ldexp(2.0, self.n) >= 0.5 * self.min_gap
    }

    pub fn evaluate(&self, xi: &Real) -> ProjectionValue {
        let value: f64 = near_offsets(&self.centers, self.n, xi).map(|(_, d)| cutoff_eta(self.n, d)).sum();
        ProjectionValue { value, complement: 1.0 - value, overlap: self.overlapping() }
    }
}

/// `Δ_{≤l,≤n}(ξ)` for a single frequency.
pub fn projection_multiplier(params: &IWParams, n: i32, xi: &Real) -> Result<ProjectionValue> {
    Ok(Projection::new(params, n)?.evaluate(xi))
}

/// Threshold functions `l^β`, `n^v` and `n^{v,β}` for a vertex `v`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScaleBook {
    pub v: Exponent,
    pub beta: f64,
    pub tau: Rational,
}

impl ScaleBook {
    pub fn new(v: Exponent, beta: f64, tau: Rational) -> Result<Self> {
        tau_check(tau)?;
        if !(beta.is_finite() && beta > 0.0) {
            return Err(domain!("β must be positive, got {beta}"));
        }
        Ok(ScaleBook { v, beta, tau })
    }

    /// `log_τ M`.
    pub fn log_tau(&self, m: f64) -> f64 {
        libm::log(m) / libm::log(self.tau.to_f64())
    }

    /// `l^β(M) = log₂ (log_τ M)^β`.
    pub fn l_beta(&self, m: f64) -> f64 {
        self.beta * libm::log2(self.log_tau(m))
    }

    /// `n^v_{M1,M2}(N) = log₂(M1^{v1} M2^{v2}) − N`.
    pub fn n_v(&self, m1: f64, m2: f64, big_n: f64) -> f64 {
        self.v.0 as f64 * libm::log2(m1) + self.v.1 as f64 * libm::log2(m2) - big_n
    }

    /// `n^{v,β}_{M1,M2}(M) = n^v_{M1,M2}(l^β(M))`.
    pub fn n_v_beta(&self, m1: f64, m2: f64, m: f64) -> f64 {
        self.n_v(m1, m2, self.l_beta(m))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArcKind {
    Major,
    Minor,
}

impl ArcKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ArcKind::Major => "major",
            ArcKind::Minor => "minor",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ArcThresholds {
    /// `(log_τ M*)^β`.
    pub log_power: f64,
    /// `M1^{v1} M2^{v2} (log_τ M*)^{−β}`.
    pub resolution: f64,
    /// `M1^{v1} M2^{v2}`.
    pub scale: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ArcClassification {
    pub kind: ArcKind,
    pub center: Option<Rational>,
    pub offset: Option<Real>,
    pub thresholds: ArcThresholds,
}

fn offset_of(xi: &Real, center: Rational) -> Result<Real> {
    match xi {
        Real::Exact(r) => Ok(Real::Exact(r.checked_sub(&center)?)),
        Real::Float(_) => Real::float((xi.to_big() - center.to_big()).to_f64().unwrap_or(f64::NAN)),
    }
}

/// Major iff the Dirichlet approximation `a/q` of `ξ` at resolution
/// `Q = ⌊M1^{v1} M2^{v2} (log_τ M*)^{−β}⌋` has `q ≤ (log_τ M*)^β` and
/// `|ξ − a/q| ≤ (log_τ M*)^β / (q M1^{v1} M2^{v2})`.
pub fn arc_classify(diagram: &NewtonDiagram, j: usize, xi: &Real, m1: &Real, m2: &Real, beta: f64, tau: Rational) -> Result<ArcClassification> {
    let (v1, v2) = diagram.vertex(j);
    let book = ScaleBook::new((v1, v2), beta, tau)?;
    let m_star = diagram.m_star(j, m1, m2)?.to_f64();
    if m_star <= tau.to_f64() {
        return Err(domain!("M* = {m_star} must exceed τ = {tau}"));
    }
    let log_power = libm::pow(book.log_tau(m_star), beta);
    let scale = libm::pow(m1.to_f64(), v1 as f64) * libm::pow(m2.to_f64(), v2 as f64);
    let resolution = scale / log_power;
    let thresholds = ArcThresholds { log_power, resolution, scale };
    if !(resolution >= 1.0) {
        return Err(domain!("resolution M^v (log_τ M*)^(-β) = {resolution} is below 1"));
    }
    if resolution >= (1u64 << 62) as f64 {
        return Err(domain!("resolution {resolution} is beyond desk scale"));
    }
    let center = dirichlet_approx(xi, libm::floor(resolution) as u64)?;
    let offset = offset_of(xi, center)?;
    let q = center.den() as f64;
    let major = q <= log_power && offset.to_big().abs().to_f64().unwrap_or(f64::INFINITY) <= log_power / (q * scale);
    Ok(if major {
        ArcClassification { kind: ArcKind::Major, center: Some(center), offset: Some(offset), thresholds }
    } else {
        ArcClassification { kind: ArcKind::Minor, center: None, offset: None, thresholds }
    })
}

/// The weight `G` in the periodized approximant.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GaussMode {
    /// `G(a/q)` against `𝔪_{M1,M2}`.
    Full,
    /// `G^1_{m1}(a/q)` against `𝔪^1_{m1,M2}`.
    Axis1(i64),
    /// `G^2_{m2}(a/q)` against `𝔪^2_{M1,m2}`.
    Axis2(i64),
    /// `G ≡ 1` against `𝔪_{M1,M2}`: the bare periodization.
    One,
}

/// Shared inputs of [`major_approximant`].
#[derive(Clone, Debug)]
pub struct Approximant<'a> {
    pub p: &'a Poly2,
    pub m1: Real,
    pub m2: Real,
    pub tau: Rational,
    pub tol: f64,
}

impl Approximant<'_> {
    /// `Φ^Σ_{≤n}[G, 𝔪](ξ) = Σ_{a/q ∈ Σ} G(a/q) 𝔪(ξ − a/q) η_{≤n}(ξ − a/q)`.
    pub fn evaluate(&self, projection: &Projection, xi: &Real, mode: GaussMode) -> Result<Complex> {
        let mut acc = Complex::new(0.0, 0.0);
        for (center, d) in near_offsets(&projection.centers, projection.n, xi) {
            let w = cutoff_eta(projection.n, d);
            if w == 0.0 {
                continue;
            }
            let (g, frozen) = match mode {
                GaussMode::Full => (gauss_sum(self.p, center)?, None),
                GaussMode::One => (Complex::new(1.0, 0.0), None),
                GaussMode::Axis1(m) => (partial_gauss(self.p, center, m, Axis::First)?, Some(Frozen { axis: Axis::First, value: m })),
                GaussMode::Axis2(m) => (partial_gauss(self.p, center, m, Axis::Second)?, Some(Frozen { axis: Axis::Second, value: m })),
            };
            let mult = continuous_multiplier(self.p, &Real::float(d)?, &self.m1, &self.m2, self.tau, self.tol, frozen)?;
            acc += g * mult * w;
        }
        Ok(acc)
    }
}

/// `Φ^{Σ_{≤l}}_{≤n}[G, 𝔪](ξ)` for one frequency.
pub fn major_approximant(
    p: &Poly2,
    params: &IWParams,
    n: i32,
    xi: &Real,
    m1: &Real,
    m2: &Real,
    tau: Rational,
    mode: GaussMode,
) -> Result<Complex> {
    let projection = Projection::new(params, n)?;
    Approximant { p, m1: m1.clone(), m2: m2.clone(), tau, tol: DEFAULT_TOL }.evaluate(&projection, xi, mode)
}

/// `2^{N+1} / (M1^{v1} M2^{v2})`: the reach of `η_{≤ −n^v_{M1,M2}(N)}`.
pub fn transition_window(v: Exponent, m1: f64, m2: f64, big_n: f64) -> f64 {
    libm::exp2(big_n + 1.0) / (libm::pow(m1, v.0 as f64) * libm::pow(m2, v.1 as f64))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TransitionError {
    /// `|m^1_{m1,M2'}(ξ) − G^1_{m1}(a/q) 𝔪^1_{m1,M2'}(ξ − a/q)|`.
    pub measured: f64,
    /// `q / M2'`.
    pub budget: f64,
}

impl TransitionError {
    pub fn ratio(&self) -> f64 {
        self.measured / self.budget
    }
}

/// Error of replacing `m^1_{m1,M2'}(ξ)` by `G^1_{m1}(a/q) 𝔪^1_{m1,M2'}(ξ − a/q)`.
///
/// Requires `q ≤ M2'` and `|ξ − a/q| ≤ window`.
pub fn claim3_error(p: &Poly2, m1: i64, m2_prime: &Real, xi: &Real, center: Rational, tau: Rational, window: f64) -> Result<TransitionError> {
    let q = center.den() as f64;
    let scale = m2_prime.to_f64();
    if q > scale {
        return Err(contract!("q = {} exceeds M2' = {m2_prime}", center.den()));
    }
    let offset = offset_of(xi, center)?;
    if offset.to_f64().abs() > window {
        return Err(contract!("|ξ − {center}| = {} lies outside the window {window}", offset.to_f64().abs()));
    }
    let frozen = Some(Frozen { axis: Axis::First, value: m1 });
    let discrete = discrete_multiplier(p, xi, &Real::Exact(Rational::ONE), m2_prime, tau, frozen)?;
    let g = partial_gauss(p, center, m1, Axis::First)?;
    let continuous = continuous_multiplier(p, &offset, &Real::Exact(Rational::ONE), m2_prime, tau, DEFAULT_TOL, frozen)?;
    Ok(TransitionError { measured: (discrete - g * continuous).norm(), budget: q / scale })
}

/// A short description of a classification, for reports.
pub fn describe(arc: &ArcClassification) -> String {
    match (arc.kind, arc.center) {
        (ArcKind::Major, Some(c)) => alloc::format!("major near {c}"),
        _ => String::from("minor"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::parse;

    fn r(a: i64, q: i64) -> Rational {
        Rational::new(a, q).unwrap()
    }

    fn ex(a: i64, q: i64) -> Real {
        Real::Exact(r(a, q))
    }

    #[test]
    fn discrete_normalization_and_lattice_point() {
        let p = parse("m1*m2").unwrap();
        let two = r(2, 1);
        let v = discrete_multiplier(&p, &ex(0, 1), &ex(7, 1), &ex(9, 1), two, None).unwrap();
        assert!((v - Complex::new(1.0, 0.0)).norm() < 1e-14);
        let v = discrete_multiplier(&p, &ex(1, 2), &ex(2, 1), &ex(2, 1), two, None).unwrap();
        assert_eq!(v, Complex::new(1.0, 0.0));
    }

    #[test]
    fn discrete_matches_enumeration_and_is_periodic() {
        let p = parse("m1^2*m2 + 3*m1*m2^2").unwrap();
        let tau = r(3, 2);
        let xi = ex(5, 17);
        let v = discrete_multiplier(&p, &xi, &ex(11, 1), &ex(8, 1), tau, None).unwrap();
        let mut acc = Complex::new(0.0, 0.0);
        let mut count = 0.0;
        for m1 in 8..=11i64 {
            for m2 in 6..=8i64 {
                let val = m1 * m1 * m2 + 3 * m1 * m2 * m2;
                acc += e((5 * val % 17) as f64 / 17.0);
                count += 1.0;
            }
        }
        assert!((v - acc / count).norm() < 1e-13);
        let shifted = discrete_multiplier(&p, &xi.shift(1), &ex(11, 1), &ex(8, 1), tau, None).unwrap();
        assert_eq!(v, shifted);
        let conj = discrete_multiplier(&p, &xi.neg(), &ex(11, 1), &ex(8, 1), tau, None).unwrap();
        assert_eq!(conj, v.conj());
    }

    #[test]
    fn discrete_partial_is_a_single_row() {
        let p = parse("m1^2*m2^3").unwrap();
        let tau = r(2, 1);
        let xi = ex(1, 7);
        let f = Some(Frozen { axis: Axis::First, value: 3 });
        let v = discrete_multiplier(&p, &xi, &ex(1, 1), &ex(10, 1), tau, f).unwrap();
        let mut acc = Complex::new(0.0, 0.0);
        for m2 in 6..=10i64 {
            acc += e((9 * m2 * m2 * m2 % 7) as f64 / 7.0);
        }
        assert!((v - acc / 5.0).norm() < 1e-13);
    }

    #[test]
    fn empty_region_is_rejected() {
        let p = parse("m1*m2").unwrap();
        let err = discrete_multiplier(&p, &ex(0, 1), &ex(3, 2), &ex(5, 1), r(3, 2), None);
        assert!(matches!(err, Err(crate::Error::Domain(_))));
    }

    #[test]
    fn continuous_normalization() {
        let p = parse("m1^2*m2 - m2^3").unwrap();
        let v = continuous_multiplier(&p, &ex(0, 1), &ex(30, 1), &ex(40, 1), r(2, 1), DEFAULT_TOL, None).unwrap();
        assert!((v - Complex::new(1.0, 0.0)).norm() < 1e-12);
        let f = Some(Frozen { axis: Axis::Second, value: 4 });
        let v = continuous_multiplier(&p, &ex(0, 1), &ex(30, 1), &ex(40, 1), r(2, 1), DEFAULT_TOL, f).unwrap();
        assert!((v - Complex::new(1.0, 0.0)).norm() < 1e-12);
    }

    /// `∫_{1/2}^1 e(ξ y1 y2) dy2` in closed form, then a fine midpoint rule in `y1`.
    fn bilinear_oracle(xi: f64) -> Complex {
        let n = 200_000;
        let h = 0.5 / n as f64;
        let mut acc = Complex::new(0.0, 0.0);
        for k in 0..n {
            let y1 = 0.5 + (k as f64 + 0.5) * h;
            let w = core::f64::consts::TAU * xi * y1;
            let inner = (e(xi * y1) - e(0.5 * xi * y1)) / Complex::new(0.0, w);
            acc += inner * h;
        }
        acc * 4.0
    }

    #[test]
    fn continuous_bilinear_decay_and_oracle() {
        let p = parse("m1*m2").unwrap();
        for k in 1..=3 {
            let xi = libm::pow(10.0, k as f64);
            let v = continuous_multiplier(&p, &Real::float(xi).unwrap(), &ex(1, 1), &ex(1, 1), r(2, 1), DEFAULT_TOL, None).unwrap();
            let oracle = bilinear_oracle(xi);
            assert!((v - oracle).norm() < 1e-8, "ξ = {xi}: {v} vs {oracle}");
            assert!(v.norm() <= 1.0 + DEFAULT_TOL);
            assert!(v.norm() * libm::sqrt(xi) <= 4.0, "ξ = {xi}: {}", v.norm());
        }
    }

    #[test]
    fn eta_values() {
        assert_eq!(cutoff_eta(3, 8.0), 1.0);
        assert_eq!(cutoff_eta(3, -5.0), 1.0);
        assert_eq!(cutoff_eta(3, 16.0), 0.0);
        assert_eq!(cutoff_eta(-4, 1.5 / 16.0), 0.5);
        assert_eq!(cutoff_eta(0, -1.5), 0.5);
        let mut last = 1.0;
        for k in 0..=400 {
            let t = k as f64 / 100.0;
            let v = eta(t);
            assert!(v <= last && (0.0..=1.0).contains(&v));
            assert_eq!(v, eta(-t));
            last = v;
        }
    }

    fn half_params(l: u32) -> IWParams {
        IWParams::new(r(1, 2), l, crate::iw::DEFAULT_CAP).unwrap()
    }

    #[test]
    fn projection_examples() {
        let params = half_params(0);
        let proj = Projection::new(&params, -20).unwrap();
        assert_eq!(proj.centers().len(), 32);
        assert!(!proj.overlapping());
        assert_eq!(proj.evaluate(&ex(3, 8)).value, 1.0);
        assert_eq!(proj.evaluate(&ex(1, 3)).value, 0.0);
        let xi = Real::Exact(r(1, 2).checked_add(&r(3, 1 << 21)).unwrap());
        let v = proj.evaluate(&xi);
        assert_eq!(v.value, 0.5);
        assert_eq!(v.complement, 0.5);
        let xi = Real::float(-0.5 + 1.5 * libm::ldexp(1.0, -20)).unwrap();
        assert_eq!(proj.evaluate(&xi).value, 0.5);
        assert!(Projection::new(&params, -6).unwrap().overlapping());
    }

    fn diagram(text: &str) -> NewtonDiagram {
        NewtonDiagram::build(&parse(text).unwrap()).unwrap()
    }

    #[test]
    fn arcs() {
        let d = diagram("m1*m2");
        let big = ex(1 << 20, 1);
        let tau = r(2, 1);
        let a = arc_classify(&d, 1, &ex(0, 1), &big, &big, 1.0, tau).unwrap();
        assert_eq!(a.kind, ArcKind::Major);
        assert_eq!(a.center, Some(Rational::ZERO));
        let a = arc_classify(&d, 1, &ex(1, 2), &big, &big, 1.0, tau).unwrap();
        assert_eq!(a.kind, ArcKind::Major);
        assert_eq!(a.center, Some(r(1, 2)));
        let a = arc_classify(&d, 1, &ex(1, 101), &big, &big, 1.0, tau).unwrap();
        assert_eq!(a.thresholds.log_power, 20.0);
        assert_eq!(a.kind, ArcKind::Minor);
        assert!(a.center.is_none());
        assert!(arc_classify(&d, 1, &ex(1, 3), &ex(4, 1), &ex(4, 1), 5.0, tau).is_err());
    }

    #[test]
    fn arc_major_offsets_respect_window() {
        let d = diagram("m1^2*m2 + m1*m2^2");
        let tau = r(2, 1);
        let m = ex(1 << 12, 1);
        for k in 0..200 {
            let xi = Real::float(k as f64 * 0.004_999_7).unwrap();
            let a = arc_classify(&d, 1, &xi, &m, &m, 1.0, tau).unwrap();
            if let (ArcKind::Major, Some(c), Some(o)) = (a.kind, a.center, a.offset) {
                let q = c.den() as f64;
                assert!(q <= a.thresholds.log_power);
                assert!(o.to_f64().abs() <= a.thresholds.log_power / (q * a.thresholds.scale));
            }
        }
    }

    #[test]
    fn scale_book() {
        let b = ScaleBook::new((2, 3), 2.0, r(2, 1)).unwrap();
        assert!((b.l_beta(256.0) - 6.0).abs() < 1e-12);
        assert!((b.n_v(4.0, 8.0, 1.0) - 12.0).abs() < 1e-12);
        assert!((b.n_v_beta(4.0, 8.0, 256.0) - 7.0).abs() < 1e-12);
        let direct = libm::log2(16.0 * 512.0 / 64.0);
        assert!((b.n_v_beta(4.0, 8.0, 256.0) - direct).abs() < 1e-12);
    }

    #[test]
    fn beta_rho_validator() {
        assert!(validate_beta_rho(4.0, r(1, 10_000)).is_ok());
        assert!(validate_beta_rho(DEFAULT_BETA, r(DEFAULT_RHO.0, DEFAULT_RHO.1)).is_err());
    }

    #[test]
    fn approximant_at_a_center_is_gauss_sum() {
        let p = parse("m1^2*m2^3").unwrap();
        let params = half_params(0);
        let (m1, m2) = (ex(64, 1), ex(64, 1));
        let tau = r(2, 1);
        let v = major_approximant(&p, &params, -20, &ex(3, 8), &m1, &m2, tau, GaussMode::Full).unwrap();
        let g = gauss_sum(&p, r(3, 8)).unwrap();
        assert!((v - g).norm() < 1e-9);
        let v = major_approximant(&p, &params, -20, &ex(3, 8), &m1, &m2, tau, GaussMode::One).unwrap();
        assert!((v - Complex::new(1.0, 0.0)).norm() < 1e-9);
        let xi = Real::float(1e-7).unwrap();
        let v = major_approximant(&p, &params, -20, &xi, &ex(8, 1), &ex(8, 1), tau, GaussMode::Full).unwrap();
        let m = continuous_multiplier(&p, &xi, &ex(8, 1), &ex(8, 1), tau, DEFAULT_TOL, None).unwrap();
        assert!((v - m).norm() < 1e-9);
    }

    #[test]
    fn claim3_examples() {
        let p = parse("m1^2*m2^3 + m1*m2").unwrap();
        let tau = r(2, 1);
        let e0 = claim3_error(&p, 3, &ex(64, 1), &ex(0, 1), Rational::ZERO, tau, 0.0).unwrap();
        assert!(e0.measured < 1e-9);
        let e3 = claim3_error(&p, 2, &ex(729, 1), &ex(1, 3), r(1, 3), tau, 0.0).unwrap();
        assert!(e3.ratio() <= 50.0);
        assert!(claim3_error(&p, 2, &ex(4, 1), &ex(1, 7), r(1, 7), tau, 0.0).is_err());
        assert!(claim3_error(&p, 2, &ex(64, 1), &ex(1, 6), r(1, 7), tau, 1e-6).is_err());
    }
}
