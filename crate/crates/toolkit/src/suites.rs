//! Named verification suites. Each returns its checks and plot-ready result rows.

use newton_circle_core::arith::{Rational, Real};
use newton_circle_core::circle::{
    claim3_error, continuous_multiplier, discrete_multiplier, transition_window, DEFAULT_TOL,
};
use newton_circle_core::complete::{decay_profile, gauss_sum, MomentIdentity, VinogradovTable, WORK_CAP};
use newton_circle_core::ergodic::{
    character_average, composition_gap, degenerate_factorization_gap, AverageSpec, FiniteFunction, Region,
};
use newton_circle_core::expsum::double_sum;
use newton_circle_core::iw::{build_sigma, jordan_totient, verify_iw_properties, DEFAULT_CAP, DEFAULT_SIGMA_CAP};
use newton_circle_core::newton::{brute_force_vertices, Gap, NewtonDiagram};
use newton_circle_core::osc::{
    maximal_shadow_sides, oscillation, oscillation_on, rademacher_menshov_sides, variation, IncreasingSequence, IndexedFamily,
};
use newton_circle_core::poly::{Poly2, UniPoly};
use newton_circle_core::report::Check;
use newton_circle_core::sum::e;
use newton_circle_core::Complex;
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Map, Value};

use crate::parallel::map_ordered;
use crate::Error;

pub const DEFAULT_SEED: u64 = 20_240_901;

/// `(name, what it verifies)` in acceptance order.
pub const SUITES: [(&str, &str); 10] = [
    ("moments", "moment identity between Weyl sums and Vinogradov counts"),
    ("vinogradov", "Vinogradov counts: closed form, symmetry, totals, growth"),
    ("newton", "Newton diagram hull against direction witnesses, sector geometry, gap inequality"),
    ("complete", "complete sums against double sums, dyadic decay envelopes"),
    ("equidistribution", "character averages along the golden-ratio frequency"),
    ("factorization", "degenerate averages factor; a mixed control does not"),
    ("iw", "Ionescu–Wainger nesting, initial segments, divisor closure, new-denominator bound"),
    ("osc", "oscillation semi-norm axioms, splitting, variation and Rademacher–Menshov bounds"),
    ("multipliers", "normalization, contraction, periodicity and conjugation of the multipliers"),
    ("claim3", "transition error between discrete partial multipliers and their approximants"),
];

#[derive(Clone, Debug)]
pub struct SuiteConfig {
    pub seed: u64,
    /// `None` runs the iw suite at both `ρ = 1/2` and `ρ = 1/4`.
    pub rho: Option<Rational>,
    pub lmax: u32,
    pub workers: usize,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig { seed: DEFAULT_SEED, rho: None, lmax: 3, workers: 1 }
    }
}

#[derive(Clone, Debug, Default)]
pub struct Outcome {
    pub checks: Vec<Check>,
    pub results: Vec<Map<String, Value>>,
}

impl Outcome {
    fn row(&mut self, v: Value) {
        if let Value::Object(m) = v {
            self.results.push(m);
        }
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

pub fn run_suite(name: &str, cfg: &SuiteConfig) -> Result<Outcome, Error> {
    match name {
        "moments" => moments(cfg),
        "vinogradov" => vinogradov(cfg),
        "newton" => newton(cfg),
        "complete" => complete(cfg),
        "equidistribution" => equidistribution(cfg),
        "factorization" => factorization(cfg),
        "iw" => iw(cfg),
        "osc" => osc(cfg),
        "multipliers" => multipliers(cfg),
        "claim3" => claim3(cfg),
        other => Err(Error::Usage(format!(
            "unknown suite {other:?}; expected one of {}",
            SUITES.iter().map(|s| s.0).collect::<Vec<_>>().join(", ")
        ))),
    }
}

fn rat(a: i64, q: i64) -> Rational {
    Rational::new(a, q).expect("nonzero denominator")
}

fn int(n: i64) -> Real {
    Real::Exact(Rational::integer(n))
}

/// A polynomial with `P(0, 0) = 0`, a mixed monomial, total degree ≤ `deg` and ≤ `terms` terms.
pub fn random_polynomial(rng: &mut impl Rng, deg: u32, terms: usize, coef: i64) -> Poly2 {
    loop {
        let count = rng.gen_range(1..=terms);
        let mut t = Vec::with_capacity(count);
        let a = rng.gen_range(1..deg);
        let b = rng.gen_range(1..=deg - a);
        t.push(((a, b), nonzero(rng, coef)));
        while t.len() < count {
            let a = rng.gen_range(0..=deg);
            let b = rng.gen_range(0..=deg - a);
            if a + b > 0 {
                t.push(((a, b), nonzero(rng, coef)));
            }
        }
        if let Ok(p) = Poly2::from_terms(t) {
            if p.len() <= terms && p.is_degenerate() == Ok(false) {
                return p;
            }
        }
    }
}

fn nonzero(rng: &mut impl Rng, c: i64) -> i64 {
    let v = rng.gen_range(1..=c);
    if rng.gen_bool(0.5) {
        v
    } else {
        -v
    }
}

fn moments(cfg: &SuiteConfig) -> Result<Outcome, Error> {
    let mut cases = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    for s in 1..=3u32 {
        for k in 1..=3u32 {
            for n in [2u64, 9, 20] {
                let xis: Vec<Vec<Real>> =
                    (0..100).map(|_| (0..k).map(|_| Real::Float(rng.gen_range(0.0..1.0))).collect()).collect();
                cases.push((s, k, n, xis));
            }
        }
    }
    let runs = map_ordered(cases, cfg.workers, |(s, k, n, xis)| -> Result<_, Error> {
        let mi = MomentIdentity::new(s, k, n)?;
        let total: u128 = mi.table().values().sum();
        let (lhs0, rhs0) = mi.sides(&vec![int(0); k as usize])?;
        let mut worst: f64 = 0.0;
        for xi in &xis {
            worst = worst.max(mi.gap(xi)?);
        }
        Ok((s, k, n, total, lhs0, rhs0, worst))
    });
    let mut out = Outcome::default();
    for run in runs {
        let (s, k, n, total, lhs0, rhs0, worst) = run?;
        let scale = (n as f64).powi(2 * s as i32);
        let tag = format!("s={s} k={k} N={n}");
        out.checks.push(Check::count(format!("sum of J equals N^(2s) {tag}"), total as u64, n.pow(2 * s)));
        out.checks.push(Check::close(format!("identity exact at xi=0 {tag}"), lhs0, scale, 0.0));
        out.checks.push(Check::close(format!("counting side exact at xi=0 {tag}"), rhs0.re, scale, 0.0));
        out.checks.push(Check::le(format!("relative identity gap over 100 xi {tag}"), worst / scale, 1e-8, 0.0));
        out.row(json!({"s": s, "k": k, "N": n, "max_relative_gap": worst / scale}));
    }
    Ok(out)
}

/// `#{(x1, x2, y1, y2) ∈ [N]^4 : x1 + x2 = y1 + y2, x1² + x2² = y1² + y2²}`.
fn brute_j22(n: i64) -> u64 {
    let mut c = 0;
    for x1 in 1..=n {
        for x2 in 1..=n {
            for y1 in 1..=n {
                for y2 in 1..=n {
                    if x1 + x2 == y1 + y2 && x1 * x1 + x2 * x2 == y1 * y1 + y2 * y2 {
                        c += 1;
                    }
                }
            }
        }
    }
    c
}

fn vinogradov(cfg: &SuiteConfig) -> Result<Outcome, Error> {
    let mut out = Outcome::default();
    let mut brute_bad = 0;
    for n in 2..=12 {
        if brute_j22(n) != (2 * n * n - n) as u64 {
            brute_bad += 1;
        }
    }
    out.checks.push(Check::count("J_2,2(N) = 2N^2 - N by brute force, N <= 12", brute_bad, 0));
    let mut table_bad = 0;
    for n in 2..=50u64 {
        let j = VinogradovTable::new(2, 2, n, WORK_CAP)?.count(&[0, 0])?.count;
        if j != (2 * n * n - n).into() {
            table_bad += 1;
        }
    }
    out.checks.push(Check::count("J_2,2(N) = 2N^2 - N from the count table, N <= 50", table_bad, 0));

    let shapes = vec![(2u32, 1u32, 12u64), (2, 2, 12), (3, 2, 8), (2, 3, 10), (3, 3, 8), (3, 1, 10)];
    let tables = map_ordered(shapes, cfg.workers, |(s, k, n)| -> Result<_, Error> {
        let full = VinogradovTable::new(s, k, n, WORK_CAP)?.full_table(WORK_CAP)?;
        Ok((s, k, n, full))
    });
    for t in tables {
        let (s, k, n, full) = t?;
        let zero = full[&vec![0i64; k as usize]];
        let total: u128 = full.values().sum();
        let peak = full.values().copied().max().unwrap_or(0);
        let tag = format!("s={s} k={k} N={n}");
        out.checks.push(Check::count(format!("sum over lambda of J equals N^(2s) {tag}"), total as u64, n.pow(2 * s)));
        out.checks.push(Check::le(format!("J(lambda) <= J(0) {tag}"), peak as f64, zero as f64, 0.0));
    }

    let ns: Vec<u64> = (4..=24).collect();
    let growth = map_ordered(ns, cfg.workers, |n| -> Result<_, Error> {
        let j = VinogradovTable::new(4, 2, n, WORK_CAP)?.count(&[0, 0])?.count;
        let j: f64 = j.to_string().parse().unwrap_or(f64::NAN);
        Ok((n, j, j / (n as f64).powi(5)))
    });
    let growth: Vec<(u64, f64, f64)> = growth.into_iter().collect::<Result<_, _>>()?;
    let base = growth[0].2;
    for &(n, j, ratio) in &growth {
        out.row(json!({"N": n, "J_4_2": j, "J_over_N5": ratio}));
    }
    let worst = growth.iter().map(|g| g.2).fold(0.0, f64::max);
    out.checks.push(Check::le("max over N in 4..=24 of J_4,2(N)/N^5 within 1.5x its N=4 value", worst, 1.5 * base, 0.0));
    Ok(out)
}

#[derive(Default)]
struct GeometryTally {
    hull_mismatch: u64,
    open_overlap: u64,
    uncovered: u64,
    gap_violations: u64,
    gap_pairs: u64,
}

fn newton_geometry(p: &Poly2) -> Result<GeometryTally, Error> {
    let d = NewtonDiagram::build(p)?;
    let mut t = GeometryTally::default();
    let hull: std::collections::BTreeSet<_> = d.vertices().iter().copied().collect();
    if hull != brute_force_vertices(d.support(), 64) {
        t.hull_mismatch += 1;
    }
    for a in 0..=40u32 {
        for b in 0..=40u32 {
            match d.sector_membership((a, b)) {
                Ok(m) if !m.is_empty() => {}
                _ => t.uncovered += 1,
            }
            if (1..=d.len()).filter(|&j| d.in_open_cone(j, (a, b))).count() > 1 {
                t.open_overlap += 1;
            }
        }
    }
    for j in 1..=d.len() {
        let sigma = match d.sigma(j)? {
            Gap::Finite(s) => s,
            Gap::Infinite => continue,
        };
        let vj = d.vertex(j);
        for a in 0..=40u32 {
            for b in 0..=40u32 {
                if !d.in_closed_sector(j, (a, b)) {
                    continue;
                }
                let sp = d.subsector(j, (a, b))?;
                if sp.level > 20 {
                    continue;
                }
                let bound = sigma.checked_mul(&Rational::integer(sp.level as i64))?.neg();
                for &v in d.support() {
                    if v == vj {
                        continue;
                    }
                    let lhs = a as i64 * (v.0 as i64 - vj.0 as i64) + b as i64 * (v.1 as i64 - vj.1 as i64);
                    t.gap_pairs += 1;
                    if Rational::integer(lhs) > bound {
                        t.gap_violations += 1;
                    }
                }
            }
        }
    }
    Ok(t)
}

fn newton(cfg: &SuiteConfig) -> Result<Outcome, Error> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x6e65);
    let polys: Vec<Poly2> = (0..200).map(|_| random_polynomial(&mut rng, 6, 8, 9)).collect();
    let tallies = map_ordered(polys, cfg.workers, |p| newton_geometry(&p));
    let mut total = GeometryTally::default();
    for t in tallies {
        let t = t?;
        total.hull_mismatch += t.hull_mismatch;
        total.open_overlap += t.open_overlap;
        total.uncovered += t.uncovered;
        total.gap_violations += t.gap_violations;
        total.gap_pairs += t.gap_pairs;
    }
    let mut out = Outcome::default();
    out.checks.push(Check::count("hull vertices differ from witness vertices (200 polynomials)", total.hull_mismatch, 0));
    out.checks.push(Check::count("lattice points of [0,40]^2 in two open cones", total.open_overlap, 0));
    out.checks.push(Check::count("lattice points of [0,40]^2 in no sector", total.uncovered, 0));
    out.checks.push(
        Check::count("subsector gap inequality violations, N <= 20", total.gap_violations, 0)
            .with_detail(format!("{} (point, support) pairs checked", total.gap_pairs)),
    );
    out.row(json!({"polynomials": 200, "gap_pairs_checked": total.gap_pairs}));
    Ok(out)
}

/// Content-free polynomials so that no single small modulus divides every coefficient.
fn primitive_polynomial(rng: &mut impl Rng) -> Poly2 {
    loop {
        let p = random_polynomial(rng, 5, 4, 6);
        if p.content() == 1.into() {
            return p;
        }
    }
}

fn complete(cfg: &SuiteConfig) -> Result<Outcome, Error> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x6761);
    let mut polys = vec![Poly2::monomial(1, 2, 3)?];
    polys.extend((0..5).map(|_| primitive_polynomial(&mut rng)));
    let runs = map_ordered(polys, cfg.workers, |p| -> Result<_, Error> {
        let mut worst: f64 = 0.0;
        for q in 1..=64i64 {
            for a in 0..q {
                let r = rat(a, q);
                let g = gauss_sum(&p, r)?;
                let s = double_sum(&p.scale(&Real::Exact(r)), 0, q, 0, q)?.value;
                worst = worst.max((g * (q * q) as f64 - s).norm());
            }
        }
        let profile = decay_profile(&p, &[8, 16, 32, 64, 128])?;
        Ok((p, worst, profile))
    });
    let mut out = Outcome::default();
    for run in runs {
        let (p, worst, profile) = run?;
        out.checks.push(Check::le(format!("q^2 G(a/q) against the double sum, q <= 64, P = {p}"), worst, 1e-8, 0.0));
        for w in profile.envelopes.windows(2) {
            out.checks.push(Check::le(format!("envelope nonincreasing Q={} to {}, P = {p}", w[0].0, w[1].0), w[1].1, w[0].1, 1e-12));
        }
        let last = profile.envelopes.last().map(|e| e.1).unwrap_or(f64::NAN);
        out.checks.push(Check::le(format!("envelope at Q=128 at most 0.6, P = {p}"), last, 0.6, 0.0));
        for (q, env) in &profile.envelopes {
            out.row(json!({"polynomial": p.to_string(), "Q": q, "envelope": env, "delta_hat": profile.delta_hat}));
        }
    }
    Ok(out)
}

/// `Σ e(θ P(m))` over `[M]²` with `θ P` reduced mod 1 on the exact binary expansion of `θ`.
fn golden_oracle(theta: f64, p: &Poly2, m: i64) -> Complex {
    let bits = theta.to_bits();
    let exp = ((bits >> 52) & 0x7ff) as i32;
    let mantissa = (bits & ((1u64 << 52) - 1)) | (1u64 << 52);
    let shift = 1075 - exp;
    assert!(theta > 0.0 && theta < 1.0 && (53..=100).contains(&shift));
    let modulus: u128 = 1u128 << shift;
    let mut acc = Complex::new(0.0, 0.0);
    for x in 1..=m {
        for y in 1..=m {
            let v = p.evaluate_i128(x, y).expect("small values") as u128;
            let r = (v.wrapping_mul(mantissa as u128)) & (modulus - 1);
            acc += e(r as f64 / modulus as f64);
        }
    }
    acc
}

fn equidistribution(_cfg: &SuiteConfig) -> Result<Outcome, Error> {
    let p = Poly2::monomial(1, 2, 3)?;
    let theta = (5f64.sqrt() - 1.0) / 2.0;
    let mut out = Outcome::default();
    let mut values = Vec::new();
    for m in [16i64, 64, 256, 1024] {
        let spec = AverageSpec::new(p.clone(), int(m), int(m), Region::Full);
        let v = character_average(&spec, &Real::Float(theta))?;
        values.push((m, v.norm()));
        out.row(json!({"M": m, "abs_average": v.norm()}));
        if m == 16 || m == 1024 {
            let oracle = golden_oracle(theta, &p, m) / (m * m) as f64;
            out.checks.push(Check::close(format!("character average against direct summation, M={m}"), v.norm(), oracle.norm(), 1e-9));
        }
    }
    let small = values[0].1;
    let large = values[values.len() - 1].1;
    out.checks.push(Check::le("4 |A(1024)| <= |A(16)|", 4.0 * large, small, 0.0));
    out.checks.push(Check::le("|A(1024)| < 0.05", large, 0.05, 0.0));
    Ok(out)
}

fn random_uni(rng: &mut impl Rng) -> UniPoly {
    let deg = rng.gen_range(1..=3);
    UniPoly::new(std::iter::once(0).chain((0..deg).map(|_| rng.gen_range(-4i64..=4))))
}

fn random_function(rng: &mut impl Rng) -> Result<FiniteFunction, Error> {
    let n = rng.gen_range(1..12);
    Ok(FiniteFunction::new(
        (0..n).map(|_| (rng.gen_range(-80i64..80), Complex::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))),
    )?)
}

fn factorization(cfg: &SuiteConfig) -> Result<Outcome, Error> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x6661);
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let (p1, p2) = (random_uni(&mut rng), random_uni(&mut rng));
        let f = random_function(&mut rng)?;
        let (m1, m2) = (rng.gen_range(1..=20), rng.gen_range(1..=20));
        let x = rng.gen_range(-40..40);
        worst = worst.max(degenerate_factorization_gap(&p1, &p2, &f, &int(m1), &int(m2), x)?);
    }
    let mut out = Outcome::default();
    out.checks.push(Check::le("factorization gap over 50 degenerate instances", worst, 1e-12, 0.0));
    let control = composition_gap(
        &Poly2::monomial(1, 1, 1)?,
        &UniPoly::monomial(1, 1),
        &UniPoly::monomial(1, 1),
        &FiniteFunction::delta(0),
        &int(2),
        &int(2),
        2,
    )?;
    out.checks.push(Check::le("mixed control P = m1 m2 against m1 then m2 shows a gap above 0.01", 0.01, control, 0.0));
    out.row(json!({"max_degenerate_gap": worst, "control_gap": control}));
    Ok(out)
}

fn iw(cfg: &SuiteConfig) -> Result<Outcome, Error> {
    let rhos = match cfg.rho {
        Some(r) => vec![r],
        None => vec![rat(1, 2), rat(1, 4)],
    };
    iw_outcome(&rhos, DEFAULT_CAP, cfg.lmax)
}

/// Nesting, segment, divisor and growth checks for each `ρ`, levels `0..=lmax`, plus `|Σ| = Σ φ(q)`
/// wherever `Σ` fits under its cap.
pub fn iw_outcome(rhos: &[Rational], cap: u64, lmax: u32) -> Result<Outcome, Error> {
    let mut out = Outcome::default();
    for &rho in rhos {
        let (sets, checks) = verify_iw_properties(rho, cap, lmax)?;
        for c in checks {
            let name = format!("rho={rho} {}", c.name);
            out.checks.push(Check { name, ..c });
        }
        for set in &sets {
            let l = set.params.l;
            let phi: u128 = set.elements.iter().map(|&q| jordan_totient(q, 1)).sum();
            let sigma = if phi <= DEFAULT_SIGMA_CAP as u128 {
                let sigma = build_sigma(set, 1, DEFAULT_SIGMA_CAP)?.len() as u64;
                out.checks.push(Check::count(format!("rho={rho} |Sigma_<={l}| equals sum of phi(q)"), sigma, phi as u64));
                if rho == rat(1, 2) && l == 0 {
                    out.checks.push(Check::count("rho=1/2 |Sigma_<=0| = 32", sigma, 32));
                }
                Some(sigma)
            } else {
                None
            };
            out.row(json!({
                "rho": rho.to_string(), "l": l, "D": set.params.d, "N0": set.params.n0,
                "p_le_size": set.elements.len(), "truncated": set.truncated,
                "sigma_size": sigma, "sum_phi": phi as u64, "log2_lcm": set.params.log2_lcm(),
            }));
        }
    }
    Ok(out)
}

fn random_values(rng: &mut impl Rng, n: usize) -> Vec<Complex> {
    (0..n).map(|_| Complex::new(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0))).collect()
}

fn line(values: &[Complex], start: usize) -> Result<IndexedFamily<1>, Error> {
    Ok(IndexedFamily::new(values.iter().enumerate().map(|(i, v)| ([(start + i) as f64], *v)))?)
}

fn random_sequence(rng: &mut impl Rng, start: usize, n: usize) -> Result<IncreasingSequence<1>, Error> {
    let k = rng.gen_range(2..=n.min(16));
    let mut idx = sample(rng, n, k).into_vec();
    idx.sort_unstable();
    Ok(IncreasingSequence::new(idx.into_iter().map(|i| [(start + i) as f64]).collect())?)
}

#[derive(Default)]
struct OscTally {
    triangle: u64,
    homogeneity: u64,
    splitting: u64,
    variation: u64,
    rademacher: u64,
    crude: u64,
    shadow: u64,
}

fn osc(cfg: &SuiteConfig) -> Result<Outcome, Error> {
    const EPS: f64 = 1e-9;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x6f73);
    let mut t = OscTally::default();
    for _ in 0..500 {
        let n = rng.gen_range(2..=64);
        let (a, b) = (random_values(&mut rng, n), random_values(&mut rng, n));
        let (f, g) = (line(&a, 0)?, line(&b, 0)?);
        let seq = random_sequence(&mut rng, 0, n)?;
        let of = oscillation(&f, &seq)?;
        if oscillation(&f.add(&g)?, &seq)? > of + oscillation(&g, &seq)? + EPS {
            t.triangle += 1;
        }
        let c = Complex::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        if (oscillation(&f.map(|_, v| c * v), &seq)? - c.norm() * of).abs() > EPS * (1.0 + of) {
            t.homogeneity += 1;
        }
        let cut = rng.gen_range(0.0..n as f64);
        let low = oscillation_on(&f, &seq, |p| p[0] < cut)?;
        let high = oscillation_on(&f, &seq, |p| p[0] >= cut)?;
        if of > low + high + EPS {
            t.splitting += 1;
        }
        if of > variation(&f, 2.0)? + EPS {
            t.variation += 1;
        }
        if of > 2.0 * f.l2() + EPS {
            t.crude += 1;
        }
        let mut full: Vec<f64> = seq.points().iter().map(|p| p[0]).collect();
        full[0] = 0.0;
        *full.last_mut().expect("two points") = (n - 1) as f64;
        full.dedup();
        if full.len() >= 2 {
            let s = IncreasingSequence::new(full.into_iter().map(|x| [x]).collect())?;
            let (lhs, rhs) = maximal_shadow_sides(&f, &s)?;
            if lhs > rhs + EPS {
                t.shadow += 1;
            }
        }
        let m = rng.gen_range(1..=6u32);
        let end = 1usize << m;
        let j0 = rng.gen_range(0..end - 1);
        let vals = random_values(&mut rng, end - j0);
        let fam = line(&vals, j0)?;
        let rs = random_sequence(&mut rng, j0, end - j0)?;
        let (lhs, rhs) = rademacher_menshov_sides(&fam, &rs)?;
        if lhs > rhs + EPS {
            t.rademacher += 1;
        }
    }
    let mut out = Outcome::default();
    out.checks.push(Check::count("triangle inequality failures (500 families)", t.triangle, 0));
    out.checks.push(Check::count("homogeneity failures", t.homogeneity, 0));
    out.checks.push(Check::count("domain splitting failures", t.splitting, 0));
    out.checks.push(Check::count("oscillation above 2-variation", t.variation, 0));
    out.checks.push(Check::count("Rademacher-Menshov failures", t.rademacher, 0));
    out.checks.push(Check::count("oscillation above twice the l2 norm", t.crude, 0));
    out.checks.push(Check::count("maximal function above sequence max plus oscillation", t.shadow, 0));
    Ok(out)
}

pub const MULTIPLIER_POLYNOMIALS: [&str; 5] =
    ["m1*m2", "m1^2*m2^3", "m1^3*m2 + m1*m2^3", "2*m1*m2 - m2^4", "m1^2*m2 + m1*m2^2 - 3*m1*m2"];

fn multipliers(cfg: &SuiteConfig) -> Result<Outcome, Error> {
    let tau = rat(2, 1);
    let grid: Vec<Rational> = (0..1000).map(|k| rat(k - 500, 1000)).collect();
    let polys: Vec<Poly2> = MULTIPLIER_POLYNOMIALS.iter().map(|s| s.parse()).collect::<Result<_, _>>()?;
    let runs = map_ordered(polys, cfg.workers, |p| -> Result<_, Error> {
        let (m1, m2) = (int(8), int(8));
        let (c1, c2) = (int(2), int(2));
        let d0 = (discrete_multiplier(&p, &int(0), &m1, &m2, tau, None)? - Complex::new(1.0, 0.0)).norm();
        let c0 = (continuous_multiplier(&p, &int(0), &c1, &c2, tau, DEFAULT_TOL, None)? - Complex::new(1.0, 0.0)).norm();
        let (mut d_max, mut c_max, mut c_conj): (f64, f64, f64) = (0.0, 0.0, 0.0);
        let (mut periodic_bad, mut conj_bad) = (0u64, 0u64);
        for r in &grid {
            let xi = Real::Exact(*r);
            let v = discrete_multiplier(&p, &xi, &m1, &m2, tau, None)?;
            d_max = d_max.max(v.norm());
            if discrete_multiplier(&p, &xi.shift(1), &m1, &m2, tau, None)? != v {
                periodic_bad += 1;
            }
            if discrete_multiplier(&p, &xi.neg(), &m1, &m2, tau, None)? != v.conj() {
                conj_bad += 1;
            }
            let x = Real::Float(r.to_f64());
            let w = continuous_multiplier(&p, &x, &c1, &c2, tau, DEFAULT_TOL, None)?;
            let wn = continuous_multiplier(&p, &x.neg(), &c1, &c2, tau, DEFAULT_TOL, None)?;
            c_max = c_max.max(w.norm());
            c_conj = c_conj.max((wn - w.conj()).norm());
        }
        Ok((p, d0, c0, d_max, c_max, c_conj, periodic_bad, conj_bad))
    });
    let mut out = Outcome::default();
    for run in runs {
        let (p, d0, c0, d_max, c_max, c_conj, periodic_bad, conj_bad) = run?;
        let tag = format!("P = {p}");
        out.checks.push(Check::le(format!("|m(0) - 1|, {tag}"), d0, 1e-14, 0.0));
        out.checks.push(Check::le(format!("|continuous m(0) - 1|, {tag}"), c0, 1e-10, 0.0));
        out.checks.push(Check::le(format!("max |m| on the grid, {tag}"), d_max, 1.0, 1e-12));
        out.checks.push(Check::le(format!("max |continuous m| on the grid, {tag}"), c_max, 1.0, DEFAULT_TOL));
        out.checks.push(Check::count(format!("m(xi + 1) != m(xi) on the grid, {tag}"), periodic_bad, 0));
        out.checks.push(Check::count(format!("m(-xi) != conj m(xi) on the grid, {tag}"), conj_bad, 0));
        out.checks.push(Check::le(format!("max |continuous m(-xi) - conj|, {tag}"), c_conj, 1e-12, 0.0));
        out.row(json!({"polynomial": p.to_string(), "max_abs_m": d_max, "max_abs_continuous": c_max}));
    }
    Ok(out)
}

pub const CLAIM3_POLYNOMIALS: [&str; 3] = ["m1^2*m2^3", "m1*m2 + m2^2", "m1^2*m2 + m1*m2^2"];
pub const CLAIM3_SCALES: [i64; 5] = [64, 128, 256, 512, 1024];

fn claim3(cfg: &SuiteConfig) -> Result<Outcome, Error> {
    let tau = rat(2, 1);
    let mut fractions = Vec::new();
    for q in 1..=10i64 {
        for a in 0..q {
            let r = rat(a, q);
            if r.den() == q {
                fractions.push(r);
            }
        }
    }
    let mut jobs = Vec::new();
    for text in CLAIM3_POLYNOMIALS {
        let p: Poly2 = text.parse()?;
        let v = NewtonDiagram::build(&p)?.vertex(1);
        for &scale in &CLAIM3_SCALES {
            jobs.push((p.clone(), v, scale));
        }
    }
    let runs = map_ordered(jobs, cfg.workers, |(p, v, scale)| -> Result<_, Error> {
        let mut worst_ratio: f64 = 0.0;
        let mut worst_measured: f64 = 0.0;
        for m1 in 1..=3i64 {
            let window = transition_window(v, m1 as f64, scale as f64, 0.0);
            for c in &fractions {
                for t in [0.0, 0.5, -0.5, 0.999] {
                    let xi = Real::Float(c.to_f64() + t * window);
                    let xi = if t == 0.0 { Real::Exact(*c) } else { xi };
                    let err = claim3_error(&p, m1, &int(scale), &xi, *c, tau, window)?;
                    worst_ratio = worst_ratio.max(err.ratio());
                    worst_measured = worst_measured.max(err.measured);
                }
            }
        }
        Ok((p, scale, worst_ratio, worst_measured))
    });
    let runs: Vec<(Poly2, i64, f64, f64)> = runs.into_iter().collect::<Result<_, _>>()?;
    let mut out = Outcome::default();
    for (p, scale, ratio, measured) in &runs {
        out.checks.push(Check::le(format!("max measured/budget at M2'={scale}, P = {p}"), *ratio, 50.0, 0.0));
        out.row(json!({"polynomial": p.to_string(), "M2": scale, "max_ratio": ratio, "max_measured": measured}));
    }
    for w in runs.windows(2) {
        let ((p, s0, _, m0), (p1, s1, _, m1)) = (&w[0], &w[1]);
        if p == p1 {
            out.checks.push(Check::le(format!("max measured at M2'={s1} within 1.1x of M2'={s0}, P = {p}"), *m1, 1.1 * m0, 0.0));
        }
    }
    Ok(out)
}
