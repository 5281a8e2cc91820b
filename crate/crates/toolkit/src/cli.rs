//! Argument parsing and subcommand dispatch.

use std::ffi::OsString;
use std::fs;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use newton_circle_core::arith::{Rational, Real};
use newton_circle_core::circle::{arc_classify, validate_beta_rho, DEFAULT_BETA, DEFAULT_RHO, DESK_SCALE_WARNING, ETA_DESCRIPTION};
use newton_circle_core::complete::{vinogradov_count, GaussTable, VinogradovTable, WORK_CAP};
use newton_circle_core::ergodic::{character_average, shift_average, AverageSpec, Region};
use newton_circle_core::expsum::double_sum;
use newton_circle_core::iw::DEFAULT_CAP;
use newton_circle_core::newton::{brute_force_vertices, Branch, NewtonDiagram};
use newton_circle_core::osc::{oscillation, rademacher_menshov_sides, variation, IncreasingSequence, IndexedFamily};
use newton_circle_core::poly::Poly2;
use newton_circle_core::report::Check;
use newton_circle_core::Complex;
use serde_json::{json, Map, Value};

use crate::parallel::threads;
use crate::report::{emit_report, Format, VerificationReport};
use crate::suites::{iw_outcome, run_suite, SuiteConfig, DEFAULT_SEED, SUITES};
use crate::{function, Error};

#[derive(Debug, Parser)]
#[command(name = "newton-circle", version, about = "Exact and numerical checks for polynomial ergodic averages in two parameters")]
pub struct Cli {
    #[command(flatten)]
    pub output: Output,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Output {
    /// Write the report as JSON; without any output flag the JSON goes to stdout.
    #[arg(long, global = true, value_name = "PATH")]
    pub json: Option<PathBuf>,
    /// Write the checks as CSV, one row per check.
    #[arg(long, global = true, value_name = "PATH")]
    pub csv: Option<PathBuf>,
    /// Write the result rows as CSV.
    #[arg(long = "results-csv", global = true, value_name = "PATH")]
    pub results_csv: Option<PathBuf>,
    /// Record runtime_ms as 0 so that reports are byte-for-byte reproducible.
    #[arg(long = "no-timing", global = true)]
    pub no_timing: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Vertices, normals, determinants and gaps of the Newton diagram.
    Newton {
        #[arg(long)]
        poly: String,
    },
    /// Sector membership and subsector coordinates of every lattice point in [0, B]^2.
    Sectors {
        #[arg(long)]
        poly: String,
        #[arg(long, default_value_t = 40)]
        bound: u32,
    },
    /// The double exponential sum over (K1, M1] x (K2, M2] at frequency xi.
    Expsum {
        #[arg(long)]
        poly: String,
        #[arg(long)]
        xi: String,
        #[arg(long, default_value_t = 0)]
        k1: i64,
        #[arg(long)]
        m1: i64,
        #[arg(long, default_value_t = 0)]
        k2: i64,
        #[arg(long)]
        m2: i64,
    },
    /// The Vinogradov count J_{s,k}(N; lambda).
    Vinogradov {
        #[arg(long)]
        s: u32,
        #[arg(long)]
        k: u32,
        #[arg(long)]
        n: u64,
        /// Comma-separated, k entries; defaults to the zero vector.
        #[arg(long, allow_hyphen_values = true)]
        lambda: Option<String>,
    },
    /// Normalized complete sums G(a/q), for one modulus or swept over q <= qmax.
    Gauss {
        #[arg(long)]
        poly: String,
        #[arg(long, conflicts_with = "qmax")]
        q: Option<u64>,
        #[arg(long)]
        qmax: Option<u64>,
    },
    /// Ionescu–Wainger denominator sets and their structural properties.
    Iw {
        #[arg(long, default_value = "1/2")]
        rho: String,
        #[arg(long, default_value_t = 3)]
        lmax: u32,
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: u64,
    },
    /// Oscillation of a real sequence along chosen indices, with variation and Rademacher–Menshov bounds.
    Osc {
        /// Comma-separated values a_0, a_1, ...
        #[arg(long, allow_hyphen_values = true)]
        values: String,
        /// Comma-separated increasing indices into the values.
        #[arg(long)]
        sequence: String,
        #[arg(long, default_value_t = 2.0)]
        rho: f64,
    },
    /// Shift average of a finite function, or character average at theta.
    Average {
        #[arg(long)]
        poly: String,
        /// JSON object {"x": [re, im], ...}.
        #[arg(long, conflicts_with = "theta")]
        f: Option<PathBuf>,
        #[arg(long)]
        theta: Option<String>,
        #[arg(long)]
        m1: String,
        #[arg(long)]
        m2: String,
        #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
        x: i64,
        #[arg(long, value_enum, default_value_t = RegionArg::Full)]
        region: RegionArg,
        #[arg(long, default_value = "2")]
        tau: String,
    },
    /// Major/minor arc classification for a sector of the diagram.
    Arcs {
        #[arg(long)]
        poly: String,
        #[arg(long, default_value_t = 1)]
        sector: usize,
        /// A single frequency; omit to sweep xi = k/grid for k in [0, grid).
        #[arg(long, allow_hyphen_values = true)]
        xi: Option<String>,
        #[arg(long, default_value_t = 100)]
        grid: i64,
        #[arg(long)]
        m1: String,
        #[arg(long)]
        m2: String,
        #[arg(long)]
        beta: Option<f64>,
        #[arg(long)]
        rho: Option<String>,
        #[arg(long, default_value = "2")]
        tau: String,
    },
    /// Run a named verification suite, or all of them.
    Verify {
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long)]
        rho: Option<String>,
        #[arg(long, default_value_t = 3)]
        lmax: u32,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum RegionArg {
    Full,
    Truncated,
}

/// Parses, runs and writes the report; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("newton-circle: {e}");
            e.exit_code()
        }
    }
}

fn execute(cli: &Cli) -> Result<i32, Error> {
    let start = Instant::now();
    let mut report = dispatch(&cli.command)?;
    report.runtime_ms = if cli.output.no_timing { 0 } else { start.elapsed().as_millis() as u64 };
    let out = &cli.output;
    if let Some(path) = &out.json {
        emit_report(&report, Format::Json, path)?;
    }
    if let Some(path) = &out.csv {
        emit_report(&report, Format::Csv, path)?;
    }
    if let Some(path) = &out.results_csv {
        fs::write(path, report.results_csv()?).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    }
    if out.json.is_none() && out.csv.is_none() && out.results_csv.is_none() {
        print!("{}", report.to_json());
    }
    for c in report.checks.iter().filter(|c| !c.pass) {
        eprintln!("FAILED {}: lhs={} rhs={} tolerance={}", c.name, c.lhs, c.rhs, c.tolerance);
    }
    Ok(report.exit_code())
}

/// `a/q` or an integer is exact; anything else is read as a double.
pub fn parse_real(text: &str) -> Result<Real, Error> {
    let t = text.trim();
    if t.contains('/') || t.parse::<i64>().is_ok() {
        return Ok(Real::Exact(t.parse()?));
    }
    let x: f64 = t.parse().map_err(|_| Error::Usage(format!("not a real number: {text:?}")))?;
    Ok(Real::float(x)?)
}

fn parse_rational(text: &str) -> Result<Rational, Error> {
    Ok(text.trim().parse()?)
}

fn parse_list<T: std::str::FromStr>(text: &str, what: &str) -> Result<Vec<T>, Error> {
    text.split(',')
        .map(|t| t.trim().parse().map_err(|_| Error::Usage(format!("bad {what} entry {t:?}"))))
        .collect()
}

fn parse_poly(text: &str) -> Result<Poly2, Error> {
    Ok(text.parse()?)
}

/// Polynomials fed to diagrams and averages must vanish at the origin.
fn parse_centered(text: &str) -> Result<Poly2, Error> {
    let p = parse_poly(text)?;
    p.require_vanishing_constant()?;
    if p.is_zero() {
        return Err(Error::Usage("the polynomial is zero".into()));
    }
    Ok(p)
}

fn real_json(x: &Real) -> Value {
    match x {
        Real::Exact(r) if r.is_integer() => json!(r.num()),
        Real::Exact(r) => json!(r.to_string()),
        Real::Float(f) => json!(f),
    }
}

fn pair(v: (impl Into<i64>, impl Into<i64>)) -> Value {
    json!([v.0.into(), v.1.into()])
}

fn row(v: Value) -> Map<String, Value> {
    match v {
        Value::Object(m) => m,
        _ => Map::new(),
    }
}

fn dispatch(cmd: &Command) -> Result<VerificationReport, Error> {
    match cmd {
        Command::Newton { poly } => newton(poly),
        Command::Sectors { poly, bound } => sectors(poly, *bound),
        Command::Expsum { poly, xi, k1, m1, k2, m2 } => expsum(poly, xi, (*k1, *m1), (*k2, *m2)),
        Command::Vinogradov { s, k, n, lambda } => vinogradov(*s, *k, *n, lambda.as_deref()),
        Command::Gauss { poly, q, qmax } => gauss(poly, *q, *qmax),
        Command::Iw { rho, lmax, cap } => {
            let rho = parse_rational(rho)?;
            let mut r = VerificationReport::new("iw");
            r.param("rho", rho.to_string()).param("lmax", *lmax).param("cap", *cap);
            let out = iw_outcome(&[rho], *cap, *lmax)?;
            r.checks(&out.checks);
            r.results = out.results;
            Ok(r)
        }
        Command::Osc { values, sequence, rho } => osc(values, sequence, *rho),
        Command::Average { poly, f, theta, m1, m2, x, region, tau } => {
            average(poly, f.as_ref(), theta.as_deref(), (m1, m2), *x, *region, tau)
        }
        Command::Arcs { poly, sector, xi, grid, m1, m2, beta, rho, tau } => {
            arcs(poly, *sector, xi.as_deref(), *grid, (m1, m2), *beta, rho.as_deref(), tau)
        }
        Command::Verify { suite, rho, lmax, seed } => verify(suite, rho.as_deref(), *lmax, *seed),
    }
}

fn newton(poly: &str) -> Result<VerificationReport, Error> {
    let p = parse_centered(poly)?;
    let d = NewtonDiagram::build(&p)?;
    let mut r = VerificationReport::new("newton");
    r.param("poly", p.to_string());
    let vertices: Vec<Value> = d.vertices().iter().map(|&v| pair(v)).collect();
    let normals: Vec<Value> = d.normals().iter().map(|&w| pair(w)).collect();
    let sigma: Vec<String> = (1..=d.len()).map(|j| d.sigma(j).map(|g| g.to_string())).collect::<Result<_, _>>()?;
    let dominant: Vec<String> =
        (1..=d.len()).map(|j| d.dominant_monomial(j, &p).map(|m| m.to_string())).collect::<Result<_, _>>()?;
    r.result(row(json!({
        "vertices": vertices,
        "normals": normals,
        "determinants": d.determinants(),
        "sigma": sigma,
        "dominant_monomials": dominant,
    })));
    let witness = brute_force_vertices(d.support(), 64);
    let hull: std::collections::BTreeSet<_> = d.vertices().iter().copied().collect();
    r.check(&Check::holds("hull vertices equal direction-witness vertices", hull == witness));
    Ok(r)
}

fn sectors(poly: &str, bound: u32) -> Result<VerificationReport, Error> {
    let p = parse_centered(poly)?;
    let d = NewtonDiagram::build(&p)?;
    let mut r = VerificationReport::new("sectors");
    r.param("poly", p.to_string()).param("bound", bound);
    let (mut uncovered, mut overlap, mut mismatch) = (0u64, 0u64, 0u64);
    for a in 0..=bound {
        for b in 0..=bound {
            let members = d.sector_membership((a, b))?;
            if members.is_empty() {
                uncovered += 1;
            }
            if (1..=d.len()).filter(|&j| d.in_open_cone(j, (a, b))).count() > 1 {
                overlap += 1;
            }
            let j = d.canonical_sector((a, b))?;
            let sp = d.subsector(j, (a, b))?;
            let det = d.determinant(j);
            if d.reconstruct(&sp) != (a as i64 * det, b as i64 * det) {
                mismatch += 1;
            }
            r.result(row(json!({
                "a": a, "b": b,
                "sectors": members.iter().collect::<Vec<_>>(),
                "canonical": j,
                "branch": match sp.branch { Branch::First => 1, Branch::Second => 2 },
                "level": sp.level,
                "offset": sp.offset,
            })));
        }
    }
    r.check(&Check::count("points in no sector", uncovered, 0));
    r.check(&Check::count("points in two open cones", overlap, 0));
    r.check(&Check::count("subsector coordinates that do not reconstruct the point", mismatch, 0));
    Ok(r)
}

fn expsum(poly: &str, xi: &str, (k1, m1): (i64, i64), (k2, m2): (i64, i64)) -> Result<VerificationReport, Error> {
    let p = parse_poly(poly)?;
    let xi = parse_real(xi)?;
    let v = double_sum(&p.scale(&xi), k1, m1, k2, m2)?;
    let mut r = VerificationReport::new("expsum");
    r.param("poly", p.to_string()).param("xi", real_json(&xi));
    r.param("k1", k1).param("m1", m1).param("k2", k2).param("m2", m2);
    r.result(row(json!({
        "re": v.value.re, "im": v.value.im, "abs": v.value.norm(),
        "mode": v.mode.as_str(), "terms": v.term_count, "error_budget": v.error_budget,
    })));
    r.check(&Check::le("|S| at most the number of terms", v.value.norm(), v.term_count as f64, 1e-9 * v.term_count as f64));
    Ok(r)
}

fn vinogradov(s: u32, k: u32, n: u64, lambda: Option<&str>) -> Result<VerificationReport, Error> {
    let lambda: Vec<i64> = match lambda {
        Some(t) => parse_list(t, "lambda")?,
        None => vec![0; k as usize],
    };
    let at = vinogradov_count(s, k, n, &lambda)?;
    let zero = vinogradov_count(s, k, n, &vec![0; k as usize])?;
    let mut r = VerificationReport::new("vinogradov");
    r.param("s", s).param("k", k).param("n", n).param("lambda", lambda.clone());
    r.result(row(json!({"lambda": lambda, "count": at.count.to_string(), "count_at_zero": zero.count.to_string()})));
    r.check(&Check::le("J(lambda) <= J(0)", big_f64(&at.count), big_f64(&zero.count), 0.0));
    if let Ok(table) = VinogradovTable::new(s, k, n, WORK_CAP).and_then(|t| t.full_table(WORK_CAP)) {
        let total: u128 = table.values().sum();
        if let Some(expect) = (n as u128).checked_pow(2 * s) {
            r.check(&Check::holds("sum over lambda of J equals N^(2s)", total == expect));
        }
    }
    Ok(r)
}

fn big_f64(n: &impl std::fmt::Display) -> f64 {
    n.to_string().parse().unwrap_or(f64::INFINITY)
}

fn gauss(poly: &str, q: Option<u64>, qmax: Option<u64>) -> Result<VerificationReport, Error> {
    let p = parse_poly(poly)?;
    let mut r = VerificationReport::new("gauss");
    r.param("poly", p.to_string());
    let mut worst: f64 = 0.0;
    match (q, qmax) {
        (Some(q), _) => {
            r.param("q", q);
            let table = GaussTable::new(&p, q)?;
            for a in 0..q as i64 {
                let g = table.value(a);
                worst = worst.max(g.norm());
                r.result(row(json!({"a": a, "re": g.re, "im": g.im, "abs": g.norm()})));
            }
        }
        (None, Some(qmax)) => {
            r.param("qmax", qmax);
            for q in 1..=qmax {
                let table = GaussTable::new(&p, q)?;
                let (mut count, mut peak) = (0u64, 0.0f64);
                for a in 0..q as i64 {
                    if gcd(a as u64, q) == 1 {
                        count += 1;
                        peak = peak.max(table.value(a).norm());
                    }
                }
                worst = worst.max(peak);
                r.result(row(json!({"q": q, "a_count": count, "max_abs_G": peak})));
            }
        }
        (None, None) => return Err(Error::Usage("gauss needs --q or --qmax".into())),
    }
    r.check(&Check::le("max |G| at most 1", worst, 1.0, 1e-12));
    Ok(r)
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn osc(values: &str, sequence: &str, rho: f64) -> Result<VerificationReport, Error> {
    let values: Vec<f64> = parse_list(values, "value")?;
    let idx: Vec<usize> = parse_list(sequence, "sequence")?;
    if let Some(bad) = idx.iter().find(|&&i| i >= values.len()) {
        return Err(Error::Usage(format!("sequence index {bad} is past the last value")));
    }
    let family = IndexedFamily::new(values.iter().enumerate().map(|(i, v)| ([i as f64], Complex::new(*v, 0.0))))?;
    let seq = IncreasingSequence::new(idx.iter().map(|&i| [i as f64]).collect())?;
    let o = oscillation(&family, &seq)?;
    let v = variation(&family, rho)?;
    let v2 = variation(&family, 2.0)?;
    let mut r = VerificationReport::new("osc");
    r.param("values", values.clone()).param("sequence", idx.clone()).param("rho", rho);
    let mut result = json!({"oscillation": o, "variation": v, "variation_2": v2, "l2": family.l2()});
    r.check(&Check::le("oscillation at most the 2-variation", o, v2, 1e-9));
    r.check(&Check::le("oscillation at most twice the l2 norm", o, 2.0 * family.l2(), 1e-9));
    if values.len().is_power_of_two() {
        let (lhs, rhs) = rademacher_menshov_sides(&family, &seq)?;
        result["rademacher_menshov_rhs"] = json!(rhs);
        r.check(&Check::le("Rademacher-Menshov bound", lhs, rhs, 1e-9));
    }
    r.result(row(result));
    Ok(r)
}

fn average(
    poly: &str,
    f: Option<&PathBuf>,
    theta: Option<&str>,
    (m1, m2): (&String, &String),
    x: i64,
    region: RegionArg,
    tau: &str,
) -> Result<VerificationReport, Error> {
    let p = parse_centered(poly)?;
    let (m1, m2) = (parse_real(m1)?, parse_real(m2)?);
    let tau = parse_rational(tau)?;
    let region = match region {
        RegionArg::Full => Region::Full,
        RegionArg::Truncated => Region::Truncated(tau),
    };
    let spec = AverageSpec::new(p.clone(), m1.clone(), m2.clone(), region);
    let mut r = VerificationReport::new("average");
    r.param("poly", p.to_string()).param("m1", real_json(&m1)).param("m2", real_json(&m2));
    r.param("region", if region == Region::Full { "full" } else { "truncated" });
    if matches!(region, Region::Truncated(_)) {
        r.param("tau", tau.to_string());
    }
    r.param("cardinality", spec.cardinality()?);
    match (f, theta) {
        (Some(path), _) => {
            let text = fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
            let func = function::from_json(&text)?;
            let v = shift_average(&spec, &func, x)?;
            let sup = func.support().map(|(_, c)| c.norm()).fold(0.0, f64::max);
            r.param("f", path.display().to_string()).param("x", x);
            r.result(row(json!({"re": v.re, "im": v.im, "abs": v.norm()})));
            r.check(&Check::le("|A f(x)| at most sup |f|", v.norm(), sup, 1e-12));
        }
        (None, Some(theta)) => {
            let theta = parse_real(theta)?;
            let v = character_average(&spec, &theta)?;
            r.param("theta", real_json(&theta));
            r.result(row(json!({"re": v.re, "im": v.im, "abs": v.norm()})));
            r.check(&Check::le("|character average| at most 1", v.norm(), 1.0, 1e-12));
        }
        (None, None) => return Err(Error::Usage("average needs --f or --theta".into())),
    }
    Ok(r)
}

#[allow(clippy::too_many_arguments)]
fn arcs(
    poly: &str,
    sector: usize,
    xi: Option<&str>,
    grid: i64,
    (m1, m2): (&String, &String),
    beta: Option<f64>,
    rho: Option<&str>,
    tau: &str,
) -> Result<VerificationReport, Error> {
    let p = parse_centered(poly)?;
    let d = NewtonDiagram::build(&p)?;
    if sector == 0 || sector > d.len() {
        return Err(Error::Usage(format!("sector must lie in 1..={}", d.len())));
    }
    let (m1, m2) = (parse_real(m1)?, parse_real(m2)?);
    let tau = parse_rational(tau)?;
    let rho = rho.map(parse_rational).transpose()?;
    let mut r = VerificationReport::new("arcs");
    r.param("poly", p.to_string()).param("sector", sector).param("m1", real_json(&m1)).param("m2", real_json(&m2));
    r.param("tau", tau.to_string());
    let b = match (beta, rho) {
        (Some(b), Some(rho)) => {
            validate_beta_rho(b, rho)?;
            r.param("beta", b).param("rho", rho.to_string());
            b
        }
        _ => {
            let b = beta.unwrap_or(DEFAULT_BETA);
            let rho = rho.unwrap_or(Rational::new(DEFAULT_RHO.0, DEFAULT_RHO.1)?);
            r.param("beta", b).param("rho", rho.to_string()).param("warning", DESK_SCALE_WARNING);
            b
        }
    };
    let points: Vec<Real> = match xi {
        Some(t) => vec![parse_real(t)?],
        None => {
            if grid < 1 {
                return Err(Error::Usage("--grid must be positive".into()));
            }
            r.param("grid", grid);
            (0..grid).map(|k| Rational::new(k, grid).map(Real::Exact)).collect::<Result<_, _>>()?
        }
    };
    let mut major = 0u64;
    for xi in &points {
        let a = arc_classify(&d, sector, xi, &m1, &m2, b, tau)?;
        if a.kind == newton_circle_core::circle::ArcKind::Major {
            major += 1;
        }
        r.result(row(json!({
            "xi": real_json(xi),
            "kind": a.kind.as_str(),
            "center": a.center.map(|c| c.to_string()),
            "offset": a.offset.as_ref().map(Real::to_f64),
            "log_power": a.thresholds.log_power,
            "resolution": a.thresholds.resolution,
        })));
    }
    r.param("major_count", major);
    Ok(r)
}

fn verify(suite: &str, rho: Option<&str>, lmax: u32, seed: u64) -> Result<VerificationReport, Error> {
    let names: Vec<&str> = if suite == "all" {
        SUITES.iter().map(|s| s.0).collect()
    } else {
        vec![suite]
    };
    let cfg = SuiteConfig { seed, rho: rho.map(parse_rational).transpose()?, lmax, workers: threads()? };
    let mut r = VerificationReport::new("verify");
    r.param("suite", suite).param("seed", seed).param("lmax", lmax);
    if let Some(rho) = cfg.rho {
        r.param("rho", rho.to_string());
    }
    if names.iter().any(|n| *n == "multipliers" || *n == "claim3") {
        r.param("eta", ETA_DESCRIPTION);
    }
    for name in names {
        let out = run_suite(name, &cfg)?;
        for c in &out.checks {
            let named = Check { name: format!("{name}: {}", c.name), ..c.clone() };
            r.check(&named);
        }
        for row in out.results {
            let mut tagged = Map::new();
            tagged.insert("suite".into(), name.into());
            tagged.extend(row);
            r.result(tagged);
        }
    }
    Ok(r)
}
