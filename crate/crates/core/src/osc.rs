//! Oscillation and variation semi-norms of finite families.
//!
//! Index points live in `ℝ^K` (`K` is 1 or 2 in practice) and are compared with
//! [`f64::total_cmp`]; all coordinates must be finite.

use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::error::domain;
use crate::sum::NeumaierSum;
use crate::{Complex, Result};

pub type Point<const K: usize> = [f64; K];

fn cmp_points<const K: usize>(a: &Point<K>, b: &Point<K>) -> Ordering {
    for i in 0..K {
        match a[i].total_cmp(&b[i]) {
            Ordering::Equal => continue,
            other => return other,
        }
    }
    Ordering::Equal
}

/// `a ≺_s b`: strict increase in every coordinate.
pub fn strictly_below<const K: usize>(a: &Point<K>, b: &Point<K>) -> bool {
    (0..K).all(|i| a[i] < b[i])
}

/// A finite family `(a_t : t ∈ 𝕀)`.
#[derive(Clone, Debug, PartialEq)]
pub struct IndexedFamily<const K: usize> {
    entries: Vec<(Point<K>, Complex)>,
}

impl<const K: usize> IndexedFamily<K> {
    /// Rejects non-finite coordinates and repeated index points.
    pub fn new(entries: impl IntoIterator<Item = (Point<K>, Complex)>) -> Result<Self> {
        let mut entries: Vec<(Point<K>, Complex)> = entries.into_iter().collect();
        if entries.iter().any(|(p, v)| p.iter().any(|x| !x.is_finite()) || !v.re.is_finite() || !v.im.is_finite()) {
            return Err(domain!("index points and values must be finite"));
        }
        entries.sort_by(|a, b| cmp_points(&a.0, &b.0));
        if entries.windows(2).any(|w| cmp_points(&w[0].0, &w[1].0) == Ordering::Equal) {
            return Err(domain!("an index point appears twice"));
        }
        Ok(IndexedFamily { entries })
    }

    pub fn entries(&self) -> &[(Point<K>, Complex)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, t: &Point<K>) -> Option<Complex> {
        self.entries.binary_search_by(|(p, _)| cmp_points(p, t)).ok().map(|i| self.entries[i].1)
    }

    pub fn contains(&self, t: &Point<K>) -> bool {
        self.get(t).is_some()
    }

    pub fn map(&self, mut f: impl FnMut(&Point<K>, Complex) -> Complex) -> Self {
        IndexedFamily { entries: self.entries.iter().map(|(p, v)| (*p, f(p, *v))).collect() }
    }

    /// Pointwise sum of two families on the same index set.
    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.len() != other.len() || self.entries.iter().zip(&other.entries).any(|(a, b)| a.0 != b.0) {
            return Err(domain!("families have different index sets"));
        }
        Ok(IndexedFamily { entries: self.entries.iter().zip(&other.entries).map(|(a, b)| (a.0, a.1 + b.1)).collect() })
    }

    /// `(Σ_t |a_t|²)^{1/2}`.
    pub fn l2(&self) -> f64 {
        let mut s = NeumaierSum::new();
        for (_, v) in &self.entries {
            s += v.norm_sqr();
        }
        libm::sqrt(s.value())
    }

    pub fn sup(&self) -> f64 {
        self.entries.iter().map(|(_, v)| v.norm()).fold(0.0, f64::max)
    }
}

/// `I_0 ≺_s I_1 ≺_s … ≺_s I_J` with `J ≥ 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct IncreasingSequence<const K: usize> {
    points: Vec<Point<K>>,
}

impl<const K: usize> IncreasingSequence<K> {
    pub fn new(points: Vec<Point<K>>) -> Result<Self> {
        if points.len() < 2 {
            return Err(domain!("a sequence needs at least two points"));
        }
        if !points.windows(2).all(|w| strictly_below(&w[0], &w[1])) {
            return Err(domain!("sequence points must increase strictly in every coordinate"));
        }
        Ok(IncreasingSequence { points })
    }

    pub fn points(&self) -> &[Point<K>] {
        &self.points
    }

    /// `J`, the number of boxes.
    pub fn boxes(&self) -> usize {
        self.points.len() - 1
    }

    /// `t ∈ 𝔹[I_j] = Π_i [I_{j,i}, I_{j+1,i})`.
    pub fn in_box(&self, j: usize, t: &Point<K>) -> bool {
        let (lo, hi) = (&self.points[j], &self.points[j + 1]);
        (0..K).all(|i| lo[i] <= t[i] && t[i] < hi[i])
    }
}

/// All points lie in the ambient family and increase strictly.
pub fn validate_sequence<const K: usize>(points: &[Point<K>], ambient: &IndexedFamily<K>) -> bool {
    points.len() >= 2
        && points.iter().all(|p| ambient.contains(p))
        && points.windows(2).all(|w| strictly_below(&w[0], &w[1]))
}

/// `O_{I,J}(a_t : t ∈ 𝕁)` where `𝕁` is given by the predicate `subdomain`.
pub fn oscillation_on<const K: usize>(
    family: &IndexedFamily<K>,
    seq: &IncreasingSequence<K>,
    subdomain: impl Fn(&Point<K>) -> bool,
) -> Result<f64> {
    if !validate_sequence(seq.points(), family) {
        return Err(domain!("sequence points must belong to the family's index set"));
    }
    let mut total = NeumaierSum::new();
    for j in 0..seq.boxes() {
        let anchor = family.get(&seq.points()[j]).unwrap_or_default();
        let sup = family
            .entries()
            .iter()
            .filter(|(t, _)| seq.in_box(j, t) && subdomain(t))
            .map(|(_, v)| (*v - anchor).norm_sqr())
            .fold(0.0, f64::max);
        total += sup;
    }
    Ok(libm::sqrt(total.value()))
}

/// `O_{I,J}(a_t : t ∈ 𝕀)`.
pub fn oscillation<const K: usize>(family: &IndexedFamily<K>, seq: &IncreasingSequence<K>) -> Result<f64> {
    oscillation_on(family, seq, |_| true)
}

/// `V^ρ(a_t : t ∈ 𝕀)` for a one-parameter family, by dynamic programming over the
/// last point of the subsequence (exact for every `ρ ≥ 1`).
pub fn variation(family: &IndexedFamily<1>, rho: f64) -> Result<f64> {
    if !(rho >= 1.0 && rho.is_finite()) {
        return Err(domain!("ρ must be a finite number at least 1, got {rho}"));
    }
    let values: Vec<Complex> = family.entries().iter().map(|e| e.1).collect();
    let mut best = alloc::vec![0.0f64; values.len()];
    for i in 0..values.len() {
        for j in 0..i {
            let cand = best[j] + libm::pow((values[i] - values[j]).norm(), rho);
            if cand > best[i] {
                best[i] = cand;
            }
        }
    }
    let top = best.iter().copied().fold(0.0, f64::max);
    Ok(libm::pow(top, 1.0 / rho))
}

/// Both sides of the Rademacher–Menshov inequality for a family on `[j0, 2^m)`.
///
/// The increment at the right end uses `a_{2^m} = a_{2^m − 1}`.
pub fn rademacher_menshov_sides(family: &IndexedFamily<1>, seq: &IncreasingSequence<1>) -> Result<(f64, f64)> {
    let entries = family.entries();
    let j0 = entries.first().map(|e| e.0[0]).unwrap_or(0.0);
    let n = entries.len();
    let end = j0 as u64 + n as u64;
    let integral = entries.iter().enumerate().all(|(i, e)| e.0[0] == j0 + i as f64);
    if !(integral && j0 >= 0.0 && libm::floor(j0) == j0 && end.is_power_of_two() && (j0 as u64) < end) {
        return Err(domain!("the index set must be an integer interval [j0, 2^m) with j0 < 2^m"));
    }
    let j0 = j0 as u64;
    let m = end.trailing_zeros();
    let value = |k: u64| -> Complex { entries[(k.min(end - 1) - j0) as usize].1 };
    let lhs = oscillation(family, seq)?;
    let mut rhs = NeumaierSum::new();
    for i in 0..=m {
        let width = 1u64 << i;
        let mut level = NeumaierSum::new();
        for j in 0..(end >> i) {
            let (lo, hi) = (j * width, (j + 1) * width);
            if lo >= j0 {
                level += (value(hi) - value(lo)).norm_sqr();
            }
        }
        rhs += libm::sqrt(level.value());
    }
    Ok((lhs, core::f64::consts::SQRT_2 * rhs.value()))
}

/// Both sides of the two-parameter comparison of an oscillation with the `l`-th
/// coordinate slices: `(Σ_{t_l} sup_{other coordinates} |a_t|²)^{1/2}`.
pub fn slice_bound_sides(family: &IndexedFamily<2>, seq: &IncreasingSequence<2>, axis: usize) -> Result<(f64, f64)> {
    if axis > 1 {
        return Err(domain!("axis must be 0 or 1"));
    }
    let lhs = oscillation(family, seq)?;
    let mut slices: Vec<(f64, f64)> = Vec::new();
    for (t, v) in family.entries() {
        let key = t[axis];
        match slices.iter_mut().find(|s| s.0 == key) {
            Some(s) => s.1 = s.1.max(v.norm_sqr()),
            None => slices.push((key, v.norm_sqr())),
        }
    }
    let mut rhs = NeumaierSum::new();
    for (_, s) in slices {
        rhs += s;
    }
    Ok((lhs, libm::sqrt(rhs.value())))
}

/// `(max_t |a_t|, max_{seq} |a_{I_j}| + O_{I,J})` for a one-parameter family and a sequence
/// running from the first to the last index point.
pub fn maximal_shadow_sides(family: &IndexedFamily<1>, seq: &IncreasingSequence<1>) -> Result<(f64, f64)> {
    let (first, last) = match (family.entries().first(), family.entries().last()) {
        (Some(a), Some(b)) => (a.0, b.0),
        _ => return Err(domain!("empty family")),
    };
    let pts = seq.points();
    if pts[0] != first || pts[pts.len() - 1] != last {
        return Err(domain!("the sequence must start and end at the extreme index points"));
    }
    let osc = oscillation(family, seq)?;
    let on_seq = pts.iter().filter_map(|p| family.get(p)).map(|v| v.norm()).fold(0.0, f64::max);
    Ok((family.sup(), on_seq + osc))
}
