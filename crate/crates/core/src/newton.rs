//! Backwards Newton diagrams and the sector decomposition of the exponent plane.
//!
//! Sector indices are 1-based: `j ∈ 1..=r`, where sector `j` is the closed cone spanned by
//! the normals `ω_{j-1}` and `ω_j` around the vertex `v_j`.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;
use core::fmt;

use num_integer::Integer;

use crate::arith::{Rational, Real};
use crate::error::domain;
use crate::poly::{Exponent, Poly2};
use crate::{Error, Result};

/// Integer vector in the exponent plane.
pub type Vector = (i64, i64);

/// `σ_j`, or `+∞` when the support is the single vertex.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Gap {
    Finite(Rational),
    Infinite,
}

impl fmt::Display for Gap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Gap::Finite(r) => write!(f, "{r}"),
            Gap::Infinite => f.write_str("inf"),
        }
    }
}

/// Branch of a subsector: which of the two bounding normals carries the extra weight.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Branch {
    First,
    Second,
}

/// A lattice point of `S(j)` split into its level `N` and offset `n`.
///
/// Branch one means `d_j (a, b) = (n + N) ω_{j-1} + N ω_j`; branch two swaps the roles,
/// `d_j (a, b) = N ω_{j-1} + (n + N) ω_j`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SectorPoint {
    pub point: Exponent,
    pub sector: usize,
    pub branch: Branch,
    pub level: u64,
    pub offset: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NewtonDiagram {
    support: BTreeSet<Exponent>,
    vertices: Vec<Exponent>,
    normals: Vec<Vector>,
    determinants: Vec<i64>,
    gaps: Vec<Gap>,
}

fn dot(u: Vector, v: Vector) -> i64 {
    u.0 * v.0 + u.1 * v.1
}

fn sub(u: Exponent, v: Exponent) -> Vector {
    (u.0 as i64 - v.0 as i64, u.1 as i64 - v.1 as i64)
}

fn cross(u: Vector, v: Vector) -> i64 {
    u.0 * v.1 - u.1 * v.0
}

/// Points of `S` not dominated coordinatewise by another point, by increasing first coordinate.
pub fn pareto_maximal(support: &BTreeSet<Exponent>) -> Vec<Exponent> {
    // Sweep by decreasing first coordinate, keeping the running maximum of the second.
    let mut out = Vec::new();
    let mut best: Option<u32> = None;
    for &(a, b) in support.iter().rev() {
        if best.map_or(true, |m| b > m) {
            out.push((a, b));
            best = Some(b);
        }
    }
    out.reverse();
    out
}

impl NewtonDiagram {
    /// Builds `N_P` for a non-degenerate polynomial with vanishing constant term.
    pub fn build(p: &Poly2) -> Result<Self> {
        if p.is_degenerate()? {
            return Err(domain!(
                "{p} has no mixed monomial, so it splits as P1(m1) + P2(m2); the Newton diagram is only built for non-degenerate polynomials"
            ));
        }
        let support = p.support();
        let mut vertices: Vec<Exponent> = Vec::new();
        for v in pareto_maximal(&support) {
            // Keep strictly convex corners only; collinear middle points are not vertices.
            while vertices.len() >= 2 {
                let n = vertices.len();
                let (a, b) = (vertices[n - 2], vertices[n - 1]);
                if cross(sub(b, a), sub(v, b)) >= 0 {
                    vertices.pop();
                } else {
                    break;
                }
            }
            vertices.push(v);
        }
        let r = vertices.len();
        let mut normals = Vec::with_capacity(r + 1);
        normals.push((0, 1));
        for w in vertices.windows(2) {
            let (dx, dy) = sub(w[1], w[0]);
            let g = dx.gcd(&dy);
            normals.push((-dy / g, dx / g));
        }
        normals.push((1, 0));
        let determinants: Vec<i64> =
            (1..=r).map(|j| normals[j].0 * normals[j - 1].1 - normals[j - 1].0 * normals[j].1).collect();
        let mut diagram = NewtonDiagram { support, vertices, normals, determinants, gaps: Vec::new() };
        diagram.gaps = (1..=r).map(|j| diagram.compute_gap(j)).collect::<Result<_>>()?;
        Ok(diagram)
    }

    fn compute_gap(&self, j: usize) -> Result<Gap> {
        let vj = self.vertex(j);
        let w = self.normal(j - 1);
        let w2 = self.normal(j);
        let sum = (w.0 + w2.0, w.1 + w2.1);
        let best = self.support.iter().filter(|&&v| v != vj).map(|&v| dot(sub(vj, v), sum)).min();
        match best {
            None => Ok(Gap::Infinite),
            Some(num) => Ok(Gap::Finite(Rational::new(num, self.determinants[j - 1])?)),
        }
    }

    pub fn support(&self) -> &BTreeSet<Exponent> {
        &self.support
    }

    /// `r`, the number of vertices (and of sectors).
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn vertices(&self) -> &[Exponent] {
        &self.vertices
    }

    /// `ω_0, …, ω_r`.
    pub fn normals(&self) -> &[Vector] {
        &self.normals
    }

    /// `d_1, …, d_r`.
    pub fn determinants(&self) -> &[i64] {
        &self.determinants
    }

    /// `σ_1, …, σ_r`.
    pub fn gaps(&self) -> &[Gap] {
        &self.gaps
    }

    /// `v_j`, 1-based.
    pub fn vertex(&self, j: usize) -> Exponent {
        self.vertices[j - 1]
    }

    /// `ω_i`, 0-based.
    pub fn normal(&self, i: usize) -> Vector {
        self.normals[i]
    }

    pub fn determinant(&self, j: usize) -> i64 {
        self.determinants[j - 1]
    }

    fn check_index(&self, j: usize) -> Result<()> {
        if (1..=self.len()).contains(&j) {
            Ok(())
        } else {
            Err(domain!("sector index {j} outside 1..={}", self.len()))
        }
    }

    /// `σ_j = min_{v ≠ v_j} (v_j − v)·(ω_{j−1} + ω_j) / d_j`.
    pub fn sigma(&self, j: usize) -> Result<Gap> {
        self.check_index(j)?;
        Ok(self.gaps[j - 1])
    }

    /// `d_j` times the cone coordinates of `(a, b)` in the basis `ω_{j-1}, ω_j`.
    fn cone_coordinates(&self, j: usize, (a, b): Vector) -> (i64, i64) {
        let (w0, w1) = (self.normal(j - 1), self.normal(j));
        (-a * w1.1 + b * w1.0, a * w0.1 - b * w0.0)
    }

    /// Closed cone test for `S(j)` by inverting the normal basis.
    pub fn in_closed_sector(&self, j: usize, point: Exponent) -> bool {
        let (t1, t2) = self.cone_coordinates(j, (point.0 as i64, point.1 as i64));
        t1 >= 0 && t2 >= 0
    }

    /// Closed test for `S(j)` by half-planes: `v_j` maximizes `(a, b)·v` over the support.
    pub fn dominates(&self, j: usize, point: Exponent) -> bool {
        let p = (point.0 as i64, point.1 as i64);
        let vj = self.vertex(j);
        self.support.iter().all(|&v| dot(p, sub(v, vj)) <= 0)
    }

    /// `(a, b) ∈ W(j)`: positive coordinates and `(a, b)·(v − v_j) < 0` for every other `v`.
    pub fn in_open_cone(&self, j: usize, point: Exponent) -> bool {
        if point.0 == 0 || point.1 == 0 {
            return false;
        }
        let p = (point.0 as i64, point.1 as i64);
        let vj = self.vertex(j);
        self.support.iter().filter(|&&v| v != vj).all(|&v| dot(p, sub(v, vj)) < 0)
    }

    /// Strict version of the cone coordinate test; agrees with [`Self::in_open_cone`].
    pub fn in_open_sector(&self, j: usize, point: Exponent) -> bool {
        let (t1, t2) = self.cone_coordinates(j, (point.0 as i64, point.1 as i64));
        point.0 > 0 && point.1 > 0 && t1 > 0 && t2 > 0
    }

    /// All `j` whose closed sector `S(j)` contains the point.
    ///
    /// The two independent closed tests and the two open tests are cross-checked; a
    /// disagreement is reported as [`Error::Inconsistent`].
    pub fn sector_membership(&self, point: Exponent) -> Result<BTreeSet<usize>> {
        let mut out = BTreeSet::new();
        for j in 1..=self.len() {
            let closed = self.in_closed_sector(j, point);
            if closed != self.dominates(j, point) {
                return Err(Error::Inconsistent(alloc::format!(
                    "cone and half-plane tests disagree for {point:?} in sector {j}"
                )));
            }
            let open = self.in_open_cone(j, point);
            if open != self.in_open_sector(j, point) || (open && !closed) {
                return Err(Error::Inconsistent(alloc::format!(
                    "open cone tests disagree for {point:?} in sector {j}"
                )));
            }
            if closed {
                out.insert(j);
            }
        }
        if out.is_empty() {
            return Err(Error::Inconsistent(alloc::format!("{point:?} lies in no sector")));
        }
        Ok(out)
    }

    /// The smallest sector containing the point.
    pub fn canonical_sector(&self, point: Exponent) -> Result<usize> {
        self.sector_membership(point)?
            .first()
            .copied()
            .ok_or_else(|| Error::Inconsistent(alloc::format!("{point:?} lies in no sector")))
    }

    /// Splits a point of `S(j)` into level and offset.
    pub fn subsector(&self, j: usize, point: Exponent) -> Result<SectorPoint> {
        self.check_index(j)?;
        if !self.in_closed_sector(j, point) {
            return Err(domain!("{point:?} is not in sector {j}"));
        }
        let (t1, t2) = self.cone_coordinates(j, (point.0 as i64, point.1 as i64));
        let (branch, level, offset) =
            if t1 >= t2 { (Branch::First, t2, t1 - t2) } else { (Branch::Second, t1, t2 - t1) };
        Ok(SectorPoint { point, sector: j, branch, level: level as u64, offset: offset as u64 })
    }

    /// `d_j (a, b)` rebuilt from a [`SectorPoint`].
    pub fn reconstruct(&self, sp: &SectorPoint) -> Vector {
        let (w0, w1) = (self.normal(sp.sector - 1), self.normal(sp.sector));
        let (big, small) = ((sp.offset + sp.level) as i64, sp.level as i64);
        let (c0, c1) = match sp.branch {
            Branch::First => (big, small),
            Branch::Second => (small, big),
        };
        (c0 * w0.0 + c1 * w1.0, c0 * w0.1 + c1 * w1.1)
    }

    /// `c_{v_j} m1^{v_{j,1}} m2^{v_{j,2}}`.
    pub fn dominant_monomial(&self, j: usize, p: &Poly2) -> Result<Poly2> {
        self.check_index(j)?;
        let (a, b) = self.vertex(j);
        let c = p.coefficient(a, b);
        if c == num_bigint::BigInt::from(0) {
            return Err(domain!("vertex {:?} is not in the support of {p}", (a, b)));
        }
        Poly2::monomial(c, a, b)
    }

    /// Whether `(ln M1, ln M2)` lies in the closed cone of sector `j` (relative tolerance 1e-12).
    pub fn scales_in_sector(&self, j: usize, m1: f64, m2: f64) -> bool {
        let (x, y) = (libm::log(m1), libm::log(m2));
        let (w0, w1) = (self.normal(j - 1), self.normal(j));
        let t1 = -x * w1.1 as f64 + y * w1.0 as f64;
        let t2 = x * w0.1 as f64 - y * w0.0 as f64;
        let tol = 1e-12 * (1.0 + libm::fabs(x) + libm::fabs(y)) * (1 + w0.0 + w0.1 + w1.0 + w1.1) as f64;
        t1 >= -tol && t2 >= -tol
    }

    /// `M*_{r,j}`: the scale that controls sector `j`.
    pub fn m_star(&self, j: usize, m1: &Real, m2: &Real) -> Result<Real> {
        self.check_index(j)?;
        let (x, y) = (m1.to_f64(), m2.to_f64());
        if !(x >= 1.0 && y >= 1.0) {
            return Err(domain!("scales must be at least 1, got ({m1}, {m2})"));
        }
        if !self.scales_in_sector(j, x, y) {
            return Err(domain!("scales ({m1}, {m2}) are not in sector {j}"));
        }
        let larger = if m1.to_big() >= m2.to_big() { m1 } else { m2 };
        let r = self.len();
        Ok(if r == 1 || (j > 1 && j < r) {
            larger.clone()
        } else if j == 1 {
            m2.clone()
        } else {
            m1.clone()
        })
    }
}

/// Convenience wrapper for [`NewtonDiagram::build`].
pub fn build_diagram(p: &Poly2) -> Result<NewtonDiagram> {
    NewtonDiagram::build(p)
}

/// Vertices by the direction-witness criterion: `v` is a vertex iff some direction in
/// `[1, bound]²` is maximized at `v` alone.
pub fn brute_force_vertices(support: &BTreeSet<Exponent>, bound: i64) -> BTreeSet<Exponent> {
    let mut out = BTreeSet::new();
    for &v in support {
        'dirs: for a in 1..=bound {
            for b in 1..=bound {
                if support.iter().filter(|&&w| w != v).all(|&w| dot((a, b), sub(v, w)) > 0) {
                    out.insert(v);
                    break 'dirs;
                }
            }
        }
    }
    out
}
