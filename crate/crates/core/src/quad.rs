//! Gauss–Legendre quadrature with dyadic panel refinement.

use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::{Complex, Error, Result};

/// Default rule order for oscillatory integrands.
pub const DEFAULT_ORDER: usize = 32;
/// Panels are bisected at most this many times.
pub const MAX_DEPTH: u32 = 20;

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[-1, 1]`.
#[derive(Clone, Debug)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1);
        let mut nodes = Vec::with_capacity(n);
        let mut weights = Vec::with_capacity(n);
        for i in 0..n {
            // Tricomi's initial guess, then Newton on P_n.
            let mut x = libm::cos(PI * (i as f64 + 0.75) / (n as f64 + 0.5));
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if libm::fabs(dx) < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            if d != 0.0 {
                dp = d;
            }
            nodes.push(x);
            weights.push(2.0 / ((1.0 - x * x) * dp * dp));
        }
        GaussLegendre { nodes, weights }
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Single-panel estimate of `∫_a^b f`.
    pub fn integrate<F>(&self, f: &mut F, a: f64, b: f64) -> Result<Complex>
    where
        F: FnMut(f64) -> Result<Complex>,
    {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let mut acc = Complex::new(0.0, 0.0);
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc += f(mid + half * x)? * *w;
        }
        Ok(acc * half)
    }

    /// `∫_a^b f` by recursive bisection until each panel's estimate agrees with the sum
    /// of its two halves to within its share of `tol`.
    pub fn adaptive<F>(&self, f: &mut F, a: f64, b: f64, tol: f64) -> Result<Complex>
    where
        F: FnMut(f64) -> Result<Complex>,
    {
        if a == b {
            return Ok(Complex::new(0.0, 0.0));
        }
        let whole = self.integrate(f, a, b)?;
        self.refine(f, a, b, whole, tol, 0)
    }

    fn refine<F>(&self, f: &mut F, a: f64, b: f64, whole: Complex, tol: f64, depth: u32) -> Result<Complex>
    where
        F: FnMut(f64) -> Result<Complex>,
    {
        let m = 0.5 * (a + b);
        let left = self.integrate(f, a, m)?;
        let right = self.integrate(f, m, b)?;
        let split = left + right;
        if (split - whole).norm() <= tol {
            return Ok(split);
        }
        if depth >= MAX_DEPTH {
            return Err(Error::Convergence(alloc::format!(
                "panel [{a}, {b}] still changes by {:e} after {MAX_DEPTH} bisections",
                (split - whole).norm()
            )));
        }
        Ok(self.refine(f, a, m, left, 0.5 * tol, depth + 1)?
            + self.refine(f, m, b, right, 0.5 * tol, depth + 1)?)
    }
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}
