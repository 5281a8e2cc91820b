//! Compensated accumulation and unit-circle evaluation.

use core::f64::consts::TAU;
use core::ops::{Add, AddAssign};

use crate::Complex;

/// Neumaier's improvement of Kahan summation for a single real lane.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct NeumaierSum {
    sum: f64,
    carry: f64,
}

impl NeumaierSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

impl AddAssign<f64> for NeumaierSum {
    fn add_assign(&mut self, x: f64) {
        let t = self.sum + x;
        if libm::fabs(self.sum) >= libm::fabs(x) {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }
}

impl Add for NeumaierSum {
    type Output = NeumaierSum;

    fn add(mut self, rhs: NeumaierSum) -> NeumaierSum {
        self += rhs.sum;
        self.carry += rhs.carry;
        self
    }
}

/// Two compensated lanes, one per complex component.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ComplexSum {
    re: NeumaierSum,
    im: NeumaierSum,
}

impl ComplexSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn value(&self) -> Complex {
        Complex::new(self.re.value(), self.im.value())
    }
}

impl AddAssign<Complex> for ComplexSum {
    fn add_assign(&mut self, z: Complex) {
        self.re += z.re;
        self.im += z.im;
    }
}

impl Add for ComplexSum {
    type Output = ComplexSum;

    fn add(self, rhs: ComplexSum) -> ComplexSum {
        ComplexSum { re: self.re + rhs.re, im: self.im + rhs.im }
    }
}

/// `e(t) = exp(2 pi i t)`, with `t` first folded into `[-1/2, 1/2]`.
pub fn e(t: f64) -> Complex {
    let r = t - libm::round(t);
    let (s, c) = libm::sincos(TAU * r);
    Complex::new(c, s)
}

/// `e(t / q)` for an exact residue `0 <= t < q`.
///
/// The residue is folded to `|t| <= q/2` before dividing, so `e(t/q)` and `e((q-t)/q)`
/// are exact conjugates of each other.
pub fn e_ratio(t: u64, q: u64) -> Complex {
    debug_assert!(t < q);
    if 2 * (t as u128) == q as u128 {
        Complex::new(-1.0, 0.0)
    } else if 2 * (t as u128) < q as u128 {
        e(t as f64 / q as f64)
    } else {
        e((q - t) as f64 / q as f64).conj()
    }
}

/// Table of `e(t/q)` for `0 <= t < q`.
pub fn roots_of_unity(q: u64) -> alloc::vec::Vec<Complex> {
    (0..q).map(|t| e_ratio(t, q)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn neumaier_recovers_cancelled_terms() {
        let mut s = NeumaierSum::new();
        for x in [1.0, 1e100, 1.0, -1e100] {
            s += x;
        }
        assert_eq!(s.value(), 2.0);
    }

    #[test]
    fn e_basic_values() {
        assert!((e(0.25) - Complex::new(0.0, 1.0)).norm() < 1e-15);
        assert!((e(0.5) + Complex::new(1.0, 0.0)).norm() < 1e-15);
        assert_eq!(e(3.0), Complex::new(1.0, 0.0));
    }

    #[test]
    fn root_table_is_conjugate_symmetric() {
        for q in 1..64u64 {
            let table = roots_of_unity(q);
            for t in 1..q {
                assert_eq!(table[t as usize], table[(q - t) as usize].conj());
            }
        }
    }
}
