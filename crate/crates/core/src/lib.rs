//! Constructive objects of the two-parameter polynomial circle method.
//!
//! The crate is `no_std` and only needs `alloc`. It covers:
//!
//! * [`arith`]: reduced fractions, Dirichlet approximation, rescaled approximations;
//! * [`poly`]: sparse bivariate integer polynomials and their text grammar;
//! * [`newton`]: the backwards Newton diagram, its sectors, subsectors and gaps;
//! * [`expsum`]: one- and two-parameter exponential sums with exact phase reduction;
//! * [`complete`]: complete Gauss sums and Vinogradov mean-value counts;
//! * [`iw`]: Ionescu–Wainger denominator and fraction sets;
//! * [`osc`]: oscillation and variation semi-norms;
//! * [`ergodic`]: polynomial averages on the integer shift system;
//! * [`circle`]: discrete and continuous multipliers, major/minor arcs.
//!
//! Everything that touches the filesystem, threads or a command line lives in the
//! companion `newton-circle` crate.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

#[cfg(test)]
extern crate std;

mod error;

pub mod arith;
pub mod circle;
pub mod complete;
pub mod ergodic;
pub mod expsum;
pub mod iw;
pub mod newton;
pub mod osc;
pub mod poly;
pub mod quad;
pub mod report;
pub mod sum;

pub use error::{Error, Result};

/// Complex double used for every sum value.
pub type Complex = num_complex::Complex<f64>;
