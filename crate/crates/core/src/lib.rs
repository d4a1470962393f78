#![no_std]

//! Exact and numerical machinery for the string-equation solution of the
//! extended r-reduced KP hierarchy.
//!
//! - [`series`]: truncated Laurent series in `1/z` over exact rationals, and
//!   the phase-tagged variant that is closed under `z -> omega z`.
//! - [`string_ops`]: the string operators `S_z`, `S_z*`, the formal series
//!   `a(z)` and `d(z)`, and the identity checks built from them.
//! - [`diffpoly`], [`psdo`], [`flows`]: differential polynomials, the
//!   pseudo-differential calculus of the Lax operator, and the hierarchy flows.
//! - [`pearcey`]: quadrature of the Pearcey-type integrals `A(z)` and `D(z)`
//!   along traced steepest-descent contours.
//!
//! The crate only needs `alloc`; IO and file formats live in the `extkp` crate.

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod diffpoly;
pub mod error;
pub mod flows;
pub mod pearcey;
pub mod psdo;
pub mod series;
pub mod string_ops;

pub use crate::diffpoly::{DiffPoly, Jet, Monomial};
pub use crate::error::{Error, Result};
pub use crate::flows::FlowSystem;
pub use crate::pearcey::{ContourSpec, Which};
pub use crate::psdo::PsDO;
pub use crate::series::{LaurentSeries, PhasedSeries};
pub use crate::string_ops::StringSeriesBundle;

/// Exact arbitrary-precision rational scalar.
pub type Rational = num_rational::BigRational;

/// Builds the rational `num/den`. Panics if `den == 0`.
pub fn q(num: i64, den: i64) -> Rational {
    Rational::new(num.into(), den.into())
}

/// Builds the integer `n` as a rational.
pub fn qi(n: i64) -> Rational {
    Rational::from_integer(n.into())
}
