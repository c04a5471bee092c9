//! Symbolic and numeric analysis of planar piecewise Hamiltonian systems
//!
//! ```text
//! X+ : y >= 0,  H+ = (x^2 + y^2)/2 + H^+_{n+1}(x, y)
//! X- : y <  0,  H- = (x^2 + y^2)/2 + H^-_{m+1}(x, y)
//! ```
//!
//! with homogeneous nonlinearities and the switching line `y = 0`.
//!
//! The crate is split bottom-up:
//!
//! * [`trigmoments`]: exact values of trigonometric moment integrals.
//! * [`seriescore`]: reversion of `h^2 = r^2 + 2 g r^{n+1}` with the degree
//!   `n` kept symbolic.
//! * [`periodlaw`]: period-function series in the energy `h` and in the axis
//!   radius `r0`.
//! * [`sysmodel`]: the piecewise system, Sigma-center classification and
//!   period-annulus estimates.
//! * [`flow`]: event-driven integration of half orbits and quadrature periods.
//! * [`analyzer`]: witness search, cross validation and monotonicity profiles.
//! * [`cli`]: the spec-file format and the batch report behind `analyze`.

pub mod analyzer;
pub mod cli;
pub mod error;
pub mod flow;
pub mod periodlaw;
pub mod seriescore;
pub mod sysmodel;
pub mod trigmoments;

pub use error::{Error, Result};
pub use periodlaw::PeriodSeries;
pub use seriescore::{CoefficientTable, ParamPoly};
pub use sysmodel::{CenterClass, PiecewiseSystem, Side};
pub use trigmoments::{HomogeneousPoly, Range, TrigValue};

use num_bigint::BigInt;
use num_rational::BigRational;

/// Shorthand for the exact rational `num / den`.
///
/// Panics if `den == 0`.
pub fn rat(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Exact integer as a rational.
pub fn int(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}
