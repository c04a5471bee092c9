use thiserror::Error;

use crate::sysmodel::Side;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("homogeneous part has degree {0}; degree >= 2 is required")]
    InvalidDegree(usize),

    #[error("degree {degree} needs {expected} coefficients, got {found}")]
    DegreeMismatch {
        degree: usize,
        expected: usize,
        found: usize,
    },

    #[error("degree {0} side is linear; the series expansion needs degree >= 3")]
    DegreeTooLow(usize),

    #[error("origin is not a Sigma-center: {0}")]
    NotACenter(String),

    #[error("reversion coefficient of h^{exponent} is nonzero for n = {n}")]
    SparsityViolation { n: u32, exponent: usize },

    #[error("{side:?} side: start radius {r0} lies outside the period annulus (limit {limit})")]
    OutsideAnnulus { side: Side, r0: f64, limit: f64 },

    #[error("{side:?} side: no axis crossing within {time} time units from r0 = {r0}")]
    EscapedAnnulus { side: Side, r0: f64, time: f64 },

    #[error("step size underflow at t = {t} (step {step})")]
    StepFailure { t: f64, step: f64 },

    #[error("level equation has no bracketed root at theta = {theta}")]
    RootBracketFailure { theta: f64 },

    #[error("{side:?} side: T_pi = T/2 hypothesis not met ({reason})")]
    HypothesisNotMet { side: Side, reason: String },

    #[error("line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
}
