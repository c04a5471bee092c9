//! The piecewise system, its Sigma-center classification and period-annulus
//! estimates.

use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::trigmoments::{g_eval, HomogeneousPoly, Range};

/// Half plane of the switching line `y = 0`; the axis itself belongs to
/// [`Side::Upper`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Upper,
    Lower,
}

impl Side {
    pub fn range(self) -> Range {
        match self {
            Side::Upper => Range::Upper,
            Side::Lower => Range::Lower,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Side::Upper => "upper",
            Side::Lower => "lower",
        }
    }
}

/// `X+` on `y >= 0` with `H+ = r^2/2 + upper`, `X-` on `y < 0` with
/// `H- = r^2/2 + lower`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PiecewiseSystem {
    upper: HomogeneousPoly,
    lower: HomogeneousPoly,
}

impl PiecewiseSystem {
    pub fn new(upper: HomogeneousPoly, lower: HomogeneousPoly) -> Self {
        Self { upper, lower }
    }

    /// The smooth system carrying `p` on both sides.
    pub fn smooth(p: HomogeneousPoly) -> Self {
        Self::new(p.clone(), p)
    }

    pub fn upper(&self) -> &HomogeneousPoly {
        &self.upper
    }

    pub fn lower(&self) -> &HomogeneousPoly {
        &self.lower
    }

    pub fn poly(&self, side: Side) -> &HomogeneousPoly {
        match side {
            Side::Upper => &self.upper,
            Side::Lower => &self.lower,
        }
    }

    /// `n = deg(upper) - 1`
    pub fn n(&self) -> u32 {
        self.upper.degree() as u32 - 1
    }

    /// `m = deg(lower) - 1`
    pub fn m(&self) -> u32 {
        self.lower.degree() as u32 - 1
    }

    pub fn exponent(&self, side: Side) -> u32 {
        match side {
            Side::Upper => self.n(),
            Side::Lower => self.m(),
        }
    }

    pub fn a0_plus(&self) -> &BigRational {
        self.upper.axis_value()
    }

    pub fn a0_minus(&self) -> &BigRational {
        self.lower.axis_value()
    }

    pub fn a0(&self, side: Side) -> &BigRational {
        self.poly(side).axis_value()
    }

    pub fn is_zero(&self) -> bool {
        self.upper.is_zero() && self.lower.is_zero()
    }

    /// Hamiltonian of the side active at `(x, y)`.
    pub fn hamiltonian(&self, side: Side, x: f64, y: f64) -> f64 {
        0.5 * (x * x + y * y) + self.poly(side).eval(x, y)
    }
}

impl fmt::Display for PiecewiseSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "H+ = r^2/2 + {} (n = {}), H- = r^2/2 + {} (m = {})",
            self.upper,
            self.n(),
            self.lower,
            self.m()
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    SigmaCenter,
    NotCenter,
}

/// Which of the five center conditions holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CenterCase {
    /// `n`, `m` odd
    I,
    /// `n` even, `m` odd, `a0+ = 0`
    II,
    /// `n` odd, `m` even, `a0- = 0`
    III,
    /// `n`, `m` even, `n != m`, `a0+ = a0- = 0`
    IV,
    /// `n = m` even, `a0+ = a0-`
    V,
}

impl fmt::Display for CenterCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            CenterCase::I => "I",
            CenterCase::II => "II",
            CenterCase::III => "III",
            CenterCase::IV => "IV",
            CenterCase::V => "V",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CenterClass {
    verdict: Verdict,
    case: Option<CenterCase>,
    reason: String,
}

impl CenterClass {
    fn center(case: CenterCase, reason: impl Into<String>) -> Self {
        Self {
            verdict: Verdict::SigmaCenter,
            case: Some(case),
            reason: reason.into(),
        }
    }

    fn not_center(reason: impl Into<String>) -> Self {
        Self {
            verdict: Verdict::NotCenter,
            case: None,
            reason: reason.into(),
        }
    }

    pub fn verdict(&self) -> Verdict {
        self.verdict
    }

    pub fn case(&self) -> Option<CenterCase> {
        self.case
    }

    pub fn reason(&self) -> &str {
        &self.reason
    }

    pub fn is_center(&self) -> bool {
        self.verdict == Verdict::SigmaCenter
    }
}

impl fmt::Display for CenterClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.case {
            Some(c) => write!(f, "Sigma-center, case {c} ({})", self.reason),
            None => write!(f, "not a center ({})", self.reason),
        }
    }
}

/// A degree-2 side changes the linear part; it must stay positive definite
/// for the origin to be a center of that side at all.
fn linear_side_is_elliptic(p: &HomogeneousPoly) -> bool {
    let two = BigRational::from_integer(2.into());
    let c = p.coeffs();
    let a = BigRational::one() + &two * &c[0];
    let d = BigRational::one() + &two * &c[2];
    let det = &a * &d - &c[1] * &c[1];
    a.is_positive() && det.is_positive()
}

/// Exact classification of the origin.
pub fn classify(sys: &PiecewiseSystem) -> CenterClass {
    for side in [Side::Upper, Side::Lower] {
        let p = sys.poly(side);
        if p.degree() == 2 && !linear_side_is_elliptic(p) {
            return CenterClass::not_center(format!(
                "{} side: quadratic part is not positive definite",
                side.label()
            ));
        }
    }
    let (n, m) = (sys.n(), sys.m());
    let (ap, am) = (sys.a0_plus(), sys.a0_minus());
    match (n % 2 == 1, m % 2 == 1) {
        (true, true) => CenterClass::center(CenterCase::I, "n and m odd"),
        (false, true) => {
            if ap.is_zero() {
                CenterClass::center(CenterCase::II, "n even, m odd, a0+ = 0")
            } else {
                CenterClass::not_center(format!("n even, m odd requires a0+ = 0, found {ap}"))
            }
        }
        (true, false) => {
            if am.is_zero() {
                CenterClass::center(CenterCase::III, "n odd, m even, a0- = 0")
            } else {
                CenterClass::not_center(format!("n odd, m even requires a0- = 0, found {am}"))
            }
        }
        (false, false) if n != m => {
            if ap.is_zero() && am.is_zero() {
                CenterClass::center(CenterCase::IV, "n != m even, a0+ = a0- = 0")
            } else {
                CenterClass::not_center(format!(
                    "n != m even requires a0+ = a0- = 0, found a0+ = {ap}, a0- = {am}"
                ))
            }
        }
        (false, false) => {
            if ap == am {
                CenterClass::center(CenterCase::V, "n = m even, a0+ = a0-")
            } else {
                CenterClass::not_center(format!(
                    "n = m even requires a0+ = a0-, found a0+ = {ap}, a0- = {am}"
                ))
            }
        }
    }
}

/// Applies `(x, y) ↦ (-x, -y)` when `m > n`, so that the result has `m <= n`.
pub fn normalize(sys: &PiecewiseSystem) -> PiecewiseSystem {
    if sys.m() > sys.n() {
        flip(sys)
    } else {
        sys.clone()
    }
}

/// The point reflection itself: the new upper side is the old lower one.
pub fn flip(sys: &PiecewiseSystem) -> PiecewiseSystem {
    PiecewiseSystem::new(sys.lower.point_reflected(), sys.upper.point_reflected())
}

/// `(dx/dt, dy/dt) = (-∂H/∂y, ∂H/∂x)` with the upper field on `y >= 0`.
pub fn vector_field(sys: &PiecewiseSystem, x: f64, y: f64) -> (f64, f64) {
    let side = if y >= 0.0 { Side::Upper } else { Side::Lower };
    side_field(sys.poly(side), x, y)
}

/// Field of the smooth Hamiltonian `r^2/2 + p`.
pub fn side_field(p: &HomogeneousPoly, x: f64, y: f64) -> (f64, f64) {
    let (px, py) = p.gradient(x, y);
    (-(y + py), x + px)
}

/// Estimate of the period-annulus boundary of the smooth system `r^2/2 + p`.
#[derive(Debug, Clone, PartialEq)]
pub struct AnnulusEstimate {
    pub side: Side,
    pub degree: usize,
    /// Smallest radius where `1 + d g(θ) r^{d-2}` vanishes; `None` if unbounded.
    pub r_star: Option<f64>,
    pub theta_star: Option<f64>,
    /// Largest axis radius whose level curve stays inside `r < r*(θ)` on the
    /// whole circle; `None` if unbounded.
    pub r0_limit: Option<f64>,
}

impl AnnulusEstimate {
    pub fn is_bounded(&self) -> bool {
        self.r_star.is_some()
    }

    pub fn contains(&self, r0: f64) -> bool {
        self.r0_limit.is_none_or(|lim| r0 < lim)
    }
}

/// Locates `max_θ(-g(θ))` over the circle: dense sampling then
/// golden-section refinement on the best bracket.
fn max_negative_g(p: &HomogeneousPoly) -> (f64, f64) {
    use std::f64::consts::TAU;
    const SAMPLES: usize = 4096;
    let f = |t: f64| -g_eval(p, t);
    let step = TAU / SAMPLES as f64;
    let (mut best_i, mut best) = (0usize, f64::NEG_INFINITY);
    for i in 0..SAMPLES {
        let v = f(i as f64 * step);
        if v > best {
            best = v;
            best_i = i;
        }
    }
    let (mut a, mut b) = ((best_i as f64 - 1.0) * step, (best_i as f64 + 1.0) * step);
    let gr = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - gr * (b - a);
    let mut d = a + gr * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..200 {
        if (b - a).abs() < 1e-15 {
            break;
        }
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - gr * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + gr * (b - a);
            fd = f(d);
        }
    }
    let t = 0.5 * (a + b);
    let v = f(t);
    if v >= best {
        (t.rem_euclid(TAU), v)
    } else {
        ((best_i as f64 * step).rem_euclid(TAU), best)
    }
}

/// Annulus estimate for one side, treated as a smooth system on the plane.
pub fn annulus_bound(sys: &PiecewiseSystem, side: Side) -> Result<AnnulusEstimate> {
    annulus_for_poly(sys.poly(side), side)
}

pub fn annulus_for_poly(p: &HomogeneousPoly, side: Side) -> Result<AnnulusEstimate> {
    let d = p.degree();
    if d < 3 {
        return Err(Error::DegreeTooLow(d));
    }
    let unbounded = AnnulusEstimate {
        side,
        degree: d,
        r_star: None,
        theta_star: None,
        r0_limit: None,
    };
    if p.is_zero() {
        return Ok(unbounded);
    }
    let (theta, neg_g) = max_negative_g(p);
    if neg_g <= 0.0 {
        return Ok(unbounded);
    }
    let df = d as f64;
    let r_star = (df * neg_g).powf(-1.0 / (df - 2.0));
    Ok(AnnulusEstimate {
        side,
        degree: d,
        r_star: Some(r_star),
        theta_star: Some(theta),
        r0_limit: Some(axis_limit(p, r_star)),
    })
}

/// Along a ray, `F(r) = r^2 + 2 g r^d` increases up to `r*(θ)` where it
/// reaches `r*(θ)^2 (d-2)/d`; the global minimum of that ceiling over the
/// circle is `r*^2 (d-2)/d`. The axis start `r0` must keep
/// `h^2 = r0^2 + 2 a0 r0^d` below it while staying on the increasing branch.
fn axis_limit(p: &HomogeneousPoly, r_star: f64) -> f64 {
    let d = p.degree() as i32;
    let a0 = crate::trigmoments::ratio_to_f64(p.axis_value());
    let ceiling = r_star * r_star * f64::from(d - 2) / f64::from(d);
    let f = |r: f64| r * r + 2.0 * a0 * r.powi(d);
    let df = |r: f64| 2.0 * r + 2.0 * f64::from(d) * a0 * r.powi(d - 1);
    // increasing branch at θ = 0 ends where df = 0 (only when a0 < 0)
    let mut hi = r_star;
    if a0 < 0.0 {
        let turn = (-1.0 / (f64::from(d) * a0)).powf(1.0 / f64::from(d - 2));
        hi = hi.min(turn);
    }
    if f(hi) <= ceiling && df(hi) >= 0.0 {
        return hi;
    }
    let (mut lo, mut hi) = (0.0, hi);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < ceiling {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-16 * hi {
            break;
        }
    }
    lo
}
