//! Exact trigonometric moments.
//!
//! Every integral of a polynomial in `cos θ`, `sin θ` over `[0, 2π]`,
//! `[0, π]` or `[π, 2π]` is a rational number plus a rational multiple of
//! `π`. [`TrigValue`] stores exactly that pair.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Integration range on the unit circle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Range {
    /// `[0, 2π]`
    Full,
    /// `[0, π]`
    Upper,
    /// `[π, 2π]`
    Lower,
}

impl Range {
    pub fn length(self) -> TrigValue {
        match self {
            Range::Full => TrigValue::pi_multiple(BigRational::from_integer(2.into())),
            Range::Upper | Range::Lower => TrigValue::pi_multiple(BigRational::one()),
        }
    }

    pub fn bounds(self) -> (f64, f64) {
        use std::f64::consts::PI;
        match self {
            Range::Full => (0.0, 2.0 * PI),
            Range::Upper => (0.0, PI),
            Range::Lower => (PI, 2.0 * PI),
        }
    }
}

/// Exact value `rat_part + pi_part * π`.
///
/// Only rational scaling is offered; a product of two values with nonzero
/// `π` parts would need a `π²` component, which this type does not carry.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct TrigValue {
    rat_part: BigRational,
    pi_part: BigRational,
}

impl TrigValue {
    pub fn new(rat_part: BigRational, pi_part: BigRational) -> Self {
        Self { rat_part, pi_part }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn rational(q: BigRational) -> Self {
        Self::new(q, BigRational::zero())
    }

    pub fn pi_multiple(q: BigRational) -> Self {
        Self::new(BigRational::zero(), q)
    }

    pub fn rat_part(&self) -> &BigRational {
        &self.rat_part
    }

    pub fn pi_part(&self) -> &BigRational {
        &self.pi_part
    }

    pub fn is_zero(&self) -> bool {
        self.rat_part.is_zero() && self.pi_part.is_zero()
    }

    pub fn scale(&self, s: &BigRational) -> Self {
        Self::new(&self.rat_part * s, &self.pi_part * s)
    }

    pub fn to_f64(&self) -> f64 {
        ratio_to_f64(&self.rat_part) + ratio_to_f64(&self.pi_part) * std::f64::consts::PI
    }

    /// Sign of the real number, decided exactly when one part vanishes or
    /// both agree, and through a rigorous rational bracket of `π` otherwise.
    pub fn signum(&self) -> i32 {
        let sr = sign_of(&self.rat_part);
        let sp = sign_of(&self.pi_part);
        if sp == 0 || sr == sp {
            return if sr != 0 { sr } else { sp };
        }
        if sr == 0 {
            return sp;
        }
        // 333/106 < π < 355/113
        let lo = &self.rat_part + &self.pi_part * crate::rat(333, 106);
        let hi = &self.rat_part + &self.pi_part * crate::rat(355, 113);
        let (sl, sh) = (sign_of(&lo), sign_of(&hi));
        if sl == sh && sl != 0 {
            return sl;
        }
        let v = self.to_f64();
        if v > 0.0 {
            1
        } else if v < 0.0 {
            -1
        } else {
            0
        }
    }
}

fn sign_of(q: &BigRational) -> i32 {
    if q.is_positive() {
        1
    } else if q.is_negative() {
        -1
    } else {
        0
    }
}

pub(crate) fn ratio_to_f64(q: &BigRational) -> f64 {
    match q.to_f64() {
        Some(v) => v,
        None => {
            // very large numerators and denominators: fall back to a scaled division
            let n = q.numer().to_f64().unwrap_or(f64::NAN);
            let d = q.denom().to_f64().unwrap_or(f64::NAN);
            n / d
        }
    }
}

impl fmt::Display for TrigValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + {}*pi", self.rat_part, self.pi_part)
    }
}

impl Add for TrigValue {
    type Output = TrigValue;
    fn add(self, rhs: TrigValue) -> TrigValue {
        TrigValue::new(self.rat_part + rhs.rat_part, self.pi_part + rhs.pi_part)
    }
}

impl<'a> Add<&'a TrigValue> for &'a TrigValue {
    type Output = TrigValue;
    fn add(self, rhs: &TrigValue) -> TrigValue {
        TrigValue::new(&self.rat_part + &rhs.rat_part, &self.pi_part + &rhs.pi_part)
    }
}

impl AddAssign<&TrigValue> for TrigValue {
    fn add_assign(&mut self, rhs: &TrigValue) {
        self.rat_part += &rhs.rat_part;
        self.pi_part += &rhs.pi_part;
    }
}

impl Sub for TrigValue {
    type Output = TrigValue;
    fn sub(self, rhs: TrigValue) -> TrigValue {
        TrigValue::new(self.rat_part - rhs.rat_part, self.pi_part - rhs.pi_part)
    }
}

impl Neg for TrigValue {
    type Output = TrigValue;
    fn neg(self) -> TrigValue {
        TrigValue::new(-self.rat_part, -self.pi_part)
    }
}

impl Mul<&BigRational> for &TrigValue {
    type Output = TrigValue;
    fn mul(self, rhs: &BigRational) -> TrigValue {
        self.scale(rhs)
    }
}

/// Homogeneous polynomial `Σ coeffs[i] x^{d-i} y^i` of degree `d >= 2`.
#[derive(Debug, Clone)]
pub struct HomogeneousPoly {
    degree: usize,
    coeffs: Vec<BigRational>,
    float_coeffs: Vec<f64>,
}

impl HomogeneousPoly {
    pub fn new(degree: usize, coeffs: Vec<BigRational>) -> Result<Self> {
        if degree < 2 {
            return Err(Error::InvalidDegree(degree));
        }
        if coeffs.len() != degree + 1 {
            return Err(Error::DegreeMismatch {
                degree,
                expected: degree + 1,
                found: coeffs.len(),
            });
        }
        Ok(Self::from_parts(degree, coeffs))
    }

    /// Constructor from integer coefficients.
    pub fn from_ints(degree: usize, coeffs: &[i64]) -> Result<Self> {
        Self::new(degree, coeffs.iter().map(|&c| crate::int(c)).collect())
    }

    pub fn zero(degree: usize) -> Result<Self> {
        Self::new(degree, vec![BigRational::zero(); degree + 1])
    }

    /// Single monomial `c x^{d-i} y^i`.
    pub fn monomial(degree: usize, y_power: usize, c: BigRational) -> Result<Self> {
        let mut coeffs = vec![BigRational::zero(); degree + 1];
        if y_power > degree {
            return Err(Error::DegreeMismatch {
                degree,
                expected: degree + 1,
                found: y_power + 1,
            });
        }
        coeffs[y_power] = c;
        Self::new(degree, coeffs)
    }

    fn from_parts(degree: usize, coeffs: Vec<BigRational>) -> Self {
        let float_coeffs = coeffs.iter().map(ratio_to_f64).collect();
        Self {
            degree,
            coeffs,
            float_coeffs,
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    /// `H(1, 0)`, the value written `a0` for the side carrying this polynomial.
    pub fn axis_value(&self) -> &BigRational {
        &self.coeffs[0]
    }

    pub fn scaled(&self, s: &BigRational) -> Self {
        Self::from_parts(self.degree, self.coeffs.iter().map(|c| c * s).collect())
    }

    /// `H(-x, -y) = (-1)^d H(x, y)`.
    pub fn point_reflected(&self) -> Self {
        if self.degree % 2 == 0 {
            self.clone()
        } else {
            self.scaled(&-BigRational::one())
        }
    }

    pub fn mul(&self, other: &HomogeneousPoly) -> HomogeneousPoly {
        let degree = self.degree + other.degree;
        let mut coeffs = vec![BigRational::zero(); degree + 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (k, b) in other.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    coeffs[i + k] += a * b;
                }
            }
        }
        Self::from_parts(degree, coeffs)
    }

    /// `p^j` for `j >= 1`.
    pub fn pow(&self, j: usize) -> HomogeneousPoly {
        assert!(j >= 1, "pow needs j >= 1");
        let mut acc = self.clone();
        for _ in 1..j {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn eval(&self, x: f64, y: f64) -> f64 {
        let d = self.degree as i32;
        self.float_coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| **c != 0.0)
            .map(|(i, c)| c * x.powi(d - i as i32) * y.powi(i as i32))
            .sum()
    }

    /// `(∂H/∂x, ∂H/∂y)` at `(x, y)`.
    pub fn gradient(&self, x: f64, y: f64) -> (f64, f64) {
        let d = self.degree as i32;
        let mut gx = 0.0;
        let mut gy = 0.0;
        for (i, &c) in self.float_coeffs.iter().enumerate() {
            if c == 0.0 {
                continue;
            }
            let i = i as i32;
            let px = d - i;
            if px > 0 {
                gx += c * f64::from(px) * x.powi(px - 1) * y.powi(i);
            }
            if i > 0 {
                gy += c * f64::from(i) * x.powi(px) * y.powi(i - 1);
            }
        }
        (gx, gy)
    }

    /// True when every monomial has an odd power of `x`, so that
    /// `g(π - θ) = -g(θ)`.
    pub fn is_odd_in_x(&self) -> bool {
        self.coeffs
            .iter()
            .enumerate()
            .all(|(i, c)| c.is_zero() || (self.degree - i) % 2 == 1)
    }
}

impl PartialEq for HomogeneousPoly {
    fn eq(&self, other: &Self) -> bool {
        self.degree == other.degree && self.coeffs == other.coeffs
    }
}

impl Eq for HomogeneousPoly {}

impl fmt::Display for HomogeneousPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({c})")?;
            let px = self.degree - i;
            match px {
                0 => {}
                1 => write!(f, "x")?,
                _ => write!(f, "x^{px}")?,
            }
            match i {
                0 => {}
                1 => write!(f, "y")?,
                _ => write!(f, "y^{i}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// `(a-1)!! (b-1)!! / (a+b)!!` for even `a`, `b`.
fn wallis_ratio(a: u32, b: u32) -> BigRational {
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    let mut k = 1;
    while k < a {
        num *= k;
        k += 2;
    }
    let mut k = 1;
    while k < b {
        num *= k;
        k += 2;
    }
    let mut k = 2;
    while k <= a + b {
        den *= k;
        k += 2;
    }
    BigRational::new(num, den)
}

/// `∫₀^π cos^a θ sin^b θ dθ` for even `a` and odd `b`, via
/// `I(a, b) = (b-1)/(a+b) I(a, b-2)` with `I(a, 1) = 2/(a+1)`.
fn upper_odd_sine(a: u32, b: u32) -> BigRational {
    debug_assert!(a % 2 == 0 && b % 2 == 1);
    let mut acc = BigRational::new(BigInt::from(2), BigInt::from(a + 1));
    let mut k = 3;
    while k <= b {
        acc *= BigRational::new(BigInt::from(k - 1), BigInt::from(a + k));
        k += 2;
    }
    acc
}

/// Exact `∫ cos^a θ sin^b θ dθ` over `range`.
pub fn trig_moment(a: u32, b: u32, range: Range) -> TrigValue {
    let both_even = a % 2 == 0 && b % 2 == 0;
    match range {
        Range::Full => {
            if both_even {
                TrigValue::pi_multiple(wallis_ratio(a, b) * BigRational::from_integer(2.into()))
            } else {
                TrigValue::zero()
            }
        }
        Range::Upper | Range::Lower => {
            if a % 2 == 1 {
                TrigValue::zero()
            } else if both_even {
                TrigValue::pi_multiple(wallis_ratio(a, b))
            } else {
                let v = upper_odd_sine(a, b);
                // θ ↦ θ + π flips sin^b for odd b
                TrigValue::rational(if range == Range::Upper { v } else { -v })
            }
        }
    }
}

/// Exact `∫ g(θ)^j dθ` over `range`, where `g(θ) = p(cos θ, sin θ)`.
pub fn g_power_integral(p: &HomogeneousPoly, j: usize, range: Range) -> TrigValue {
    if p.is_zero() {
        return TrigValue::zero();
    }
    let pj = p.pow(j);
    let d = pj.degree();
    let mut acc = TrigValue::zero();
    for (i, c) in pj.coeffs().iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let m = trig_moment((d - i) as u32, i as u32, range);
        if !m.is_zero() {
            acc += &m.scale(c);
        }
    }
    acc
}

/// Moments `c_1, ..., c_jmax` (index 0 holds the range length).
pub fn moment_sequence(p: &HomogeneousPoly, jmax: usize, range: Range) -> Vec<TrigValue> {
    let mut out = Vec::with_capacity(jmax + 1);
    out.push(range.length());
    if p.is_zero() {
        out.resize(jmax + 1, TrigValue::zero());
        return out;
    }
    let mut power = p.clone();
    for j in 1..=jmax {
        if j > 1 {
            power = power.mul(p);
        }
        let d = power.degree();
        let mut acc = TrigValue::zero();
        for (i, c) in power.coeffs().iter().enumerate() {
            if !c.is_zero() {
                acc += &trig_moment((d - i) as u32, i as u32, range).scale(c);
            }
        }
        out.push(acc);
    }
    out
}

/// `p(cos θ, sin θ)` in floating point.
pub fn g_eval(p: &HomogeneousPoly, theta: f64) -> f64 {
    let (s, c) = theta.sin_cos();
    p.eval(c, s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{int, rat};

    fn tv(r: BigRational, p: BigRational) -> TrigValue {
        TrigValue::new(r, p)
    }

    #[test]
    fn moment_examples() {
        assert_eq!(trig_moment(2, 0, Range::Full), tv(int(0), int(1)));
        assert_eq!(trig_moment(0, 3, Range::Upper), tv(rat(4, 3), int(0)));
        assert_eq!(trig_moment(1, 0, Range::Upper), TrigValue::zero());
        assert_eq!(trig_moment(0, 1, Range::Lower), tv(int(-2), int(0)));
        assert_eq!(trig_moment(0, 0, Range::Full), tv(int(0), int(2)));
        assert_eq!(trig_moment(4, 2, Range::Upper), tv(int(0), rat(1, 16)));
    }

    #[test]
    fn g_power_examples() {
        let x2y = HomogeneousPoly::from_ints(3, &[0, 1, 0, 0]).unwrap();
        assert_eq!(g_power_integral(&x2y, 1, Range::Upper), tv(rat(2, 3), int(0)));
        assert_eq!(g_power_integral(&x2y, 1, Range::Full), TrigValue::zero());
        let xy = HomogeneousPoly::from_ints(2, &[0, 1, 0]).unwrap();
        assert_eq!(g_power_integral(&xy, 2, Range::Upper), tv(int(0), rat(1, 8)));
    }

    #[test]
    fn g_eval_examples() {
        use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};
        let x2y = HomogeneousPoly::from_ints(3, &[0, 1, 0, 0]).unwrap();
        assert!(g_eval(&x2y, FRAC_PI_2).abs() < 1e-16);
        let x3 = HomogeneousPoly::from_ints(3, &[1, 0, 0, 0]).unwrap();
        assert_eq!(g_eval(&x3, 0.0), 1.0);
        let xy = HomogeneousPoly::from_ints(2, &[0, 1, 0]).unwrap();
        assert!((g_eval(&xy, FRAC_PI_4) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn coefficient_count_is_checked() {
        assert!(matches!(
            HomogeneousPoly::from_ints(3, &[1, 2]),
            Err(Error::DegreeMismatch { expected: 4, found: 2, .. })
        ));
        assert!(matches!(HomogeneousPoly::from_ints(1, &[1, 0]), Err(Error::InvalidDegree(1))));
        assert!(HomogeneousPoly::zero(4).unwrap().is_zero());
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let p = HomogeneousPoly::new(4, vec![rat(1, 2), int(-3), int(0), rat(5, 7), int(2)]).unwrap();
        let (x, y) = (0.37, -0.81);
        let h = 1e-6;
        let (gx, gy) = p.gradient(x, y);
        let fx = (p.eval(x + h, y) - p.eval(x - h, y)) / (2.0 * h);
        let fy = (p.eval(x, y + h) - p.eval(x, y - h)) / (2.0 * h);
        assert!((gx - fx).abs() < 1e-8);
        assert!((gy - fy).abs() < 1e-8);
    }

    #[test]
    fn signum_with_mixed_parts() {
        assert_eq!(tv(int(-3), int(1)).signum(), 1);
        assert_eq!(tv(int(4), int(-1)).signum(), 1);
        assert_eq!(tv(int(3), int(-1)).signum(), -1);
        assert_eq!(tv(rat(-22, 7), int(1)).signum(), -1);
        assert_eq!(TrigValue::zero().signum(), 0);
    }

    #[test]
    fn display_is_symbolic() {
        assert_eq!(tv(rat(4, 3), rat(-1, 8)).to_string(), "4/3 + -1/8*pi");
    }
}
