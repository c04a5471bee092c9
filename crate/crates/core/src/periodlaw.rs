//! Period-function series.
//!
//! A side with nonlinearity of degree `d = n + 1 >= 3` has half period
//!
//! ```text
//! T_π(h) = π + Σ_j λ̃_j(n) c_j h^{j(n-1)}
//! ```
//!
//! in the energy parameter `h` (`H = h^2/2`), with `c_j = ∫ g^j` over the
//! side's half circle. Substituting `h = r0 (1 + 2 a0 r0^{n-1})^{1/2}` gives
//! the series in the axis radius `r0`, and the piecewise period is the sum of
//! the two half-period series in `r0`.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::seriescore::{build_lambda_table, CoefficientTable};
use crate::sysmodel::{classify, PiecewiseSystem, Side};
use crate::trigmoments::{moment_sequence, HomogeneousPoly, Range, TrigValue};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeriesVariable {
    EnergyH,
    RadiusR0,
}

/// `constant + Σ terms[e] ρ^e`, truncated after `ρ^{truncation_order}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PeriodSeries {
    constant: TrigValue,
    terms: BTreeMap<u32, TrigValue>,
    variable: SeriesVariable,
    truncation_order: u32,
}

impl PeriodSeries {
    pub fn new(constant: TrigValue, variable: SeriesVariable, truncation_order: u32) -> Self {
        Self {
            constant,
            terms: BTreeMap::new(),
            variable,
            truncation_order,
        }
    }

    /// Adds `value` to the coefficient of `ρ^e`; terms past the truncation
    /// order are dropped and exact zeros are never stored.
    pub fn accumulate(&mut self, e: u32, value: &TrigValue) {
        assert!(e > 0, "series exponents are positive");
        if e > self.truncation_order || value.is_zero() {
            return;
        }
        let entry = self.terms.entry(e).or_default();
        *entry += value;
        if entry.is_zero() {
            self.terms.remove(&e);
        }
    }

    pub fn constant(&self) -> &TrigValue {
        &self.constant
    }

    pub fn terms(&self) -> &BTreeMap<u32, TrigValue> {
        &self.terms
    }

    pub fn variable(&self) -> SeriesVariable {
        self.variable
    }

    pub fn truncation_order(&self) -> u32 {
        self.truncation_order
    }

    pub fn coefficient(&self, e: u32) -> TrigValue {
        self.terms.get(&e).cloned().unwrap_or_default()
    }

    pub fn first_term(&self) -> Option<(u32, &TrigValue)> {
        self.terms.iter().next().map(|(e, v)| (*e, v))
    }

    /// Sum of the constant and all stored terms at `rho`.
    pub fn eval(&self, rho: f64) -> f64 {
        self.eval_through(rho, self.truncation_order)
    }

    /// Sum of the constant and the terms with exponent `<= order`.
    pub fn eval_through(&self, rho: f64, order: u32) -> f64 {
        // ascending exponents; add small terms last
        let mut acc = 0.0;
        for (e, c) in self.terms.range(..=order).rev() {
            acc += c.to_f64() * rho.powi(*e as i32);
        }
        self.constant.to_f64() + acc
    }

    pub fn scaled_terms(&self, s: &BigRational) -> Self {
        let mut out = Self::new(self.constant.clone(), self.variable, self.truncation_order);
        for (e, c) in &self.terms {
            out.accumulate(*e, &c.scale(s));
        }
        out
    }
}

impl fmt::Display for PeriodSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let var = match self.variable {
            SeriesVariable::EnergyH => "h",
            SeriesVariable::RadiusR0 => "r0",
        };
        write!(f, "({})", self.constant)?;
        for (e, c) in &self.terms {
            write!(f, " + ({c}) {var}^{e}")?;
        }
        write!(f, " + O({var}^{})", self.truncation_order + 1)
    }
}

fn nonlinear_exponent(p: &HomogeneousPoly) -> Result<u32> {
    match p.degree() {
        d if d < 3 => Err(Error::DegreeTooLow(d)),
        d => Ok(d as u32 - 1),
    }
}

/// Series in `h` over an arbitrary range, from a prebuilt table.
fn energy_series(
    p: &HomogeneousPoly,
    range: Range,
    table: &CoefficientTable,
) -> Result<PeriodSeries> {
    let n = nonlinear_exponent(p)?;
    let stride = n - 1;
    let jmax = table.jmax();
    let mut out = PeriodSeries::new(range.length(), SeriesVariable::EnergyH, jmax as u32 * stride);
    if p.is_zero() {
        return Ok(out);
    }
    let moments = moment_sequence(p, jmax, range);
    let nr = crate::int(i64::from(n));
    for (j, c) in moments.iter().enumerate().skip(1) {
        let coeff = table.lambda_tilde(j).eval(&nr);
        out.accumulate(j as u32 * stride, &c.scale(&coeff));
    }
    Ok(out)
}

/// `T_π(h)` for the upper (`[0, π]`) or lower (`[π, 2π]`) half.
pub fn half_period_series_h(p: &HomogeneousPoly, side: Side, jmax: usize) -> Result<PeriodSeries> {
    energy_series(p, side.range(), &build_lambda_table(jmax))
}

/// Whole-plane period `T(h)` of the smooth system `r^2/2 + p`.
pub fn full_period_series(p: &HomogeneousPoly, jmax: usize) -> Result<PeriodSeries> {
    energy_series(p, Range::Full, &build_lambda_table(jmax))
}

/// Bracket coefficients of `h / r0 = (1 + 2 a0 x)^{1/2}` in `x = r0^{n-1}`,
/// for `x^0 ..= x^order`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AxisReparam {
    pub n: u32,
    pub bracket: Vec<BigRational>,
}

impl AxisReparam {
    /// Coefficient of `r0^e` in `h(r0)`.
    pub fn coefficient_of_r0(&self, e: u32) -> BigRational {
        let stride = self.n - 1;
        if e == 0 || (e - 1) % stride != 0 {
            return BigRational::zero();
        }
        let k = ((e - 1) / stride) as usize;
        self.bracket.get(k).cloned().unwrap_or_else(BigRational::zero)
    }
}

/// Binomial expansion of `h = r0 (1 + 2 a0 r0^{n-1})^{1/2}`.
pub fn h_of_r0_series(a0: &BigRational, n: u32, order: usize) -> AxisReparam {
    let half = crate::rat(1, 2);
    let two_a0 = a0 * crate::int(2);
    let mut bracket = Vec::with_capacity(order + 1);
    // binom(1/2, k) (2 a0)^k by the ratio of consecutive terms
    let mut term = BigRational::one();
    for k in 0..=order {
        if k > 0 {
            let kr = crate::int(k as i64);
            term = term * (&half - &kr + BigRational::one()) / &kr * &two_a0;
        }
        bracket.push(term.clone());
    }
    AxisReparam { n, bracket }
}

/// Truncated product of two series in `x`.
fn series_mul(a: &[BigRational], b: &[BigRational], len: usize) -> Vec<BigRational> {
    let mut out = vec![BigRational::zero(); len];
    for (i, x) in a.iter().enumerate().take(len) {
        if x.is_zero() {
            continue;
        }
        for (k, y) in b.iter().enumerate().take(len - i) {
            out[i + k] += x * y;
        }
    }
    out
}

/// Composes an `h`-series (stride `n-1`) with `h(r0)` by truncated
/// power-series arithmetic in `x = r0^{n-1}`:
/// `h^{j(n-1)} = r0^{j(n-1)} S(x)^{j(n-1)}` with `S = (1 + 2 a0 x)^{1/2}`.
fn compose_with_axis(h_series: &PeriodSeries, p: &HomogeneousPoly, jmax: usize) -> PeriodSeries {
    let n = p.degree() as u32 - 1;
    let stride = n - 1;
    let mut out = PeriodSeries::new(
        h_series.constant().clone(),
        SeriesVariable::RadiusR0,
        h_series.truncation_order(),
    );
    if h_series.terms().is_empty() {
        return out;
    }
    let len = jmax + 1;
    let s = h_of_r0_series(p.axis_value(), n, jmax).bracket;
    // s_pow = S^{stride}; running power S^{j stride}
    let mut s_pow = vec![BigRational::one()];
    s_pow.resize(len, BigRational::zero());
    for _ in 0..stride {
        s_pow = series_mul(&s_pow, &s, len);
    }
    let mut running = vec![BigRational::zero(); len];
    running[0] = BigRational::one();
    for i in 1..=jmax {
        running = series_mul(&running, &s_pow, len);
        let c = h_series.coefficient(i as u32 * stride);
        if c.is_zero() {
            continue;
        }
        for (k, w) in running.iter().enumerate().take(jmax + 1 - i) {
            if !w.is_zero() {
                out.accumulate((i + k) as u32 * stride, &c.scale(w));
            }
        }
    }
    out
}

/// `T_{π,side}(r0)`; term coefficients are the `μ_{j(n-1)}`.
pub fn half_period_series_r0(
    p: &HomogeneousPoly,
    side: Side,
    jmax: usize,
) -> Result<PeriodSeries> {
    let h = half_period_series_h(p, side, jmax)?;
    Ok(compose_with_axis(&h, p, jmax))
}

/// `T(r0)` of the smooth system `r^2/2 + p` over the whole plane.
pub fn full_period_series_r0(p: &HomogeneousPoly, jmax: usize) -> Result<PeriodSeries> {
    let h = full_period_series(p, jmax)?;
    Ok(compose_with_axis(&h, p, jmax))
}

/// `μ_j = Σ_i q_{j,i}(n) a0^{j-i} c_i` from the parametric table; the
/// second route to the coefficients of [`half_period_series_r0`].
pub fn mu_from_table(
    table: &CoefficientTable,
    n: u32,
    a0: &BigRational,
    moments: &[TrigValue],
    j: usize,
) -> TrigValue {
    let nr = crate::int(i64::from(n));
    let mut acc = TrigValue::zero();
    for i in 1..=j {
        let w = table.q(j, i).eval(&nr) * pow_rat(a0, j - i);
        acc += &moments[i].scale(&w);
    }
    acc
}

fn pow_rat(q: &BigRational, k: usize) -> BigRational {
    let mut acc = BigRational::one();
    for _ in 0..k {
        acc *= q;
    }
    acc
}

/// Reduced index needed on a side of exponent `n` to reach `r0^order`.
fn side_jmax(n: u32, order: u32) -> usize {
    (order / (n - 1)).max(1) as usize
}

/// `T(r0) = T_{π+}(r0) + T_{π-}(r0)` truncated at `r0^{jmax (min(n,m)-1)}`.
pub fn combined_period_series(sys: &PiecewiseSystem, jmax: usize) -> Result<PeriodSeries> {
    let class = classify(sys);
    if !class.is_center() {
        return Err(Error::NotACenter(class.reason().to_string()));
    }
    for side in [Side::Upper, Side::Lower] {
        nonlinear_exponent(sys.poly(side))?;
    }
    let order = jmax as u32 * (sys.n().min(sys.m()) - 1);
    combined_to_order(sys, order)
}

/// Combined series truncated at `r0^order`, for systems with both sides of
/// degree >= 3 (classification is the caller's responsibility).
pub fn combined_to_order(sys: &PiecewiseSystem, order: u32) -> Result<PeriodSeries> {
    let mut out = PeriodSeries::new(Range::Full.length(), SeriesVariable::RadiusR0, order);
    for side in [Side::Upper, Side::Lower] {
        let p = sys.poly(side);
        let n = nonlinear_exponent(p)?;
        let half = half_period_series_r0(p, side, side_jmax(n, order))?;
        for (e, c) in half.terms() {
            out.accumulate(*e, c);
        }
    }
    Ok(out)
}

/// Nonconstant part of `T(r0)` when one or both sides may be linear: a
/// degree-2 side has constant half period and contributes no terms.
pub fn varying_part(sys: &PiecewiseSystem, order: u32) -> Result<PeriodSeries> {
    let mut out = PeriodSeries::new(TrigValue::zero(), SeriesVariable::RadiusR0, order);
    for side in [Side::Upper, Side::Lower] {
        let p = sys.poly(side);
        if p.degree() < 3 {
            continue;
        }
        let n = p.degree() as u32 - 1;
        let half = half_period_series_r0(p, side, side_jmax(n, order))?;
        for (e, c) in half.terms() {
            out.accumulate(*e, c);
        }
    }
    Ok(out)
}

/// Smallest exponent with a nonzero coefficient in `T(r0) - T(0)`, searched
/// through `r0^{jmax (min(n,m)-1)}` (degree-2 sides count as stride 1).
/// `None` means every coefficient vanished through that order.
pub fn first_obstruction(sys: &PiecewiseSystem, jmax: usize) -> Result<Option<(u32, TrigValue)>> {
    let class = classify(sys);
    if !class.is_center() {
        return Err(Error::NotACenter(class.reason().to_string()));
    }
    let stride = |d: usize| (d.max(3) - 2) as u32;
    let order = jmax as u32 * stride(sys.upper().degree()).min(stride(sys.lower().degree()));
    let series = varying_part(sys, order)?;
    Ok(series.first_term().map(|(e, c)| (e, c.clone())))
}

/// `binom(a, k)` for rational `a`, exact.
pub fn rational_binomial(a: &BigRational, k: usize) -> BigRational {
    let mut acc = BigRational::one();
    let mut fact = BigInt::one();
    for i in 0..k {
        acc *= a - crate::int(i as i64);
        fact *= i + 1;
    }
    acc / BigRational::from_integer(fact)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{int, rat};

    fn poly(d: usize, c: &[i64]) -> HomogeneousPoly {
        HomogeneousPoly::from_ints(d, c).unwrap()
    }

    #[test]
    fn zero_side_is_pure_pi() {
        let s = half_period_series_h(&poly(3, &[0; 4]), Side::Upper, 6).unwrap();
        assert!(s.terms().is_empty());
        assert_eq!(s.constant(), &TrigValue::pi_multiple(int(1)));
        let f = full_period_series(&poly(4, &[0; 5]), 6).unwrap();
        assert_eq!(f.constant(), &TrigValue::pi_multiple(int(2)));
        assert!(f.terms().is_empty());
    }

    #[test]
    fn x2y_upper_terms() {
        let p = poly(3, &[0, 1, 0, 0]);
        let s = half_period_series_h(&p, Side::Upper, 4).unwrap();
        assert_eq!(s.coefficient(1), TrigValue::rational(int(-2)));
        assert_eq!(s.coefficient(2), TrigValue::pi_multiple(rat(3, 4)));
        let f = full_period_series(&p, 4).unwrap();
        assert!(f.coefficient(1).is_zero());
    }

    #[test]
    fn degree_two_is_rejected() {
        assert_eq!(
            half_period_series_h(&poly(2, &[1, 0, 0]), Side::Upper, 3),
            Err(Error::DegreeTooLow(2))
        );
    }

    #[test]
    fn axis_bracket_terms() {
        let a = rat(3, 7);
        let r = h_of_r0_series(&a, 3, 4);
        assert_eq!(r.bracket[0], int(1));
        assert_eq!(r.bracket[1], a.clone());
        assert_eq!(r.bracket[2], -&a * &a / int(2));
        assert_eq!(r.bracket[3], &a * &a * &a / int(2));
        assert_eq!(r.bracket[4], -(&a * &a * &a * &a) * rat(5, 8));
        let r = h_of_r0_series(&int(0), 2, 4);
        assert_eq!(r.bracket, vec![int(1), int(0), int(0), int(0), int(0)]);
        let r = h_of_r0_series(&int(1), 2, 3);
        assert_eq!(r.bracket[3], rat(1, 2));
        // r0^{1 + 2(n-1)} carries the bracket's second-order term
        let r = h_of_r0_series(&a, 3, 4);
        assert_eq!(r.coefficient_of_r0(5), -&a * &a / int(2));
        assert!(r.coefficient_of_r0(4).is_zero());
    }

    #[test]
    fn combined_example() {
        let sys = PiecewiseSystem::new(poly(3, &[0, 1, 0, 0]), poly(3, &[0, 0, 0, 1]));
        let s = combined_period_series(&sys, 4).unwrap();
        assert_eq!(s.constant(), &TrigValue::pi_multiple(int(2)));
        assert_eq!(s.coefficient(1), TrigValue::rational(int(2)));
        let z = PiecewiseSystem::new(poly(3, &[0; 4]), poly(3, &[0; 4]));
        let s = combined_period_series(&z, 4).unwrap();
        assert!(s.terms().is_empty());
        assert_eq!(first_obstruction(&z, 4).unwrap(), None);
    }

    #[test]
    fn not_a_center_is_reported() {
        let sys = PiecewiseSystem::new(poly(3, &[1, 0, 0, 0]), poly(3, &[0, 0, 0, 1]));
        assert!(matches!(combined_period_series(&sys, 4), Err(Error::NotACenter(_))));
        assert!(matches!(first_obstruction(&sys, 4), Err(Error::NotACenter(_))));
    }

    #[test]
    fn rational_binomial_half() {
        assert_eq!(rational_binomial(&rat(1, 2), 2), rat(-1, 8));
        assert_eq!(rational_binomial(&int(5), 2), int(10));
    }
}
