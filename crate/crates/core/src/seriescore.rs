//! Reversion of the energy-level equation `h^2 = r^2 + 2 g r^{n+1}`.
//!
//! Writing `r = h u` and `ε = g h^{n-1}` turns the level equation into
//! `u^2 + 2 ε u^{n+1} = 1`, whose solution `u = 1 + Σ λ_j(n) ε^j` has
//! coefficients polynomial in `n`. The table below keeps `n` symbolic; the
//! [`reversion_oracle`] solves the raw equation for a fixed integer `n` by
//! undetermined coefficients and serves as an independent check.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

pub const DEFAULT_JMAX: usize = 8;

/// Polynomial in the degree parameter `n`; `coeffs[k]` multiplies `n^k`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ParamPoly {
    coeffs: Vec<BigRational>,
}

impl ParamPoly {
    pub fn new(mut coeffs: Vec<BigRational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: BigRational) -> Self {
        Self::new(vec![c])
    }

    /// `a n + b`
    pub fn linear(a: BigRational, b: BigRational) -> Self {
        Self::new(vec![b, a])
    }

    pub fn from_ratios(coeffs: &[(i64, i64)]) -> Self {
        Self::new(coeffs.iter().map(|&(p, q)| crate::rat(p, q)).collect())
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading_coefficient(&self) -> BigRational {
        self.coeffs.last().cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn coefficient(&self, k: usize) -> BigRational {
        self.coeffs.get(k).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn eval(&self, n: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * n + c;
        }
        acc
    }

    pub fn eval_int(&self, n: i64) -> BigRational {
        self.eval(&crate::int(n))
    }

    pub fn scale(&self, s: &BigRational) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    /// `binom(a n + b, s)` as a polynomial of degree `s` in `n`:
    /// the falling factorial `(a n + b)(a n + b - 1)...(a n + b - s + 1) / s!`.
    pub fn binomial(a: &BigRational, b: &BigRational, s: usize) -> Self {
        let mut acc = ParamPoly::constant(BigRational::one());
        let mut fact = BigInt::one();
        for i in 0..s {
            acc = &acc * &ParamPoly::linear(a.clone(), b - crate::int(i as i64));
            fact *= i + 1;
        }
        acc.scale(&BigRational::new(BigInt::one(), fact))
    }
}

impl fmt::Display for ParamPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "{c}")?,
                1 => write!(f, "({c})n")?,
                _ => write!(f, "({c})n^{k}")?,
            }
        }
        Ok(())
    }
}

impl<'a> Add<&'a ParamPoly> for &'a ParamPoly {
    type Output = ParamPoly;
    fn add(self, rhs: &ParamPoly) -> ParamPoly {
        let len = self.coeffs.len().max(rhs.coeffs.len());
        ParamPoly::new((0..len).map(|k| self.coefficient(k) + rhs.coefficient(k)).collect())
    }
}

impl<'a> Sub<&'a ParamPoly> for &'a ParamPoly {
    type Output = ParamPoly;
    fn sub(self, rhs: &ParamPoly) -> ParamPoly {
        let len = self.coeffs.len().max(rhs.coeffs.len());
        ParamPoly::new((0..len).map(|k| self.coefficient(k) - rhs.coefficient(k)).collect())
    }
}

impl<'a> Mul<&'a ParamPoly> for &'a ParamPoly {
    type Output = ParamPoly;
    fn mul(self, rhs: &ParamPoly) -> ParamPoly {
        if self.is_zero() || rhs.is_zero() {
            return ParamPoly::zero();
        }
        let mut out = vec![BigRational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (k, b) in rhs.coeffs.iter().enumerate() {
                out[i + k] += a * b;
            }
        }
        ParamPoly::new(out)
    }
}

impl Neg for &ParamPoly {
    type Output = ParamPoly;
    fn neg(self) -> ParamPoly {
        ParamPoly::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

/// Symbolic coefficients of the reversion and of the period series.
///
/// All vectors are indexed by the reduced index `j`, the coefficient of
/// `h^{j(n-1)}`; slot 0 holds the constant term of the respective series.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoefficientTable {
    jmax: usize,
    /// `u = Σ lambda[j] ε^j`, `lambda[0] = 1`.
    lambda: Vec<ParamPoly>,
    /// `u^2 = Σ kappa[j] ε^j`, `kappa[0] = 1`.
    kappa: Vec<ParamPoly>,
    /// `T_π(h) = π + Σ lambda_tilde[j] c_j h^{j(n-1)}`.
    lambda_tilde: Vec<ParamPoly>,
    /// `μ_j = Σ_i q[j][i] a0^{j-i} c_i`, `1 <= i <= j`.
    q_table: Vec<Vec<ParamPoly>>,
}

impl CoefficientTable {
    pub fn jmax(&self) -> usize {
        self.jmax
    }

    pub fn lambda(&self, j: usize) -> &ParamPoly {
        &self.lambda[j]
    }

    pub fn lambda_tilde(&self, j: usize) -> &ParamPoly {
        &self.lambda_tilde[j]
    }

    /// Coefficient of `ε^j` in `u^2`.
    pub fn kappa(&self, j: usize) -> &ParamPoly {
        &self.kappa[j]
    }

    /// `q_{j,i}(n)` for `1 <= i <= j <= jmax`.
    pub fn q(&self, j: usize, i: usize) -> &ParamPoly {
        &self.q_table[j][i]
    }
}

/// Builds `λ_j(n)`, `λ̃_j(n)` and `q_{j,i}(n)` for `j <= jmax`.
///
/// `λ_j` follows from comparing coefficients of `ε^j` in
/// `u^2 + 2 ε u^{n+1} = 1`:
///
/// ```text
/// λ_j = -1/2 Σ_{i1+i2=j, 0<i<j} λ_i1 λ_i2 - Σ_{s=1}^{j-1} binom(n+1, s) [ε^{j-1}] B^s
/// ```
///
/// with `B = u - 1`, and `λ_1 = -1`.
pub fn build_lambda_table(jmax: usize) -> CoefficientTable {
    assert!(jmax >= 1, "jmax must be at least 1");
    let one = BigRational::one();
    let half = crate::rat(1, 2);

    let binom_n1: Vec<ParamPoly> = (0..=jmax)
        .map(|s| ParamPoly::binomial(&one, &one, s))
        .collect();

    let mut lambda = vec![ParamPoly::constant(one.clone())];
    // powers[s][k] = [ε^k] B^s, filled column by column as λ's become known
    let mut powers: Vec<Vec<ParamPoly>> = vec![vec![ParamPoly::zero(); jmax + 1]; jmax + 1];
    powers[0][0] = ParamPoly::constant(one.clone());

    for j in 1..=jmax {
        let mut conv = ParamPoly::zero();
        for i in 1..j {
            conv = &conv + &(&lambda[i] * &lambda[j - i]);
        }
        let mut lj = -&conv.scale(&half);
        if j == 1 {
            lj = &lj - &ParamPoly::constant(one.clone());
        } else {
            for s in 1..j {
                lj = &lj - &(&binom_n1[s] * &powers[s][j - 1]);
            }
        }
        lambda.push(lj);

        // column j of the B-powers uses λ_1..λ_j
        powers[1][j] = lambda[j].clone();
        for s in 2..=j {
            let mut acc = ParamPoly::zero();
            for i in 1..=(j + 1 - s) {
                acc = &acc + &(&lambda[i] * &powers[s - 1][j - i]);
            }
            powers[s][j] = acc;
        }
    }

    let mut kappa = vec![ParamPoly::constant(one.clone())];
    for j in 1..=jmax {
        let mut acc = ParamPoly::zero();
        for i in 0..=j {
            acc = &acc + &(&lambda[i] * &lambda[j - i]);
        }
        kappa.push(acc);
    }

    // T_π = (1/2h) d/dh ∫ h^2 u^2 dθ  =>  λ̃_j = κ_j (j(n-1) + 2) / 2
    let mut lambda_tilde = vec![ParamPoly::constant(one.clone())];
    for j in 1..=jmax {
        let jr = crate::int(j as i64);
        let factor = ParamPoly::linear(&jr * &half, (crate::int(2) - &jr) * &half);
        lambda_tilde.push(&kappa[j] * &factor);
    }

    // h^{i(n-1)} = r0^{i(n-1)} (1 + 2 a0 x)^{i(n-1)/2},  x = r0^{n-1}
    let mut q_table = vec![Vec::new()];
    for j in 1..=jmax {
        let mut row = vec![ParamPoly::zero()];
        for i in 1..=j {
            let k = j - i;
            let ir = crate::int(i as i64);
            let bin = ParamPoly::binomial(&(&ir * &half), &(-&ir * &half), k);
            let two_k = BigRational::from_integer(BigInt::from(2).pow(k as u32));
            row.push(&lambda_tilde[i] * &bin.scale(&two_k));
        }
        q_table.push(row);
    }

    CoefficientTable {
        jmax,
        lambda,
        kappa,
        lambda_tilde,
        q_table,
    }
}

/// Polynomial in the formal symbol `a`: map from `a`-power to coefficient.
type APoly = BTreeMap<usize, BigRational>;

fn apoly_add_assign(acc: &mut APoly, other: &APoly) {
    for (k, v) in other {
        let e = acc.entry(*k).or_insert_with(BigRational::zero);
        *e += v;
        if e.is_zero() {
            acc.remove(k);
        }
    }
}

fn apoly_mul(x: &APoly, y: &APoly) -> APoly {
    let mut out = APoly::new();
    for (i, a) in x {
        for (k, b) in y {
            let e = out.entry(i + k).or_insert_with(BigRational::zero);
            *e += a * b;
        }
    }
    out.retain(|_, v| !v.is_zero());
    out
}

fn apoly_scale(x: &APoly, s: &BigRational, shift: usize) -> APoly {
    x.iter()
        .filter(|_| !s.is_zero())
        .map(|(k, v)| (k + shift, v * s))
        .collect()
}

/// Coefficients `β_1..β_K`, `K = jmax (n-1)`, of `r = h (1 + Σ β_k h^k)`
/// solving `h^2 = r^2 + 2 a r^{n+1}` with `a` kept as a formal symbol.
///
/// The power `(1 + B)^{n+1}` is built by `n` plain series multiplications,
/// so no binomial weights enter.
fn raw_reversion(jmax: usize, n: u32) -> Vec<APoly> {
    assert!(n >= 2, "raw reversion needs n >= 2");
    let stride = (n - 1) as usize;
    let kmax = jmax * stride;
    let e_max = n as usize + 1;

    // beta[0] = 1 so that beta is the series of u = 1 + B
    let mut beta: Vec<APoly> = vec![APoly::from([(0, BigRational::one())])];
    // pw[e][q] = [h^q] u^e, for e = 1..=n+1
    let mut pw: Vec<Vec<APoly>> = vec![Vec::new(); e_max + 1];
    let push_column = |pw: &mut Vec<Vec<APoly>>, beta: &Vec<APoly>, q: usize| {
        pw[1].push(beta[q].clone());
        for e in 2..=e_max {
            let mut acc = APoly::new();
            for i in 0..=q {
                apoly_add_assign(&mut acc, &apoly_mul(&pw[e - 1][i], &beta[q - i]));
            }
            pw[e].push(acc);
        }
    };
    push_column(&mut pw, &beta, 0);

    let two = crate::int(2);
    let minus_half = crate::rat(-1, 2);
    for k in 1..=kmax {
        // [h^k]: 2 β_k + Σ_{0<i<k} β_i β_{k-i} + 2 a [h^{k-n+1}] u^{n+1} = 0
        let mut rest = APoly::new();
        for i in 1..k {
            apoly_add_assign(&mut rest, &apoly_mul(&beta[i], &beta[k - i]));
        }
        if k >= stride {
            apoly_add_assign(&mut rest, &apoly_scale(&pw[e_max][k - stride], &two, 1));
        }
        beta.push(apoly_scale(&rest, &minus_half, 0));
        push_column(&mut pw, &beta, k);
    }
    beta
}

/// Independent check of [`build_lambda_table`] for one integer `n >= 2`.
///
/// Returns `[β_{j(n-1)} / a^j]` for `j = 1..=jmax`. Fails if any coefficient
/// off the `(n-1)` grid is nonzero, or if a grid coefficient is not a pure
/// `a^j` monomial.
pub fn reversion_oracle(jmax: usize, n: u32) -> Result<Vec<BigRational>> {
    let beta = raw_reversion(jmax, n);
    let stride = (n - 1) as usize;
    let mut out = Vec::with_capacity(jmax);
    for (k, b) in beta.iter().enumerate().skip(1) {
        if k % stride != 0 {
            if !b.is_empty() {
                return Err(Error::SparsityViolation { n, exponent: k });
            }
            continue;
        }
        let j = k / stride;
        match b.len() {
            0 => out.push(BigRational::zero()),
            1 if b.contains_key(&j) => out.push(b[&j].clone()),
            _ => return Err(Error::SparsityViolation { n, exponent: k }),
        }
    }
    Ok(out)
}

/// True iff every reversion coefficient at an exponent not divisible by
/// `n - 1` vanishes exactly, through `h^{jmax (n-1)}`.
pub fn check_sparsity(jmax: usize, n: u32) -> bool {
    let stride = (n - 1) as usize;
    raw_reversion(jmax, n)
        .iter()
        .enumerate()
        .skip(1)
        .all(|(k, b)| k % stride == 0 || b.is_empty())
}
