#![allow(dead_code)]

use num_rational::BigRational;
use num_traits::One;

use pwcenter::sysmodel::{CenterCase, PiecewiseSystem};
use pwcenter::{int, rat, HomogeneousPoly, ParamPoly, TrigValue};

/// Coefficient `i` multiplies `x^{d-i} y^i`; entries are `(num, den)`.
pub fn poly(d: usize, c: &[(i64, i64)]) -> HomogeneousPoly {
    HomogeneousPoly::new(d, c.iter().map(|&(p, q)| rat(p, q)).collect()).unwrap()
}

pub fn polyi(d: usize, c: &[i64]) -> HomogeneousPoly {
    HomogeneousPoly::from_ints(d, c).unwrap()
}

pub fn sys(upper: HomogeneousPoly, lower: HomogeneousPoly) -> PiecewiseSystem {
    PiecewiseSystem::new(upper, lower)
}

pub struct Entry {
    pub name: &'static str,
    pub sys: PiecewiseSystem,
    pub case: Option<CenterCase>,
}

fn entry(name: &'static str, sys: PiecewiseSystem, case: Option<CenterCase>) -> Entry {
    Entry { name, sys, case }
}

pub fn x2y_y3() -> PiecewiseSystem {
    sys(polyi(3, &[0, 1, 0, 0]), polyi(3, &[0, 0, 0, 1]))
}

/// `c1+ + c1- = 0`: obstruction moves to `r0^2`.
pub fn x2y_half_y3() -> PiecewiseSystem {
    sys(polyi(3, &[0, 1, 0, 0]), poly(3, &[(0, 1), (0, 1), (0, 1), (1, 2)]))
}

/// `n = 3`, `m = 2`, with `n - 1 = 2(m - 1)` and the `r0^2` terms cancelling.
pub fn resonant_pair() -> PiecewiseSystem {
    sys(poly(4, &[(1, 2), (0, 1), (0, 1), (0, 1), (0, 1)]), polyi(3, &[0, 0, 1, 0]))
}

pub fn linear_pair() -> PiecewiseSystem {
    sys(poly(2, &[(3, 2), (0, 1), (0, 1)]), polyi(2, &[0, 0, 0]))
}

pub fn centers() -> Vec<Entry> {
    use CenterCase::*;
    vec![
        entry("x^4 | -x^2y^2", sys(polyi(4, &[1, 0, 0, 0, 0]), polyi(4, &[0, 0, -1, 0, 0])), Some(I)),
        entry("x^2y^2 | -x^2y^2", sys(polyi(4, &[0, 0, 1, 0, 0]), polyi(4, &[0, 0, -1, 0, 0])), Some(I)),
        entry(
            "x^4 - x^3y/2 + y^4/3 | x^4",
            sys(poly(4, &[(1, 1), (-1, 2), (0, 1), (0, 1), (1, 3)]), polyi(4, &[1, 0, 0, 0, 0])),
            Some(I),
        ),
        entry("x^4 | x^2/2", sys(polyi(4, &[1, 0, 0, 0, 0]), poly(2, &[(1, 2), (0, 1), (0, 1)])), Some(I)),
        entry("3x^2/2 | 0", linear_pair(), Some(I)),
        entry("x^2y | x^4", sys(polyi(3, &[0, 1, 0, 0]), polyi(4, &[1, 0, 0, 0, 0])), Some(II)),
        entry("y^3 | x^2y^2", sys(polyi(3, &[0, 0, 0, 1]), polyi(4, &[0, 0, 1, 0, 0])), Some(II)),
        entry("x^2y | y^2/2", sys(polyi(3, &[0, 1, 0, 0]), poly(2, &[(0, 1), (0, 1), (1, 2)])), Some(II)),
        entry("x^2y^2 | x^2y", sys(polyi(4, &[0, 0, 1, 0, 0]), polyi(3, &[0, 1, 0, 0])), Some(III)),
        entry("x^4/2 | xy^2", resonant_pair(), Some(III)),
        entry("x^2y^3 | y^3", sys(polyi(5, &[0, 0, 0, 1, 0, 0]), polyi(3, &[0, 0, 0, 1])), Some(IV)),
        entry("x^2y | xy^4", sys(polyi(3, &[0, 1, 0, 0]), polyi(5, &[0, 0, 0, 0, 1, 0])), Some(IV)),
        entry("x^2y | y^3", x2y_y3(), Some(V)),
        entry("x^2y | y^3/2", x2y_half_y3(), Some(V)),
        entry(
            "x^3/2 + y^3 | x^3/2 - xy^2",
            sys(poly(3, &[(1, 2), (0, 1), (0, 1), (1, 1)]), poly(3, &[(1, 2), (0, 1), (-1, 1), (0, 1)])),
            Some(V),
        ),
        entry("0 | 0", sys(polyi(3, &[0; 4]), polyi(3, &[0; 4])), Some(V)),
        entry(
            "x^5/3 + x^2y^3 | x^5/3 - y^5",
            sys(
                poly(5, &[(1, 3), (0, 1), (0, 1), (1, 1), (0, 1), (0, 1)]),
                poly(5, &[(1, 3), (0, 1), (0, 1), (0, 1), (0, 1), (-1, 1)]),
            ),
            Some(V),
        ),
    ]
}

/// Non-centers whose half orbits still return to the axis.
pub fn non_centers() -> Vec<Entry> {
    vec![
        entry("x^3 | y^3", sys(polyi(3, &[1, 0, 0, 0]), polyi(3, &[0, 0, 0, 1])), None),
        entry("x^3 + x^2y | x^4", sys(polyi(3, &[1, 1, 0, 0]), polyi(4, &[1, 0, 0, 0, 0])), None),
        entry("x^2y^2 | x^3 - y^3", sys(polyi(4, &[0, 0, 1, 0, 0]), polyi(3, &[1, 0, 0, -1])), None),
        entry("x^2y^3 | x^3/2", sys(polyi(5, &[0, 0, 0, 1, 0, 0]), poly(3, &[(1, 2), (0, 1), (0, 1), (0, 1)])), None),
        entry("x^5/2 | -x^5/2", sys(poly(5, &[(1, 2), (0, 1), (0, 1), (0, 1), (0, 1), (0, 1)]), poly(5, &[(-1, 2), (0, 1), (0, 1), (0, 1), (0, 1), (0, 1)])), None),
        entry("x^3 | x^2/2", sys(polyi(3, &[1, 0, 0, 0]), poly(2, &[(1, 2), (0, 1), (0, 1)])), None),
    ]
}

/// Linear saddle on the lower side: rejected before any flow is run.
pub fn saddle() -> PiecewiseSystem {
    sys(polyi(4, &[1, 0, 0, 0, 0]), polyi(2, &[-1, 0, 0]))
}

fn pp(c: &[(i64, i64)]) -> ParamPoly {
    ParamPoly::from_ratios(c)
}

fn prod(factors: &[ParamPoly]) -> ParamPoly {
    factors.iter().fold(pp(&[(1, 1)]), |acc, f| &acc * f)
}

/// `q_{j,i}(n)` in closed form, `1 <= i <= j <= 4`.
pub fn closed_form_q(j: usize, i: usize) -> ParamPoly {
    let n1 = pp(&[(1, 1), (1, 1)]); // n + 1
    let nm1 = pp(&[(-1, 1), (1, 1)]); // n - 1
    let n = pp(&[(0, 1), (1, 1)]);
    match (j, i) {
        (1, 1) => -&n1,
        (2, 2) => prod(&[n1, pp(&[(0, 1), (2, 1)])]),
        (2, 1) => -&prod(&[n1, nm1]),
        (3, 3) => prod(&[n1, pp(&[(1, 2), (0, 1), (-9, 2)])]),
        (3, 2) => prod(&[n1, pp(&[(0, 1), (-4, 1), (4, 1)])]),
        (3, 1) => prod(&[n1, pp(&[(-3, 2), (2, 1), (-1, 2)])]),
        (4, 4) => prod(&[n1, n, pp(&[(-8, 3), (0, 1), (32, 3)])]),
        (4, 3) => prod(&[n1, nm1, pp(&[(3, 2), (0, 1), (-27, 2)])]),
        (4, 2) => prod(&[n1, n, nm1, pp(&[(-8, 1), (4, 1)])]),
        (4, 1) => prod(&[n1, nm1, pp(&[(-5, 2), (4, 3), (-1, 6)])]),
        _ => unreachable!(),
    }
}

pub fn closed_form_mu(n: u32, a0: &BigRational, c: &[TrigValue], j: usize) -> TrigValue {
    let nr = int(i64::from(n));
    let mut acc = TrigValue::zero();
    let mut a_pow = BigRational::one();
    for i in (1..=j).rev() {
        acc += &c[i].scale(&(closed_form_q(j, i).eval(&nr) * &a_pow));
        a_pow *= a0;
    }
    acc
}

