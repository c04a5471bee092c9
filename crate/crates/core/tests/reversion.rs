use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use pwcenter::int;
use pwcenter::seriescore::{build_lambda_table, check_sparsity, reversion_oracle};

fn mul_trunc(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let len = a.len();
    let mut out = vec![BigRational::zero(); len];
    for (i, x) in a.iter().enumerate() {
        for (k, y) in b.iter().enumerate().take(len - i) {
            out[i + k] += x * y;
        }
    }
    out
}

/// `u^2 + 2 ε u^{n+1} - 1` vanishes through `ε^jmax` once `λ_j(n)` is
/// substituted for a concrete `n`.
#[test]
fn lambda_series_solves_level_equation() {
    let jmax = 9;
    let table = build_lambda_table(jmax);
    for n in 2..=9i64 {
        let u: Vec<BigRational> = (0..=jmax).map(|j| table.lambda(j).eval_int(n)).collect();
        let u2 = mul_trunc(&u, &u);
        let mut un1 = u.clone();
        for _ in 0..n {
            un1 = mul_trunc(&un1, &u);
        }
        for k in 0..=jmax {
            let mut lhs = u2[k].clone();
            if k >= 1 {
                lhs += &un1[k - 1] * int(2);
            }
            let expect = if k == 0 { BigRational::one() } else { BigRational::zero() };
            assert_eq!(lhs, expect, "n = {n}, coefficient of ε^{k}");
        }
    }
}

#[test]
fn degree_and_leading_sign() {
    let table = build_lambda_table(10);
    for j in 1..=10 {
        let l = table.lambda(j);
        assert_eq!(l.degree(), Some(j - 1), "degree of λ_{j}");
        let lead = l.leading_coefficient();
        if j % 2 == 0 {
            assert!(lead.is_positive(), "λ_{j} leading {lead}");
        } else {
            assert!(lead.is_negative(), "λ_{j} leading {lead}");
        }
        let lt = table.lambda_tilde(j);
        assert_eq!(lt.degree(), Some(j));
        assert_eq!(lt.leading_coefficient(), lead * int(j as i64));
    }
}

#[test]
fn oracle_agrees_beyond_acceptance_range() {
    let table = build_lambda_table(6);
    for n in [9u32, 10, 12] {
        let oracle = reversion_oracle(6, n).unwrap();
        for j in 1..=6 {
            assert_eq!(oracle[j - 1], table.lambda(j).eval_int(i64::from(n)), "n = {n}, j = {j}");
        }
        assert!(check_sparsity(6, n));
    }
}

/// The summed series solves the level equation in floating point.
#[test]
fn lambda_series_converges_for_small_epsilon() {
    let table = build_lambda_table(12);
    let eps = 0.005f64;
    for n in 2..=5i64 {
        let mut u = 0.0;
        for j in (0..=12).rev() {
            let c = table.lambda(j).eval_int(n);
            u = u * eps + c.to_f64().unwrap();
        }
        let resid = u * u + 2.0 * eps * u.powi(n as i32 + 1) - 1.0;
        assert!(resid.abs() < 1e-14, "n = {n}: residual {resid}");
    }
}
