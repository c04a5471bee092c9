use proptest::prelude::*;

use pwcenter::trigmoments::{g_eval, g_power_integral, moment_sequence, trig_moment};
use pwcenter::{rat, HomogeneousPoly, Range};

fn numeric(f: impl Fn(f64) -> f64, range: Range) -> f64 {
    let (a, b) = range.bounds();
    quadrature::double_exponential::integrate(f, a, b, 1e-15).integral
}

fn range() -> impl Strategy<Value = Range> {
    prop_oneof![Just(Range::Full), Just(Range::Upper), Just(Range::Lower)]
}

proptest! {
    #![proptest_config(ProptestConfig { failure_persistence: None, ..ProptestConfig::with_cases(128) })]

    #[test]
    fn moment_matches_quadrature(a in 0u32..9, b in 0u32..9, r in range()) {
        let exact = trig_moment(a, b, r).to_f64();
        let num = numeric(|t| t.cos().powi(a as i32) * t.sin().powi(b as i32), r);
        prop_assert!((exact - num).abs() <= 1e-12, "a={a} b={b} {r:?}: {exact} vs {num}");
    }

    #[test]
    fn g_power_matches_quadrature(
        d in 2usize..6,
        raw in prop::collection::vec((-4i64..5, 1i64..4), 6),
        j in 1usize..5,
        r in range(),
    ) {
        let coeffs = raw[..=d].iter().map(|&(p, q)| rat(p, q)).collect();
        let p = HomogeneousPoly::new(d, coeffs).unwrap();
        let exact = g_power_integral(&p, j, r).to_f64();
        let num = numeric(|t| g_eval(&p, t).powi(j as i32), r);
        // |g| <= Σ|c_i|, so the integrand is bounded by that sum to the j
        let bound: f64 = p.coeffs().iter().map(|c| num_traits::ToPrimitive::to_f64(c).unwrap().abs()).sum();
        let scale = 1.0 + bound.powi(j as i32);
        prop_assert!((exact - num).abs() <= 1e-12 * scale, "{p} j={j} {r:?}: {exact} vs {num}");
        prop_assert_eq!(&moment_sequence(&p, j, r)[j], &g_power_integral(&p, j, r));
    }
}

#[test]
fn halves_add_to_full() {
    for a in 0..8 {
        for b in 0..8 {
            let full = trig_moment(a, b, Range::Full);
            let halves = trig_moment(a, b, Range::Upper) + trig_moment(a, b, Range::Lower);
            assert_eq!(full, halves, "a={a} b={b}");
        }
    }
}
