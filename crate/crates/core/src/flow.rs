//! Numerical dynamics of the two half systems.
//!
//! Half orbits are integrated with the Dormand–Prince 5(4) embedded pair and
//! the return to the switching line is located by root finding on the step
//! length itself, so the event state carries the full order of the method.
//! [`quadrature_period`] recomputes the same half period from
//! `∫ dθ / (1 + d g(θ) r(θ)^{d-2})` and is used as an independent check.

use std::cell::Cell;
use std::f64::consts::PI;

use roots::{find_root_brent, Convergency};

use crate::error::{Error, Result};
use crate::sysmodel::{annulus_for_poly, classify, side_field, PiecewiseSystem, Side};
use crate::trigmoments::{g_eval, ratio_to_f64, HomogeneousPoly};

// Dormand–Prince 5(4) tableau; the field is autonomous so the nodes c_i are unused
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// b - b*, the embedded error weights
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

type State = [f64; 2];

/// Integrator and event settings shared by every flow routine.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlowConfig {
    pub rtol: f64,
    /// Absolute tolerance relative to the start radius.
    pub atol_scale: f64,
    /// Event accuracy `|y| <= event_tol * scale`.
    pub event_tol: f64,
    pub max_time: f64,
    pub max_steps: usize,
    /// Relative energy drift above which a result is marked degraded.
    pub drift_bound: f64,
    /// Absolute target for the θ-quadrature.
    pub quad_tol: f64,
}

impl Default for FlowConfig {
    fn default() -> Self {
        Self {
            rtol: 1e-12,
            atol_scale: 1e-13,
            event_tol: 1e-13,
            max_time: 1e4,
            max_steps: 2_000_000,
            drift_bound: 1e-10,
            quad_tol: 1e-14,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HalfOrbitResult {
    /// Radius at the crossing of the opposite half axis.
    pub r_end: f64,
    /// Duration of the half orbit (always positive).
    pub time: f64,
    /// `max |H - H0| / |H0|` over accepted steps.
    pub energy_drift: f64,
    pub steps: usize,
    pub degraded: bool,
}

struct Dopri<F> {
    field: F,
    rtol: f64,
    atol: f64,
}

struct StepOut {
    z: State,
    err: f64,
}

impl<F: Fn(f64, f64) -> (f64, f64)> Dopri<F> {
    fn eval(&self, z: &State) -> State {
        let (a, b) = (self.field)(z[0], z[1]);
        [a, b]
    }

    fn step(&self, z: &State, k1: &State, h: f64) -> StepOut {
        let comb = |terms: &[(f64, &State)]| -> State {
            let mut out = *z;
            for (w, k) in terms {
                out[0] += h * w * k[0];
                out[1] += h * w * k[1];
            }
            out
        };
        let k2 = self.eval(&comb(&[(A21, k1)]));
        let k3 = self.eval(&comb(&[(A31, k1), (A32, &k2)]));
        let k4 = self.eval(&comb(&[(A41, k1), (A42, &k2), (A43, &k3)]));
        let k5 = self.eval(&comb(&[(A51, k1), (A52, &k2), (A53, &k3), (A54, &k4)]));
        let k6 = self.eval(&comb(&[
            (A61, k1),
            (A62, &k2),
            (A63, &k3),
            (A64, &k4),
            (A65, &k5),
        ]));
        let z5 = comb(&[(B1, k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)]);
        let k7 = self.eval(&z5);
        let mut err = 0.0;
        for i in 0..2 {
            let e = h
                * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
            let sc = self.atol + self.rtol * z[i].abs().max(z5[i].abs());
            err += (e / sc) * (e / sc);
        }
        StepOut {
            z: z5,
            err: (err / 2.0).sqrt(),
        }
    }
}

/// Accepts a bracketed event as soon as `|y|` is below the event tolerance.
struct EventConvergency {
    y_tol: f64,
    s_tol: f64,
    max_iter: usize,
}

impl Convergency<f64> for EventConvergency {
    fn is_root_found(&mut self, y: f64) -> bool {
        y.abs() <= self.y_tol
    }
    fn is_converged(&mut self, a: f64, b: f64) -> bool {
        (a - b).abs() <= self.s_tol
    }
    fn is_iteration_limit_reached(&mut self, iter: usize) -> bool {
        iter >= self.max_iter
    }
}

struct AxisCrossing {
    x_end: f64,
    time: f64,
    drift: f64,
    steps: usize,
}

impl FlowConfig {
    /// Integrates the smooth field of `r^2/2 + p` (negated when `backward`)
    /// from `(x0, 0)` until the orbit returns to `y = 0` on the opposite
    /// half axis. `entry_sign` is the sign of `y` expected right after
    /// leaving the axis.
    fn trace_to_axis(
        &self,
        p: &HomogeneousPoly,
        side: Side,
        x0: f64,
        backward: bool,
        entry_sign: f64,
    ) -> Result<AxisCrossing> {
        let dir = if backward { -1.0 } else { 1.0 };
        let field = |x: f64, y: f64| {
            let (a, b) = side_field(p, x, y);
            (dir * a, dir * b)
        };
        let scale = x0.abs();
        let solver = Dopri {
            field,
            rtol: self.rtol,
            atol: self.atol_scale * scale,
        };
        let energy = |z: &State| 0.5 * (z[0] * z[0] + z[1] * z[1]) + p.eval(z[0], z[1]);
        let h0 = energy(&[x0, 0.0]);

        let mut z: State = [x0, 0.0];
        let mut k1 = solver.eval(&z);
        if k1[1] * entry_sign <= 0.0 {
            return Err(Error::OutsideAnnulus {
                side,
                r0: scale,
                limit: f64::NAN,
            });
        }
        let mut t = 0.0;
        let mut h = 1e-3 * (1.0f64).min(1.0 / (k1[0].hypot(k1[1]) / scale.max(1e-300)));
        let mut drift: f64 = 0.0;
        let mut steps = 0usize;
        let min_step = 1e-14 * scale.max(1e-300);

        loop {
            if t > self.max_time || steps > self.max_steps {
                return Err(Error::EscapedAnnulus {
                    side,
                    r0: scale,
                    time: t,
                });
            }
            let out = solver.step(&z, &k1, h);
            if !out.err.is_finite() {
                h *= 0.2;
                if h < min_step {
                    return Err(Error::StepFailure { t, step: h });
                }
                continue;
            }
            if out.err > 1.0 {
                h *= (0.9 * out.err.powf(-0.2)).max(0.2);
                if h < min_step {
                    return Err(Error::StepFailure { t, step: h });
                }
                continue;
            }
            steps += 1;
            let crossed = steps > 1 && out.z[1] * entry_sign <= 0.0
                || steps == 1 && out.z[1] * entry_sign < 0.0;
            if crossed {
                let sigma = self.locate_event(&solver, &z, &k1, h, entry_sign, scale)?;
                let zf = solver.step(&z, &k1, sigma).z;
                drift = drift.max(((energy(&zf) - h0) / h0).abs());
                if zf[0] * x0 >= 0.0 {
                    return Err(Error::EscapedAnnulus {
                        side,
                        r0: scale,
                        time: t + sigma,
                    });
                }
                return Ok(AxisCrossing {
                    x_end: zf[0],
                    time: t + sigma,
                    drift,
                    steps,
                });
            }
            t += h;
            z = out.z;
            k1 = solver.eval(&z);
            drift = drift.max(((energy(&z) - h0) / h0).abs());
            let fac = if out.err == 0.0 {
                5.0
            } else {
                (0.9 * out.err.powf(-0.2)).clamp(0.2, 5.0)
            };
            h *= fac;
        }
    }

    /// Finds `σ ∈ (0, h]` with `y(step(σ)) = 0` by Brent's method on the
    /// step length, each evaluation being a fresh step from the step start.
    fn locate_event<F: Fn(f64, f64) -> (f64, f64)>(
        &self,
        solver: &Dopri<F>,
        z: &State,
        k1: &State,
        h: f64,
        entry_sign: f64,
        scale: f64,
    ) -> Result<f64> {
        let phi = |s: f64| {
            if s == 0.0 {
                z[1] * entry_sign
            } else {
                solver.step(z, k1, s).z[1] * entry_sign
            }
        };
        let end = phi(h);
        if end.abs() <= self.event_tol * scale {
            return Ok(h);
        }
        let mut conv = EventConvergency {
            y_tol: self.event_tol * scale,
            s_tol: 1e-16 * h,
            max_iter: 200,
        };
        // start strictly inside the half plane when leaving the axis
        let lo = if z[1] == 0.0 { 1e-6 * h } else { 0.0 };
        find_root_brent(lo, h, phi, &mut conv).map_err(|_| Error::StepFailure { t: f64::NAN, step: h })
    }

    /// Half orbit of `side` from the axis point `(r_start, 0)`.
    ///
    /// Upper: forward in time through `y > 0`. Lower: the orbit of `X-`
    /// through `y < 0` that ends at `(r_start, 0)`, traced backward.
    pub fn half_orbit(
        &self,
        sys: &PiecewiseSystem,
        side: Side,
        r_start: f64,
    ) -> Result<HalfOrbitResult> {
        self.half_orbit_poly(sys.poly(side), side, r_start)
    }

    pub fn half_orbit_poly(
        &self,
        p: &HomogeneousPoly,
        side: Side,
        r_start: f64,
    ) -> Result<HalfOrbitResult> {
        check_annulus(p, side, r_start)?;
        let (backward, entry) = match side {
            Side::Upper => (false, 1.0),
            Side::Lower => (true, -1.0),
        };
        let c = self.trace_to_axis(p, side, r_start, backward, entry)?;
        Ok(HalfOrbitResult {
            r_end: -c.x_end,
            time: c.time,
            energy_drift: c.drift,
            steps: c.steps,
            degraded: c.drift > self.drift_bound,
        })
    }

    /// Integrates the upper field backward from `(-r1, 0)` and returns the
    /// radius where it meets the positive axis.
    pub fn reverse_upper(&self, sys: &PiecewiseSystem, r1: f64) -> Result<f64> {
        let c = self.trace_to_axis(sys.upper(), Side::Upper, -r1, true, 1.0)?;
        Ok(c.x_end)
    }

    pub fn correspondence_gap(&self, sys: &PiecewiseSystem, r0: f64) -> Result<f64> {
        let up = self.half_orbit(sys, Side::Upper, r0)?;
        let lo = self.half_orbit(sys, Side::Lower, r0)?;
        Ok(up.r_end - lo.r_end)
    }

    /// Period of the closed orbit through `(r0, 0)`: upper plus lower
    /// half-orbit times.
    pub fn numeric_period(&self, sys: &PiecewiseSystem, r0: f64) -> Result<f64> {
        let class = classify(sys);
        if !class.is_center() {
            return Err(Error::NotACenter(class.reason().to_string()));
        }
        let up = self.half_orbit(sys, Side::Upper, r0)?;
        let lo = self.half_orbit(sys, Side::Lower, r0)?;
        Ok(up.time + lo.time)
    }

    /// Whole-plane period of the smooth system `r^2/2 + p` through `(r0, 0)`.
    pub fn smooth_period(&self, p: &HomogeneousPoly, r0: f64) -> Result<f64> {
        let up = self.half_orbit_poly(p, Side::Upper, r0)?;
        let lo = self.half_orbit_poly(p, Side::Lower, r0)?;
        Ok(up.time + lo.time)
    }

    /// `∫ dθ / (1 + d g(θ) r(θ)^{d-2})` over the side's half circle, with
    /// `r(θ)` solved from the level equation at every node.
    pub fn quadrature_period(&self, sys: &PiecewiseSystem, side: Side, r0: f64) -> Result<f64> {
        self.quadrature_poly(sys.poly(side), side, side.range().bounds(), r0)
    }

    /// Whole-circle version of [`FlowConfig::quadrature_period`] for the smooth
    /// system `r^2/2 + p`.
    pub fn quadrature_smooth_period(&self, p: &HomogeneousPoly, r0: f64) -> Result<f64> {
        self.quadrature_poly(p, Side::Upper, (0.0, 2.0 * PI), r0)
    }

    fn quadrature_poly(
        &self,
        p: &HomogeneousPoly,
        side: Side,
        (a, b): (f64, f64),
        r0: f64,
    ) -> Result<f64> {
        if p.is_zero() {
            return Ok(b - a);
        }
        check_annulus(p, side, r0)?;
        let d = p.degree() as i32;
        let a0 = ratio_to_f64(p.axis_value());
        let h2 = r0 * r0 + 2.0 * a0 * r0.powi(d);
        let failed = Cell::new(None);
        let integrand = |theta: f64| {
            let g = g_eval(p, theta);
            if d == 2 {
                return 1.0 / (1.0 + 2.0 * g);
            }
            match level_radius(g, d, h2) {
                Some(r) => 1.0 / (1.0 + f64::from(d) * g * r.powi(d - 2)),
                None => {
                    failed.set(Some(theta));
                    f64::NAN
                }
            }
        };
        let out = quadrature::double_exponential::integrate(integrand, a, b, self.quad_tol);
        if let Some(theta) = failed.get() {
            return Err(Error::RootBracketFailure { theta });
        }
        Ok(out.integral)
    }

    /// Checks `dh/dr0 = (r0 + d a0 r0^{d-1}) / h > 0` across `grid`.
    pub fn h_monotonicity_check(
        &self,
        sys: &PiecewiseSystem,
        side: Side,
        grid: &[f64],
    ) -> HMonotonicity {
        let p = sys.poly(side);
        let d = p.degree() as i32;
        let a0 = ratio_to_f64(p.axis_value());
        for &r0 in grid {
            let h2 = r0 * r0 + 2.0 * a0 * r0.powi(d);
            let num = r0 + f64::from(d) * a0 * r0.powi(d - 1);
            if h2 <= 0.0 || num / h2.sqrt() <= 0.0 {
                return HMonotonicity {
                    holds: false,
                    first_failure: Some(r0),
                };
            }
        }
        HMonotonicity {
            holds: true,
            first_failure: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HMonotonicity {
    pub holds: bool,
    pub first_failure: Option<f64>,
}

fn check_annulus(p: &HomogeneousPoly, side: Side, r0: f64) -> Result<()> {
    if !(r0 > 0.0 && r0.is_finite()) {
        return Err(Error::OutsideAnnulus {
            side,
            r0,
            limit: f64::NAN,
        });
    }
    if p.degree() < 3 {
        return Ok(());
    }
    let est = annulus_for_poly(p, side)?;
    match est.r0_limit {
        Some(limit) if r0 >= limit => Err(Error::OutsideAnnulus { side, r0, limit }),
        _ => Ok(()),
    }
}

struct RelConvergency {
    y_tol: f64,
    x_tol: f64,
}

impl Convergency<f64> for RelConvergency {
    fn is_root_found(&mut self, y: f64) -> bool {
        y.abs() <= self.y_tol
    }
    fn is_converged(&mut self, a: f64, b: f64) -> bool {
        (a - b).abs() <= self.x_tol
    }
    fn is_iteration_limit_reached(&mut self, iter: usize) -> bool {
        iter >= 200
    }
}

/// Root of `r^2 + 2 g r^d = h2` on the branch through the origin.
fn level_radius(g: f64, d: i32, h2: f64) -> Option<f64> {
    let h = h2.sqrt();
    let f = |r: f64| r * r + 2.0 * g * r.powi(d) - h2;
    let (lo, hi) = if g >= 0.0 {
        (0.0, h)
    } else {
        let r_turn = (-1.0 / (f64::from(d) * g)).powf(1.0 / f64::from(d - 2));
        if f(r_turn) < 0.0 {
            return None;
        }
        (h, r_turn)
    };
    // f(h) = 2 g h^d exactly; a wrong sign there is rounding and the root is h
    let fh = f(h);
    if fh == 0.0 || (g >= 0.0) != (fh > 0.0) {
        return Some(h);
    }
    if f(hi) == 0.0 {
        return Some(hi);
    }
    let mut conv = RelConvergency {
        y_tol: 0.0,
        x_tol: 2.0 * f64::EPSILON * hi,
    };
    find_root_brent(lo, hi, f, &mut conv).ok()
}

pub fn half_orbit(sys: &PiecewiseSystem, side: Side, r_start: f64) -> Result<HalfOrbitResult> {
    FlowConfig::default().half_orbit(sys, side, r_start)
}

pub fn correspondence_gap(sys: &PiecewiseSystem, r0: f64) -> Result<f64> {
    FlowConfig::default().correspondence_gap(sys, r0)
}

pub fn numeric_period(sys: &PiecewiseSystem, r0: f64) -> Result<f64> {
    FlowConfig::default().numeric_period(sys, r0)
}

pub fn quadrature_period(sys: &PiecewiseSystem, side: Side, r0: f64) -> Result<f64> {
    FlowConfig::default().quadrature_period(sys, side, r0)
}

pub fn h_monotonicity_check(sys: &PiecewiseSystem, side: Side, grid: &[f64]) -> HMonotonicity {
    FlowConfig::default().h_monotonicity_check(sys, side, grid)
}

/// Half period of a degree-2 side, `π / sqrt(det A)` for the quadratic form
/// `A` of `r^2/2 + p`; `None` for higher degrees.
pub fn linear_half_period(p: &HomogeneousPoly) -> Option<f64> {
    if p.degree() != 2 {
        return None;
    }
    let c: Vec<f64> = p.coeffs().iter().map(ratio_to_f64).collect();
    let det = (1.0 + 2.0 * c[0]) * (1.0 + 2.0 * c[2]) - c[1] * c[1];
    Some(PI / det.sqrt())
}

/// `lim_{r0 → 0} T(r0)`: `π` per side of degree >= 3, the linear value
/// otherwise.
pub fn limit_period(sys: &PiecewiseSystem) -> f64 {
    [Side::Upper, Side::Lower]
        .iter()
        .map(|&s| linear_half_period(sys.poly(s)).unwrap_or(PI))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{int, rat};

    fn poly(d: usize, c: &[i64]) -> HomogeneousPoly {
        HomogeneousPoly::from_ints(d, c).unwrap()
    }

    #[test]
    fn circular_orbit() {
        let z = PiecewiseSystem::smooth(poly(3, &[0; 4]));
        let r = half_orbit(&z, Side::Upper, 0.3).unwrap();
        assert!((r.r_end - 0.3).abs() < 1e-12);
        assert!((r.time - PI).abs() < 1e-10);
        let r = half_orbit(&z, Side::Lower, 0.3).unwrap();
        assert!((r.time - PI).abs() < 1e-10);
        assert!(correspondence_gap(&z, 0.3).unwrap().abs() < 1e-12);
    }

    #[test]
    fn x2y_returns_to_same_radius() {
        let s = PiecewiseSystem::smooth(poly(3, &[0, 1, 0, 0]));
        for r in [0.05, 0.1, 0.2] {
            let o = half_orbit(&s, Side::Upper, r).unwrap();
            assert!((o.r_end - r).abs() < 1e-10, "{r}: {}", o.r_end);
        }
    }

    #[test]
    fn cubic_axis_energy_match() {
        let s = PiecewiseSystem::smooth(poly(3, &[1, 0, 0, 0]));
        let o = half_orbit(&s, Side::Upper, 0.1).unwrap();
        // r^2/2 - r^3 = 0.005 + 0.001
        let f = |r: f64| r * r / 2.0 - r * r * r - 0.006;
        let mut lo = 0.05;
        let mut hi = 0.3;
        for _ in 0..200 {
            let m = 0.5 * (lo + hi);
            if f(m) < 0.0 {
                lo = m
            } else {
                hi = m
            }
        }
        assert!((o.r_end - lo).abs() < 1e-10, "{} vs {lo}", o.r_end);
        assert!(o.energy_drift <= 1e-10);
    }

    #[test]
    fn quadrature_zero_side_is_pi() {
        let z = PiecewiseSystem::smooth(poly(3, &[0; 4]));
        assert_eq!(quadrature_period(&z, Side::Upper, 0.4).unwrap(), PI);
    }

    #[test]
    fn linear_pair_closed_form() {
        let up = HomogeneousPoly::new(2, vec![rat(3, 2), int(0), int(0)]).unwrap();
        let sys = PiecewiseSystem::new(up, poly(2, &[0, 0, 0]));
        let t = numeric_period(&sys, 0.2).unwrap();
        assert!((t - 1.5 * PI).abs() < 1e-9);
        assert!((limit_period(&sys) - 1.5 * PI).abs() < 1e-15);
        let q = quadrature_period(&sys, Side::Upper, 0.2).unwrap();
        assert!((q - 0.5 * PI).abs() < 1e-12);
    }

    #[test]
    fn h_monotonicity_examples() {
        let s = PiecewiseSystem::smooth(poly(3, &[0, 1, 0, 0]));
        assert!(h_monotonicity_check(&s, Side::Upper, &[0.1, 0.5, 2.0]).holds);
        let s = PiecewiseSystem::smooth(poly(3, &[-1, 0, 0, 0]));
        let chk = h_monotonicity_check(&s, Side::Upper, &[0.1, 0.2, 0.3, 0.34, 0.4]);
        assert!(!chk.holds);
        assert_eq!(chk.first_failure, Some(0.34));
    }

    #[test]
    fn outside_annulus_is_rejected() {
        let s = PiecewiseSystem::smooth(poly(3, &[0, 0, 0, 1]));
        assert!(matches!(
            half_orbit(&s, Side::Lower, 0.5),
            Err(Error::OutsideAnnulus { .. })
        ));
    }
}
