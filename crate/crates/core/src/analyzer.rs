//! Orchestration of the period-function checks: witness search for
//! non-isochronicity, series against flow, monotonicity profiles and the
//! half-period identity.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::flow::{limit_period, FlowConfig};
use crate::periodlaw::{combined_period_series, first_obstruction, varying_part, PeriodSeries};
use crate::sysmodel::{annulus_for_poly, classify, CenterClass, PiecewiseSystem, Side};
use crate::trigmoments::{g_power_integral, HomogeneousPoly, TrigValue};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalyzerConfig {
    pub flow: FlowConfig,
    /// `|T(r0) - T(0)|` must exceed this for a witness.
    pub verdict_tol: f64,
    /// Reduced index used for obstruction search.
    pub jmax: usize,
    /// Series order (in powers of `r0`) for cross validation.
    pub order: u32,
    pub witness_budget: usize,
    /// Fraction of the axis limit that sampling may reach.
    pub annulus_fraction: f64,
}

impl Default for AnalyzerConfig {
    fn default() -> Self {
        Self {
            flow: FlowConfig::default(),
            verdict_tol: 1e-6,
            jmax: crate::seriescore::DEFAULT_JMAX,
            order: 8,
            witness_budget: 60,
            annulus_fraction: 0.8,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Witness {
    pub r0: f64,
    pub period: f64,
    /// `|T(r0) - T(0)|`
    pub deviation: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MonotonicityTag {
    Decreasing,
    IncreasingUnbounded,
    MinCritical,
    Constant,
    Undetermined,
}

impl MonotonicityTag {
    pub fn label(self) -> &'static str {
        match self {
            MonotonicityTag::Decreasing => "decreasing",
            MonotonicityTag::IncreasingUnbounded => "increasing_unbounded",
            MonotonicityTag::MinCritical => "min_critical",
            MonotonicityTag::Constant => "constant",
            MonotonicityTag::Undetermined => "undetermined",
        }
    }
}

/// Prediction from the sign pattern of `g` for a smooth system `r^2/2 + p`.
pub fn predicted_profile(p: &HomogeneousPoly) -> Result<Vec<MonotonicityTag>> {
    let d = p.degree();
    if d < 3 {
        return Err(Error::DegreeTooLow(d));
    }
    if p.is_zero() {
        return Ok(vec![MonotonicityTag::Constant]);
    }
    let n = d - 1;
    if n % 2 == 0 {
        return Ok(vec![MonotonicityTag::IncreasingUnbounded]);
    }
    let est = annulus_for_poly(p, Side::Upper)?;
    if est.is_bounded() {
        Ok(vec![MonotonicityTag::IncreasingUnbounded, MonotonicityTag::MinCritical])
    } else {
        Ok(vec![MonotonicityTag::Decreasing])
    }
}

/// `T(0) + Σ terms r0^e`: the series prediction of the piecewise period.
/// Linear sides enter only through the baseline.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodModel {
    pub baseline: f64,
    pub varying: PeriodSeries,
}

impl PeriodModel {
    pub fn new(sys: &PiecewiseSystem, order: u32) -> Result<Self> {
        Ok(Self {
            baseline: limit_period(sys),
            varying: varying_part(sys, order)?,
        })
    }

    pub fn eval(&self, r0: f64) -> f64 {
        self.baseline + self.varying.eval(r0)
    }
}

/// Largest axis radius that stays inside both annuli, scaled by `fraction`;
/// `None` when both sides are unbounded.
pub fn safe_radius(sys: &PiecewiseSystem, fraction: f64) -> Option<f64> {
    let mut lim: Option<f64> = None;
    for side in [Side::Upper, Side::Lower] {
        let p = sys.poly(side);
        if p.degree() < 3 {
            continue;
        }
        if let Ok(est) = annulus_for_poly(p, side) {
            if let Some(l) = est.r0_limit {
                lim = Some(lim.map_or(l, |v: f64| v.min(l)));
            }
        }
    }
    lim.map(|l| l * fraction)
}

fn require_center(sys: &PiecewiseSystem) -> Result<CenterClass> {
    let class = classify(sys);
    if class.is_center() {
        Ok(class)
    } else {
        Err(Error::NotACenter(class.reason().to_string()))
    }
}

impl AnalyzerConfig {
    /// Searches for `r0 <= r_max` with `|T(r0) - T(0)| > tol`.
    ///
    /// The search starts where the first obstruction `μ r0^e` predicts a
    /// deviation of `10 tol`, then grows geometrically; without an
    /// obstruction it sweeps a geometric grid up to `r_max`.
    pub fn find_witness(
        &self,
        sys: &PiecewiseSystem,
        tol: f64,
        r_max: f64,
        budget: usize,
    ) -> Result<Option<Witness>> {
        require_center(sys)?;
        let r_cap = safe_radius(sys, self.annulus_fraction).map_or(r_max, |s| s.min(r_max));
        let baseline = limit_period(sys);
        let guide = first_obstruction(sys, self.jmax)?;
        let start = match &guide {
            Some((e, mu)) => {
                let m = mu.to_f64().abs();
                (10.0 * tol / m).powf(1.0 / f64::from(*e)).min(r_cap)
            }
            None => r_cap * 1e-3,
        };
        let growth = if budget > 1 {
            (r_cap / start).powf(1.0 / (budget - 1) as f64).max(2f64.powf(0.25))
        } else {
            1.0
        };
        let mut r0 = start;
        for _ in 0..budget.max(1) {
            let period = self.flow.numeric_period(sys, r0)?;
            let deviation = (period - baseline).abs();
            if deviation > tol {
                return Ok(Some(Witness {
                    r0,
                    period,
                    deviation,
                }));
            }
            if r0 >= r_cap {
                break;
            }
            r0 = (r0 * growth).min(r_cap);
        }
        Ok(None)
    }

    /// `max |T_numeric(r0) - T_series(r0)|` over `grid`, series truncated at
    /// `r0^order`.
    pub fn cross_validate(&self, sys: &PiecewiseSystem, order: u32, grid: &[f64]) -> Result<f64> {
        require_center(sys)?;
        let model = PeriodModel::new(sys, order)?;
        let devs: Vec<f64> = grid
            .par_iter()
            .map(|&r0| Ok((self.flow.numeric_period(sys, r0)? - model.eval(r0)).abs()))
            .collect::<Result<_>>()?;
        Ok(devs.into_iter().fold(0.0, f64::max))
    }

    /// Tags the sampled whole-plane period of the side's smooth system.
    pub fn monotonicity_profile(
        &self,
        sys: &PiecewiseSystem,
        side: Side,
        grid: &[f64],
    ) -> Result<MonotonicityTag> {
        let p = sys.poly(side);
        if p.degree() < 3 {
            return Err(Error::DegreeTooLow(p.degree()));
        }
        if p.is_zero() {
            return Ok(MonotonicityTag::Constant);
        }
        let bounded = annulus_for_poly(p, side)?.is_bounded();
        let values: Vec<f64> = grid
            .par_iter()
            .map(|&r0| self.flow.quadrature_smooth_period(p, r0))
            .collect::<Result<_>>()?;
        Ok(tag_profile(&values, bounded))
    }

    /// Compares the numeric half period with half the smooth whole-plane
    /// period over `grid`, tolerance `1e-8`.
    pub fn half_equals_half_full_check(
        &self,
        sys: &PiecewiseSystem,
        side: Side,
        grid: &[f64],
    ) -> Result<bool> {
        let p = sys.poly(side);
        half_period_hypothesis(p, side, self.jmax)?;
        let ok = grid
            .par_iter()
            .map(|&r0| {
                let half = self.flow.half_orbit(sys, side, r0)?.time;
                let full = self.flow.smooth_period(p, r0)?;
                Ok((half - 0.5 * full).abs() <= 1e-8)
            })
            .collect::<Result<Vec<bool>>>()?;
        Ok(ok.into_iter().all(|b| b))
    }

    /// Ratio `(T(r0) - T(0)) / (μ r0^e)` for the obstruction `(e, μ)`.
    pub fn prediction_ratio(
        &self,
        sys: &PiecewiseSystem,
        obstruction: &(u32, TrigValue),
        r0: f64,
    ) -> Result<f64> {
        let (e, mu) = obstruction;
        let measured = self.flow.numeric_period(sys, r0)? - limit_period(sys);
        Ok(measured / (mu.to_f64() * r0.powi(*e as i32)))
    }
}

/// Checks the hypotheses of the half-period identity: odd exponent, or every
/// odd power of `g` integrating to zero over the side's half circle
/// (structurally when `g(π - θ) = -g(θ)`, otherwise exactly for powers up to
/// `2 jmax - 1`).
pub fn half_period_hypothesis(p: &HomogeneousPoly, side: Side, jmax: usize) -> Result<()> {
    let d = p.degree();
    if d % 2 == 0 || p.is_zero() || p.is_odd_in_x() {
        return Ok(());
    }
    for k in (1..2 * jmax).step_by(2) {
        let c = g_power_integral(p, k, side.range());
        if !c.is_zero() {
            return Err(Error::HypothesisNotMet {
                side,
                reason: format!("exponent even and ∫ g^{k} = {c} over the half circle"),
            });
        }
    }
    Ok(())
}

/// Reads a sampled profile: flat, monotone, or a single valley.
pub fn tag_profile(values: &[f64], bounded: bool) -> MonotonicityTag {
    if values.len() < 2 {
        return MonotonicityTag::Undetermined;
    }
    let scale = values.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let flat = 1e-11 * scale;
    let diffs: Vec<f64> = values.windows(2).map(|w| w[1] - w[0]).collect();
    if diffs.iter().all(|d| d.abs() <= flat) {
        return MonotonicityTag::Constant;
    }
    let signs: Vec<i32> = diffs
        .iter()
        .filter(|d| d.abs() > flat)
        .map(|d| if *d > 0.0 { 1 } else { -1 })
        .collect();
    let changes = signs.windows(2).filter(|w| w[0] != w[1]).count();
    match (changes, signs[0]) {
        (0, -1) => MonotonicityTag::Decreasing,
        (0, 1) if bounded => MonotonicityTag::IncreasingUnbounded,
        (1, -1) => MonotonicityTag::MinCritical,
        _ => MonotonicityTag::Undetermined,
    }
}

/// Geometric grid of `count` radii in `[lo, hi]`.
pub fn geometric_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count <= 1 {
        return vec![hi];
    }
    let q = (hi / lo).powf(1.0 / (count - 1) as f64);
    (0..count).map(|i| lo * q.powi(i as i32)).collect()
}

/// Grid for a monotonicity profile: up to 0.98 of the axis limit when the
/// annulus is bounded, up to `unbounded_max` otherwise.
pub fn profile_grid(p: &HomogeneousPoly, count: usize, unbounded_max: f64) -> Result<Vec<f64>> {
    let est = annulus_for_poly(p, Side::Upper)?;
    let hi = est.r0_limit.map_or(unbounded_max, |l| 0.98 * l);
    let lo = 0.02 * hi;
    Ok((0..count)
        .map(|i| lo + (hi - lo) * i as f64 / (count - 1).max(1) as f64)
        .collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisReport {
    pub classification: CenterClass,
    pub series: Option<PeriodSeries>,
    pub first_obstruction: Option<(u32, TrigValue)>,
    pub witness: Option<Witness>,
    pub monotonicity: Vec<(Side, MonotonicityTag)>,
    pub crosscheck: Option<f64>,
    /// `(r0, r1+ - r1-)` samples; filled for every verdict.
    pub gap_table: Vec<(f64, f64)>,
    pub limit_period: f64,
    pub summary: String,
    pub anomalies: Vec<String>,
}

/// Flag text for a Sigma-center whose measured period does not vary.
pub const LINEAR_PAIR_FLAG: &str = "n = m = 1: measured period is constant, so this Sigma-center \
     is isochronous; this is in tension with non-isochronicity for all n, m >= 1";

impl AnalyzerConfig {
    /// Full pipeline: classification, series, monotonicity, cross
    /// validation and witness search. `r_max` caps every radius used.
    pub fn analyze(&self, sys: &PiecewiseSystem, r_max: f64) -> Result<AnalysisReport> {
        let classification = classify(sys);
        let r_cap = safe_radius(sys, self.annulus_fraction).map_or(r_max, |s| s.min(r_max));
        let gap_grid = geometric_grid(r_cap * 0.05, r_cap, 5);
        let gap_table = gap_grid
            .par_iter()
            .map(|&r0| Ok((r0, self.flow.correspondence_gap(sys, r0)?)))
            .collect::<Result<Vec<_>>>()?;
        let baseline = limit_period(sys);
        let mut report = AnalysisReport {
            classification: classification.clone(),
            series: None,
            first_obstruction: None,
            witness: None,
            monotonicity: Vec::new(),
            crosscheck: None,
            gap_table,
            limit_period: baseline,
            summary: String::new(),
            anomalies: Vec::new(),
        };
        if !classification.is_center() {
            report.summary = format!("not a center: {}", classification.reason());
            return Ok(report);
        }

        let nonlinear = [Side::Upper, Side::Lower]
            .iter()
            .any(|&s| sys.poly(s).degree() >= 3 && !sys.poly(s).is_zero());
        let both_series = sys.upper().degree() >= 3 && sys.lower().degree() >= 3;
        if both_series {
            let jmax = (self.order / (sys.n().min(sys.m()) - 1)).max(1) as usize;
            report.series = Some(combined_period_series(sys, jmax)?);
        }
        report.first_obstruction = first_obstruction(sys, self.jmax)?;

        for side in [Side::Upper, Side::Lower] {
            let p = sys.poly(side);
            let tag = if p.degree() < 3 {
                MonotonicityTag::Constant
            } else {
                let grid = profile_grid(p, 24, 2.0)?;
                self.monotonicity_profile(sys, side, &grid)?
            };
            report.monotonicity.push((side, tag));
        }

        let cv_grid = geometric_grid(r_cap * 0.01, r_cap * 0.1, 4);
        report.crosscheck = Some(self.cross_validate(sys, self.order, &cv_grid)?);

        report.witness = self.find_witness(sys, self.verdict_tol, r_cap, self.witness_budget)?;

        let linear_pair = sys.upper().degree() == 2 && sys.lower().degree() == 2;
        let two_pi = 2.0 * std::f64::consts::PI;
        if !nonlinear {
            let constant = gap_grid_periods_constant(self, sys, r_cap)?;
            if linear_pair && (baseline - two_pi).abs() > self.verdict_tol {
                report.summary = format!("isochronous (linear sides), period {baseline:.17e}");
                report.anomalies.push(LINEAR_PAIR_FLAG.to_string());
            } else if linear_pair {
                report.summary = "isochronous (trivial linear)".to_string();
                report.anomalies.push(LINEAR_PAIR_FLAG.to_string());
            } else {
                report.summary = "isochronous (trivial linear)".to_string();
            }
            if !constant {
                report
                    .anomalies
                    .push("period of a system without nonlinearity varies with r0".to_string());
            }
            return Ok(report);
        }
        match (&report.witness, &report.first_obstruction) {
            (Some(w), _) => {
                report.summary = format!(
                    "not isochronous: |T - T(0)| = {:.3e} at r0 = {:.6e}",
                    w.deviation, w.r0
                );
            }
            (None, _) => {
                report.summary = "no witness found within budget".to_string();
                report.anomalies.push(format!(
                    "no non-isochronicity witness found up to r0 = {r_cap:.6e} with tol {:.1e}",
                    self.verdict_tol
                ));
            }
        }
        if report.first_obstruction.is_none() {
            report.anomalies.push(format!(
                "all period coefficients vanish through reduced index {}",
                self.jmax
            ));
        }
        Ok(report)
    }
}

fn gap_grid_periods_constant(cfg: &AnalyzerConfig, sys: &PiecewiseSystem, r_cap: f64) -> Result<bool> {
    let grid = geometric_grid(r_cap * 0.01, r_cap, 6);
    let periods = grid
        .par_iter()
        .map(|&r0| cfg.flow.numeric_period(sys, r0))
        .collect::<Result<Vec<f64>>>()?;
    let base = periods[0];
    Ok(periods.iter().all(|t| (t - base).abs() <= 1e-9))
}

pub fn find_witness(
    sys: &PiecewiseSystem,
    tol: f64,
    r_max: f64,
    budget: usize,
) -> Result<Option<Witness>> {
    AnalyzerConfig::default().find_witness(sys, tol, r_max, budget)
}

pub fn cross_validate(sys: &PiecewiseSystem, order: u32, grid: &[f64]) -> Result<f64> {
    AnalyzerConfig::default().cross_validate(sys, order, grid)
}

pub fn monotonicity_profile(
    sys: &PiecewiseSystem,
    side: Side,
    grid: &[f64],
) -> Result<MonotonicityTag> {
    AnalyzerConfig::default().monotonicity_profile(sys, side, grid)
}

pub fn half_equals_half_full_check(sys: &PiecewiseSystem, side: Side, grid: &[f64]) -> Result<bool> {
    AnalyzerConfig::default().half_equals_half_full_check(sys, side, grid)
}
