use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::analyzer::{safe_radius, AnalysisReport, AnalyzerConfig, PeriodModel};
use crate::error::{Error, Result};
use crate::sysmodel::PiecewiseSystem;

use super::spec::SpecOptions;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunOptions {
    pub order: u32,
    pub r_max: f64,
    pub samples: usize,
    pub tol: f64,
    pub seed: u64,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            order: 8,
            r_max: 0.2,
            samples: 64,
            tol: 1e-6,
            seed: 0,
        }
    }
}

impl RunOptions {
    /// Fills unset fields of `spec` from `self`.
    pub fn merged(self, spec: &SpecOptions) -> Self {
        Self {
            order: spec.order.unwrap_or(self.order),
            r_max: spec.r_max.unwrap_or(self.r_max),
            samples: spec.samples.unwrap_or(self.samples),
            tol: spec.tol.unwrap_or(self.tol),
            seed: spec.seed.unwrap_or(self.seed),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CsvRow {
    pub r0: f64,
    pub t_numeric: f64,
    pub t_series: f64,
    pub deviation: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub report: AnalysisReport,
    /// Empty for non-centers.
    pub rows: Vec<CsvRow>,
}

pub const CSV_HEADER: &str = "r0,T_numeric,T_series,deviation";

/// Jittered stratified radii in `(0, cap]`, one per stratum, ascending.
pub fn sample_grid(sys: &PiecewiseSystem, options: &RunOptions) -> Vec<f64> {
    let cap = safe_radius(sys, 0.8).map_or(options.r_max, |s| s.min(options.r_max));
    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    let n = options.samples.max(1);
    (0..n)
        .map(|i| {
            let u: f64 = 1.0 - rng.gen::<f64>();
            cap * (i as f64 + u) / n as f64
        })
        .collect()
}

pub fn analyzer_config(options: &RunOptions) -> AnalyzerConfig {
    AnalyzerConfig {
        verdict_tol: options.tol,
        order: options.order,
        ..AnalyzerConfig::default()
    }
}

pub fn run_report(sys: &PiecewiseSystem, options: &RunOptions) -> Result<RunOutput> {
    let cfg = analyzer_config(options);
    let report = cfg.analyze(sys, options.r_max)?;
    if !report.classification.is_center() {
        return Ok(RunOutput {
            report,
            rows: Vec::new(),
        });
    }
    let model = PeriodModel::new(sys, options.order)?;
    let rows = sample_grid(sys, options)
        .par_iter()
        .map(|&r0| {
            let t_numeric = cfg.flow.numeric_period(sys, r0)?;
            let t_series = model.eval(r0);
            Ok(CsvRow {
                r0,
                t_numeric,
                t_series,
                deviation: (t_numeric - t_series).abs(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(RunOutput { report, rows })
}

pub fn render_csv(rows: &[CsvRow], timestamp: Option<&str>) -> String {
    let mut out = String::new();
    if let Some(ts) = timestamp {
        let _ = writeln!(out, "# generated {ts}");
    }
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{:.16e},{:.16e},{:.16e},{:.16e}",
            r.r0, r.t_numeric, r.t_series, r.deviation
        );
    }
    out
}

pub fn render_report(sys: &PiecewiseSystem, options: &RunOptions, report: &AnalysisReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "system");
    let _ = writeln!(s, "  H+ = (x^2+y^2)/2 + {}", sys.upper());
    let _ = writeln!(s, "  H- = (x^2+y^2)/2 + {}", sys.lower());
    let _ = writeln!(
        s,
        "options: order = {}, rmax = {:.16e}, samples = {}, tol = {:.16e}, seed = {}",
        options.order, options.r_max, options.samples, options.tol, options.seed
    );
    let _ = writeln!(s, "classification: {}", report.classification);
    let _ = writeln!(s, "summary: {}", report.summary);
    if !report.classification.is_center() {
        let _ = writeln!(s, "correspondence gap r1+ - r1-");
        let _ = writeln!(s, "  {:>24} {:>24}", "r0", "gap");
        for (r0, gap) in &report.gap_table {
            let _ = writeln!(s, "  {r0:>24.16e} {gap:>24.16e}");
        }
        return s;
    }
    let _ = writeln!(s, "limit period T(0) = {:.16e}", report.limit_period);
    if let Some(series) = &report.series {
        let _ = writeln!(s, "combined series T(r0) = {series}");
    }
    match &report.first_obstruction {
        Some((e, mu)) => {
            let _ = writeln!(s, "first obstruction: r0^{e} coefficient {mu}");
        }
        None => {
            let _ = writeln!(s, "first obstruction: none found");
        }
    }
    match &report.witness {
        Some(w) => {
            let _ = writeln!(
                s,
                "witness: r0 = {:.16e}, T = {:.16e}, |T - T(0)| = {:.16e}",
                w.r0, w.period, w.deviation
            );
        }
        None => {
            let _ = writeln!(s, "witness: none");
        }
    }
    for (side, tag) in &report.monotonicity {
        let _ = writeln!(s, "monotonicity {}: {}", side.label(), tag.label());
    }
    if let Some(dev) = report.crosscheck {
        let _ = writeln!(s, "series crosscheck max deviation: {dev:.16e}");
    }
    for a in &report.anomalies {
        let _ = writeln!(s, "ANOMALY: {a}");
    }
    s
}

/// One-line advice printed beside an error.
pub fn remediation(err: &Error) -> &'static str {
    match err {
        Error::Parse { .. } | Error::DegreeMismatch { .. } | Error::InvalidDegree(_) => {
            "fix the specification file; coefficient lists need degree + 1 entries"
        }
        Error::OutsideAnnulus { .. } | Error::EscapedAnnulus { .. } => {
            "lower --rmax so that samples stay inside the period annulus"
        }
        Error::StepFailure { .. } | Error::RootBracketFailure { .. } => {
            "lower --rmax; the orbit approaches the annulus boundary"
        }
        Error::DegreeTooLow(_) => "series analysis needs degree >= 3 on the side in question",
        Error::NotACenter(_) => "the origin is not a Sigma-center; only the gap table applies",
        Error::SparsityViolation { .. } => "internal reversion check failed; please report",
        Error::HypothesisNotMet { .. } => "the half-period check does not apply to this side",
    }
}

/// Parse failures map to 2, numerical failures to 3.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Parse { .. } | Error::DegreeMismatch { .. } | Error::InvalidDegree(_) => 2,
        _ => 3,
    }
}
