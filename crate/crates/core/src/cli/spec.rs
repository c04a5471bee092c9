//! Line-oriented system description:
//!
//! ```text
//! [upper]
//! degree = 3
//! coeffs = 0, 1, 0, 0        # x^2 y
//! [lower]
//! degree = 3
//! coeffs = 0, 0, 0, 1
//! [options]
//! order = 8
//! rmax = 0.2
//! ```
//!
//! Coefficients are exact: integers or `p/q`. Coefficient `i` multiplies
//! `x^{d-i} y^i`.

use std::fmt::{self, Write as _};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::sysmodel::PiecewiseSystem;
use crate::trigmoments::HomogeneousPoly;

/// Optional overrides; `None` falls back to the run defaults.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SpecOptions {
    pub order: Option<u32>,
    pub r_max: Option<f64>,
    pub samples: Option<usize>,
    pub tol: Option<f64>,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SystemSpecFile {
    pub upper_degree: usize,
    pub upper_coeffs: Vec<BigRational>,
    pub lower_degree: usize,
    pub lower_coeffs: Vec<BigRational>,
    pub options: SpecOptions,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParsedSpec {
    pub spec: SystemSpecFile,
    pub system: PiecewiseSystem,
    pub warnings: Vec<String>,
}

pub const EMPTY_SYSTEM_WARNING: &str = "EmptySystem: both sides are zero; the period is 2π";

impl SystemSpecFile {
    pub fn from_system(sys: &PiecewiseSystem, options: SpecOptions) -> Self {
        Self {
            upper_degree: sys.upper().degree(),
            upper_coeffs: sys.upper().coeffs().to_vec(),
            lower_degree: sys.lower().degree(),
            lower_coeffs: sys.lower().coeffs().to_vec(),
            options,
        }
    }

    pub fn system(&self) -> Result<PiecewiseSystem> {
        let upper = HomogeneousPoly::new(self.upper_degree, self.upper_coeffs.clone())?;
        let lower = HomogeneousPoly::new(self.lower_degree, self.lower_coeffs.clone())?;
        Ok(PiecewiseSystem::new(upper, lower))
    }
}

impl fmt::Display for SystemSpecFile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sides = [
            ("upper", self.upper_degree, &self.upper_coeffs),
            ("lower", self.lower_degree, &self.lower_coeffs),
        ];
        for (name, degree, coeffs) in sides {
            writeln!(f, "[{name}]")?;
            writeln!(f, "degree = {degree}")?;
            let list: Vec<String> = coeffs.iter().map(|c| c.to_string()).collect();
            writeln!(f, "coeffs = {}", list.join(", "))?;
        }
        let o = &self.options;
        let mut body = String::new();
        if let Some(v) = o.order {
            writeln!(body, "order = {v}")?;
        }
        if let Some(v) = o.r_max {
            writeln!(body, "rmax = {v:?}")?;
        }
        if let Some(v) = o.samples {
            writeln!(body, "samples = {v}")?;
        }
        if let Some(v) = o.tol {
            writeln!(body, "tol = {v:?}")?;
        }
        if let Some(v) = o.seed {
            writeln!(body, "seed = {v}")?;
        }
        if !body.is_empty() {
            writeln!(f, "[options]")?;
            f.write_str(&body)?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Section {
    Upper,
    Lower,
    Options,
}

#[derive(Default)]
struct SideEntry {
    degree: Option<(usize, usize)>,
    coeffs: Option<(Vec<BigRational>, usize)>,
}

fn err(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        column,
        message: message.into(),
    }
}

/// Parses `p/q` or an integer, optionally signed.
pub fn parse_rational(token: &str) -> std::result::Result<BigRational, String> {
    let parse_int = |s: &str| {
        s.parse::<BigInt>()
            .map_err(|_| format!("`{token}` is not an integer or p/q rational"))
    };
    match token.split_once('/') {
        Some((p, q)) => {
            let (p, q) = (parse_int(p.trim())?, parse_int(q.trim())?);
            if q.is_zero() {
                return Err(format!("`{token}` has a zero denominator"));
            }
            Ok(BigRational::new(p, q))
        }
        None => Ok(BigRational::from_integer(parse_int(token)?)),
    }
}

fn parse_number<T: std::str::FromStr>(v: &str, line: usize, col: usize, what: &str) -> Result<T> {
    v.parse::<T>()
        .map_err(|_| err(line, col, format!("`{v}` is not a valid {what}")))
}

/// Strict parse: unknown sections or keys, duplicates and malformed values
/// are errors; both sides need `degree` and `coeffs`.
pub fn parse_spec(text: &str) -> Result<ParsedSpec> {
    let mut section: Option<Section> = None;
    let mut upper = SideEntry::default();
    let mut lower = SideEntry::default();
    let mut options = SpecOptions::default();
    let mut last_line = 0;

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        last_line = line;
        let content = raw.split_once('#').map_or(raw, |(c, _)| c);
        let indent = content.len() - content.trim_start().len();
        let trimmed = content.trim();
        if trimmed.is_empty() {
            continue;
        }
        let col0 = indent + 1;
        if let Some(rest) = trimmed.strip_prefix('[') {
            let name = rest
                .strip_suffix(']')
                .ok_or_else(|| err(line, col0, "unterminated section header"))?
                .trim();
            section = Some(match name {
                "upper" => Section::Upper,
                "lower" => Section::Lower,
                "options" => Section::Options,
                other => return Err(err(line, col0 + 1, format!("unknown section `{other}`"))),
            });
            continue;
        }
        let (key_raw, value_raw) = trimmed
            .split_once('=')
            .ok_or_else(|| err(line, col0, "expected `key = value`"))?;
        let key = key_raw.trim();
        let value = value_raw.trim();
        let value_col = col0 + key_raw.len() + 1 + (value_raw.len() - value_raw.trim_start().len());
        let sec = section.ok_or_else(|| err(line, col0, "key outside of a section"))?;
        if value.is_empty() {
            return Err(err(line, value_col, format!("missing value for `{key}`")));
        }
        let duplicate = || err(line, col0, format!("duplicate key `{key}`"));
        match sec {
            Section::Upper | Section::Lower => {
                let entry = if sec == Section::Upper { &mut upper } else { &mut lower };
                match key {
                    "degree" => {
                        if entry.degree.is_some() {
                            return Err(duplicate());
                        }
                        entry.degree = Some((parse_number(value, line, value_col, "degree")?, line));
                    }
                    "coeffs" => {
                        if entry.coeffs.is_some() {
                            return Err(duplicate());
                        }
                        let mut coeffs = Vec::new();
                        let mut offset = 0;
                        for piece in value.split(',') {
                            let lead = piece.len() - piece.trim_start().len();
                            let tok = piece.trim();
                            let col = value_col + offset + lead;
                            if tok.is_empty() {
                                return Err(err(line, col, "empty coefficient"));
                            }
                            coeffs.push(parse_rational(tok).map_err(|m| err(line, col, m))?);
                            offset += piece.len() + 1;
                        }
                        entry.coeffs = Some((coeffs, line));
                    }
                    other => return Err(err(line, col0, format!("unknown key `{other}`"))),
                }
            }
            Section::Options => {
                macro_rules! set {
                    ($field:ident, $what:expr) => {{
                        if options.$field.is_some() {
                            return Err(duplicate());
                        }
                        options.$field = Some(parse_number(value, line, value_col, $what)?);
                    }};
                }
                match key {
                    "order" => set!(order, "order"),
                    "rmax" => set!(r_max, "radius"),
                    "samples" => set!(samples, "sample count"),
                    "tol" => set!(tol, "tolerance"),
                    "seed" => set!(seed, "seed"),
                    other => return Err(err(line, col0, format!("unknown option `{other}`"))),
                }
            }
        }
    }

    if options.r_max.is_some_and(|r| !(r.is_finite() && r > 0.0)) {
        return Err(err(last_line, 1, "rmax must be positive and finite"));
    }
    if options.tol.is_some_and(|t| !(t.is_finite() && t > 0.0)) {
        return Err(err(last_line, 1, "tol must be positive and finite"));
    }

    let finish = |entry: SideEntry, name: &str| -> Result<(usize, Vec<BigRational>)> {
        let (degree, _) = entry
            .degree
            .ok_or_else(|| err(last_line + 1, 1, format!("[{name}] is missing `degree`")))?;
        let (coeffs, _) = entry
            .coeffs
            .ok_or_else(|| err(last_line + 1, 1, format!("[{name}] is missing `coeffs`")))?;
        Ok((degree, coeffs))
    };
    let (upper_degree, upper_coeffs) = finish(upper, "upper")?;
    let (lower_degree, lower_coeffs) = finish(lower, "lower")?;
    let spec = SystemSpecFile {
        upper_degree,
        upper_coeffs,
        lower_degree,
        lower_coeffs,
        options,
    };
    let system = spec.system()?;
    let mut warnings = Vec::new();
    if system.is_zero() {
        warnings.push(EMPTY_SYSTEM_WARNING.to_string());
    }
    Ok(ParsedSpec {
        spec,
        system,
        warnings,
    })
}
