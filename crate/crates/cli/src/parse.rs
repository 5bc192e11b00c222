//! Value parsers for ranges, lists, angles and method sets.

use std::f64::consts::PI;

use xxz_negativity::entanglement::Method;
use xxz_negativity::report::Size;

use crate::CliError;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn number(s: &str) -> Result<f64, CliError> {
    s.trim().parse::<f64>().map_err(|_| usage(format!("not a number: {s}")))
}

/// Rounds to 12 decimals so that stepped grids hit values like 0 exactly.
fn tidy(x: f64) -> f64 {
    (x * 1e12).round() / 1e12 + 0.0
}

/// `a:b:step` (inclusive), a comma list, or a single value.
pub fn real_list(s: &str) -> Result<Vec<f64>, CliError> {
    let s = s.trim();
    if s.is_empty() {
        return Ok(Vec::new());
    }
    if let Some((a, rest)) = s.split_once(':') {
        let (b, step) = rest.split_once(':').ok_or_else(|| usage(format!("range {s} needs a:b:step")))?;
        let (a, b, step) = (number(a)?, number(b)?, number(step)?);
        if step.is_nan() || step <= 0.0 || b < a {
            return Err(usage(format!("range {s} needs step > 0 and b ≥ a")));
        }
        let count = ((b - a) / step + 1e-9).floor() as usize + 1;
        return Ok((0..count).map(|k| tidy(a + k as f64 * step)).collect());
    }
    s.split(',').map(number).collect()
}

pub fn size_list(s: &str) -> Result<Vec<Size>, CliError> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<Size>().map_err(usage))
        .collect()
}

pub fn length_list(s: &str) -> Result<Vec<usize>, CliError> {
    size_list(s)?
        .into_iter()
        .map(|sz| match sz {
            Size::Finite(l) => Ok(l),
            Size::Infinite => Err(usage("L = inf is only meaningful for fig 1")),
        })
        .collect()
}

pub fn index_list(s: &str) -> Result<Vec<usize>, CliError> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<usize>().map_err(|_| usage(format!("not a sector index: {t}"))))
        .collect()
}

/// A number, or a multiple of π such as `pi/2`, `2pi/3`, `0.5pi`.
pub fn angle(s: &str) -> Result<f64, CliError> {
    let t = s.trim().replace('π', "pi");
    let Some((coef, rest)) = t.split_once("pi") else {
        return number(&t);
    };
    let coef = coef.trim().trim_end_matches('*');
    let c = if coef.is_empty() { 1.0 } else { number(coef)? };
    let rest = rest.trim();
    let d = match rest.strip_prefix('/') {
        Some(den) => number(den)?,
        None if rest.is_empty() => 1.0,
        None => return Err(usage(format!("cannot read angle {s}"))),
    };
    Ok(c * PI / d)
}

pub fn methods(s: &str) -> Result<Vec<Method>, CliError> {
    let out: Vec<Method> = s
        .split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| Method::parse(t).ok_or_else(|| usage(format!("unknown method {t} (ed, bethe, ff, cft)"))))
        .collect::<Result<_, _>>()?;
    if out.is_empty() {
        return Err(usage("empty method list"));
    }
    Ok(out)
}
