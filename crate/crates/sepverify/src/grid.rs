//! Parsing of parameter lists: `0.1`, `0.1,0.2,0.5`, `start:step:stop`
//! (inclusive) and mixtures such as `0,0.5:0.1:1`. Angles may instead be
//! given as rational multiples of π, `1/8` or `1/16,1/8`.

use std::f64::consts::PI;

use crate::error::{AppError, AppResult};

/// Range points are rounded to this many decimals so that `0:0.05:1`
/// yields exactly `0.15`, not `0.15000000000000002`.
const RANGE_DECIMALS: i32 = 12;

/// Largest number of points a single range may expand to.
const MAX_RANGE_POINTS: usize = 1_000_000;

fn number(s: &str, what: &str) -> AppResult<f64> {
    let v: f64 = s
        .trim()
        .parse()
        .map_err(|_| AppError::usage(format!("{what}: `{s}` is not a number")))?;
    if !v.is_finite() {
        return Err(AppError::usage(format!("{what}: `{s}` is not finite")));
    }
    Ok(v)
}

fn range(parts: &[&str], what: &str) -> AppResult<Vec<f64>> {
    let (start, step, stop) = (number(parts[0], what)?, number(parts[1], what)?, number(parts[2], what)?);
    if !(step > 0.0) || stop < start {
        return Err(AppError::usage(format!(
            "{what}: range {start}:{step}:{stop} needs step > 0 and stop ≥ start"
        )));
    }
    let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
    if count > MAX_RANGE_POINTS {
        return Err(AppError::usage(format!("{what}: range has {count} points")));
    }
    let scale = 10f64.powi(RANGE_DECIMALS);
    Ok((0..count)
        .map(|k| ((start + k as f64 * step) * scale).round() / scale)
        .collect())
}

/// Parses a comma-separated list of numbers and inclusive ranges.
pub fn parse_list(s: &str, what: &str) -> AppResult<Vec<f64>> {
    let mut out = Vec::new();
    for item in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        let parts: Vec<&str> = item.split(':').collect();
        match parts.len() {
            1 => out.push(number(item, what)?),
            3 => out.extend(range(&parts, what)?),
            _ => return Err(AppError::usage(format!("{what}: cannot parse `{item}`"))),
        }
    }
    if out.is_empty() {
        return Err(AppError::usage(format!("{what}: empty list")));
    }
    Ok(out)
}

/// Parses `p/q` (or a bare integer `p`) as the angle `pπ/q`.
pub fn parse_pi_fraction(s: &str) -> AppResult<f64> {
    let s = s.trim();
    let (p, q) = match s.split_once('/') {
        Some((p, q)) => (p.trim(), q.trim()),
        None => (s, "1"),
    };
    let p: i64 = p
        .parse()
        .map_err(|_| AppError::usage(format!("theta-frac: `{s}` is not of the form p/q")))?;
    let q: i64 = q
        .parse()
        .map_err(|_| AppError::usage(format!("theta-frac: `{s}` is not of the form p/q")))?;
    if q == 0 {
        return Err(AppError::usage("theta-frac: zero denominator"));
    }
    Ok(p as f64 * PI / q as f64)
}

/// Comma-separated list of `p/q` fractions of π.
pub fn parse_pi_fractions(s: &str) -> AppResult<Vec<f64>> {
    let out: Vec<f64> = s
        .split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(parse_pi_fraction)
        .collect::<AppResult<_>>()?;
    if out.is_empty() {
        return Err(AppError::usage("theta-frac: empty list"));
    }
    Ok(out)
}
