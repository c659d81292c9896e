//! Parameter sweeps and their CSV/JSON output.

use std::io::Write;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sepverify_core::model::Scenario;

use crate::error::{AppError, AppResult};
use crate::method::{evaluate, EvalOptions, Method, TradeoffPoint};

/// Exact CSV header.
pub const CSV_HEADER: [&str; 8] = [
    "theta",
    "delta",
    "epsilon",
    "method",
    "p10",
    "p10_commuting",
    "gap",
    "solver_status",
];

/// Significant digits of every number written to CSV.
pub const CSV_DIGITS: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl std::str::FromStr for Format {
    type Err = AppError;

    fn from_str(s: &str) -> AppResult<Self> {
        match s.trim() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(AppError::usage(format!("unknown format `{other}` (csv or json)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub theta_grid: Vec<f64>,
    pub delta_grid: Vec<f64>,
    pub epsilon_grid: Vec<f64>,
    pub methods: Vec<Method>,
    /// `None` writes to standard output.
    pub output_path: Option<PathBuf>,
    pub format: Format,
}

impl SweepSpec {
    /// Non-empty grids inside the parameter domain; `analytic-eps1` only
    /// with `epsilon_grid = {1}`. Returns the scenarios in row order.
    pub fn validate(&self) -> AppResult<Vec<Scenario>> {
        for (name, grid) in [
            ("theta", &self.theta_grid),
            ("delta", &self.delta_grid),
            ("epsilon", &self.epsilon_grid),
        ] {
            if grid.is_empty() {
                return Err(AppError::usage(format!("{name} grid is empty")));
            }
        }
        if self.methods.is_empty() {
            return Err(AppError::usage("no methods requested"));
        }
        if self.methods.contains(&Method::AnalyticEps1) && self.epsilon_grid.iter().any(|&e| e != 1.0) {
            return Err(AppError::usage("analytic-eps1 requires the epsilon grid to be {1}"));
        }
        let mut cells = Vec::new();
        for &t in &self.theta_grid {
            for &d in &self.delta_grid {
                for &e in &self.epsilon_grid {
                    cells.push(Scenario::new(t, d, e)?);
                }
            }
        }
        Ok(cells)
    }
}

/// Evaluates every `(θ, δ, ε, method)` cell. Cells run in parallel; rows
/// come back θ-major, then δ, ε and method in the order given. The first
/// failing cell in row order decides the error.
pub fn run_sweep(spec: &SweepSpec, opts: &EvalOptions) -> AppResult<Vec<TradeoffPoint>> {
    let cells = spec.validate()?;
    let jobs: Vec<(Scenario, Method)> = cells
        .iter()
        .flat_map(|sc| spec.methods.iter().map(move |&m| (*sc, m)))
        .collect();
    jobs.par_iter()
        .map(|(sc, m)| evaluate(sc, *m, opts))
        .collect::<Vec<_>>()
        .into_iter()
        .collect()
}

/// `v` rounded to [`CSV_DIGITS`] significant digits, printed in the
/// shortest form that reads back as the rounded value.
pub fn format_number(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    let rounded: f64 = format!("{:.*e}", CSV_DIGITS - 1, v)
        .parse()
        .expect("scientific notation parses");
    format!("{rounded}")
}

pub fn to_csv(points: &[TradeoffPoint]) -> AppResult<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| AppError::Io(std::io::Error::other(e));
    w.write_record(CSV_HEADER).map_err(csv_err)?;
    for p in points {
        w.write_record([
            format_number(p.theta),
            format_number(p.delta),
            format_number(p.epsilon),
            p.method.as_str().to_string(),
            format_number(p.p10),
            format_number(p.p10_commuting),
            format_number(p.gap),
            p.solver_status.clone(),
        ])
        .map_err(csv_err)?;
    }
    w.into_inner().map_err(|e| AppError::Io(std::io::Error::other(e.to_string())))
}

pub fn to_json(points: &[TradeoffPoint]) -> AppResult<Vec<u8>> {
    let mut out = serde_json::to_vec_pretty(points).map_err(|e| AppError::Io(e.into()))?;
    out.push(b'\n');
    Ok(out)
}

/// Parses CSV written by [`to_csv`], checking the header.
pub fn parse_csv(text: &str) -> AppResult<Vec<TradeoffPoint>> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let header = r
        .headers()
        .map_err(|e| AppError::usage(format!("malformed csv: {e}")))?
        .clone();
    if header.iter().ne(CSV_HEADER.iter().copied()) {
        return Err(AppError::usage("unexpected csv header"));
    }
    r.deserialize()
        .map(|row| row.map_err(|e| AppError::usage(format!("malformed csv row: {e}"))))
        .collect()
}

/// Writes `bytes` to `path` through a temporary file in the same
/// directory, so a failed run never leaves partial output behind.
pub fn write_atomically(path: &Path, bytes: &[u8]) -> AppResult<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| AppError::Io(e.error))?;
    Ok(())
}

/// Serializes the rows in `format` and writes them to `path` or stdout.
pub fn write_points(points: &[TradeoffPoint], format: Format, path: Option<&Path>) -> AppResult<()> {
    let bytes = match format {
        Format::Csv => to_csv(points)?,
        Format::Json => to_json(points)?,
    };
    match path {
        Some(p) => write_atomically(p, &bytes),
        None => {
            std::io::stdout().write_all(&bytes)?;
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_keep_twelve_significant_digits() {
        assert_eq!(format_number(std::f64::consts::PI / 8.0), "0.392699081699");
        assert_eq!(format_number(0.15000000000000002), "0.15");
        assert_eq!(format_number(1.0), "1");
        assert_eq!(format_number(-0.0), "0");
        assert_eq!(format_number(-1.234567890123456e-7), "-0.000000123456789012");
    }

    #[test]
    fn validation_rules() {
        let mut spec = SweepSpec {
            theta_grid: vec![0.1],
            delta_grid: vec![0.0, 0.5],
            epsilon_grid: vec![1.0],
            methods: vec![Method::AnalyticEps1],
            output_path: None,
            format: Format::Csv,
        };
        assert_eq!(spec.validate().unwrap().len(), 2);
        spec.epsilon_grid = vec![0.9, 1.0];
        assert!(spec.validate().is_err());
        spec.methods = vec![Method::AnalyticCommuting];
        assert!(spec.validate().is_ok());
        spec.delta_grid = vec![1.5];
        assert_eq!(spec.validate().unwrap_err().exit_code(), 2);
        spec.delta_grid.clear();
        assert!(spec.validate().is_err());
    }

    #[test]
    fn csv_round_trip() {
        let spec = SweepSpec {
            theta_grid: vec![0.2, 0.6],
            delta_grid: vec![0.1],
            epsilon_grid: vec![1.0],
            methods: vec![Method::AnalyticCommuting, Method::AnalyticEps1],
            output_path: None,
            format: Format::Csv,
        };
        let points = run_sweep(&spec, &EvalOptions::default()).unwrap();
        assert_eq!(points.len(), 4);
        assert_eq!(points[1].method, Method::AnalyticEps1);
        let text = String::from_utf8(to_csv(&points).unwrap()).unwrap();
        assert!(text.starts_with("theta,delta,epsilon,method,p10,p10_commuting,gap,solver_status\n"));
        let back = parse_csv(&text).unwrap();
        for (a, b) in points.iter().zip(&back) {
            assert_eq!(a.method, b.method);
            assert!((a.p10 - b.p10).abs() <= 1e-11 * a.p10.abs());
        }
    }
}
