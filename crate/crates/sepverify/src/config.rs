//! Optional JSON configuration mirroring the command-line flags. Flags
//! given on the command line take precedence.
//!
//! ```json
//! { "theta_frac": "1/8", "delta": "0:0.05:1", "epsilon": [0.9, 1.0],
//!   "method": ["sdp-full", "analytic-commuting"], "grid_n": 400,
//!   "tol": 1e-9, "output": "fig1.csv", "format": "csv" }
//! ```

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::error::{AppError, AppResult};
use crate::grid::parse_list;
use crate::sweep::Format;

/// A parameter given as a number, a list of numbers, or list syntax.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum ListValue {
    Number(f64),
    List(Vec<f64>),
    Text(String),
}

impl ListValue {
    /// The value in the command-line list syntax.
    pub fn to_flag(&self) -> String {
        match self {
            ListValue::Number(v) => v.to_string(),
            ListValue::List(vs) => vs.iter().map(f64::to_string).collect::<Vec<_>>().join(","),
            ListValue::Text(s) => s.clone(),
        }
    }

    pub fn values(&self, what: &str) -> AppResult<Vec<f64>> {
        parse_list(&self.to_flag(), what)
    }
}

/// One string or a list of strings, for methods and `theta_frac`.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum TextList {
    One(String),
    Many(Vec<String>),
}

impl TextList {
    pub fn to_flag(&self) -> String {
        match self {
            TextList::One(s) => s.clone(),
            TextList::Many(v) => v.join(","),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub theta: Option<ListValue>,
    pub theta_frac: Option<TextList>,
    pub delta: Option<ListValue>,
    pub epsilon: Option<ListValue>,
    pub method: Option<TextList>,
    pub grid_n: Option<usize>,
    pub tol: Option<f64>,
    pub output: Option<PathBuf>,
    pub format: Option<Format>,
}

impl Config {
    pub fn read(path: &Path) -> AppResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| AppError::usage(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| AppError::usage(format!("malformed config {}: {e}", path.display())))
    }
}
