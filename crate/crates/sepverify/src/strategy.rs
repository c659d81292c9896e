//! Strategy files: `{"dim": 4, "re": [[..]; 4], "im": [[..]; 4]}`, rows in
//! the basis order `|00⟩, |01⟩, |10⟩, |11⟩`. `im` may be omitted for real
//! matrices.

use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use sepverify_core::qcore::HermitianOperator;

use crate::error::{AppError, AppResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StrategyFile {
    pub dim: usize,
    pub re: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub im: Option<Vec<Vec<f64>>>,
}

impl StrategyFile {
    pub fn from_operator(op: &HermitianOperator) -> Self {
        let n = op.dim();
        let part = |f: fn(Complex64) -> f64| -> Vec<Vec<f64>> {
            (0..n).map(|i| (0..n).map(|j| f(op.get(i, j))).collect()).collect()
        };
        Self {
            dim: n,
            re: part(|c| c.re),
            im: Some(part(|c| c.im)),
        }
    }

    /// Checks the shape and Hermiticity and builds the operator.
    pub fn to_operator(&self) -> AppResult<HermitianOperator> {
        let n = self.dim;
        if n == 0 {
            return Err(AppError::usage("strategy: dim must be positive"));
        }
        let shape_ok = |m: &Vec<Vec<f64>>| m.len() == n && m.iter().all(|row| row.len() == n);
        if !shape_ok(&self.re) {
            return Err(AppError::usage(format!("strategy: `re` is not {n}×{n}")));
        }
        if let Some(im) = &self.im {
            if !shape_ok(im) {
                return Err(AppError::usage(format!("strategy: `im` is not {n}×{n}")));
            }
        }
        let mut entries = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let im = self.im.as_ref().map_or(0.0, |m| m[i][j]);
                entries.push(Complex64::new(self.re[i][j], im));
            }
        }
        HermitianOperator::new(n, entries).map_err(|e| AppError::usage(format!("strategy: {e}")))
    }

    pub fn read(path: &Path) -> AppResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| AppError::usage(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| AppError::usage(format!("malformed strategy file {}: {e}", path.display())))
    }
}
