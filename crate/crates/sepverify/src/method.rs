//! Evaluation of `p10` at a single parameter point by any of the available
//! methods, always paired with the commuting value for the gap column.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sepverify_core::analytic::{p10_commuting, p10_eps1};
use sepverify_core::model::{build_full_sdp, build_reduced_sdp, Scenario};
use sepverify_core::oracle::grid_p10;
use sepverify_core::sdp::{solve, SdpSettings};

use crate::error::{AppError, AppResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    SdpFull,
    SdpReduced,
    AnalyticCommuting,
    AnalyticEps1,
    Oracle,
}

impl Method {
    pub const ALL: [Method; 5] = [
        Method::SdpFull,
        Method::SdpReduced,
        Method::AnalyticCommuting,
        Method::AnalyticEps1,
        Method::Oracle,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::SdpFull => "sdp-full",
            Method::SdpReduced => "sdp-reduced",
            Method::AnalyticCommuting => "analytic-commuting",
            Method::AnalyticEps1 => "analytic-eps1",
            Method::Oracle => "oracle",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = AppError;

    fn from_str(s: &str) -> AppResult<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.as_str() == s.trim())
            .ok_or_else(|| {
                let names: Vec<_> = Method::ALL.iter().map(|m| m.as_str()).collect();
                AppError::usage(format!("unknown method `{s}` (expected one of {})", names.join(", ")))
            })
    }
}

/// Knobs shared by all methods.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalOptions {
    /// Grid size of the oracle.
    pub grid_n: usize,
    /// Interior-point tolerance.
    pub tol: f64,
}

impl Default for EvalOptions {
    fn default() -> Self {
        Self {
            grid_n: 400,
            tol: SdpSettings::default().tol,
        }
    }
}

impl EvalOptions {
    fn settings(&self) -> SdpSettings {
        SdpSettings {
            tol: self.tol,
            ..SdpSettings::default()
        }
    }
}

/// One row of a sweep. `gap = p10_commuting − p10`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TradeoffPoint {
    pub theta: f64,
    pub delta: f64,
    pub epsilon: f64,
    pub method: Method,
    pub p10: f64,
    pub p10_commuting: f64,
    pub gap: f64,
    pub solver_status: String,
}

/// Status strings of the non-SDP methods.
pub const STATUS_CLOSED_FORM: &str = "closed-form";
pub const STATUS_GRID: &str = "grid";

/// Runs `method` at `sc`.
///
/// `analytic-eps1` requires `ε = 1`; an SDP that does not reach an optimal
/// status is a solver failure.
pub fn evaluate(sc: &Scenario, method: Method, opts: &EvalOptions) -> AppResult<TradeoffPoint> {
    let commuting = p10_commuting(sc).value;
    let (p10, status) = match method {
        Method::SdpFull | Method::SdpReduced => {
            let problem = if method == Method::SdpFull {
                build_full_sdp(sc)
            } else {
                build_reduced_sdp(sc)
            };
            let sol = solve(&problem, &opts.settings())?;
            if !sol.is_optimal() {
                return Err(AppError::Solver(format!(
                    "{method} at theta={}, delta={}, epsilon={} ended with status {} (gap {:e})",
                    sc.theta(),
                    sc.delta(),
                    sc.epsilon(),
                    sol.status,
                    sol.gap
                )));
            }
            (sol.primal_value, sol.status.as_str().to_string())
        }
        Method::AnalyticCommuting => (commuting, STATUS_CLOSED_FORM.to_string()),
        Method::AnalyticEps1 => {
            if sc.epsilon() != 1.0 {
                return Err(AppError::usage(format!(
                    "analytic-eps1 needs epsilon = 1, got {}",
                    sc.epsilon()
                )));
            }
            (p10_eps1(sc.theta(), sc.delta())?.0, STATUS_CLOSED_FORM.to_string())
        }
        Method::Oracle => (grid_p10(sc, opts.grid_n).value, STATUS_GRID.to_string()),
    };
    // solver noise can leave values a hair outside [0, 1]
    let p10 = p10.clamp(0.0, 1.0);
    Ok(TradeoffPoint {
        theta: sc.theta(),
        delta: sc.delta(),
        epsilon: sc.epsilon(),
        method,
        p10,
        p10_commuting: commuting,
        gap: commuting - p10,
        solver_status: status,
    })
}
