//! Command-line interface. Exit codes: 0 success, 1 strategy not feasible
//! (`verify`), 2 usage error, 3 solver failure.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use sepverify_core::model::Scenario;
use sepverify_core::oracle::{certify_strategy, Constraint};

use crate::acceptance;
use crate::config::Config;
use crate::error::{AppError, AppResult};
use crate::grid::{parse_list, parse_pi_fractions};
use crate::method::{evaluate, EvalOptions, Method};
use crate::strategy::StrategyFile;
use crate::sweep::{run_sweep, to_csv, write_atomically, write_points, Format, SweepSpec};

#[derive(Debug, Parser)]
#[command(name = "sepverify", version, about = "Worst-case type-II error of two-qubit state verification with separable measurements")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate p10 at one (θ, δ, ε) point and print it as JSON.
    Point(ParamArgs),
    /// Evaluate every (θ, δ, ε, method) cell of a grid.
    Sweep(ParamArgs),
    /// Certify a strategy file against the constraints at (θ, δ, ε).
    Verify {
        /// JSON file {"dim": 4, "re": [[..]], "im": [[..]]}.
        strategy_file: PathBuf,
        #[command(flatten)]
        params: ParamArgs,
    },
    /// Run the acceptance suite.
    Selftest,
}

/// Flags shared by the subcommands. Lists (`sweep`) accept `a,b,c` and
/// inclusive ranges `start:step:stop`.
#[derive(Debug, Clone, Default, Args)]
pub struct ParamArgs {
    /// Schmidt angle in radians.
    #[arg(long, allow_hyphen_values = true, conflicts_with = "theta_frac")]
    pub theta: Option<String>,
    /// Schmidt angle as a fraction p/q of π.
    #[arg(long)]
    pub theta_frac: Option<String>,
    /// Allowed type-I error.
    #[arg(long, allow_hyphen_values = true)]
    pub delta: Option<String>,
    /// Minimum infidelity of the alternative states.
    #[arg(long, allow_hyphen_values = true)]
    pub epsilon: Option<String>,
    /// sdp-full, sdp-reduced, analytic-commuting, analytic-eps1 or oracle.
    #[arg(long)]
    pub method: Option<String>,
    /// Grid size of the oracle.
    #[arg(long)]
    pub grid_n: Option<usize>,
    /// Interior-point tolerance.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Output file; standard output if absent.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// csv or json.
    #[arg(long)]
    pub format: Option<String>,
    /// JSON file with defaults for any of the flags above.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

/// Flags merged over the optional config file.
struct Resolved {
    thetas: Option<Vec<f64>>,
    deltas: Option<Vec<f64>>,
    epsilons: Option<Vec<f64>>,
    methods: Vec<Method>,
    opts: EvalOptions,
    output: Option<PathBuf>,
    format: Option<Format>,
}

impl ParamArgs {
    fn resolve(&self) -> AppResult<Resolved> {
        let cfg = match &self.config {
            Some(p) => Config::read(p)?,
            None => Config::default(),
        };
        let thetas = if let Some(t) = &self.theta {
            Some(parse_list(t, "theta")?)
        } else if let Some(f) = &self.theta_frac {
            Some(parse_pi_fractions(f)?)
        } else if let Some(t) = &cfg.theta {
            Some(t.values("theta")?)
        } else if let Some(f) = &cfg.theta_frac {
            Some(parse_pi_fractions(&f.to_flag())?)
        } else {
            None
        };
        let list = |flag: &Option<String>, cfg: &Option<crate::config::ListValue>, what| -> AppResult<_> {
            match (flag, cfg) {
                (Some(s), _) => Ok(Some(parse_list(s, what)?)),
                (None, Some(v)) => Ok(Some(v.values(what)?)),
                (None, None) => Ok(None),
            }
        };
        let methods = match (&self.method, &cfg.method) {
            (Some(s), _) => s.clone(),
            (None, Some(m)) => m.to_flag(),
            (None, None) => Method::SdpFull.as_str().to_string(),
        };
        let methods = methods
            .split(',')
            .filter(|s| !s.trim().is_empty())
            .map(str::parse)
            .collect::<AppResult<Vec<Method>>>()?;
        let mut opts = EvalOptions::default();
        if let Some(n) = self.grid_n.or(cfg.grid_n) {
            opts.grid_n = n;
        }
        if let Some(tol) = self.tol.or(cfg.tol) {
            if !(tol > 0.0 && tol.is_finite()) {
                return Err(AppError::usage(format!("tol must be positive, got {tol}")));
            }
            opts.tol = tol;
        }
        let format = match &self.format {
            Some(f) => Some(f.parse()?),
            None => cfg.format,
        };
        Ok(Resolved {
            thetas,
            deltas: list(&self.delta, &cfg.delta, "delta")?,
            epsilons: list(&self.epsilon, &cfg.epsilon, "epsilon")?,
            methods,
            opts,
            output: self.output.clone().or(cfg.output),
            format,
        })
    }
}

fn single(values: Option<Vec<f64>>, what: &str) -> AppResult<f64> {
    match values.as_deref() {
        Some([v]) => Ok(*v),
        Some(_) => Err(AppError::usage(format!("--{what} takes a single value here"))),
        None => Err(AppError::usage(format!("--{what} is required"))),
    }
}

fn required(values: Option<Vec<f64>>, what: &str) -> AppResult<Vec<f64>> {
    values.ok_or_else(|| AppError::usage(format!("--{what} is required")))
}

fn emit(bytes: &[u8], output: Option<&Path>) -> AppResult<()> {
    match output {
        Some(p) => write_atomically(p, bytes),
        None => {
            std::io::stdout().write_all(bytes)?;
            Ok(())
        }
    }
}

fn json_bytes<T: Serialize>(value: &T) -> AppResult<Vec<u8>> {
    let mut out = serde_json::to_vec_pretty(value).map_err(|e| AppError::Io(e.into()))?;
    out.push(b'\n');
    Ok(out)
}

fn cmd_point(args: &ParamArgs) -> AppResult<i32> {
    let r = args.resolve()?;
    let sc = Scenario::new(
        single(r.thetas, "theta")?,
        single(r.deltas, "delta")?,
        single(r.epsilons, "epsilon")?,
    )?;
    let [method] = r.methods[..] else {
        return Err(AppError::usage("point takes a single --method"));
    };
    let point = evaluate(&sc, method, &r.opts)?;
    let bytes = match r.format.unwrap_or(Format::Json) {
        Format::Json => json_bytes(&point)?,
        Format::Csv => to_csv(std::slice::from_ref(&point))?,
    };
    emit(&bytes, r.output.as_deref())?;
    Ok(0)
}

fn cmd_sweep(args: &ParamArgs) -> AppResult<i32> {
    let r = args.resolve()?;
    let spec = SweepSpec {
        theta_grid: required(r.thetas, "theta")?,
        delta_grid: required(r.deltas, "delta")?,
        epsilon_grid: required(r.epsilons, "epsilon")?,
        methods: r.methods,
        output_path: r.output,
        format: r.format.unwrap_or(Format::Csv),
    };
    let points = run_sweep(&spec, &r.opts)?;
    write_points(&points, spec.format, spec.output_path.as_deref())?;
    Ok(0)
}

#[derive(Serialize)]
struct ViolationReport {
    constraint: &'static str,
    residual: f64,
}

#[derive(Serialize)]
struct VerifyReport {
    theta: f64,
    delta: f64,
    epsilon: f64,
    feasible: bool,
    p01_worst: f64,
    p10_worst: f64,
    violations: Vec<ViolationReport>,
}

fn constraint_name(c: Constraint) -> &'static str {
    match c {
        Constraint::Dimension => "dimension",
        Constraint::Positive => "positive",
        Constraint::BelowIdentity => "below_identity",
        Constraint::Ppt => "ppt",
        Constraint::Fidelity => "fidelity",
    }
}

fn cmd_verify(file: &Path, args: &ParamArgs) -> AppResult<i32> {
    let r = args.resolve()?;
    let sc = Scenario::new(
        single(r.thetas, "theta")?,
        single(r.deltas, "delta")?,
        single(r.epsilons, "epsilon")?,
    )?;
    let omega = StrategyFile::read(file)?.to_operator()?;
    let cert = certify_strategy(&omega, &sc);
    // NaN (dimension mismatch) is not representable in JSON
    let finite = |v: f64| if v.is_finite() { v } else { -1.0 };
    let report = VerifyReport {
        theta: sc.theta(),
        delta: sc.delta(),
        epsilon: sc.epsilon(),
        feasible: cert.feasible,
        p01_worst: finite(cert.p01_worst),
        p10_worst: finite(cert.p10_worst),
        violations: cert
            .violations
            .iter()
            .map(|v| ViolationReport {
                constraint: constraint_name(v.constraint),
                residual: v.residual,
            })
            .collect(),
    };
    emit(&json_bytes(&report)?, r.output.as_deref())?;
    Ok(if cert.feasible { 0 } else { 1 })
}

fn cmd_selftest() -> AppResult<i32> {
    let mut all = true;
    for outcome in acceptance::run_all() {
        println!("{outcome}");
        all &= outcome.passed;
    }
    Ok(if all { 0 } else { 3 })
}

/// Parses `args` (including the program name) and runs the command,
/// returning the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let result = match &cli.command {
        Command::Point(a) => cmd_point(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Verify { strategy_file, params } => cmd_verify(strategy_file, params),
        Command::Selftest => cmd_selftest(),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("sepverify: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_config() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = dir.path().join("c.json");
        std::fs::write(&cfg, r#"{"theta_frac": "1/8", "delta": 0.2, "epsilon": [0.9], "grid_n": 70}"#).unwrap();
        let args = ParamArgs {
            delta: Some("0.3".into()),
            config: Some(cfg),
            ..ParamArgs::default()
        };
        let r = args.resolve().unwrap();
        assert_eq!(r.thetas.unwrap(), vec![std::f64::consts::FRAC_PI_8]);
        assert_eq!(r.deltas.unwrap(), vec![0.3]);
        assert_eq!(r.epsilons.unwrap(), vec![0.9]);
        assert_eq!(r.opts.grid_n, 70);
        assert_eq!(r.methods, vec![Method::SdpFull]);
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
