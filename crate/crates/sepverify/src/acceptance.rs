//! The acceptance suite: each criterion evaluates the methods on fixed
//! grids or seeded random scenarios and reports pass/fail with the worst
//! deviation observed. Used by `sepverify selftest` and by the
//! `acceptance` test target.

use std::f64::consts::{FRAC_PI_4, FRAC_PI_8};
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use sepverify_core::analytic::{objective_reduced, p10_commuting, region_classify};
use sepverify_core::model::{build_full_sdp, build_reduced_sdp, extract_strategy, Formulation, Scenario};
use sepverify_core::oracle::{grid_p10, inner_max};
use sepverify_core::sdp::{solve, SdpSettings, SdpSolution};
use sepverify_core::search::{x_bound, z_range};

use crate::error::AppResult;
use crate::grid::parse_list;
use crate::method::{evaluate, EvalOptions, Method};
use crate::sweep::{run_sweep, Format, SweepSpec};

const PI_16: f64 = FRAC_PI_4 / 4.0;
const THETAS: [f64; 4] = [PI_16, FRAC_PI_8, 3.0 * PI_16, FRAC_PI_4];
/// Grid size of the oracle in every criterion.
const ORACLE_GRID: usize = 400;

#[derive(Debug, Clone, PartialEq)]
pub struct CriterionOutcome {
    pub id: u8,
    pub title: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl fmt::Display for CriterionOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "criterion {} [{verdict}] {}: {}", self.id, self.title, self.detail)
    }
}

fn outcome(id: u8, title: &'static str, result: AppResult<(bool, String)>) -> CriterionOutcome {
    let (passed, detail) = result.unwrap_or_else(|e| (false, format!("evaluation failed: {e}")));
    CriterionOutcome {
        id,
        title,
        passed,
        detail,
    }
}

fn p10(theta: f64, delta: f64, epsilon: f64, method: Method) -> AppResult<f64> {
    let sc = Scenario::new(theta, delta, epsilon)?;
    let opts = EvalOptions {
        grid_n: ORACLE_GRID,
        ..EvalOptions::default()
    };
    Ok(evaluate(&sc, method, &opts)?.p10)
}

/// `{0, 0.1, …, 0.9}`
fn deltas_to_09() -> Vec<f64> {
    (0..10).map(|k| k as f64 / 10.0).collect()
}

fn worst<I: IntoIterator<Item = f64>>(it: I) -> f64 {
    it.into_iter().fold(0.0, f64::max)
}

/// Maximally entangled state at `ε = 1`: every method returns `(1−δ)/3`.
pub fn criterion_1() -> CriterionOutcome {
    let run = || -> AppResult<(bool, String)> {
        let rows: Vec<(f64, [f64; 4])> = deltas_to_09()
            .into_par_iter()
            .map(|d| -> AppResult<(f64, [f64; 4])> {
                let target = (1.0 - d) / 3.0;
                let mut dev = [0.0; 4];
                for (k, m) in [Method::SdpFull, Method::SdpReduced, Method::AnalyticEps1, Method::Oracle]
                    .into_iter()
                    .enumerate()
                {
                    dev[k] = (p10(FRAC_PI_4, d, 1.0, m)? - target).abs();
                }
                Ok((d, dev))
            })
            .collect::<AppResult<_>>()?;
        let exact = worst(rows.iter().flat_map(|(_, d)| d[..3].to_vec()));
        let oracle = worst(rows.iter().map(|(_, d)| d[3]));
        Ok((
            exact <= 1e-6 && oracle <= 1e-3,
            format!("max |SDP/analytic − (1−δ)/3| = {exact:.2e} (≤ 1e-6), max |oracle − (1−δ)/3| = {oracle:.2e} (≤ 1e-3)"),
        ))
    };
    outcome(1, "maximally entangled value (1−δ)/3 at ε=1", run())
}

/// `ε = 1` closed form against the full SDP.
pub fn criterion_2() -> CriterionOutcome {
    let run = || -> AppResult<(bool, String)> {
        let cells: Vec<(f64, f64)> = THETAS
            .iter()
            .flat_map(|&t| deltas_to_09().into_iter().map(move |d| (t, d)))
            .collect();
        let devs: Vec<f64> = cells
            .par_iter()
            .map(|&(t, d)| Ok((p10(t, d, 1.0, Method::AnalyticEps1)? - p10(t, d, 1.0, Method::SdpFull)?).abs()))
            .collect::<AppResult<_>>()?;
        let w = worst(devs);
        Ok((w <= 1e-6, format!("max |analytic-eps1 − sdp-full| = {w:.2e} over 40 cells (≤ 1e-6)")))
    };
    outcome(2, "ε=1 closed form vs full SDP", run())
}

/// `δ = 0` forces the commuting strategy: `1 − ε/(1 + sinθ cosθ)`.
pub fn criterion_3() -> CriterionOutcome {
    let run = || -> AppResult<(bool, String)> {
        let cells: Vec<(f64, f64)> = THETAS
            .iter()
            .flat_map(|&t| [0.25, 0.5, 0.75, 1.0].into_iter().map(move |e| (t, e)))
            .collect();
        let devs: Vec<f64> = cells
            .par_iter()
            .map(|&(t, e)| {
                let expected = 1.0 - e / (1.0 + t.sin() * t.cos());
                Ok((p10(t, 0.0, e, Method::SdpFull)? - expected).abs())
            })
            .collect::<AppResult<_>>()?;
        let w = worst(devs);
        Ok((w <= 1e-6, format!("max |sdp-full − 1 + ε/(1+sinθcosθ)| = {w:.2e} over 16 cells (≤ 1e-6)")))
    };
    outcome(3, "δ=0 recovers the commuting optimum", run())
}

/// Product states are rejected perfectly at `ε = 1`; entangled ones are not.
pub fn criterion_4() -> CriterionOutcome {
    let run = || -> AppResult<(bool, String)> {
        let deltas: Vec<f64> = (0..=10).map(|k| k as f64 / 10.0).collect();
        let product: Vec<f64> = deltas
            .par_iter()
            .map(|&d| {
                let mut w: f64 = 0.0;
                for m in [Method::SdpFull, Method::SdpReduced, Method::AnalyticEps1] {
                    w = w.max(p10(0.0, d, 1.0, m)?.abs());
                }
                Ok(w)
            })
            .collect::<AppResult<_>>()?;
        let zero = worst(product);
        let entangled = [PI_16, FRAC_PI_8, FRAC_PI_4]
            .iter()
            .map(|&t| p10(t, 0.5, 1.0, Method::SdpFull))
            .collect::<AppResult<Vec<_>>>()?;
        let smallest = entangled.iter().copied().fold(f64::INFINITY, f64::min);
        Ok((
            zero <= 1e-8 && smallest > 1e-3,
            format!("θ=0: max p10 = {zero:.2e} (≤ 1e-8); θ>0, δ=0.5: min p10 = {smallest:.6} (> 1e-3)"),
        ))
    };
    outcome(4, "product state is rejected perfectly", run())
}

/// The commuting strategy is strictly suboptimal at `ε = 1` for
/// `0 < θ < π/4`, `0 < δ < 1`.
pub fn criterion_5() -> CriterionOutcome {
    let run = || -> AppResult<(bool, String)> {
        let sc = Scenario::new(FRAC_PI_8, 0.1, 1.0)?;
        let point = evaluate(&sc, Method::SdpFull, &EvalOptions::default())?;
        let gap_ok = (point.gap - 0.1470).abs() <= 1e-3;
        let cells: Vec<(f64, f64)> = [PI_16, FRAC_PI_8, 3.0 * PI_16]
            .iter()
            .flat_map(|&t| (1..10).map(move |k| (t, k as f64 / 10.0)))
            .collect();
        let gaps: Vec<f64> = cells
            .par_iter()
            .map(|&(t, d)| Ok(evaluate(&Scenario::new(t, d, 1.0)?, Method::SdpFull, &EvalOptions::default())?.gap))
            .collect::<AppResult<_>>()?;
        let min_gap = gaps.iter().copied().fold(f64::INFINITY, f64::min);
        Ok((
            gap_ok && min_gap > 0.0,
            format!(
                "gap at (π/8, 0.1, 1) = {:.6} (0.1470 ± 1e-3); min gap over 27 interior cells = {min_gap:.3e} (> 0)",
                point.gap
            ),
        ))
    };
    outcome(5, "commuting strategy is strictly suboptimal", run())
}

/// Sweep at `θ = π/8`: the gap is non-negative, small for `ε ≤ 0.8`, and
/// largest near `ε = 1`.
pub fn criterion_6() -> CriterionOutcome {
    let run = || -> AppResult<(bool, String)> {
        let spec = SweepSpec {
            theta_grid: vec![FRAC_PI_8],
            delta_grid: parse_list("0:0.05:1", "delta")?,
            epsilon_grid: parse_list("0.5:0.02:1", "epsilon")?,
            methods: vec![Method::SdpFull],
            output_path: None,
            format: Format::Csv,
        };
        let rows = run_sweep(&spec, &EvalOptions::default())?;
        let min_gap = rows.iter().map(|r| r.gap).fold(f64::INFINITY, f64::min);
        let low = rows
            .iter()
            .filter(|r| r.epsilon <= 0.8 + 1e-12)
            .map(|r| r.gap)
            .fold(f64::NEG_INFINITY, f64::max);
        let top = rows
            .iter()
            .max_by(|a, b| a.gap.total_cmp(&b.gap))
            .expect("non-empty sweep");
        Ok((
            min_gap >= -1e-6 && low < 1e-2 && top.epsilon >= 0.95 - 1e-12,
            format!(
                "{} cells; min gap = {min_gap:.2e} (≥ −1e-6); max gap for ε ≤ 0.8 = {low:.2e} (< 1e-2); \
                 max gap {:.4} at δ={}, ε={} (ε ≥ 0.95)",
                rows.len(),
                top.gap,
                top.delta,
                top.epsilon
            ),
        ))
    };
    outcome(6, "tradeoff sweep at θ=π/8", run())
}

fn solve_formulation(sc: &Scenario, which: Formulation) -> AppResult<SdpSolution> {
    let problem = match which {
        Formulation::Full => build_full_sdp(sc),
        Formulation::Reduced => build_reduced_sdp(sc),
    };
    let sol = solve(&problem, &SdpSettings::default())?;
    if !sol.is_optimal() {
        return Err(crate::error::AppError::Solver(format!("{sc:?}: status {}", sol.status)));
    }
    Ok(sol)
}

/// Worst objective jump across region boundaries on a few `z` slices.
fn boundary_jump(sc: &Scenario, rng: &mut impl Rng) -> f64 {
    let (lo, hi) = z_range(sc.delta());
    let mut jump: f64 = 0.0;
    for _ in 0..5 {
        let z = rng.gen_range(lo..=hi);
        let xb = x_bound(sc.delta(), z);
        let n = 200;
        let xs: Vec<f64> = (0..=n).map(|k| -xb + 2.0 * xb * k as f64 / n as f64).collect();
        for w in xs.windows(2) {
            let (mut a, mut b) = (w[0], w[1]);
            let ra = region_classify(z, a, sc);
            if ra == region_classify(z, b, sc) {
                continue;
            }
            for _ in 0..200 {
                let m = 0.5 * (a + b);
                if region_classify(z, m, sc) == ra {
                    a = m;
                } else {
                    b = m;
                }
            }
            let (Ok(fa), Ok(fb)) = (objective_reduced(z, a, sc), objective_reduced(z, b, sc)) else {
                return f64::INFINITY;
            };
            jump = jump.max((fa - fb).abs());
        }
    }
    jump
}

struct PropertyRow {
    monotone_delta: f64,
    monotone_epsilon: f64,
    below: f64,
    above: f64,
    full_reduced: f64,
    duality: f64,
    continuity: f64,
}

/// Properties on 200 seeded random scenarios.
pub fn criterion_7() -> CriterionOutcome {
    let run = || -> AppResult<(bool, String)> {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let draws: Vec<(Scenario, f64, f64, u64)> = (0..200)
            .map(|_| -> AppResult<_> {
                let sc = Scenario::new(
                    rng.gen_range(0.0..=FRAC_PI_4),
                    rng.gen_range(0.0..=1.0),
                    rng.gen_range(0.01..=1.0),
                )?;
                Ok((sc, rng.gen_range(0.0..=1.0), rng.gen_range(0.0..=1.0), rng.gen()))
            })
            .collect::<AppResult<_>>()?;
        let rows: Vec<PropertyRow> = draws
            .par_iter()
            .map(|&(sc, ud, ue, seed)| -> AppResult<PropertyRow> {
                let (t, d, e) = (sc.theta(), sc.delta(), sc.epsilon());
                let full = solve_formulation(&sc, Formulation::Full)?;
                let reduced = solve_formulation(&sc, Formulation::Reduced)?;
                let v = full.primal_value;
                let more_delta = d + ud * (1.0 - d);
                let more_eps = e + ue * (1.0 - e);
                let vd = solve_formulation(&Scenario::new(t, more_delta, e)?, Formulation::Full)?.primal_value;
                let ve = solve_formulation(&Scenario::new(t, d, more_eps)?, Formulation::Full)?.primal_value;
                let (omega, dual) = extract_strategy(&full, Formulation::Full, &sc)?;
                let worst_case = inner_max(&omega, &sc.state(), e).value;
                let mut local = ChaCha8Rng::seed_from_u64(seed);
                Ok(PropertyRow {
                    monotone_delta: vd - v,
                    monotone_epsilon: ve - v,
                    below: (1.0 - d) * (1.0 - e) - v,
                    above: v - p10_commuting(&sc).value,
                    full_reduced: (v - reduced.primal_value).abs(),
                    duality: (worst_case - dual.objective(e)).abs(),
                    continuity: boundary_jump(&sc, &mut local),
                })
            })
            .collect::<AppResult<_>>()?;
        let m = |f: fn(&PropertyRow) -> f64| rows.iter().map(f).fold(f64::NEG_INFINITY, f64::max);
        let (md, me) = (m(|r| r.monotone_delta), m(|r| r.monotone_epsilon));
        let (lo, hi) = (m(|r| r.below), m(|r| r.above));
        let (fr, du, co) = (m(|r| r.full_reduced), m(|r| r.duality), m(|r| r.continuity));
        let passed = md <= 1e-8 && me <= 1e-8 && lo <= 1e-8 && hi <= 1e-8 && fr <= 1e-6 && du <= 1e-6 && co <= 1e-10;
        Ok((
            passed,
            format!(
                "200 scenarios; max increase in δ {md:.1e}, in ε {me:.1e} (≤ 1e-8); lower-bound excess {lo:.1e}, \
                 commuting-bound excess {hi:.1e} (≤ 1e-8); |full − reduced| {fr:.1e} (≤ 1e-6); \
                 inner duality {du:.1e} (≤ 1e-6); boundary jump {co:.1e} (≤ 1e-10)"
            ),
        ))
    };
    outcome(7, "property suite", run())
}

/// The grid oracle tracks the reduced SDP from above.
pub fn criterion_8() -> CriterionOutcome {
    let run = || -> AppResult<(bool, String)> {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let scenarios: Vec<Scenario> = (0..20)
            .map(|_| {
                Scenario::new(
                    rng.gen_range(0.0..=FRAC_PI_4),
                    rng.gen_range(0.0..=1.0),
                    rng.gen_range(0.01..=1.0),
                )
            })
            .collect::<Result<_, _>>()?;
        let diffs: Vec<f64> = scenarios
            .par_iter()
            .map(|sc| -> AppResult<f64> {
                let sdp = solve_formulation(sc, Formulation::Reduced)?.primal_value;
                Ok(grid_p10(sc, ORACLE_GRID).value - sdp)
            })
            .collect::<AppResult<_>>()?;
        let above = diffs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let below = diffs.iter().copied().fold(f64::INFINITY, f64::min);
        Ok((
            above <= 1e-3 && below >= -1e-9,
            format!("20 scenarios; grid − sdp-reduced in [{below:.2e}, {above:.2e}] (within [−1e-9, 1e-3])"),
        ))
    };
    outcome(8, "grid oracle vs reduced SDP", run())
}

/// Every criterion, in order.
pub fn run_all() -> Vec<CriterionOutcome> {
    vec![
        criterion_1(),
        criterion_2(),
        criterion_3(),
        criterion_4(),
        criterion_5(),
        criterion_6(),
        criterion_7(),
        criterion_8(),
    ]
}
