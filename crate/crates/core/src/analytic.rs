//! Closed forms for the inner adversary problem, the commuting optimum, the
//! `ε = 1` solution, and the reduced two-variable minimization.
//!
//! Throughout, a symmetrized effect is described by `(t, z, x)` with
//! `ω = |x cos 2θ + z sin 2θ|` at its smallest feasible value, and the
//! inner problem is
//!
//! ```text
//! max { tr(Ωσ) : σ ≽ 0, tr σ = 1, ⟨ψ|σ|ψ⟩ ≤ 1 − ε }
//!   = min { y1 + (1−ε) y2 : y1·1 + y2·|ψ⟩⟨ψ| ≽ Ω, y2 ≥ 0 }.
//! ```
//!
//! For `y1 > t − z` the smallest admissible `y2` is
//! `max{0, (t+z) − y1 + x²/(y1 − (t−z))}`, which vanishes for
//! `y1 ≥ λ_max = t + √(x² + z²)`.

use core::f64::consts::FRAC_PI_4;

// supplies float methods when std is not linked
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::model::Scenario;
use crate::search;

/// Slack used when checking that `(t, z, x)` describes an effect.
const FEASIBILITY_TOL: f64 = 1e-10;
/// Below this `ε` the reduced minimization returns the commuting optimum.
pub const SMALL_EPSILON: f64 = 1e-6;
/// Grid size of [`solve_reduced`].
pub const SOLVE_GRID: usize = 400;

/// Which candidate attains the inner minimum over `y1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    /// `y1* = ω`, the PPT block is active.
    AtOmega,
    /// `y1* = ŷ1`, the stationary point of the dual objective.
    AtStationary,
    /// `y1* = λ_max`, where `y2 = 0`.
    AtLambdaMax,
    /// `x = 0`.
    Commuting,
}

/// Optimal `y1` of the inner dual and the resulting worst-case `p10`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InnerSolution {
    pub y1_star: f64,
    pub value: f64,
    pub branch: Branch,
    /// Stationary point `ŷ1 = (t−z) + √((1−ε)/ε)·|x|`; absent for `x = 0`.
    pub y1_hat: Option<f64>,
    /// Largest eigenvalue `t + √(x² + z²)` of the 2×2 block. The smallest is
    /// `t − √(x² + z²)`.
    pub lambda_max: f64,
}

fn check_block(t: f64, z: f64, x: f64) -> Result<()> {
    let r = x.hypot(z);
    let ok = [t, z, x].iter().all(|v| v.is_finite())
        && t - r >= -FEASIBILITY_TOL
        && t + r <= 1.0 + FEASIBILITY_TOL;
    if ok {
        Ok(())
    } else {
        Err(Error::InfeasiblePoint { z, x })
    }
}

/// Inner solution for a commuting strategy (`x = 0`):
/// `y1* = max{t−z, |z sin 2θ|}`, value `y1* + (1−ε)·max{0, t+z−y1*}`.
pub fn inner_value_commuting(t: f64, z: f64, sc: &Scenario) -> Result<InnerSolution> {
    check_block(t, z, 0.0)?;
    let y1 = (t - z).max((z * sc.sin2()).abs());
    Ok(InnerSolution {
        y1_star: y1,
        value: y1 + (1.0 - sc.epsilon()) * (t + z - y1).max(0.0),
        branch: Branch::Commuting,
        y1_hat: None,
        lambda_max: t + z.abs(),
    })
}

/// Inner solution for a non-commuting strategy (`x ≠ 0`).
///
/// `y1* = max{ω, min{ŷ1, λ_max}}` and the value is
/// `y1* + (1−ε)[(t+z) − y1* + x²/(y1* − (t−z))]`, where the bracket is
/// dropped once `y1* = λ_max`. At `ε = 1` this reduces to
/// `max{ω, t − z}`.
pub fn inner_value_noncommuting(t: f64, z: f64, x: f64, sc: &Scenario) -> Result<InnerSolution> {
    if x == 0.0 {
        return Err(Error::CommutingStrategy);
    }
    check_block(t, z, x)?;
    let eps = sc.epsilon();
    let omega = (x * sc.cos2() + z * sc.sin2()).abs();
    let lambda_max = t + x.hypot(z);
    if eps == 1.0 {
        let (y1, branch) = if t - z <= omega {
            (omega, Branch::AtOmega)
        } else {
            (t - z, Branch::AtStationary)
        };
        return Ok(InnerSolution {
            y1_star: y1,
            value: y1,
            branch,
            y1_hat: Some(t - z),
            lambda_max,
        });
    }
    let lift = ((1.0 - eps) / eps).sqrt() * x.abs();
    let y1_hat = (t - z) + lift;
    let (y1, branch) = if y1_hat <= omega {
        (omega, Branch::AtOmega)
    } else if lift <= lambda_max_excess(z, x) {
        (y1_hat, Branch::AtStationary)
    } else {
        (lambda_max, Branch::AtLambdaMax)
    };
    let value = if branch == Branch::AtLambdaMax {
        lambda_max
    } else {
        let y2 = (t + z) - y1 + x * x / (y1 - (t - z));
        y1 + (1.0 - eps) * y2.max(0.0)
    };
    Ok(InnerSolution {
        y1_star: y1,
        value,
        branch,
        y1_hat: Some(y1_hat),
        lambda_max,
    })
}

/// Optimal commuting strategy and its error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CommutingOptimum {
    pub z_star: f64,
    pub omega_star: f64,
    pub value: f64,
}

/// `p10^c = (1−δ)[1 − ε/(1 + sin θ cos θ)]`, attained at
/// `z* = (1−δ)/(2 + sin 2θ)`, `ω* = (1−δ) sin 2θ/(2 + sin 2θ)`.
pub fn p10_commuting(sc: &Scenario) -> CommutingOptimum {
    let s = sc.sin2();
    let keep = 1.0 - sc.delta();
    let (sin, cos) = sc.theta().sin_cos();
    CommutingOptimum {
        z_star: keep / (2.0 + s),
        omega_star: keep * s / (2.0 + s),
        value: (keep * (1.0 - sc.epsilon() / (1.0 + sin * cos))).clamp(0.0, 1.0),
    }
}

/// Geometry of the `ε = 1` minimizer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Eps1Geometry {
    /// Intersection of the upper parabola with the right branch of the kink.
    pub x0: f64,
    /// Intersection of the lower parabola with the right branch of the kink.
    pub x1: f64,
    /// `max(x0, x1)`
    pub x_star: f64,
    /// `−(1−δ) tan(2θ)/2`
    pub x_kink: f64,
}

/// Closed-form `p10` at `ε = 1`:
/// `p10^c + x*·2 cos 2θ/(2 + sin 2θ)`, clamped below at 0.
pub fn p10_eps1(theta: f64, delta: f64) -> Result<(f64, Eps1Geometry)> {
    let sc = Scenario::new(theta, delta, 1.0)?;
    let (s, c) = (sc.sin2(), sc.cos2());
    let d = sc.delta();
    let x0 = (1.0 - d) * (c - (1.0 + 2.0 * s).sqrt()) / (2.0 + s);
    let x1 = -(d * c + (d * d * (1.0 + 2.0 * s) + 2.0 * d * (2.0 + s)).sqrt()) / (2.0 + s);
    let x_star = x0.max(x1);
    let x_kink = if sc.theta() == FRAC_PI_4 {
        f64::NEG_INFINITY
    } else {
        -0.5 * (1.0 - d) * (2.0 * sc.theta()).tan()
    };
    let value = p10_commuting(&sc).value + x_star * 2.0 * c / (2.0 + s);
    Ok((
        value.max(0.0),
        Eps1Geometry {
            x0,
            x1,
            x_star,
            x_kink,
        },
    ))
}

/// Partition of the reduced feasible set by the active inner branch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Region {
    /// `ŷ1 ≤ ω`
    I,
    /// `ω < ŷ1 ≤ λ_max`
    II,
    /// `ŷ1 > λ_max`
    III,
}

/// `λ_max − (t − z) = √(x² + z²) + z`, evaluated without cancellation
/// for `z < 0`.
fn lambda_max_excess(z: f64, x: f64) -> f64 {
    let r = x.hypot(z);
    if z < 0.0 {
        x * x / (r - z)
    } else {
        r + z
    }
}

fn stationary_gain(sc: &Scenario) -> f64 {
    let eps = sc.epsilon();
    ((1.0 - eps) / eps).sqrt()
}

/// Region of `(z, x)` with `t = 1 − δ − z`. Boundaries go to the
/// lower-numbered region.
pub fn region_classify(z: f64, x: f64, sc: &Scenario) -> Region {
    let t = 1.0 - sc.delta() - z;
    let y1_hat = (t - z) + stationary_gain(sc) * x.abs();
    let omega = (x * sc.cos2() + z * sc.sin2()).abs();
    if y1_hat <= omega {
        Region::I
    } else if stationary_gain(sc) * x.abs() <= lambda_max_excess(z, x) {
        Region::II
    } else {
        Region::III
    }
}

/// Worst-case `p10` of the symmetrized strategy `(1−δ−z, z, x)` with `ω`
/// at its lower bound, evaluated with the closed form of its region:
///
/// * I: `f(ω)`
/// * II: `(1−δ) − 2εz + 2√(ε(1−ε))·|x|`
/// * III: `1 − δ − z + √(x² + z²)`
pub fn objective_reduced(z: f64, x: f64, sc: &Scenario) -> Result<f64> {
    let d = sc.delta();
    if !search::is_feasible(d, z, x, FEASIBILITY_TOL) {
        return Err(Error::InfeasiblePoint { z, x });
    }
    let eps = sc.epsilon();
    let t = 1.0 - d - z;
    let omega = (x * sc.cos2() + z * sc.sin2()).abs();
    Ok(match region_classify(z, x, sc) {
        Region::I => {
            let coupling = if x == 0.0 {
                0.0
            } else {
                x * x / (omega - (t - z))
            };
            if eps == 1.0 {
                omega
            } else {
                omega + (1.0 - eps) * ((t + z) - omega + coupling).max(0.0)
            }
        }
        Region::II => {
            let closed = (1.0 - d) - 2.0 * eps * z + 2.0 * (eps * (1.0 - eps)).sqrt() * x.abs();
            // at x = 0 with z < 0 the stationary point meets λ_max = t − z
            if x == 0.0 && z < 0.0 {
                t - z
            } else {
                closed
            }
        }
        Region::III => 1.0 - d - z + x.hypot(z),
    })
}

/// Minimizer of [`objective_reduced`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReducedOptimum {
    pub value: f64,
    pub z: f64,
    pub x: f64,
}

/// Global minimum of [`objective_reduced`] over the LMI-feasible `(z, x)`
/// set, by a grid pass with golden-section polish. For `ε <`
/// [`SMALL_EPSILON`] the commuting optimum is returned.
pub fn solve_reduced(sc: &Scenario) -> ReducedOptimum {
    let com = p10_commuting(sc);
    if sc.epsilon() < SMALL_EPSILON || sc.delta() == 1.0 {
        return ReducedOptimum {
            value: com.value,
            z: com.z_star,
            x: 0.0,
        };
    }
    let r = search::minimize(sc.delta(), SOLVE_GRID, |z, x| {
        objective_reduced(z, x, sc).unwrap_or(f64::INFINITY)
    });
    // the commuting optimum is always feasible; keep it on exact ties
    if com.value <= r.value {
        ReducedOptimum {
            value: com.value,
            z: com.z_star,
            x: 0.0,
        }
    } else {
        ReducedOptimum {
            value: r.value,
            z: r.z,
            x: r.x,
        }
    }
}

/// Membership of `(z, x)` in the three regions bounding the `ε = 1`
/// feasible set.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Eps1Membership {
    /// `z ≤ (1−δ)/2 − x²/(2(1−δ))`
    pub in_p0: bool,
    /// `z ≥ x²/(2δ) − δ/2`; at `δ = 0` this is `x = 0 ∧ z ≥ 0`.
    pub in_p1: bool,
    /// Above the broken line with kink at `x_k`.
    pub in_k: bool,
}

/// Evaluates the region inequalities as stated, with a `1e-12` slack so
/// boundary points count as members.
pub fn eps1_feasible_membership(z: f64, x: f64, theta: f64, delta: f64) -> Result<Eps1Membership> {
    const SLACK: f64 = 1e-12;
    let sc = Scenario::new(theta, delta, 1.0)?;
    let d = sc.delta();
    let (s, c) = (sc.sin2(), sc.cos2());
    let in_p0 = if d == 1.0 {
        x == 0.0 && z <= SLACK
    } else {
        z <= (1.0 - d) / 2.0 - x * x / (2.0 * (1.0 - d)) + SLACK
    };
    let in_p1 = if d == 0.0 {
        x == 0.0 && z >= -SLACK
    } else {
        z >= x * x / (2.0 * d) - d / 2.0 - SLACK
    };
    let (_, geom) = p10_eps1(theta, delta)?;
    let in_k = if x <= geom.x_kink {
        z >= (1.0 - d + x * c) / (2.0 - s) - SLACK
    } else {
        z >= (1.0 - d - x * c) / (2.0 + s) - SLACK
    };
    Ok(Eps1Membership {
        in_p0,
        in_p1,
        in_k,
    })
}
