//! Brute-force verification paths that share no closed forms with
//! [`crate::analytic`] and no code with the SDP solver.
//!
//! The inner adversary problem
//! `max { tr(Ωσ) : σ ≽ 0, tr σ = 1, ⟨ψ|σ|ψ⟩ ≤ 1 − ε }` is evaluated through
//! its one-variable dual
//!
//! ```text
//! φ(y) = λ_max(Ω − y|ψ⟩⟨ψ|) + (1−ε) y,     value = min_{y ≥ 0} φ(y),
//! ```
//!
//! which is convex because `λ_max` of an affine family is convex.
//!
//! **Truncation.** Let `P⊥ = 1 − |ψ⟩⟨ψ|`. Compressing to the range of `P⊥`
//! gives `λ_max(Ω − y|ψ⟩⟨ψ|) ≥ λ_max(P⊥ΩP⊥) =: λ⊥` for every `y`, so
//! `φ(y) ≥ λ⊥ + (1−ε) y`, while `φ(0) = λ_max(Ω)`. Any minimizer therefore
//! lies in `[0, Y]` with `Y = (λ_max(Ω) − λ⊥)/(1−ε)`. A fixed cap such as
//! `2/ε` is not enough: near `ε = 1` the minimizer grows like
//! `|⟨ψ|Ω|ψ⊥⟩|/√(1−ε)`.
//!
//! At `ε = 1` the constraint forces `σ` onto the range of `P⊥` and the value
//! is exactly `λ⊥`. At `ε ≤ 0` the constraint is vacuous and the value is
//! `λ_max(Ω)`.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
// supplies float methods when std is not linked
#[allow(unused_imports)]
use num_traits::Float;

use crate::golden;
use crate::model::Scenario;
use crate::qcore::{
    embed, partial_transpose, DensityMatrix, Effect, HermitianOperator, PureState2Q,
    SymmetrizedStrategy,
};
use crate::search;

/// Golden-section iterations of the one-variable dual.
pub const DUAL_ITERATIONS: usize = 200;
/// Relative bracket width at which the dual search stops.
pub const DUAL_TOL: f64 = 1e-12;
/// Tolerance of every check made by [`certify_strategy`].
pub const CERTIFY_TOL: f64 = 1e-8;
/// Smallest grid accepted by [`grid_p10`]; smaller requests are raised to it.
pub const MIN_GRID: usize = 50;
/// A witness is only reported if it attains `value − WITNESS_SLACK`.
pub const WITNESS_SLACK: f64 = 1e-6;

/// Couplings between `{|00⟩,|11⟩}` and `{|01⟩,|10⟩}` below this are treated
/// as zero by the block-diagonal fast path.
const BLOCK_TOL: f64 = 1e-14;

/// How an [`OracleReport`] was computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleMethod {
    /// Golden-section search on the one-variable dual.
    Dual1D,
    /// Grid over symmetrized strategies with local polish.
    GridPolish,
}

#[derive(Debug, Clone)]
pub struct OracleReport {
    pub value: f64,
    /// A feasible alternative state attaining at least
    /// `value −` [`WITNESS_SLACK`].
    pub witness_sigma: Option<DensityMatrix>,
    pub method: OracleMethod,
    /// Dual evaluations for [`inner_max`], strategies evaluated for
    /// [`grid_p10`].
    pub evaluations: usize,
}

/// `λ_max(Ω − y|ψ⟩⟨ψ|)` and the compression `λ_max(P⊥ΩP⊥)`, with a cheap
/// path for operators that do not couple the `{|00⟩,|11⟩}` sector to the
/// rest.
enum Shifted<'a> {
    Blocks {
        /// `{|00⟩,|11⟩}` block: diagonal entries and the `(00, 11)` entry.
        a: f64,
        b: f64,
        c: Complex64,
        /// `λ_max` of the `{|01⟩,|10⟩}` block.
        rest: f64,
        cos: f64,
        sin: f64,
    },
    Dense {
        omega: &'a HermitianOperator,
        psi: [Complex64; 4],
    },
}

fn hermitian2_max(a: f64, b: f64, c: Complex64) -> f64 {
    0.5 * (a + b) + (0.5 * (a - b)).hypot(c.norm())
}

impl<'a> Shifted<'a> {
    fn new(omega: &'a HermitianOperator, state: &PureState2Q) -> Self {
        let coupled = [0, 3]
            .iter()
            .any(|&i| [1, 2].iter().any(|&j| omega.get(i, j).norm() > BLOCK_TOL));
        if coupled {
            return Shifted::Dense {
                omega,
                psi: state.state_vector(),
            };
        }
        let (sin, cos) = state.theta().sin_cos();
        Shifted::Blocks {
            a: omega.get(0, 0).re,
            b: omega.get(3, 3).re,
            c: omega.get(0, 3),
            rest: hermitian2_max(omega.get(1, 1).re, omega.get(2, 2).re, omega.get(1, 2)),
            cos,
            sin,
        }
    }

    fn lambda_max(&self, y: f64) -> f64 {
        match *self {
            Shifted::Blocks {
                a,
                b,
                c,
                rest,
                cos,
                sin,
            } => {
                let sector = hermitian2_max(a - y * cos * cos, b - y * sin * sin, c - y * cos * sin);
                sector.max(rest)
            }
            Shifted::Dense { omega, psi } => shifted_operator(omega, &psi, y).eigen().max(),
        }
    }

    fn compressed_max(&self) -> f64 {
        match *self {
            Shifted::Blocks {
                a,
                b,
                c,
                rest,
                cos,
                sin,
            } => {
                // ⟨ψ⊥|B|ψ⊥⟩ with ψ⊥ = (−sin, cos) in the sector
                let perp = sin * sin * a + cos * cos * b - 2.0 * sin * cos * c.re;
                perp.max(rest)
            }
            Shifted::Dense { omega, psi } => compressed_operator(omega, &psi).eigen().max(),
        }
    }
}

fn shifted_operator(omega: &HermitianOperator, psi: &[Complex64; 4], y: f64) -> HermitianOperator {
    let p = HermitianOperator::projector(psi).scaled(y);
    omega.sub(&p).expect("both 4×4")
}

/// `P⊥ΩP⊥ − |ψ⟩⟨ψ|`: equal to `P⊥ΩP⊥` on the range of `P⊥` and pushed below
/// zero along `ψ`, so its top eigenvector lies in the range of `P⊥`.
fn compressed_operator(omega: &HermitianOperator, psi: &[Complex64; 4]) -> HermitianOperator {
    let n = 4;
    let mut p = vec![Complex64::new(0.0, 0.0); n * n];
    for i in 0..n {
        for j in 0..n {
            let id = if i == j { 1.0 } else { 0.0 };
            p[i * n + j] = Complex64::new(id, 0.0) - psi[i] * psi[j].conj();
        }
    }
    let mut out = vec![Complex64::new(0.0, 0.0); n * n];
    for i in 0..n {
        for j in 0..n {
            let mut s = Complex64::new(0.0, 0.0);
            for k in 0..n {
                for l in 0..n {
                    s += p[i * n + k] * omega.get(k, l) * p[l * n + j];
                }
            }
            out[i * n + j] = s - psi[i] * psi[j].conj();
        }
    }
    HermitianOperator::new(n, out).expect("Hermitian by construction")
}

fn top_vector(op: &HermitianOperator) -> Vec<Complex64> {
    op.eigen().vectors.pop().expect("nonempty spectrum")
}

fn overlap(psi: &[Complex64; 4], v: &[Complex64]) -> f64 {
    psi.iter()
        .zip(v)
        .map(|(p, x)| p.conj() * x)
        .sum::<Complex64>()
        .norm_sqr()
}

/// Worst-case `tr(Ωσ)` over density matrices with `⟨ψ|σ|ψ⟩ ≤ 1 − ε`.
pub fn inner_max(omega: &Effect, state: &PureState2Q, epsilon: f64) -> OracleReport {
    inner_max_operator(omega.operator(), state, epsilon)
}

/// [`inner_max`] for an arbitrary Hermitian 4×4 operator.
pub(crate) fn inner_max_operator(
    omega: &HermitianOperator,
    state: &PureState2Q,
    epsilon: f64,
) -> OracleReport {
    let (value, y_star, evaluations) = dual_minimum(omega, state, epsilon);
    OracleReport {
        value,
        witness_sigma: witness(omega, state, epsilon, value, y_star),
        method: OracleMethod::Dual1D,
        evaluations,
    }
}

/// `(min φ, argmin φ, evaluations)`; the argmin is `None` at `ε ≥ 1`.
fn dual_minimum(omega: &HermitianOperator, state: &PureState2Q, epsilon: f64) -> (f64, Option<f64>, usize) {
    let shifted = Shifted::new(omega, state);
    if epsilon >= 1.0 {
        return (shifted.compressed_max(), None, 1);
    }
    let top = shifted.lambda_max(0.0);
    if epsilon <= 0.0 {
        return (top, Some(0.0), 1);
    }
    let slope = 1.0 - epsilon;
    let upper = ((top - shifted.compressed_max()) / slope).max(0.0);
    let r = golden::minimize(
        |y| shifted.lambda_max(y) + slope * y,
        0.0,
        upper,
        DUAL_TOL,
        DUAL_ITERATIONS,
    );
    (r.value, Some(r.x), r.evaluations + 2)
}

/// Mixes the top eigenvectors of `Ω − y|ψ⟩⟨ψ|` just left and right of the
/// dual minimizer so the fidelity constraint holds with equality when the
/// minimizer is interior. By the subgradient condition the left vector has
/// overlap at least `1 − ε` with `ψ` and the right one at most `1 − ε`.
fn witness(
    omega: &HermitianOperator,
    state: &PureState2Q,
    epsilon: f64,
    value: f64,
    y_star: Option<f64>,
) -> Option<DensityMatrix> {
    let psi = state.state_vector();
    let cap = 1.0 - epsilon.clamp(0.0, 1.0);
    let sigma = match y_star {
        None => HermitianOperator::projector(&top_vector(&compressed_operator(omega, &psi))),
        Some(y) => {
            let pure = |v: &[Complex64]| HermitianOperator::projector(v);
            let left = top_vector(&shifted_operator(omega, &psi, (y - 1e-9 * y.max(1.0)).max(0.0)));
            let fl = overlap(&psi, &left);
            if fl <= cap {
                pure(&left)
            } else {
                // the golden minimizer may sit slightly left of the kink
                let right = (0..7)
                    .map(|k| y + 1e-9 * 10f64.powi(k) * y.max(1.0))
                    .map(|yr| top_vector(&shifted_operator(omega, &psi, yr)))
                    .find(|v| overlap(&psi, v) <= cap)?;
                let fr = overlap(&psi, &right);
                let p = (cap - fr) / (fl - fr);
                pure(&left)
                    .scaled(p)
                    .add(&pure(&right).scaled(1.0 - p))
                    .expect("both 4×4")
            }
        }
    };
    let attained = sigma.trace_product(omega).ok()?;
    let fidelity = sigma.expectation(&psi);
    if attained >= value - WITNESS_SLACK && fidelity <= cap + 1e-9 {
        DensityMatrix::new(sigma).ok()
    } else {
        None
    }
}

/// The embedded symmetrized strategy `(1−δ−z, z, x)` with `ω` at its PPT
/// lower bound `|x cos 2θ + z sin 2θ|`.
fn grid_strategy(sc: &Scenario, z: f64, x: f64) -> Option<Effect> {
    let omega = (x * sc.cos2() + z * sc.sin2()).abs();
    let s = SymmetrizedStrategy::new(1.0 - sc.delta() - z, z, x, omega).ok()?;
    embed(&s, &sc.state()).ok()
}

/// Minimum of [`inner_max`] over embedded symmetrized strategies on a
/// `grid_n × grid_n` grid of the feasible `(z, x)` set, followed by local
/// polish. Every evaluated strategy is feasible, so the result bounds the
/// true `p10` from above.
pub fn grid_p10(sc: &Scenario, grid_n: usize) -> OracleReport {
    let state = sc.state();
    let eps = sc.epsilon();
    let r = search::minimize(sc.delta(), grid_n.max(MIN_GRID), |z, x| match grid_strategy(sc, z, x) {
        Some(effect) => dual_minimum(effect.operator(), &state, eps).0,
        None => f64::INFINITY,
    });
    OracleReport {
        value: r.value,
        witness_sigma: None,
        method: OracleMethod::GridPolish,
        evaluations: r.evaluations,
    }
}

/// A constraint of the verification problem.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Constraint {
    /// The operator is not 4×4.
    Dimension,
    /// `Ω ≽ 0`
    Positive,
    /// `Ω ≼ 1`
    BelowIdentity,
    /// Partial transpose `≽ 0`
    Ppt,
    /// `⟨ψ|Ω|ψ⟩ ≥ 1 − δ`
    Fidelity,
}

/// A failed check and how far it is from holding.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Violation {
    pub constraint: Constraint,
    pub residual: f64,
}

/// Report of [`certify_strategy`].
#[derive(Debug, Clone, PartialEq)]
pub struct Certificate {
    pub feasible: bool,
    /// `1 − ⟨ψ|Ω|ψ⟩`
    pub p01_worst: f64,
    /// [`inner_max`] of `Ω`.
    pub p10_worst: f64,
    pub violations: Vec<Violation>,
}

/// Checks `0 ≼ Ω ≼ 1`, PPT and the fidelity constraint, each to
/// [`CERTIFY_TOL`], and evaluates both worst-case errors. Failures are
/// reported, not raised.
pub fn certify_strategy(omega: &HermitianOperator, sc: &Scenario) -> Certificate {
    if omega.dim() != 4 {
        return Certificate {
            feasible: false,
            p01_worst: f64::NAN,
            p10_worst: f64::NAN,
            violations: vec![Violation {
                constraint: Constraint::Dimension,
                residual: (omega.dim() as f64 - 4.0).abs(),
            }],
        };
    }
    let state = sc.state();
    let mut violations = Vec::new();
    let mut check = |constraint, residual: f64| {
        if residual > CERTIFY_TOL {
            violations.push(Violation {
                constraint,
                residual,
            });
        }
    };
    let spectrum = omega.eigen();
    check(Constraint::Positive, -spectrum.min());
    check(Constraint::BelowIdentity, spectrum.max() - 1.0);
    let pt = partial_transpose(omega).expect("4×4");
    check(Constraint::Ppt, -pt.eigen().min());
    let accept = omega.expectation(&state.state_vector());
    check(Constraint::Fidelity, (1.0 - sc.delta()) - accept);
    Certificate {
        feasible: violations.is_empty(),
        p01_worst: 1.0 - accept,
        p10_worst: dual_minimum(omega, &state, sc.epsilon()).0,
        violations,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::{FRAC_PI_4, FRAC_PI_8};

    fn state(theta: f64) -> PureState2Q {
        PureState2Q::new(theta).unwrap()
    }

    fn effect(op: HermitianOperator) -> Effect {
        Effect::new(op).unwrap()
    }

    #[test]
    fn identity_and_projector() {
        let s = state(FRAC_PI_8);
        for eps in [0.1, 0.5, 0.9, 1.0] {
            let r = inner_max(&effect(HermitianOperator::identity(4)), &s, eps);
            assert!((r.value - 1.0).abs() < 1e-9);
            assert!(r.witness_sigma.is_some());
            let r = inner_max(&effect(s.projector()), &s, eps);
            assert!((r.value - (1.0 - eps)).abs() < 1e-9, "{eps} {}", r.value);
            let sigma = r.witness_sigma.expect("witness");
            let f = sigma.operator().expectation(&s.state_vector());
            assert!(f <= 1.0 - eps + 1e-9);
        }
    }

    #[test]
    fn commuting_optimum_value() {
        let sc = Scenario::new(FRAC_PI_8, 0.1, 0.9).unwrap();
        let (sin2, keep) = (sc.sin2(), 0.9);
        let z = keep / (2.0 + sin2);
        let s = SymmetrizedStrategy::new(keep - z, z, 0.0, z * sin2).unwrap();
        let omega = embed(&s, &sc.state()).unwrap();
        let r = inner_max(&omega, &sc.state(), 0.9);
        assert!((r.value - 0.3015751387).abs() < 1e-9, "{}", r.value);
        let c = certify_strategy(omega.operator(), &sc);
        assert!(c.feasible, "{c:?}");
        assert!((c.p01_worst - 0.1).abs() < 1e-12);
        assert!((c.p10_worst - r.value).abs() < 1e-15);
    }

    #[test]
    fn dense_path_matches_block_path() {
        // a tiny coupling forces the dense path without changing the value
        let sc = Scenario::new(0.3, 0.2, 0.7).unwrap();
        let s = SymmetrizedStrategy::new(0.55, 0.25, -0.1, 0.3).unwrap();
        let omega = embed(&s, &sc.state()).unwrap();
        let fast = inner_max(&omega, &sc.state(), 0.7);
        let mut entries = omega.operator().entries().to_vec();
        entries[1] = Complex64::new(1e-13, 0.0);
        entries[4] = Complex64::new(1e-13, 0.0);
        let dense = inner_max_operator(&HermitianOperator::new(4, entries).unwrap(), &sc.state(), 0.7);
        assert!((fast.value - dense.value).abs() < 1e-11);
    }

    #[test]
    fn minimizer_beyond_two_over_epsilon() {
        // near ε = 1 the dual minimizer is ≈ |x|/√(1−ε), far above 2/ε
        let st = state(0.2);
        let s = SymmetrizedStrategy::new(0.5, 0.0, 0.4, 0.2).unwrap();
        let omega = embed(&s, &st).unwrap();
        let eps = 0.9999;
        let (_, y, _) = dual_minimum(omega.operator(), &st, eps);
        assert!(y.unwrap() > 2.0 / eps);
        // 2×2 block [[t+z, x], [x, t−z]] against ψ = e₁
        let phi = |y: f64| 0.5 + (0.25 * y * y + 0.16).sqrt() - 0.5 * y + (1.0 - eps) * y;
        let exact = golden::minimize(phi, 0.0, 1e3, 1e-15, 400).value.max(0.2);
        assert!((inner_max(&omega, &st, eps).value - exact).abs() < 1e-9);
    }

    #[test]
    fn witness_attains_value() {
        let st = state(0.5);
        let s = SymmetrizedStrategy::new(0.45, 0.1, 0.3, 0.35).unwrap();
        let omega = embed(&s, &st).unwrap();
        for eps in [0.05, 0.3, 0.6, 0.95, 1.0] {
            let r = inner_max(&omega, &st, eps);
            let sigma = r.witness_sigma.expect("witness");
            let got = sigma.operator().trace_product(omega.operator()).unwrap();
            assert!(got >= r.value - WITNESS_SLACK && got <= r.value + 1e-9);
            assert!(sigma.operator().expectation(&st.state_vector()) <= 1.0 - eps + 1e-9);
        }
    }

    #[test]
    fn grid_examples() {
        let sc = Scenario::new(FRAC_PI_4, 0.0, 1.0).unwrap();
        assert!((grid_p10(&sc, 200).value - 1.0 / 3.0).abs() < 1e-3);
        let sc = Scenario::new(0.4, 1.0, 0.6).unwrap();
        assert!(grid_p10(&sc, 50).value.abs() < 1e-12);
    }

    #[test]
    fn certificate_flags_entangled_projector() {
        let sc = Scenario::new(FRAC_PI_8, 0.0, 0.5).unwrap();
        let c = certify_strategy(&sc.state().projector(), &sc);
        assert!(!c.feasible);
        assert_eq!(c.violations.len(), 1);
        assert_eq!(c.violations[0].constraint, Constraint::Ppt);
        let c = certify_strategy(&HermitianOperator::identity(4), &sc);
        assert!(c.feasible && c.p01_worst.abs() < 1e-15 && (c.p10_worst - 1.0).abs() < 1e-12);
        let c = certify_strategy(&HermitianOperator::identity(2), &sc);
        assert_eq!(c.violations[0].constraint, Constraint::Dimension);
    }
}
