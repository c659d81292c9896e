//! SDP formulations of the worst-case type-II error.
//!
//! The value of a scenario `(θ, δ, ε)` is
//!
//! ```text
//! p10 = min { y1 + (1−ε) y2 :  0 ≼ Ω ≼ 1,  Ω^{T_B} ≽ 0,  ⟨ψ|Ω|ψ⟩ ≥ 1−δ,
//!                              y1·1 + y2·|ψ⟩⟨ψ| − Ω ≽ 0,  y2 ≥ 0 }
//! ```
//!
//! [`build_full_sdp`] states this over a real symmetric 4×4 `Ω`;
//! [`build_reduced_sdp`] states it over the symmetrized parameters with
//! `t + z = 1 − δ` substituted.
//!
//! At `ε = 1` the `y2` term has no weight and its infimum is only approached
//! as `y2 → ∞`. Both builders then drop `y2` and impose the limiting
//! constraint `V(y1·1 − Ω)Vᵀ ≽ 0` on the complement `V` of `|ψ⟩`; the value
//! is unchanged and the problem keeps an attained optimum.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::FRAC_PI_4;


// supplies float methods when std is not linked
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::qcore::{
    embed, is_ppt, partial_transpose, Effect, HermitianOperator, PureState2Q,
    SymmetrizedStrategy,
};
use crate::sdp::{LmiBlock, SdpProblem, SdpSolution};

/// Parameters `(θ, δ, ε)` of one verification problem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scenario {
    theta: f64,
    delta: f64,
    epsilon: f64,
}

impl Scenario {
    /// `θ ∈ [0, π/4]`, `δ ∈ [0, 1]`, `ε ∈ (0, 1]`. Values within `1e-12` of a
    /// closed bound are clamped onto it.
    pub fn new(theta: f64, delta: f64, epsilon: f64) -> Result<Self> {
        let theta = PureState2Q::new(theta)?.theta();
        let check = |name, v: f64, lo_open: bool| {
            let lo_ok = if lo_open { v > 0.0 } else { v >= -1e-12 };
            if !v.is_finite() || !lo_ok || v > 1.0 + 1e-12 {
                Err(Error::OutOfDomain {
                    parameter: name,
                    value: v,
                })
            } else {
                Ok(v.clamp(0.0, 1.0))
            }
        };
        Ok(Self {
            theta,
            delta: check("delta", delta, false)?,
            epsilon: check("epsilon", epsilon, true)?,
        })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn state(&self) -> PureState2Q {
        PureState2Q::new(self.theta).expect("validated angle")
    }

    pub fn sin2(&self) -> f64 {
        (2.0 * self.theta).sin()
    }

    pub fn cos2(&self) -> f64 {
        (2.0 * self.theta).cos()
    }

    /// `θ = π/4`
    pub fn is_maximally_entangled(&self) -> bool {
        self.theta == FRAC_PI_4
    }
}

/// Dual variables `(y1, y2)` of the inner adversary problem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DualPoint {
    pub y1: f64,
    pub y2: f64,
}

impl DualPoint {
    pub fn new(y1: f64, y2: f64) -> Result<Self> {
        if !y1.is_finite() || !y2.is_finite() || y2 < -1e-10 {
            return Err(Error::OutOfDomain {
                parameter: "y2",
                value: y2,
            });
        }
        Ok(Self { y1, y2 })
    }

    /// `y1 + (1−ε) y2`
    pub fn objective(&self, epsilon: f64) -> f64 {
        self.y1 + (1.0 - epsilon) * self.y2
    }
}

/// Which formulation produced a solution.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Formulation {
    Full,
    Reduced,
}

/// True when the formulation carries the `y2` variable (`ε < 1`).
pub fn has_y2(sc: &Scenario) -> bool {
    sc.epsilon() < 1.0
}

/// Number of free entries of a real symmetric 4×4 matrix.
pub const FULL_OMEGA_VARS: usize = 10;

/// How [`build_full_sdp`] parametrizes `Ω`.
///
/// At `δ = 0` the constraints `⟨ψ|Ω|ψ⟩ ≥ 1` and `Ω ≼ 1` force `Ω|ψ⟩ = |ψ⟩`,
/// so no strictly feasible `Ω` exists. The problem is then restricted to
/// that face, `Ω = |ψ⟩⟨ψ| + Vᵀ W V` with `V` spanning the complement of
/// `|ψ⟩`, where it has an interior.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FullLayout {
    /// The 10 upper-triangular entries of `Ω`.
    Direct,
    /// The 6 upper-triangular entries of the 3×3 block `W`.
    Face,
}

impl FullLayout {
    pub fn for_scenario(sc: &Scenario) -> Self {
        if sc.delta() == 0.0 {
            FullLayout::Face
        } else {
            FullLayout::Direct
        }
    }

    /// Number of variables describing `Ω`.
    pub fn omega_vars(self) -> usize {
        match self {
            FullLayout::Direct => FULL_OMEGA_VARS,
            FullLayout::Face => 6,
        }
    }

    /// Total variable count including `y1` and, if present, `y2`.
    pub fn num_vars(self, sc: &Scenario) -> usize {
        self.omega_vars() + 1 + usize::from(has_y2(sc))
    }
}

fn upper_index(n: usize) -> Vec<(usize, usize)> {
    (0..n).flat_map(|i| (i..n).map(move |j| (i, j))).collect()
}

fn symmetric_unit(n: usize, i: usize, j: usize) -> Matrix {
    let mut m = Matrix::zeros(n, n);
    m[(i, j)] = 1.0;
    m[(j, i)] = 1.0;
    m
}

fn real_partial_transpose(m: &Matrix) -> Matrix {
    partial_transpose(&HermitianOperator::from_real(m))
        .expect("4×4 operand")
        .real_part()
}

/// Rows span the complement of `|ψ⟩`: `|ψ⊥⟩`, `|01⟩`, `|10⟩`.
fn complement_rows(sc: &Scenario) -> Matrix {
    Matrix::from_rows(&sc.state().adapted_basis()[1..])
}

/// `Ω = Ω₀ + Σₖ xₖ Bₖ` for the given layout.
fn omega_affine(sc: &Scenario, layout: FullLayout) -> (Matrix, Vec<Matrix>) {
    match layout {
        FullLayout::Direct => (
            Matrix::zeros(4, 4),
            upper_index(4)
                .into_iter()
                .map(|(i, j)| symmetric_unit(4, i, j))
                .collect(),
        ),
        FullLayout::Face => {
            let v = complement_rows(sc);
            let psi = sc.state().amplitudes();
            (
                Matrix::outer(&psi, &psi),
                upper_index(3)
                    .into_iter()
                    .map(|(i, j)| {
                        v.transpose()
                            .matmul(&symmetric_unit(3, i, j))
                            .matmul(&v)
                            .symmetrized()
                    })
                    .collect(),
            )
        }
    }
}

/// Real symmetric `Ω` from a solution vector of [`build_full_sdp`].
pub fn full_omega_matrix(sc: &Scenario, x: &[f64]) -> Matrix {
    let (mut omega, basis) = omega_affine(sc, FullLayout::for_scenario(sc));
    for (b, &xi) in basis.iter().zip(x) {
        omega.axpy(xi, b);
    }
    omega.symmetrized()
}

/// Variables: the entries of `Ω` per [`FullLayout`], then `y1`, and `y2`
/// when `ε < 1`.
pub fn build_full_sdp(sc: &Scenario) -> SdpProblem {
    let layout = FullLayout::for_scenario(sc);
    let with_y2 = has_y2(sc);
    let m = layout.omega_vars();
    let n = layout.num_vars(sc);
    let psi = sc.state().amplitudes();
    let (omega0, basis) = omega_affine(sc, layout);
    // coefficient list for a block whose Ω-part is `f(Bₖ)` and y-part `ys`
    let coeffs = |f: &dyn Fn(&Matrix) -> Matrix, ys: Vec<Matrix>| -> Vec<Matrix> {
        let mut out: Vec<Matrix> = basis.iter().map(f).collect();
        out.extend(ys);
        out
    };
    let zeros = |d: usize| vec![Matrix::zeros(d, d); n - m];

    let mut blocks = Vec::new();
    match layout {
        FullLayout::Direct => {
            // Ω ≽ 0,  1 − Ω ≽ 0
            blocks.push(LmiBlock::new(Matrix::zeros(4, 4), coeffs(&|b| b.clone(), zeros(4))));
            blocks.push(LmiBlock::new(
                Matrix::identity(4),
                coeffs(&|b| b.scaled(-1.0), zeros(4)),
            ));
            // ⟨ψ|Ω|ψ⟩ ≥ 1 − δ
            let mut fid: Vec<f64> = basis
                .iter()
                .map(|b| psi.iter().zip(b.matvec(&psi)).map(|(p, q)| p * q).sum())
                .collect();
            fid.resize(n, 0.0);
            blocks.push(LmiBlock::scalar(-(1.0 - sc.delta()), &fid));
        }
        FullLayout::Face => {
            // W ≽ 0,  1 − W ≽ 0
            let units: Vec<Matrix> = upper_index(3)
                .into_iter()
                .map(|(i, j)| symmetric_unit(3, i, j))
                .collect();
            let mut w = units.clone();
            w.extend(zeros(3));
            blocks.push(LmiBlock::new(Matrix::zeros(3, 3), w));
            let mut w = units.iter().map(|u| u.scaled(-1.0)).collect::<Vec<_>>();
            w.extend(zeros(3));
            blocks.push(LmiBlock::new(Matrix::identity(3), w));
        }
    }
    // Ω^{T_B} ≽ 0
    blocks.push(LmiBlock::new(
        real_partial_transpose(&omega0),
        coeffs(&real_partial_transpose, zeros(4)),
    ));
    if with_y2 {
        // y1·1 + y2·|ψ⟩⟨ψ| − Ω ≽ 0
        blocks.push(LmiBlock::new(
            omega0.scaled(-1.0),
            coeffs(
                &|b| b.scaled(-1.0),
                vec![Matrix::identity(4), Matrix::outer(&psi, &psi)],
            ),
        ));
        // y2 ≥ 0
        let mut y2 = vec![0.0; n];
        y2[n - 1] = 1.0;
        blocks.push(LmiBlock::scalar(0.0, &y2));
    } else {
        // V (y1·1 − Ω) Vᵀ ≽ 0
        let v = complement_rows(sc);
        let compress = |e: &Matrix| v.matmul(e).matmul(&v.transpose()).symmetrized();
        blocks.push(LmiBlock::new(
            compress(&omega0).scaled(-1.0),
            coeffs(&|b| compress(b).scaled(-1.0), vec![Matrix::identity(3)]),
        ));
    }

    let mut objective = vec![0.0; n];
    objective[m] = 1.0;
    if with_y2 {
        objective[m + 1] = 1.0 - sc.epsilon();
    }
    SdpProblem::new(
        objective,
        blocks.into_iter().map(|b| b.expect("well-formed block")).collect(),
    )
    .expect("well-formed problem")
}

/// Variable positions in [`build_reduced_sdp`].
pub mod reduced {
    pub const Z: usize = 0;
    pub const X: usize = 1;
    pub const OMEGA: usize = 2;
    pub const Y1: usize = 3;
    /// Present only when `ε < 1`.
    pub const Y2: usize = 4;
}

/// Variables `(z, x, ω, y1, y2)` with `t = 1 − δ − z`.
///
/// Blocks: `B ≽ 0`, `1 − B ≽ 0` for `B = [[1−δ, x], [x, 1−δ−2z]]`;
/// `ω ≥ ±(x cos 2θ + z sin 2θ)`; `ω ≤ 1`; `y1 ≥ ω`; `y2 ≥ 0`; and
/// `y1·1 + y2·e₁e₁ᵀ − B ≽ 0`. At `ε = 1` the last two become
/// `y1 ≥ 1 − δ − 2z`.
pub fn build_reduced_sdp(sc: &Scenario) -> SdpProblem {
    use reduced::*;
    let with_y2 = has_y2(sc);
    let num_vars = if with_y2 { 5 } else { 4 };
    let d = sc.delta();
    let (c, s) = (sc.cos2(), sc.sin2());
    let m2 = |a: f64, b: f64, dd: f64| Matrix::from_rows(&[[a, b], [b, dd]]);
    let z2 = || m2(0.0, 0.0, 0.0);
    let scalar = |constant: f64, pairs: &[(usize, f64)]| {
        let mut coeffs = vec![0.0; num_vars];
        for &(k, v) in pairs {
            coeffs[k] = v;
        }
        LmiBlock::scalar(constant, &coeffs)
    };

    let pad = |mut v: Vec<Matrix>| {
        v.truncate(num_vars);
        v
    };
    let mut blocks = vec![
        // B ≽ 0
        LmiBlock::new(
            m2(1.0 - d, 0.0, 1.0 - d),
            pad(vec![m2(0.0, 0.0, -2.0), m2(0.0, 1.0, 0.0), z2(), z2(), z2()]),
        ),
        // 1 − B ≽ 0
        LmiBlock::new(
            m2(d, 0.0, d),
            pad(vec![m2(0.0, 0.0, 2.0), m2(0.0, -1.0, 0.0), z2(), z2(), z2()]),
        ),
        scalar(0.0, &[(OMEGA, 1.0), (X, -c), (Z, -s)]),
        scalar(0.0, &[(OMEGA, 1.0), (X, c), (Z, s)]),
        scalar(1.0, &[(OMEGA, -1.0)]),
        scalar(0.0, &[(Y1, 1.0), (OMEGA, -1.0)]),
    ];
    if with_y2 {
        blocks.push(scalar(0.0, &[(Y2, 1.0)]));
        // y1·1 + y2·e₁e₁ᵀ − B ≽ 0
        blocks.push(LmiBlock::new(
            m2(-(1.0 - d), 0.0, -(1.0 - d)),
            vec![
                m2(0.0, 0.0, 2.0),
                m2(0.0, -1.0, 0.0),
                z2(),
                m2(1.0, 0.0, 1.0),
                m2(1.0, 0.0, 0.0),
            ],
        ));
    } else {
        blocks.push(scalar(-(1.0 - d), &[(Y1, 1.0), (Z, 2.0)]));
    }
    let mut objective = vec![0.0; num_vars];
    objective[Y1] = 1.0;
    if with_y2 {
        objective[Y2] = 1.0 - sc.epsilon();
    }
    SdpProblem::new(
        objective,
        blocks.into_iter().map(|b| b.expect("well-formed block")).collect(),
    )
    .expect("well-formed problem")
}

/// Moves `Ω` toward `1/2` just far enough that its partial transpose has no
/// negative eigenvalue. `1/2` is interior to both cones, so the result stays
/// an effect.
fn restore_ppt(omega: Effect) -> Effect {
    let pt_min = partial_transpose(omega.operator())
        .expect("4×4 effect")
        .eigen()
        .min();
    if pt_min >= 0.0 {
        return omega;
    }
    let eta = (-pt_min / (0.5 - pt_min)).min(1.0);
    let half = HermitianOperator::identity(4).scaled(0.5);
    let mixed = omega
        .operator()
        .scaled(1.0 - eta)
        .add(&half.scaled(eta))
        .expect("same dimension");
    Effect::clipped(&mixed)
}

/// Recovers the optimal effect and the inner dual point from a solution.
///
/// The full form clips the spectrum of `Ω` to `[0, 1]` and, if needed, mixes
/// in `1/2` to remove any residual partial-transpose negativity. The reduced
/// form clips `B` and sets `ω = |x cos 2θ + z sin 2θ|`, its smallest feasible
/// value, before embedding. At `ε = 1` the returned `y2` is 0 (see the
/// module docs); `y1` alone is then the objective.
pub fn extract_strategy(
    sol: &SdpSolution,
    which: Formulation,
    sc: &Scenario,
) -> Result<(Effect, DualPoint)> {
    if !sol.is_optimal() {
        return Err(Error::NotOptimal { status: sol.status });
    }
    let state = sc.state();
    match which {
        Formulation::Full => {
            let layout = FullLayout::for_scenario(sc);
            let expected = layout.num_vars(sc);
            if sol.x.len() != expected {
                return Err(Error::DimensionMismatch {
                    expected,
                    found: sol.x.len(),
                });
            }
            let raw = HermitianOperator::from_real(&full_omega_matrix(sc, &sol.x));
            let omega = restore_ppt(Effect::clipped(&raw));
            let m = layout.omega_vars();
            let y2 = sol.x.get(m + 1).map_or(0.0, |v| v.max(0.0));
            let dual = DualPoint::new(sol.x[m], y2)?;
            Ok((omega, dual))
        }
        Formulation::Reduced => {
            use reduced::*;
            let expected = 4 + usize::from(has_y2(sc));
            if sol.x.len() != expected {
                return Err(Error::DimensionMismatch {
                    expected,
                    found: sol.x.len(),
                });
            }
            let d = sc.delta();
            let (z, x) = (sol.x[Z], sol.x[X]);
            let b = Effect::clipped(&HermitianOperator::from_real(&Matrix::from_rows(&[
                [1.0 - d, x],
                [x, 1.0 - d - 2.0 * z],
            ])))
            .into_operator()
            .real_part();
            let (p, q, x) = (b[(0, 0)], b[(1, 1)], b[(0, 1)]);
            let (t, z) = (0.5 * (p + q), 0.5 * (p - q));
            let omega = (x * sc.cos2() + z * sc.sin2()).abs().min(1.0);
            let strategy = SymmetrizedStrategy::new(t, z, x, omega)?;
            let effect = embed(&strategy, &state)?;
            debug_assert!(is_ppt(&effect, 1e-10));
            let y2 = sol.x.get(Y2).map_or(0.0, |v| v.max(0.0));
            let dual = DualPoint::new(sol.x[Y1], y2)?;
            Ok((effect, dual))
        }
    }
}
