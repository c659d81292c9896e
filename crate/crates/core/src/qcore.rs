//! Two-qubit states, effects and the symmetry reduction of effects.
//!
//! All 4×4 operators use the computational basis ordering
//! `|00⟩, |01⟩, |10⟩, |11⟩`. The null hypothesis is the pure state
//! `|ψ⟩ = cos θ |00⟩ + sin θ |11⟩` with `θ ∈ [0, π/4]`.
//!
//! Symmetrized effects live in the ordered basis
//! `{|ψ⟩, |ψ⊥⟩, |01⟩, |10⟩}` with `|ψ⊥⟩ = −sin θ |00⟩ + cos θ |11⟩`, where
//! they take the block form
//!
//! ```text
//! ⎡ t+z   x   0  0 ⎤
//! ⎢  x   t−z  0  0 ⎥
//! ⎢  0    0   ω  0 ⎥
//! ⎣  0    0   0  ω ⎦
//! ```

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::FRAC_PI_4;

use num_complex::Complex64;

// supplies float methods when std is not linked
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::linalg::{eig2, HermitianEigen, Matrix};

/// Tolerance on `‖A − A†‖` for Hermitian operators.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Slack allowed on spectral (cone membership) conditions.
pub const PSD_TOL: f64 = 1e-10;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Two-qubit pure state `cos θ |00⟩ + sin θ |11⟩`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PureState2Q {
    theta: f64,
}

impl PureState2Q {
    /// Accepts `θ ∈ [0, π/4]`; values within `1e-12` outside are clamped.
    pub fn new(theta: f64) -> Result<Self> {
        if !theta.is_finite() || theta < -1e-12 || theta > FRAC_PI_4 + 1e-12 {
            return Err(Error::OutOfDomain {
                parameter: "theta",
                value: theta,
            });
        }
        Ok(Self {
            theta: theta.clamp(0.0, FRAC_PI_4),
        })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn sin2(&self) -> f64 {
        (2.0 * self.theta).sin()
    }

    pub fn cos2(&self) -> f64 {
        (2.0 * self.theta).cos()
    }

    /// Real amplitudes `(cos θ, 0, 0, sin θ)`.
    pub fn amplitudes(&self) -> [f64; 4] {
        [self.theta.cos(), 0.0, 0.0, self.theta.sin()]
    }

    pub fn state_vector(&self) -> [Complex64; 4] {
        self.amplitudes().map(|a| Complex64::new(a, 0.0))
    }

    /// `|ψ⊥⟩ = −sin θ |00⟩ + cos θ |11⟩`, the orthogonal complement of `|ψ⟩`
    /// inside the `{|00⟩, |11⟩}` sector.
    pub fn orthogonal_partner(&self) -> [f64; 4] {
        [-self.theta.sin(), 0.0, 0.0, self.theta.cos()]
    }

    /// `|ψ⟩⟨ψ|`
    pub fn projector(&self) -> HermitianOperator {
        HermitianOperator::from_real(&Matrix::outer(&self.amplitudes(), &self.amplitudes()))
    }

    /// Orthonormal basis `{|ψ⟩, |ψ⊥⟩, |01⟩, |10⟩}` as rows.
    pub fn adapted_basis(&self) -> [[f64; 4]; 4] {
        [
            self.amplitudes(),
            self.orthogonal_partner(),
            [0.0, 1.0, 0.0, 0.0],
            [0.0, 0.0, 1.0, 0.0],
        ]
    }
}

/// Dense complex Hermitian operator, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOperator {
    dim: usize,
    entries: Vec<Complex64>,
}

impl HermitianOperator {
    /// Checks Hermiticity to [`HERMITIAN_TOL`] and stores the exactly
    /// Hermitian part.
    pub fn new(dim: usize, entries: Vec<Complex64>) -> Result<Self> {
        if dim == 0 || entries.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                found: entries.len(),
            });
        }
        let mut deviation: f64 = 0.0;
        for i in 0..dim {
            for j in 0..dim {
                let e = entries[i * dim + j];
                if !e.re.is_finite() || !e.im.is_finite() {
                    return Err(Error::NotHermitian {
                        deviation: f64::INFINITY,
                    });
                }
                deviation = deviation.max((e - entries[j * dim + i].conj()).norm());
            }
        }
        if deviation > HERMITIAN_TOL {
            return Err(Error::NotHermitian { deviation });
        }
        let mut op = Self { dim, entries };
        op.hermitianize();
        Ok(op)
    }

    fn hermitianize(&mut self) {
        let n = self.dim;
        for i in 0..n {
            for j in i..n {
                let v = 0.5 * (self.entries[i * n + j] + self.entries[j * n + i].conj());
                self.entries[i * n + j] = v;
                self.entries[j * n + i] = v.conj();
            }
        }
    }

    /// Real symmetric matrix viewed as a Hermitian operator (symmetrized).
    pub fn from_real(m: &Matrix) -> Self {
        let n = m.rows();
        let entries = m.as_slice().iter().map(|&v| Complex64::new(v, 0.0)).collect();
        let mut op = Self { dim: n, entries };
        op.hermitianize();
        op
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_real(&Matrix::identity(dim))
    }

    pub fn zero(dim: usize) -> Self {
        Self {
            dim,
            entries: vec![ZERO; dim * dim],
        }
    }

    /// `|v⟩⟨v|`
    pub fn projector(v: &[Complex64]) -> Self {
        let n = v.len();
        let mut entries = vec![ZERO; n * n];
        for i in 0..n {
            for j in 0..n {
                entries[i * n + j] = v[i] * v[j].conj();
            }
        }
        let mut op = Self { dim: n, entries };
        op.hermitianize();
        op
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.entries[i * self.dim + j]
    }

    /// Real part of the entries.
    pub fn real_part(&self) -> Matrix {
        Matrix::from_vec(
            self.dim,
            self.dim,
            self.entries.iter().map(|e| e.re).collect(),
        )
    }

    /// Largest `|Im a_ij|`.
    pub fn max_imaginary(&self) -> f64 {
        self.entries.iter().fold(0.0, |m, e| m.max(e.im.abs()))
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.get(i, i).re).sum()
    }

    /// `tr(A B)` (real for Hermitian `A`, `B`).
    pub fn trace_product(&self, other: &HermitianOperator) -> Result<f64> {
        self.check_same_dim(other)?;
        let n = self.dim;
        let mut acc = ZERO;
        for i in 0..n {
            for j in 0..n {
                acc += self.get(i, j) * other.get(j, i);
            }
        }
        Ok(acc.re)
    }

    /// `⟨v|A|v⟩`
    pub fn expectation(&self, v: &[Complex64]) -> f64 {
        let n = self.dim;
        assert_eq!(v.len(), n);
        let mut acc = ZERO;
        for i in 0..n {
            for j in 0..n {
                acc += v[i].conj() * self.get(i, j) * v[j];
            }
        }
        acc.re
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            dim: self.dim,
            entries: self.entries.iter().map(|e| e * s).collect(),
        }
    }

    pub fn add(&self, other: &HermitianOperator) -> Result<Self> {
        self.check_same_dim(other)?;
        Ok(Self {
            dim: self.dim,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn sub(&self, other: &HermitianOperator) -> Result<Self> {
        self.add(&other.scaled(-1.0))
    }

    /// `U A U†` for a unitary given row-major.
    pub fn conjugate_by(&self, u: &[Complex64]) -> Self {
        let n = self.dim;
        assert_eq!(u.len(), n * n);
        let mut ua = vec![ZERO; n * n];
        for i in 0..n {
            for k in 0..n {
                let uik = u[i * n + k];
                for j in 0..n {
                    ua[i * n + j] += uik * self.get(k, j);
                }
            }
        }
        let mut out = vec![ZERO; n * n];
        for i in 0..n {
            for j in 0..n {
                let mut acc = ZERO;
                for k in 0..n {
                    acc += ua[i * n + k] * u[j * n + k].conj();
                }
                out[i * n + j] = acc;
            }
        }
        let mut op = Self {
            dim: n,
            entries: out,
        };
        op.hermitianize();
        op
    }

    pub fn eigen(&self) -> HermitianEigen {
        HermitianEigen::new(self.dim, &self.entries)
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        self.eigen().values
    }

    /// Largest deviation from `other`, entrywise.
    pub fn max_abs_diff(&self, other: &HermitianOperator) -> f64 {
        if self.dim != other.dim {
            return f64::INFINITY;
        }
        self.entries
            .iter()
            .zip(&other.entries)
            .fold(0.0, |m, (a, b)| m.max((a - b).norm()))
    }

    fn check_same_dim(&self, other: &HermitianOperator) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        Ok(())
    }
}

/// Positive semidefinite, unit-trace operator.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix(HermitianOperator);

impl DensityMatrix {
    pub fn new(op: HermitianOperator) -> Result<Self> {
        let eig = op.eigen();
        let trace = op.trace();
        if eig.min() < -PSD_TOL || (trace - 1.0).abs() > PSD_TOL {
            return Err(Error::NotDensityMatrix {
                min_eigenvalue: eig.min(),
                trace,
            });
        }
        Ok(Self(op))
    }

    /// `|v⟩⟨v|` for a unit vector `v`.
    pub fn pure(v: &[Complex64]) -> Result<Self> {
        Self::new(HermitianOperator::projector(v))
    }

    pub fn operator(&self) -> &HermitianOperator {
        &self.0
    }
}

impl AsRef<HermitianOperator> for DensityMatrix {
    fn as_ref(&self) -> &HermitianOperator {
        &self.0
    }
}

/// Measurement effect `0 ≼ Ω ≼ 1`; the outcome accepts the null hypothesis.
#[derive(Debug, Clone, PartialEq)]
pub struct Effect(HermitianOperator);

impl Effect {
    pub fn new(op: HermitianOperator) -> Result<Self> {
        let eig = op.eigen();
        if eig.min() < -PSD_TOL || eig.max() > 1.0 + PSD_TOL {
            return Err(Error::NotEffect {
                min_eigenvalue: eig.min(),
                max_eigenvalue: eig.max(),
            });
        }
        Ok(Self(op))
    }

    /// Projects a Hermitian operator onto the effect set by clipping its
    /// spectrum to `[0, 1]`.
    pub fn clipped(op: &HermitianOperator) -> Self {
        let eig = op.eigen();
        let n = op.dim();
        let mut entries = vec![ZERO; n * n];
        for (lam, v) in eig.values.iter().zip(&eig.vectors) {
            let w = lam.clamp(0.0, 1.0);
            if w == 0.0 {
                continue;
            }
            for i in 0..n {
                for j in 0..n {
                    entries[i * n + j] += v[i] * v[j].conj() * w;
                }
            }
        }
        let mut out = HermitianOperator { dim: n, entries };
        out.hermitianize();
        Self(out)
    }

    pub fn operator(&self) -> &HermitianOperator {
        &self.0
    }

    pub fn into_operator(self) -> HermitianOperator {
        self.0
    }
}

impl AsRef<HermitianOperator> for Effect {
    fn as_ref(&self) -> &HermitianOperator {
        &self.0
    }
}

/// Type-I and type-II error probabilities `(p01, p10)` of the test `{Ω, 1−Ω}`:
/// `p01 = tr(ρ₀(1−Ω))`, `p10 = tr(σΩ)`.
pub fn error_probabilities(
    omega: &Effect,
    rho0: &DensityMatrix,
    sigma: &DensityMatrix,
) -> Result<(f64, f64)> {
    let dim = omega.0.dim();
    for other in [rho0.operator(), sigma.operator()] {
        if other.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: other.dim(),
            });
        }
    }
    let accept = rho0.0.trace_product(&omega.0)?;
    let p01 = 1.0 - accept;
    let p10 = sigma.0.trace_product(&omega.0)?;
    Ok((p01.clamp(0.0, 1.0), p10.clamp(0.0, 1.0)))
}

/// Partial transpose on the second qubit of a 4×4 operator:
/// `⟨ab|M^{T_B}|cd⟩ = ⟨ad|M|cb⟩`.
pub fn partial_transpose(m: &HermitianOperator) -> Result<HermitianOperator> {
    if m.dim() != 4 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            found: m.dim(),
        });
    }
    let mut entries = vec![ZERO; 16];
    for a in 0..2 {
        for b in 0..2 {
            for c in 0..2 {
                for d in 0..2 {
                    entries[(2 * a + b) * 4 + (2 * c + d)] = m.get(2 * a + d, 2 * c + b);
                }
            }
        }
    }
    Ok(HermitianOperator { dim: 4, entries })
}

/// True iff the partial transpose of `Ω` has no eigenvalue below `−tol`.
/// For two qubits this is exactly separability of `Ω`.
pub fn is_ppt(omega: &Effect, tol: f64) -> bool {
    match partial_transpose(&omega.0) {
        Ok(pt) => pt.eigen().min() >= -tol,
        Err(_) => false,
    }
}

/// Real parameters of a symmetrized effect, see the module docs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymmetrizedStrategy {
    t: f64,
    z: f64,
    x: f64,
    omega: f64,
}

impl SymmetrizedStrategy {
    pub fn new(t: f64, z: f64, x: f64, omega: f64) -> Result<Self> {
        if ![t, z, x, omega].iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidStrategy {
                reason: "non-finite parameter",
            });
        }
        let (lo, hi) = eig2(t + z, x, t - z);
        if lo < -PSD_TOL || hi > 1.0 + PSD_TOL {
            return Err(Error::InvalidStrategy {
                reason: "2×2 block is not between 0 and 1",
            });
        }
        if !(-PSD_TOL..=1.0 + PSD_TOL).contains(&omega) {
            return Err(Error::InvalidStrategy {
                reason: "ω outside [0, 1]",
            });
        }
        Ok(Self { t, z, x, omega })
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn z(&self) -> f64 {
        self.z
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    /// `⟨ψ|Ω|ψ⟩ = t + z`
    pub fn fidelity_weight(&self) -> f64 {
        self.t + self.z
    }

    /// PPT condition of the embedded effect: `ω ≥ |x cos 2θ + z sin 2θ|`.
    pub fn satisfies_ppt(&self, state: &PureState2Q, tol: f64) -> bool {
        self.omega >= (self.x * state.cos2() + self.z * state.sin2()).abs() - tol
    }
}

/// Twirls `Ω` over `U_φ ⊗ U_{−φ}` and the qubit swap, keeps the real part,
/// and reads off `(t, z, x, ω)` in the basis adapted to `state`.
///
/// The phase twirl is evaluated in closed form: `|ab⟩` picks up the phase
/// `e^{iφ(a−b)}`, so averaging over φ keeps exactly the `{|00⟩,|11⟩}` block
/// and the diagonal entries on `|01⟩` and `|10⟩`.
pub fn symmetrize(omega: &Effect, state: &PureState2Q) -> SymmetrizedStrategy {
    let m = &omega.0;
    // {|00⟩, |11⟩} block, real part
    let a = m.get(0, 0).re;
    let b = m.get(0, 3).re;
    let d = m.get(3, 3).re;
    let w = 0.5 * (m.get(1, 1).re + m.get(2, 2).re);
    let (cos, sin) = (state.theta().cos(), state.theta().sin());
    let psi = [cos, sin];
    let perp = [-sin, cos];
    let quad = |u: [f64; 2], v: [f64; 2]| u[0] * (a * v[0] + b * v[1]) + u[1] * (b * v[0] + d * v[1]);
    let pp = quad(psi, psi);
    let qq = quad(perp, perp);
    let x = quad(psi, perp);
    SymmetrizedStrategy {
        t: 0.5 * (pp + qq),
        z: 0.5 * (pp - qq),
        x,
        omega: w,
    }
}

/// Builds the effect with block `[[t+z, x], [x, t−z]]` on `span{|ψ⟩, |ψ⊥⟩}`
/// and `ω·1` on `span{|01⟩, |10⟩}`, expressed in the computational basis.
pub fn embed(s: &SymmetrizedStrategy, state: &PureState2Q) -> Result<Effect> {
    let (cos, sin) = (state.theta().cos(), state.theta().sin());
    let (p, q, x) = (s.t + s.z, s.t - s.z, s.x);
    // R B Rᵀ with R = [[c, −s], [s, c]] mapping (ψ, ψ⊥) to (|00⟩, |11⟩)
    let m00 = cos * cos * p + sin * sin * q - 2.0 * cos * sin * x;
    let m11 = sin * sin * p + cos * cos * q + 2.0 * cos * sin * x;
    let m03 = cos * sin * (p - q) + (cos * cos - sin * sin) * x;
    let mut entries = vec![ZERO; 16];
    entries[0] = Complex64::new(m00, 0.0);
    entries[3] = Complex64::new(m03, 0.0);
    entries[12] = Complex64::new(m03, 0.0);
    entries[15] = Complex64::new(m11, 0.0);
    entries[5] = Complex64::new(s.omega, 0.0);
    entries[10] = Complex64::new(s.omega, 0.0);
    Effect::new(HermitianOperator { dim: 4, entries })
}

/// `U_φ ⊗ U_{−φ}` with `U_φ = |0⟩⟨0| + e^{iφ}|1⟩⟨1|`, row-major.
pub fn phase_twirl_unitary(phi: f64) -> Vec<Complex64> {
    let phase = |k: f64| Complex64::new((k * phi).cos(), (k * phi).sin());
    let mut u = vec![ZERO; 16];
    // |ab⟩ ↦ e^{iφ(a − b)} |ab⟩
    u[0] = ONE;
    u[5] = phase(-1.0);
    u[10] = phase(1.0);
    u[15] = ONE;
    u
}

/// Qubit swap `|ab⟩ ↦ |ba⟩`, row-major.
pub fn swap_unitary() -> Vec<Complex64> {
    let mut u = vec![ZERO; 16];
    u[0] = ONE;
    u[1 * 4 + 2] = ONE;
    u[2 * 4 + 1] = ONE;
    u[15] = ONE;
    u
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_8};

    fn psi_projector_effect(theta: f64) -> Effect {
        Effect::new(PureState2Q::new(theta).unwrap().projector()).unwrap()
    }

    #[test]
    fn state_vectors() {
        let v = PureState2Q::new(0.0).unwrap().state_vector();
        assert_eq!(v, [ONE, ZERO, ZERO, ZERO]);
        let v = PureState2Q::new(FRAC_PI_4).unwrap().amplitudes();
        assert!((v[0] - FRAC_1_SQRT_2).abs() < 1e-15 && (v[3] - FRAC_1_SQRT_2).abs() < 1e-15);
        let v = PureState2Q::new(FRAC_PI_8).unwrap().amplitudes();
        assert!((v[0] - 0.923_879_532_511_286_7).abs() < 1e-12);
        assert!((v[3] - 0.382_683_432_365_089_8).abs() < 1e-12);
        assert_eq!((v[1], v[2]), (0.0, 0.0));
        let norm: f64 = v.iter().map(|a| a * a).sum();
        assert!((norm - 1.0).abs() < 1e-12);
    }

    #[test]
    fn state_domain_is_enforced() {
        assert!(PureState2Q::new(-0.1).is_err());
        assert!(PureState2Q::new(0.8).is_err());
        assert!(PureState2Q::new(f64::NAN).is_err());
        assert!(PureState2Q::new(FRAC_PI_4).is_ok());
    }

    #[test]
    fn partner_is_orthogonal() {
        for theta in [0.0, 0.1, FRAC_PI_8, 0.6, FRAC_PI_4] {
            let s = PureState2Q::new(theta).unwrap();
            let a = s.amplitudes();
            let b = s.orthogonal_partner();
            let ip: f64 = a.iter().zip(&b).map(|(p, q)| p * q).sum();
            assert!(ip.abs() < 1e-15);
        }
    }

    #[test]
    fn error_probabilities_of_trivial_tests() {
        let state = PureState2Q::new(0.3).unwrap();
        let rho0 = DensityMatrix::new(state.projector()).unwrap();
        let sigma = DensityMatrix::new(HermitianOperator::identity(4).scaled(0.25)).unwrap();
        let accept_all = Effect::new(HermitianOperator::identity(4)).unwrap();
        assert_eq!(error_probabilities(&accept_all, &rho0, &sigma).unwrap(), (0.0, 1.0));
        let reject_all = Effect::new(HermitianOperator::zero(4)).unwrap();
        assert_eq!(error_probabilities(&reject_all, &rho0, &sigma).unwrap(), (1.0, 0.0));
    }

    #[test]
    fn projector_test_has_no_false_positive() {
        let state = PureState2Q::new(0.3).unwrap();
        let eps = 0.35;
        let perp = state.orthogonal_partner();
        // σ = (1−ε)|ψ⟩⟨ψ| + ε|ψ⊥⟩⟨ψ⊥|
        let sigma_op = state
            .projector()
            .scaled(1.0 - eps)
            .add(&HermitianOperator::from_real(&Matrix::outer(&perp, &perp)).scaled(eps))
            .unwrap();
        let sigma = DensityMatrix::new(sigma_op).unwrap();
        let rho0 = DensityMatrix::new(state.projector()).unwrap();
        let omega = Effect::new(state.projector()).unwrap();
        let (p01, p10) = error_probabilities(&omega, &rho0, &sigma).unwrap();
        assert!(p01.abs() < 1e-14);
        assert!((p10 - (1.0 - eps)).abs() < 1e-14);
    }

    #[test]
    fn error_probabilities_reject_mismatched_dims() {
        let omega = Effect::new(HermitianOperator::identity(4)).unwrap();
        let rho = DensityMatrix::new(HermitianOperator::identity(2).scaled(0.5)).unwrap();
        let sigma = DensityMatrix::new(HermitianOperator::identity(4).scaled(0.25)).unwrap();
        assert!(matches!(
            error_probabilities(&omega, &rho, &sigma),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn constructors_validate() {
        let c = |re, im| Complex64::new(re, im);
        let not_herm = vec![c(1.0, 0.0), c(0.0, 1.0), c(0.0, 1.0), c(1.0, 0.0)];
        assert!(HermitianOperator::new(2, not_herm).is_err());
        assert!(HermitianOperator::new(2, vec![ONE; 3]).is_err());
        assert!(DensityMatrix::new(HermitianOperator::identity(2)).is_err());
        assert!(Effect::new(HermitianOperator::identity(2).scaled(1.5)).is_err());
        assert!(Effect::new(HermitianOperator::identity(2).scaled(-0.5)).is_err());
    }

    #[test]
    fn partial_transpose_examples() {
        let id = HermitianOperator::identity(4);
        assert_eq!(partial_transpose(&id).unwrap(), id);
        let me = PureState2Q::new(FRAC_PI_4).unwrap().projector();
        let eig = partial_transpose(&me).unwrap().eigenvalues();
        let want = [-0.5, 0.5, 0.5, 0.5];
        for (a, b) in eig.iter().zip(&want) {
            assert!((a - b).abs() < 1e-14, "{eig:?}");
        }
        assert!(partial_transpose(&HermitianOperator::identity(2)).is_err());
    }

    #[test]
    fn partial_transpose_min_eigenvalue_of_pure_state() {
        for theta in [0.0, 0.2, FRAC_PI_8, 0.7, FRAC_PI_4] {
            let p = PureState2Q::new(theta).unwrap().projector();
            let min = partial_transpose(&p).unwrap().eigen().min();
            // spectrum of the partial transpose is {c², s², ±cs}
            let want = -(theta.sin() * theta.cos());
            assert!((min - want).abs() < 1e-14, "θ={theta}: {min} vs {want}");
        }
    }

    #[test]
    fn ppt_examples() {
        let half = Effect::new(HermitianOperator::identity(4).scaled(0.5)).unwrap();
        assert!(is_ppt(&half, 1e-10));
        assert!(!is_ppt(&psi_projector_effect(FRAC_PI_4), 1e-10));
    }

    #[test]
    fn symmetrize_examples() {
        let state = PureState2Q::new(0.37).unwrap();
        let s = symmetrize(&Effect::new(state.projector()).unwrap(), &state);
        assert!((s.t() - 0.5).abs() < 1e-15 && (s.z() - 0.5).abs() < 1e-15);
        assert!(s.x().abs() < 1e-15 && s.omega().abs() < 1e-15);

        let mut e01 = [ZERO; 4];
        e01[1] = ONE;
        let s = symmetrize(&Effect::new(HermitianOperator::projector(&e01)).unwrap(), &state);
        assert_eq!((s.t(), s.z(), s.x(), s.omega()), (0.0, 0.0, 0.0, 0.5));
    }

    #[test]
    fn embed_examples() {
        let state = PureState2Q::new(0.21).unwrap();
        let s = SymmetrizedStrategy::new(0.5, 0.5, 0.0, 0.0).unwrap();
        let e = embed(&s, &state).unwrap();
        assert!(e.operator().max_abs_diff(&state.projector()) < 1e-15);

        let s = SymmetrizedStrategy::new(0.3, 0.0, 0.0, 0.3).unwrap();
        let e = embed(&s, &state).unwrap();
        assert!(e.operator().max_abs_diff(&HermitianOperator::identity(4).scaled(0.3)) < 1e-15);

        let state = PureState2Q::new(FRAC_PI_8).unwrap();
        let s = SymmetrizedStrategy::new(0.45, 0.3, -0.2, 0.3).unwrap();
        let e = embed(&s, &state).unwrap();
        let fid = e.operator().expectation(&state.state_vector());
        assert!((fid - 0.75).abs() < 1e-14);
        let back = symmetrize(&e, &state);
        for (a, b) in [(back.t(), 0.45), (back.z(), 0.3), (back.x(), -0.2), (back.omega(), 0.3)] {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn strategy_validation() {
        assert!(SymmetrizedStrategy::new(0.5, 0.5, 0.2, 0.0).is_err());
        assert!(SymmetrizedStrategy::new(0.5, 0.0, 0.0, 1.2).is_err());
        assert!(SymmetrizedStrategy::new(f64::NAN, 0.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn embedded_commuting_optimum_is_ppt_with_equality() {
        let state = PureState2Q::new(FRAC_PI_8).unwrap();
        let delta = 0.1;
        let s2 = state.sin2();
        let z = (1.0 - delta) / (2.0 + s2);
        let t = 1.0 - delta - z;
        let omega = (1.0 - delta) * s2 / (2.0 + s2);
        let s = SymmetrizedStrategy::new(t, z, 0.0, omega).unwrap();
        assert!((omega - (z * s2).abs()).abs() < 1e-15);
        let e = embed(&s, &state).unwrap();
        assert!(is_ppt(&e, 1e-10));
        let min = partial_transpose(e.operator()).unwrap().eigen().min();
        assert!(min.abs() < 1e-12);
    }

    #[test]
    fn twirl_unitaries_are_consistent() {
        // conjugating by the swap twice is the identity
        let state = PureState2Q::new(0.4).unwrap();
        let p = state.projector();
        let sw = swap_unitary();
        assert!(p.conjugate_by(&sw).conjugate_by(&sw).max_abs_diff(&p) < 1e-15);
        // |ψ⟩ is invariant under every phase twirl and the swap
        assert!(p.conjugate_by(&phase_twirl_unitary(1.3)).max_abs_diff(&p) < 1e-15);
        assert!(p.conjugate_by(&sw).max_abs_diff(&p) < 1e-15);
    }
}
