//! Small dense semidefinite programs.
//!
//! Problems are stated in LMI form
//!
//! ```text
//! minimize    cᵀx
//! subject to  F₀ᵏ + Σᵢ xᵢ Fᵢᵏ ⪰ 0      for every block k
//! ```
//!
//! with a handful of free scalar variables and independent dense blocks of
//! size at most [`MAX_BLOCK_DIM`]. Scalar inequalities are 1×1 blocks.
//! The dual is
//!
//! ```text
//! maximize    −Σₖ ⟨F₀ᵏ, Zᵏ⟩
//! subject to  Σₖ ⟨Fᵢᵏ, Zᵏ⟩ = cᵢ,   Zᵏ ⪰ 0.
//! ```
//!
//! # Algorithm
//!
//! A primal-dual interior-point method on the homogeneous self-dual
//! embedding, so no feasible starting point is needed and infeasibility or
//! unboundedness show up as certificates (`τ → 0`). Each iteration uses
//! Nesterov–Todd scaling (maintained in factored form `S = R Λ Rᵀ`,
//! `Z = R⁻ᵀ Λ R⁻¹`, following the CVXOPT cone solvers) and a Mehrotra
//! predictor-corrector step. Newton systems are reduced to a least-squares
//! problem in the scaled coefficients, solved by QR with two rounds of
//! iterative refinement.
//! The starting point is the least-norm primal/dual pair shifted into the
//! cone interior.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

// supplies float methods when std is not linked
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::linalg::{cholesky, lower_triangular_inverse, min_eigenvalue, solve_spd, Matrix, Qr, Svd};

/// Largest LMI block the solver accepts.
pub const MAX_BLOCK_DIM: usize = 8;

const SYMMETRY_TOL: f64 = 1e-12;

/// One linear matrix inequality `F₀ + Σᵢ xᵢ Fᵢ ⪰ 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct LmiBlock {
    constant: Matrix,
    coefficients: Vec<Matrix>,
}

impl LmiBlock {
    pub fn new(constant: Matrix, coefficients: Vec<Matrix>) -> Result<Self> {
        let dim = constant.rows();
        if !constant.is_square() || dim == 0 {
            return Err(Error::InvalidProblem {
                reason: "LMI constant term must be a non-empty square matrix",
            });
        }
        if dim > MAX_BLOCK_DIM {
            return Err(Error::InvalidProblem {
                reason: "LMI block larger than the supported maximum",
            });
        }
        for m in core::iter::once(&constant).chain(&coefficients) {
            if m.rows() != dim || m.cols() != dim {
                return Err(Error::InvalidProblem {
                    reason: "LMI coefficient size differs from the constant term",
                });
            }
            if m.as_slice().iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidProblem {
                    reason: "non-finite LMI entry",
                });
            }
            if m.asymmetry() > SYMMETRY_TOL {
                return Err(Error::InvalidProblem {
                    reason: "LMI matrices must be symmetric",
                });
            }
        }
        Ok(Self {
            constant: constant.symmetrized(),
            coefficients: coefficients.iter().map(Matrix::symmetrized).collect(),
        })
    }

    /// Scalar inequality `a₀ + Σᵢ aᵢ xᵢ ≥ 0` as a 1×1 block.
    pub fn scalar(constant: f64, coefficients: &[f64]) -> Result<Self> {
        Self::new(
            Matrix::from_diag(&[constant]),
            coefficients.iter().map(|&a| Matrix::from_diag(&[a])).collect(),
        )
    }

    pub fn dim(&self) -> usize {
        self.constant.rows()
    }

    pub fn constant(&self) -> &Matrix {
        &self.constant
    }

    pub fn coefficients(&self) -> &[Matrix] {
        &self.coefficients
    }

    /// `F₀ + Σᵢ xᵢ Fᵢ`
    pub fn evaluate(&self, x: &[f64]) -> Matrix {
        let mut out = self.constant.clone();
        for (fi, &xi) in self.coefficients.iter().zip(x) {
            if xi != 0.0 {
                out.axpy(xi, fi);
            }
        }
        out
    }
}

/// A semidefinite program in LMI form.
#[derive(Debug, Clone, PartialEq)]
pub struct SdpProblem {
    objective: Vec<f64>,
    blocks: Vec<LmiBlock>,
}

impl SdpProblem {
    pub fn new(objective: Vec<f64>, blocks: Vec<LmiBlock>) -> Result<Self> {
        if objective.is_empty() {
            return Err(Error::InvalidProblem {
                reason: "problem has no variables",
            });
        }
        if blocks.is_empty() {
            return Err(Error::InvalidProblem {
                reason: "problem has no constraints",
            });
        }
        if objective.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidProblem {
                reason: "non-finite objective coefficient",
            });
        }
        if blocks
            .iter()
            .any(|b| b.coefficients.len() != objective.len())
        {
            return Err(Error::InvalidProblem {
                reason: "every block needs one coefficient matrix per variable",
            });
        }
        Ok(Self { objective, blocks })
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn objective(&self) -> &[f64] {
        &self.objective
    }

    pub fn blocks(&self) -> &[LmiBlock] {
        &self.blocks
    }

    /// Sum of block sizes (the barrier degree of the cone).
    pub fn cone_degree(&self) -> usize {
        self.blocks.iter().map(LmiBlock::dim).sum()
    }

    pub fn objective_value(&self, x: &[f64]) -> f64 {
        self.objective.iter().zip(x).map(|(c, v)| c * v).sum()
    }

    /// Slack matrices `F₀ᵏ + Σᵢ xᵢ Fᵢᵏ` of every block.
    pub fn slacks(&self, x: &[f64]) -> Vec<Matrix> {
        self.blocks.iter().map(|b| b.evaluate(x)).collect()
    }

    /// Smallest eigenvalue over all block slacks; negative means infeasible.
    pub fn min_slack_eigenvalue(&self, x: &[f64]) -> f64 {
        self.slacks(x)
            .iter()
            .map(min_eigenvalue)
            .fold(f64::INFINITY, f64::min)
    }

    /// `Σₖ ⟨Fᵢᵏ, Zᵏ⟩` for every variable `i`.
    fn adjoint(&self, z: &[Matrix]) -> Vec<f64> {
        (0..self.num_vars())
            .map(|i| {
                self.blocks
                    .iter()
                    .zip(z)
                    .map(|(b, zk)| b.coefficients[i].dot(zk))
                    .sum()
            })
            .collect()
    }

    /// `Σᵢ xᵢ Fᵢᵏ` for every block (the linear part only).
    fn linear_part(&self, x: &[f64]) -> Vec<Matrix> {
        self.blocks
            .iter()
            .map(|b| {
                let mut m = Matrix::zeros(b.dim(), b.dim());
                for (fi, &xi) in b.coefficients.iter().zip(x) {
                    if xi != 0.0 {
                        m.axpy(xi, fi);
                    }
                }
                m
            })
            .collect()
    }
}

/// Interior-point settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SdpSettings {
    /// Target for the duality gap and the relative primal/dual residuals.
    /// Iterates are driven by the objective scaled to unit length, so the
    /// returned `x` does not depend on the scale of `c`; the reported gap is
    /// in the original units and is also `≤ tol` when `Optimal`.
    pub tol: f64,
    pub max_iter: usize,
    /// Fraction of the distance to the cone boundary taken per step.
    pub step_fraction: f64,
}

impl Default for SdpSettings {
    fn default() -> Self {
        Self {
            tol: 1e-9,
            max_iter: 200,
            step_fraction: 0.98,
        }
    }
}

impl SdpSettings {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0) || !self.tol.is_finite() {
            return Err(Error::InvalidSettings {
                reason: "tol must be positive",
            });
        }
        if self.max_iter < 1 {
            return Err(Error::InvalidSettings {
                reason: "max_iter must be at least 1",
            });
        }
        if !(self.step_fraction > 0.0 && self.step_fraction < 1.0) {
            return Err(Error::InvalidSettings {
                reason: "step_fraction must lie in (0, 1)",
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SdpStatus {
    Optimal,
    MaxIterations,
    Infeasible,
    Unbounded,
}

impl SdpStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            SdpStatus::Optimal => "optimal",
            SdpStatus::MaxIterations => "max_iterations",
            SdpStatus::Infeasible => "infeasible",
            SdpStatus::Unbounded => "unbounded",
        }
    }
}

impl fmt::Display for SdpStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Solver output.
///
/// For `Infeasible` the dual matrices hold a normalized Farkas certificate
/// (`Σₖ⟨Fᵢᵏ, Zᵏ⟩ = 0`, `Σₖ⟨F₀ᵏ, Zᵏ⟩ = −1`); for `Unbounded`, `x` is a
/// direction with `cᵀx = −1` along which every block stays PSD.
#[derive(Debug, Clone, PartialEq)]
pub struct SdpSolution {
    pub status: SdpStatus,
    pub x: Vec<f64>,
    /// Dual matrices `Zᵏ`, one per block.
    pub dual: Vec<Matrix>,
    pub primal_value: f64,
    pub dual_value: f64,
    /// Complementarity `Σₖ ⟨Sᵏ, Zᵏ⟩` at the returned point.
    pub gap: f64,
    /// Relative primal residual of the returned point.
    pub primal_residual: f64,
    /// Dual residual of the returned point relative to `‖c‖`.
    pub dual_residual: f64,
    pub iterations: usize,
}

impl SdpSolution {
    pub fn is_optimal(&self) -> bool {
        self.status == SdpStatus::Optimal
    }
}

/// Nesterov–Todd scaling of one block: `S = R Λ Rᵀ`, `Z = R⁻ᵀ Λ R⁻¹`.
#[derive(Debug, Clone)]
struct BlockScaling {
    r: Matrix,
    r_inv: Matrix,
    lambda: Vec<f64>,
}

impl BlockScaling {
    /// Scaling for the pair `(s̃, z̃)` expressed relative to a previous
    /// scaling `r` (identity at the start).
    fn update(r: &Matrix, r_inv: &Matrix, s_tilde: &Matrix, z_tilde: &Matrix) -> Option<Self> {
        let l1 = cholesky(s_tilde)?;
        let l2 = cholesky(z_tilde)?;
        let svd = Svd::new(&l2.transpose().matmul(&l1));
        if svd.sigma.iter().any(|s| !(*s > 0.0) || !s.is_finite()) {
            return None;
        }
        let n = svd.sigma.len();
        let inv_sqrt: Vec<f64> = svd.sigma.iter().map(|s| 1.0 / s.sqrt()).collect();
        let sqrt: Vec<f64> = svd.sigma.iter().map(|s| s.sqrt()).collect();
        // R' = R L₁ V Σ^{-1/2},  R'^{-1} = Σ^{1/2} Vᵀ L₁⁻¹ R⁻¹
        let mut lv = l1.matmul(&svd.v);
        for j in 0..n {
            for i in 0..n {
                lv[(i, j)] *= inv_sqrt[j];
            }
        }
        let r_new = r.matmul(&lv);
        let mut vt_linv = svd.v.transpose().matmul(&lower_triangular_inverse(&l1));
        for i in 0..n {
            for j in 0..n {
                vt_linv[(i, j)] *= sqrt[i];
            }
        }
        let r_inv_new = vt_linv.matmul(r_inv);
        Some(Self {
            r: r_new,
            r_inv: r_inv_new,
            lambda: svd.sigma,
        })
    }

    fn s(&self) -> Matrix {
        self.r
            .matmul(&Matrix::from_diag(&self.lambda))
            .matmul(&self.r.transpose())
            .symmetrized()
    }

    fn z(&self) -> Matrix {
        self.r_inv
            .transpose()
            .matmul(&Matrix::from_diag(&self.lambda))
            .matmul(&self.r_inv)
            .symmetrized()
    }

    /// `R⁻¹ U R⁻ᵀ`
    fn unscale(&self, u: &Matrix) -> Matrix {
        self.r_inv.matmul(u).matmul(&self.r_inv.transpose()).symmetrized()
    }
}

/// Solves `Λ ∘ U = D` for symmetric `U`, with `A ∘ B = (AB + BA)/2`.
fn lambda_solve(lambda: &[f64], d: &Matrix) -> Matrix {
    let n = lambda.len();
    let mut u = Matrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            u[(i, j)] = 2.0 * d[(i, j)] / (lambda[i] + lambda[j]);
        }
    }
    u
}

fn jordan(a: &Matrix, b: &Matrix) -> Matrix {
    a.matmul(b).add(&b.matmul(a)).scaled(0.5)
}

/// Largest `α` with `Λ + α D ⪰ 0`.
fn max_step(lambda: &[f64], d: &Matrix) -> f64 {
    let n = lambda.len();
    let mut m = Matrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            m[(i, j)] = d[(i, j)] / (lambda[i] * lambda[j]).sqrt();
        }
    }
    let rho = min_eigenvalue(&m);
    if rho < 0.0 {
        -1.0 / rho
    } else {
        f64::INFINITY
    }
}

fn block_norm(ms: &[Matrix]) -> f64 {
    ms.iter().map(|m| m.dot(m)).sum::<f64>().sqrt()
}

fn vec_norm(v: &[f64]) -> f64 {
    v.iter().map(|a| a * a).sum::<f64>().sqrt()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(p, q)| p * q).sum()
}

fn blocks_dot(a: &[Matrix], b: &[Matrix]) -> f64 {
    a.iter().zip(b).map(|(p, q)| p.dot(q)).sum()
}

/// Factored Newton system for one iteration.
///
/// With scaled coefficients `F̃ᵢ = R⁻¹ Fᵢ R⁻ᵀ` stacked as the columns of
/// `Ã`, the reduced system is the least-squares problem
/// `ÃᵀÃ Δx = bx − Ãᵀ b̃z`, solved through a QR factorization of `Ã`.
struct KktSystem {
    /// `F̃ᵢᵏ`, indexed `[k][i]`.
    scaled: Vec<Vec<Matrix>>,
    qr: Qr,
}

impl KktSystem {
    fn new(problem: &SdpProblem, scalings: &[BlockScaling]) -> Option<Self> {
        let n = problem.num_vars();
        let scaled: Vec<Vec<Matrix>> = problem
            .blocks
            .iter()
            .zip(scalings)
            .map(|(b, sc)| b.coefficients.iter().map(|f| sc.unscale(f)).collect())
            .collect();
        let rows: usize = problem.blocks.iter().map(|b| b.dim() * b.dim()).sum();
        let mut a = Matrix::zeros(rows, n);
        let mut offset = 0;
        for block in &scaled {
            for (i, f) in block.iter().enumerate() {
                for (r, v) in f.as_slice().iter().enumerate() {
                    a[(offset + r, i)] = *v;
                }
            }
            offset += block.first().map_or(0, |f| f.rows() * f.rows());
        }
        let qr = Qr::new(&a)?;
        Some(Self { scaled, qr })
    }

    /// Solves `Gᵀ ΔZ = bx`, `G Δx − WᵀW ΔZ = bz` where `G x = −Σ xᵢ Fᵢ`,
    /// stated in the scaled space: with `b̃ = R⁻¹ bz R⁻ᵀ` and
    /// `ΔZ̃ = Rᵀ ΔZ R` the equations read `Σₖ⟨F̃ᵢ, ΔZ̃⟩ = −bxᵢ`,
    /// `ΔZ̃ = −(b̃ + Σ Δxᵢ F̃ᵢ)`. Takes `b̃` and returns `(Δx, ΔZ̃)`, so no
    /// quantity passes through `R` and back.
    fn solve_once(&self, bx: &[f64], b_tilde: &[Matrix]) -> Option<(Vec<f64>, Vec<Matrix>)> {
        let flat: Vec<f64> = b_tilde.iter().flat_map(|m| m.as_slice().iter().copied()).collect();
        // R Δx = R⁻ᵀ bx − Qᵀ b̃
        let rhs: Vec<f64> = self
            .qr
            .solve_rt(bx)
            .iter()
            .zip(self.qr.apply_qt(&flat))
            .map(|(a, b)| a - b)
            .collect();
        let dx = self.qr.solve_r(&rhs);
        if dx.iter().any(|v| !v.is_finite()) {
            return None;
        }
        let dz = self
            .scaled
            .iter()
            .zip(b_tilde)
            .map(|(fs, bt)| {
                let mut u = bt.scaled(-1.0);
                for (f, &d) in fs.iter().zip(&dx) {
                    u.axpy(-d, f);
                }
                u
            })
            .collect();
        Some((dx, dz))
    }

    fn solve(&self, bx: &[f64], b_tilde: &[Matrix]) -> Option<(Vec<f64>, Vec<Matrix>)> {
        let (mut dx, mut dz) = self.solve_once(bx, b_tilde)?;
        self.refine(bx, b_tilde, &mut dx, &mut dz);
        self.refine(bx, b_tilde, &mut dx, &mut dz);
        Some((dx, dz))
    }

    fn refine(&self, bx: &[f64], b_tilde: &[Matrix], dx: &mut [f64], dz: &mut [Matrix]) {
        let n = dx.len();
        let mut rx = bx.to_vec();
        for (fs, d) in self.scaled.iter().zip(dz.iter()) {
            for i in 0..n {
                rx[i] += fs[i].dot(d);
            }
        }
        let rz: Vec<Matrix> = self
            .scaled
            .iter()
            .zip(b_tilde)
            .zip(dz.iter())
            .map(|((fs, bt), d)| {
                let mut m = bt.add(d);
                for (f, &v) in fs.iter().zip(dx.iter()) {
                    m.axpy(v, f);
                }
                m
            })
            .collect();
        if let Some((cx, cz)) = self.solve_once(&rx, &rz) {
            for (a, c) in dx.iter_mut().zip(&cx) {
                *a += c;
            }
            for (a, c) in dz.iter_mut().zip(&cz) {
                a.axpy(1.0, c);
            }
        }
    }
}

struct Direction {
    dx: Vec<f64>,
    ds_tilde: Vec<Matrix>,
    dz_tilde: Vec<Matrix>,
    dtau: f64,
    dkappa: f64,
}

struct Snapshot {
    x: Vec<f64>,
    z: Vec<Matrix>,
    pcost: f64,
    dcost: f64,
    gap: f64,
    pres: f64,
    dres: f64,
    merit: f64,
}

/// Once an iterate meets the tolerances, iterations continue until the
/// residuals and gap are this factor below `tol` or progress stops, and the
/// best qualifying iterate is returned. This tightens the argmin at the cost
/// of one or two extra steps.
const TAIL_FACTOR: f64 = 1e-3;

/// Solves the SDP. Returns an error only for invalid settings or
/// structurally degenerate problems (linearly dependent coefficients).
pub fn solve(problem: &SdpProblem, settings: &SdpSettings) -> Result<SdpSolution> {
    settings.validate()?;
    let n = problem.num_vars();
    // Iterate on the unit objective so that every positive multiple of `c`
    // follows the same path; values and the dual are rescaled on return.
    let c_norm = vec_norm(problem.objective());
    let c_unit_scale = if c_norm > 0.0 { c_norm } else { 1.0 };
    let c_unit: Vec<f64> = problem.objective().iter().map(|v| v / c_unit_scale).collect();
    let c = &c_unit[..];
    let h: Vec<Matrix> = problem.blocks.iter().map(|b| b.constant.clone()).collect();
    let h_scale = block_norm(&h).max(1.0);
    let c_scale = vec_norm(c).max(1.0);
    let degree = problem.cone_degree() as f64;
    let tol = settings.tol;

    // Least-norm starting points with GᵀG as normal matrix.
    let mut gtg = Matrix::zeros(n, n);
    for b in &problem.blocks {
        for i in 0..n {
            for j in 0..n {
                gtg[(i, j)] += b.coefficients[i].dot(&b.coefficients[j]);
            }
        }
    }
    if cholesky(&gtg).is_none() {
        return Err(Error::InvalidProblem {
            reason: "coefficient matrices are linearly dependent",
        });
    }
    // min ‖F(x)‖: Σⱼ⟨Fᵢ,Fⱼ⟩xⱼ = −⟨Fᵢ,F₀⟩
    let rhs: Vec<f64> = problem.adjoint(&h).iter().map(|v| -v).collect();
    let mut x = solve_spd(&gtg, &rhs).ok_or(Error::InvalidProblem {
        reason: "singular normal equations",
    })?;
    let s0 = problem.slacks(&x);
    // min ‖Z‖ s.t. ⟨Fᵢ, Z⟩ = cᵢ  →  Z = Σⱼ wⱼ Fⱼ with GᵀG w = c
    let w = solve_spd(&gtg, c).ok_or(Error::InvalidProblem {
        reason: "singular normal equations",
    })?;
    let z0 = problem.linear_part(&w);
    let shift_into_cone = |ms: Vec<Matrix>| -> Vec<Matrix> {
        let alpha = ms
            .iter()
            .map(|m| -min_eigenvalue(m))
            .fold(f64::NEG_INFINITY, f64::max);
        if alpha < 0.0 {
            ms
        } else {
            ms.into_iter()
                .map(|m| m.add(&Matrix::identity(m.rows()).scaled(1.0 + alpha)))
                .collect()
        }
    };
    let s0 = shift_into_cone(s0);
    let z0 = shift_into_cone(z0);
    let mut scalings: Vec<BlockScaling> = Vec::with_capacity(s0.len());
    for (s, z) in s0.iter().zip(&z0) {
        let id = Matrix::identity(s.rows());
        scalings.push(BlockScaling::update(&id, &id, s, z).ok_or(Error::InvalidProblem {
            reason: "could not scale the starting point",
        })?);
    }
    let mut tau = 1.0;
    let mut kappa = 1.0;

    let mut best: Option<Snapshot> = None;
    let mut optimal: Option<Snapshot> = None;
    let mut status = SdpStatus::MaxIterations;
    let mut certificate: Option<(Vec<f64>, Vec<Matrix>)> = None;
    let mut iterations = 0;

    for iter in 0..=settings.max_iter {
        iterations = iter;
        let s: Vec<Matrix> = scalings.iter().map(BlockScaling::s).collect();
        let z: Vec<Matrix> = scalings.iter().map(BlockScaling::z).collect();

        // residuals of the embedding
        let gtz = problem.adjoint(&z);
        let rx: Vec<f64> = gtz
            .iter()
            .zip(c)
            .map(|(g, ci)| -g + ci * tau)
            .collect();
        let lin = problem.linear_part(&x);
        let rz: Vec<Matrix> = s
            .iter()
            .zip(&lin)
            .zip(&h)
            .map(|((sk, lk), hk)| {
                let mut m = sk.sub(lk);
                m.axpy(-tau, hk);
                m
            })
            .collect();
        let cx = dot(c, &x);
        let hz = blocks_dot(&h, &z);
        let rt = kappa + cx + hz;
        let sz = blocks_dot(&s, &z);
        let mu = (sz + tau * kappa) / (degree + 1.0);

        let pres = block_norm(&rz) / tau / h_scale;
        let dres = vec_norm(&rx) / tau / c_scale;
        let pcost = cx / tau;
        let dcost = -hz / tau;
        let gap = sz / (tau * tau);
        let merit = pres.max(dres).max(gap);
        let snapshot = || Snapshot {
            x: x.iter().map(|v| v / tau).collect(),
            z: z.iter().map(|m| m.scaled(1.0 / tau)).collect(),
            pcost,
            dcost,
            gap,
            pres,
            dres,
            merit,
        };
        if best.as_ref().map_or(true, |b| merit < b.merit) {
            best = Some(snapshot());
        }

        if merit <= tol && gap * c_unit_scale <= tol {
            let candidate = snapshot();
            let improves = optimal.as_ref().map_or(true, |o| merit < o.merit);
            if improves && problem.min_slack_eigenvalue(&candidate.x) >= -tol {
                optimal = Some(candidate);
            }
        }
        if let Some(o) = &optimal {
            // stop once tight enough, or when an iterate stops qualifying
            if o.merit <= TAIL_FACTOR * tol || merit > tol {
                break;
            }
        } else {
            // infeasibility certificates
            if hz < 0.0 {
                let pinf = vec_norm(&gtz) / c_scale / (-hz);
                if pinf <= tol {
                    status = SdpStatus::Infeasible;
                    certificate = Some((vec![0.0; n], z.iter().map(|m| m.scaled(-1.0 / hz)).collect()));
                    break;
                }
            }
            if cx < 0.0 {
                let dir: Vec<Matrix> = s.iter().zip(&lin).map(|(sk, lk)| sk.sub(lk)).collect();
                let dinf = block_norm(&dir) / h_scale / (-cx);
                if dinf <= tol {
                    status = SdpStatus::Unbounded;
                    certificate = Some((x.iter().map(|v| v / -cx).collect(), Vec::new()));
                    break;
                }
            }
        }
        if iter == settings.max_iter {
            break;
        }

        let Some(kkt) = KktSystem::new(problem, &scalings) else {
            break;
        };
        let rz_tilde: Vec<Matrix> = scalings.iter().zip(&rz).map(|(sc, r)| sc.unscale(r)).collect();
        let h_tilde: Vec<Matrix> = scalings.iter().zip(&h).map(|(sc, m)| sc.unscale(m)).collect();
        let lambda_sq: Vec<Matrix> = scalings
            .iter()
            .map(|sc| Matrix::from_diag(&sc.lambda.iter().map(|l| l * l).collect::<Vec<_>>()))
            .collect();

        let compute = |sigma: f64, corr: Option<&Direction>| -> Option<Direction> {
            let eta = 1.0 - sigma;
            let d_x: Vec<f64> = rx.iter().map(|r| -eta * r).collect();
            let d_t = -eta * rt;
            let mut us = Vec::with_capacity(scalings.len());
            for (k, sc) in scalings.iter().enumerate() {
                let mut ds = lambda_sq[k].scaled(-1.0);
                let dim = sc.lambda.len();
                for i in 0..dim {
                    ds[(i, i)] += sigma * mu;
                }
                if let Some(a) = corr {
                    ds = ds.sub(&jordan(&a.ds_tilde[k], &a.dz_tilde[k]));
                }
                us.push(lambda_solve(&sc.lambda, &ds));
            }
            let mut d_k = -tau * kappa + sigma * mu;
            if let Some(a) = corr {
                d_k -= a.dtau * a.dkappa;
            }
            // b̃₁ = R⁻¹(−η r_z − Wᵀu)R⁻ᵀ = −η r̃_z − u
            let bz1: Vec<Matrix> = rz_tilde
                .iter()
                .zip(&us)
                .map(|(r, u)| r.scaled(-eta).sub(u))
                .collect();
            let (dx1, dz1) = kkt.solve(&d_x, &bz1)?;
            let neg_c: Vec<f64> = c.iter().map(|v| -v).collect();
            let (dx2, dz2) = kkt.solve(&neg_c, &h_tilde)?;
            // ⟨h, ΔZ⟩ = ⟨h̃, ΔZ̃⟩
            let denom = dot(c, &dx2) + blocks_dot(&h_tilde, &dz2) - kappa / tau;
            let dtau = (d_t - d_k / tau - dot(c, &dx1) - blocks_dot(&h_tilde, &dz1)) / denom;
            if !dtau.is_finite() {
                return None;
            }
            let dx: Vec<f64> = dx1.iter().zip(&dx2).map(|(a, b)| a + dtau * b).collect();
            let mut dz_tilde = Vec::with_capacity(scalings.len());
            let mut ds_tilde = Vec::with_capacity(scalings.len());
            for k in 0..scalings.len() {
                let mut dzt = dz1[k].clone();
                dzt.axpy(dtau, &dz2[k]);
                let dzt = dzt.symmetrized();
                ds_tilde.push(us[k].sub(&dzt).symmetrized());
                dz_tilde.push(dzt);
            }
            let dkappa = (d_k - kappa * dtau) / tau;
            Some(Direction {
                dx,
                ds_tilde,
                dz_tilde,
                dtau,
                dkappa,
            })
        };

        let step_limit = |d: &Direction| -> f64 {
            let mut a = f64::INFINITY;
            for (k, sc) in scalings.iter().enumerate() {
                a = a.min(max_step(&sc.lambda, &d.ds_tilde[k]));
                a = a.min(max_step(&sc.lambda, &d.dz_tilde[k]));
            }
            if d.dtau < 0.0 {
                a = a.min(-tau / d.dtau);
            }
            if d.dkappa < 0.0 {
                a = a.min(-kappa / d.dkappa);
            }
            a
        };

        let Some(affine) = compute(0.0, None) else {
            break;
        };
        let alpha_aff = step_limit(&affine).min(1.0);
        let sigma = (1.0 - alpha_aff).powi(3);
        let Some(dir) = compute(sigma, Some(&affine)) else {
            break;
        };
        let mut alpha = (settings.step_fraction * step_limit(&dir)).min(1.0);

        // take the step, backing off if the scaled iterates lose definiteness
        let mut updated = None;
        for _ in 0..30 {
            let mut next = Vec::with_capacity(scalings.len());
            for (k, sc) in scalings.iter().enumerate() {
                let lam = Matrix::from_diag(&sc.lambda);
                let mut st = lam.clone();
                st.axpy(alpha, &dir.ds_tilde[k]);
                let mut zt = lam;
                zt.axpy(alpha, &dir.dz_tilde[k]);
                match BlockScaling::update(&sc.r, &sc.r_inv, &st.symmetrized(), &zt.symmetrized()) {
                    Some(ns) => next.push(ns),
                    None => break,
                }
            }
            if next.len() == scalings.len() {
                updated = Some(next);
                break;
            }
            alpha *= 0.5;
        }
        let Some(next) = updated else {
            break;
        };
        if alpha < 1e-14 {
            break;
        }
        scalings = next;
        for (xi, dxi) in x.iter_mut().zip(&dir.dx) {
            *xi += alpha * dxi;
        }
        tau += alpha * dir.dtau;
        kappa += alpha * dir.dkappa;
    }

    let iterations = iterations;
    match (status, certificate) {
        (SdpStatus::Infeasible, Some((x0, z))) | (SdpStatus::Unbounded, Some((x0, z))) => {
            let primal_value = problem.objective_value(&x0);
            Ok(SdpSolution {
                status,
                x: x0,
                dual: z,
                primal_value,
                dual_value: f64::NAN,
                gap: f64::NAN,
                primal_residual: f64::NAN,
                dual_residual: f64::NAN,
                iterations,
            })
        }
        _ => {
            if optimal.is_some() {
                status = SdpStatus::Optimal;
            }
            let b = optimal.or(best).expect("at least one iterate is recorded");
            Ok(SdpSolution {
                status,
                x: b.x,
                dual: b.z.iter().map(|m| m.scaled(c_unit_scale)).collect(),
                primal_value: b.pcost * c_unit_scale,
                dual_value: b.dcost * c_unit_scale,
                gap: b.gap * c_unit_scale,
                primal_residual: b.pres,
                dual_residual: b.dres,
                iterations,
            })
        }
    }
}

/// Absolute KKT residuals of a candidate primal-dual pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KktResiduals {
    /// `max(0, −λ_min(F(x)))` over all blocks.
    pub primal_infeasibility: f64,
    /// Worst of `|Σₖ⟨Fᵢᵏ,Zᵏ⟩ − cᵢ|` and `max(0, −λ_min(Zᵏ))`.
    pub dual_infeasibility: f64,
    /// `|Σₖ ⟨F(x)ᵏ, Zᵏ⟩|`
    pub complementarity: f64,
}

impl KktResiduals {
    pub fn max(&self) -> f64 {
        self.primal_infeasibility
            .max(self.dual_infeasibility)
            .max(self.complementarity)
    }
}

pub fn kkt_residuals(problem: &SdpProblem, solution: &SdpSolution) -> KktResiduals {
    if solution.x.len() != problem.num_vars() || solution.dual.len() != problem.blocks().len() {
        return KktResiduals {
            primal_infeasibility: f64::INFINITY,
            dual_infeasibility: f64::INFINITY,
            complementarity: f64::INFINITY,
        };
    }
    let slacks = problem.slacks(&solution.x);
    let primal = slacks
        .iter()
        .map(|s| (-min_eigenvalue(s)).max(0.0))
        .fold(0.0, f64::max);
    let adj = problem.adjoint(&solution.dual);
    let mut dual = adj
        .iter()
        .zip(problem.objective())
        .map(|(a, c)| (a - c).abs())
        .fold(0.0, f64::max);
    for z in &solution.dual {
        if z.rows() != z.cols() {
            dual = f64::INFINITY;
            continue;
        }
        dual = dual.max((-min_eigenvalue(z)).max(0.0));
    }
    let comp = blocks_dot(&slacks, &solution.dual).abs();
    KktResiduals {
        primal_infeasibility: primal,
        dual_infeasibility: dual,
        complementarity: comp,
    }
}

/// True iff primal feasibility, dual feasibility and complementary
/// slackness residuals are all within `tol`.
pub fn check_kkt(problem: &SdpProblem, solution: &SdpSolution, tol: f64) -> bool {
    kkt_residuals(problem, solution).max() <= tol
}
