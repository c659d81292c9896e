//! Small dense linear algebra.
//!
//! Everything here works on matrices of a dozen rows or fewer: LMI blocks,
//! Schur complements of the interior-point method and two-qubit operators.
//! Algorithms are chosen for accuracy on tiny inputs (cyclic Jacobi,
//! one-sided Jacobi SVD) rather than for speed.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Index, IndexMut};

use num_complex::Complex64;
// supplies float methods when std is not linked
#[allow(unused_imports)]
use num_traits::Float;

/// Dense row-major real matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_diag(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    /// Builds a matrix from row slices.
    ///
    /// Panics if the rows have different lengths.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Self {
        let n_rows = rows.len();
        let n_cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(n_rows * n_cols);
        for r in rows {
            let r = r.as_ref();
            assert_eq!(r.len(), n_cols, "ragged rows");
            data.extend_from_slice(r);
        }
        Self {
            rows: n_rows,
            cols: n_cols,
            data,
        }
    }

    /// Builds a matrix from a row-major element vector.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), rows * cols, "element count mismatch");
        Self { rows, cols, data }
    }

    /// Outer product `u vᵀ`.
    pub fn outer(u: &[f64], v: &[f64]) -> Self {
        let mut m = Self::zeros(u.len(), v.len());
        for (i, &ui) in u.iter().enumerate() {
            for (j, &vj) in v.iter().enumerate() {
                m[(i, j)] = ui * vj;
            }
        }
        m
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn matmul(&self, other: &Matrix) -> Self {
        assert_eq!(self.cols, other.rows, "inner dimension mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn matvec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self[(i, j)] * v[j]).sum())
            .collect()
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| v * s).collect(),
        }
    }

    pub fn add(&self, other: &Matrix) -> Self {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Matrix) -> Self {
        self.zip_with(other, |a, b| a - b)
    }

    /// `self += s * other`
    pub fn axpy(&mut self, s: f64, other: &Matrix) {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += s * b;
        }
    }

    fn zip_with(&self, other: &Matrix, f: impl Fn(f64, f64) -> f64) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }

    pub fn trace(&self) -> f64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    /// Frobenius inner product `tr(Aᵀ B)`.
    pub fn dot(&self, other: &Matrix) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data.iter().zip(&other.data).map(|(a, b)| a * b).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Largest `|a_ij - a_ji|`.
    pub fn asymmetry(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut worst: f64 = 0.0;
        for i in 0..self.rows {
            for j in (i + 1)..self.cols {
                worst = worst.max((self[(i, j)] - self[(j, i)]).abs());
            }
        }
        worst
    }

    /// `(A + Aᵀ) / 2`
    pub fn symmetrized(&self) -> Self {
        let mut s = self.clone();
        for i in 0..self.rows {
            for j in (i + 1)..self.cols {
                let v = 0.5 * (self[(i, j)] + self[(j, i)]);
                s[(i, j)] = v;
                s[(j, i)] = v;
            }
        }
        s
    }

    /// `A B A` for symmetric `A`, `B`, symmetrized to cancel rounding drift.
    pub fn congruence(a: &Matrix, b: &Matrix) -> Self {
        a.matmul(b).matmul(a).symmetrized()
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

/// Eigen-decomposition of a real symmetric matrix.
#[derive(Debug, Clone)]
pub struct SymmetricEigen {
    /// Eigenvalues in ascending order.
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors stored as columns, matching `values`.
    pub vectors: Matrix,
}

impl SymmetricEigen {
    /// Cyclic Jacobi iteration. Only the upper triangle is trusted to be
    /// meaningful; the input is symmetrized first.
    pub fn new(a: &Matrix) -> Self {
        assert!(a.is_square(), "eigen-decomposition needs a square matrix");
        let n = a.rows();
        let mut m = a.symmetrized();
        let mut v = Matrix::identity(n);

        for _sweep in 0..100 {
            let mut off = 0.0;
            let mut diag = 0.0;
            for i in 0..n {
                diag += m[(i, i)] * m[(i, i)];
                for j in (i + 1)..n {
                    off += m[(i, j)] * m[(i, j)];
                }
            }
            if off <= f64::EPSILON * f64::EPSILON * diag * 1e-4 || off < f64::MIN_POSITIVE {
                break;
            }
            for p in 0..n {
                for q in (p + 1)..n {
                    let apq = m[(p, q)];
                    if apq == 0.0 {
                        continue;
                    }
                    let app = m[(p, p)];
                    let aqq = m[(q, q)];
                    let theta = (aqq - app) / (2.0 * apq);
                    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                    let t = if theta == 0.0 { 1.0 } else { t };
                    let c = 1.0 / (t * t + 1.0).sqrt();
                    let s = t * c;
                    for k in 0..n {
                        let mkp = m[(k, p)];
                        let mkq = m[(k, q)];
                        m[(k, p)] = c * mkp - s * mkq;
                        m[(k, q)] = s * mkp + c * mkq;
                    }
                    for k in 0..n {
                        let mpk = m[(p, k)];
                        let mqk = m[(q, k)];
                        m[(p, k)] = c * mpk - s * mqk;
                        m[(q, k)] = s * mpk + c * mqk;
                    }
                    m[(p, q)] = 0.0;
                    m[(q, p)] = 0.0;
                    for k in 0..n {
                        let vkp = v[(k, p)];
                        let vkq = v[(k, q)];
                        v[(k, p)] = c * vkp - s * vkq;
                        v[(k, q)] = s * vkp + c * vkq;
                    }
                }
            }
        }

        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| m[(i, i)].total_cmp(&m[(j, j)]).then(i.cmp(&j)));
        let values = order.iter().map(|&i| m[(i, i)]).collect();
        let mut vectors = Matrix::zeros(n, n);
        for (new_col, &old_col) in order.iter().enumerate() {
            for k in 0..n {
                vectors[(k, new_col)] = v[(k, old_col)];
            }
        }
        Self { values, vectors }
    }

    pub fn min(&self) -> f64 {
        self.values.first().copied().unwrap_or(f64::INFINITY)
    }

    pub fn max(&self) -> f64 {
        self.values.last().copied().unwrap_or(f64::NEG_INFINITY)
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.vectors.rows()).map(|k| self.vectors[(k, j)]).collect()
    }

    /// Rebuilds `V f(Λ) Vᵀ`.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Matrix {
        let n = self.values.len();
        let mut out = Matrix::zeros(n, n);
        for (j, &lam) in self.values.iter().enumerate() {
            let w = f(lam);
            if w == 0.0 {
                continue;
            }
            for r in 0..n {
                let vr = self.vectors[(r, j)] * w;
                for c in 0..n {
                    out[(r, c)] += vr * self.vectors[(c, j)];
                }
            }
        }
        out
    }
}

/// Smallest eigenvalue of a symmetric matrix.
pub fn min_eigenvalue(a: &Matrix) -> f64 {
    match a.rows() {
        0 => f64::INFINITY,
        1 => a[(0, 0)],
        2 => {
            let (lo, _) = eig2(a[(0, 0)], a[(0, 1)], a[(1, 1)]);
            lo
        }
        _ => SymmetricEigen::new(a).min(),
    }
}

/// Eigenvalues `(lo, hi)` of `[[a, b], [b, d]]`.
#[inline]
pub fn eig2(a: f64, b: f64, d: f64) -> (f64, f64) {
    let mid = 0.5 * (a + d);
    let rad = (0.5 * (a - d)).hypot(b);
    (mid - rad, mid + rad)
}

/// Lower Cholesky factor of a symmetric positive definite matrix.
pub fn cholesky(a: &Matrix) -> Option<Matrix> {
    let n = a.rows();
    let mut l = Matrix::zeros(n, n);
    for j in 0..n {
        let mut d = a[(j, j)];
        for k in 0..j {
            d -= l[(j, k)] * l[(j, k)];
        }
        if !(d > 0.0) || !d.is_finite() {
            return None;
        }
        let d = d.sqrt();
        l[(j, j)] = d;
        for i in (j + 1)..n {
            let mut s = a[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)];
            }
            l[(i, j)] = s / d;
        }
    }
    Some(l)
}

/// Inverse of a lower-triangular matrix.
pub fn lower_triangular_inverse(l: &Matrix) -> Matrix {
    let n = l.rows();
    let mut inv = Matrix::zeros(n, n);
    for j in 0..n {
        inv[(j, j)] = 1.0 / l[(j, j)];
        for i in (j + 1)..n {
            let mut s = 0.0;
            for k in j..i {
                s += l[(i, k)] * inv[(k, j)];
            }
            inv[(i, j)] = -s / l[(i, i)];
        }
    }
    inv
}

/// Solves `A x = b` by Gaussian elimination with partial pivoting.
pub fn solve(a: &Matrix, b: &[f64]) -> Option<Vec<f64>> {
    let n = a.rows();
    assert!(a.is_square() && b.len() == n);
    let mut m = a.clone();
    let mut x = b.to_vec();
    let scale = m.max_abs().max(f64::MIN_POSITIVE);
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| m[(i, col)].abs().total_cmp(&m[(j, col)].abs()))
            .unwrap_or(col);
        if m[(pivot, col)].abs() <= scale * 1e-300 {
            return None;
        }
        if pivot != col {
            for k in 0..n {
                let tmp = m[(col, k)];
                m[(col, k)] = m[(pivot, k)];
                m[(pivot, k)] = tmp;
            }
            x.swap(col, pivot);
        }
        for r in (col + 1)..n {
            let f = m[(r, col)] / m[(col, col)];
            if f == 0.0 {
                continue;
            }
            for k in col..n {
                m[(r, k)] -= f * m[(col, k)];
            }
            x[r] -= f * x[col];
        }
    }
    for i in (0..n).rev() {
        let mut s = x[i];
        for k in (i + 1)..n {
            s -= m[(i, k)] * x[k];
        }
        x[i] = s / m[(i, i)];
    }
    Some(x)
}

/// Solves a symmetric positive (semi)definite system, preferring Cholesky and
/// falling back to pivoted elimination when the factorization breaks down.
pub fn solve_spd(a: &Matrix, b: &[f64]) -> Option<Vec<f64>> {
    if let Some(l) = cholesky(a) {
        let n = a.rows();
        let mut y = b.to_vec();
        for i in 0..n {
            let mut s = y[i];
            for k in 0..i {
                s -= l[(i, k)] * y[k];
            }
            y[i] = s / l[(i, i)];
        }
        for i in (0..n).rev() {
            let mut s = y[i];
            for k in (i + 1)..n {
                s -= l[(k, i)] * y[k];
            }
            y[i] = s / l[(i, i)];
        }
        return Some(y);
    }
    solve(a, b)
}

/// Householder QR factorization `A = Q R` of a tall matrix (`rows ≥ cols`).
pub struct Qr {
    /// Reflector vectors below the diagonal, `R` on and above it.
    packed: Matrix,
    /// Householder scalars `β` with `H = 1 − β v vᵀ`.
    beta: Vec<f64>,
}

impl Qr {
    /// Returns `None` if `A` is wide or numerically rank deficient.
    pub fn new(a: &Matrix) -> Option<Self> {
        let (m, n) = (a.rows(), a.cols());
        if m < n {
            return None;
        }
        let mut packed = a.clone();
        let mut beta = vec![0.0; n];
        let scale = a.max_abs().max(f64::MIN_POSITIVE);
        for k in 0..n {
            let norm = (k..m).map(|i| packed[(i, k)] * packed[(i, k)]).sum::<f64>().sqrt();
            if norm <= 1e-14 * scale {
                return None;
            }
            let alpha = if packed[(k, k)] > 0.0 { -norm } else { norm };
            // v = x − α e₁, stored with v₀ in place of the diagonal until the end
            let v0 = packed[(k, k)] - alpha;
            packed[(k, k)] = v0;
            let vtv = v0 * v0 + (k + 1..m).map(|i| packed[(i, k)] * packed[(i, k)]).sum::<f64>();
            let b = 2.0 / vtv;
            for j in k + 1..n {
                let s: f64 = (k..m).map(|i| packed[(i, k)] * packed[(i, j)]).sum();
                for i in k..m {
                    packed[(i, j)] -= b * s * packed[(i, k)];
                }
            }
            // normalize v so v₀ = 1 and keep α on the diagonal
            for i in k + 1..m {
                packed[(i, k)] /= v0;
            }
            beta[k] = b * v0 * v0;
            packed[(k, k)] = alpha;
        }
        Some(Self { packed, beta })
    }

    /// `Qᵀ b`, truncated to the first `cols` entries.
    pub fn apply_qt(&self, b: &[f64]) -> Vec<f64> {
        let (m, n) = (self.packed.rows(), self.packed.cols());
        assert_eq!(b.len(), m);
        let mut y = b.to_vec();
        for k in 0..n {
            let mut s = y[k];
            for i in k + 1..m {
                s += self.packed[(i, k)] * y[i];
            }
            s *= self.beta[k];
            y[k] -= s;
            for i in k + 1..m {
                y[i] -= s * self.packed[(i, k)];
            }
        }
        y.truncate(n);
        y
    }

    /// Solves `R x = b`.
    pub fn solve_r(&self, b: &[f64]) -> Vec<f64> {
        let n = self.packed.cols();
        let mut x = b.to_vec();
        for i in (0..n).rev() {
            let mut acc = x[i];
            for j in i + 1..n {
                acc -= self.packed[(i, j)] * x[j];
            }
            x[i] = acc / self.packed[(i, i)];
        }
        x
    }

    /// Solves `Rᵀ x = b`.
    pub fn solve_rt(&self, b: &[f64]) -> Vec<f64> {
        let n = self.packed.cols();
        let mut x = b.to_vec();
        for i in 0..n {
            let mut acc = x[i];
            for j in 0..i {
                acc -= self.packed[(j, i)] * x[j];
            }
            x[i] = acc / self.packed[(i, i)];
        }
        x
    }
}

/// Singular value decomposition `A = U diag(σ) Vᵀ` of a square matrix by
/// one-sided Jacobi rotations. Singular values are not sorted.
pub struct Svd {
    pub u: Matrix,
    pub sigma: Vec<f64>,
    pub v: Matrix,
}

impl Svd {
    pub fn new(a: &Matrix) -> Self {
        assert!(a.is_square());
        let n = a.rows();
        let mut w = a.clone();
        let mut v = Matrix::identity(n);
        for _sweep in 0..60 {
            let mut rotated = false;
            for p in 0..n {
                for q in (p + 1)..n {
                    let (mut alpha, mut beta, mut gamma) = (0.0, 0.0, 0.0);
                    for k in 0..n {
                        alpha += w[(k, p)] * w[(k, p)];
                        beta += w[(k, q)] * w[(k, q)];
                        gamma += w[(k, p)] * w[(k, q)];
                    }
                    if gamma.abs() <= 1e-15 * (alpha * beta).sqrt() || gamma == 0.0 {
                        continue;
                    }
                    rotated = true;
                    let zeta = (beta - alpha) / (2.0 * gamma);
                    let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                    let t = if zeta == 0.0 { 1.0 } else { t };
                    let c = 1.0 / (1.0 + t * t).sqrt();
                    let s = c * t;
                    for k in 0..n {
                        let wp = w[(k, p)];
                        let wq = w[(k, q)];
                        w[(k, p)] = c * wp - s * wq;
                        w[(k, q)] = s * wp + c * wq;
                        let vp = v[(k, p)];
                        let vq = v[(k, q)];
                        v[(k, p)] = c * vp - s * vq;
                        v[(k, q)] = s * vp + c * vq;
                    }
                }
            }
            if !rotated {
                break;
            }
        }
        let mut sigma = vec![0.0; n];
        let mut u = Matrix::zeros(n, n);
        for j in 0..n {
            let norm = (0..n).map(|k| w[(k, j)] * w[(k, j)]).sum::<f64>().sqrt();
            sigma[j] = norm;
            if norm > 0.0 {
                for k in 0..n {
                    u[(k, j)] = w[(k, j)] / norm;
                }
            }
        }
        Self { u, sigma, v }
    }
}

/// Eigen-decomposition of a complex Hermitian matrix (row-major entries).
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    /// Eigenvalues in ascending order.
    pub values: Vec<f64>,
    /// Unit eigenvectors matching `values`.
    pub vectors: Vec<Vec<Complex64>>,
}

impl HermitianEigen {
    /// Complex cyclic Jacobi: each rotation first removes the phase of the
    /// pivot entry, then applies the real symmetric Jacobi rotation.
    pub fn new(n: usize, entries: &[Complex64]) -> Self {
        assert_eq!(entries.len(), n * n);
        let mut a: Vec<Complex64> = entries.to_vec();
        for i in 0..n {
            for j in i..n {
                let v = 0.5 * (a[i * n + j] + a[j * n + i].conj());
                a[i * n + j] = v;
                a[j * n + i] = v.conj();
            }
        }
        let mut v = vec![Complex64::new(0.0, 0.0); n * n];
        for i in 0..n {
            v[i * n + i] = Complex64::new(1.0, 0.0);
        }
        for _sweep in 0..100 {
            let mut off = 0.0;
            let mut diag = 0.0;
            for i in 0..n {
                diag += a[i * n + i].re * a[i * n + i].re;
                for j in (i + 1)..n {
                    off += a[i * n + j].norm_sqr();
                }
            }
            if off <= f64::EPSILON * f64::EPSILON * diag * 1e-4 || off < f64::MIN_POSITIVE {
                break;
            }
            for p in 0..n {
                for q in (p + 1)..n {
                    let apq = a[p * n + q];
                    let r = apq.norm();
                    if r == 0.0 {
                        continue;
                    }
                    // column q *= e^{-iφ}, row q *= e^{iφ}
                    let phase = (apq / r).conj();
                    for k in 0..n {
                        a[k * n + q] *= phase;
                        v[k * n + q] *= phase;
                    }
                    for k in 0..n {
                        a[q * n + k] *= phase.conj();
                    }
                    let app = a[p * n + p].re;
                    let aqq = a[q * n + q].re;
                    let theta = (aqq - app) / (2.0 * r);
                    let t = if theta == 0.0 {
                        1.0
                    } else {
                        theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                    };
                    let c = 1.0 / (t * t + 1.0).sqrt();
                    let s = t * c;
                    for k in 0..n {
                        let akp = a[k * n + p];
                        let akq = a[k * n + q];
                        a[k * n + p] = akp * c - akq * s;
                        a[k * n + q] = akp * s + akq * c;
                        let vkp = v[k * n + p];
                        let vkq = v[k * n + q];
                        v[k * n + p] = vkp * c - vkq * s;
                        v[k * n + q] = vkp * s + vkq * c;
                    }
                    for k in 0..n {
                        let apk = a[p * n + k];
                        let aqk = a[q * n + k];
                        a[p * n + k] = apk * c - aqk * s;
                        a[q * n + k] = apk * s + aqk * c;
                    }
                    a[p * n + q] = Complex64::new(0.0, 0.0);
                    a[q * n + p] = Complex64::new(0.0, 0.0);
                }
            }
        }
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| a[i * n + i].re.total_cmp(&a[j * n + j].re).then(i.cmp(&j)));
        let values = order.iter().map(|&i| a[i * n + i].re).collect();
        let vectors = order
            .iter()
            .map(|&j| (0..n).map(|k| v[k * n + j]).collect())
            .collect();
        Self { values, vectors }
    }

    pub fn min(&self) -> f64 {
        self.values.first().copied().unwrap_or(f64::INFINITY)
    }

    pub fn max(&self) -> f64 {
        self.values.last().copied().unwrap_or(f64::NEG_INFINITY)
    }
}
