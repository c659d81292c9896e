//! Global minimization over the reduced feasible set.
//!
//! With `t = 1 − δ − z`, the strategy LMIs `0 ≼ [[1−δ, x], [x, 1−δ−2z]] ≼ 1`
//! hold exactly when `z ∈ [−δ/2, (1−δ)/2]` and `|x| ≤ X(z)` with
//!
//! ```text
//! X(z)² = min{ (1−δ)(1−δ−2z),  δ(δ+2z) }.
//! ```
//!
//! Points are addressed as `(v, u)` with `z = z_lo + (z_hi − z_lo)(1 − cos πv)/2`
//! and `x = u·X(z)`, `v ∈ [0, 1]`, `u ∈ [−1, 1]`, so every grid point is
//! feasible. `X` has square-root behaviour at both ends of the `z` range and
//! minimizers often sit in those corners; the cosine spacing makes cells
//! there `O(1/n²)` wide in `z`. The feasible set with the PPT cut can be
//! nonconvex and even disconnected, so a full grid pass precedes the local
//! polish.

use alloc::vec::Vec;

// supplies float methods when std is not linked
#[allow(unused_imports)]
use num_traits::Float;

use crate::golden;
use crate::linalg::eig2;

/// Golden-section tolerance used by the polish stage.
pub const POLISH_TOL: f64 = 1e-11;
/// Number of distinct grid cells the polish is started from.
pub const POLISH_STARTS: usize = 5;
/// Cap on window recenterings per polish start.
const MAX_RECENTER: usize = 64;

/// `[−δ/2, (1−δ)/2]`
pub fn z_range(delta: f64) -> (f64, f64) {
    (-0.5 * delta, 0.5 * (1.0 - delta))
}

/// Largest feasible `|x|` at the given `z`; zero outside the `z` range.
pub fn x_bound(delta: f64, z: f64) -> f64 {
    let a = (1.0 - delta) * (1.0 - delta - 2.0 * z);
    let b = delta * (delta + 2.0 * z);
    a.min(b).max(0.0).sqrt()
}

/// True if the spectrum of `[[1−δ, x], [x, 1−δ−2z]]` lies in
/// `[−tol, 1 + tol]`.
pub fn is_feasible(delta: f64, z: f64, x: f64, tol: f64) -> bool {
    let (lo, hi) = eig2(1.0 - delta, x, 1.0 - delta - 2.0 * z);
    lo >= -tol && hi <= 1.0 + tol
}

/// Minimizer found by [`minimize`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchResult {
    pub z: f64,
    pub x: f64,
    pub value: f64,
    pub evaluations: usize,
}

/// Minimizes `f(z, x)` over the reduced feasible set for the given `δ`.
///
/// A `grid_n × grid_n` pass over `(z, u)` is followed by nested golden
/// sections (outer in `v`, inner in `u`) over a ±2-cell window around each
/// of the [`POLISH_STARTS`] best cells that are at least 3 cells apart. The
/// window is recentered on each polished point until the value stops
/// improving, so narrow valleys that leave the first window are followed.
/// Ties are broken toward the lexicographically smaller `(z, x)`.
pub fn minimize(delta: f64, grid_n: usize, mut f: impl FnMut(f64, f64) -> f64) -> SearchResult {
    let n = grid_n.max(2);
    let (zlo, zhi) = z_range(delta);
    let hv = 1.0 / (n - 1) as f64;
    let hu = 2.0 / (n - 1) as f64;
    let z_of = |v: f64| {
        if v >= 1.0 {
            zhi
        } else {
            zlo + (zhi - zlo) * 0.5 * (1.0 - (core::f64::consts::PI * v).cos())
        }
    };
    let v_at = |i: usize| if i + 1 == n { 1.0 } else { i as f64 * hv };
    let u_at = |j: usize| if j + 1 == n { 1.0 } else { -1.0 + j as f64 * hu };

    let mut evaluations = 0;
    let mut cells: Vec<(f64, usize, usize)> = Vec::with_capacity(n * n);
    let mut best = SearchResult {
        z: f64::NAN,
        x: f64::NAN,
        value: f64::INFINITY,
        evaluations: 0,
    };
    let consider = |z: f64, x: f64, v: f64, best: &mut SearchResult| {
        let better = v < best.value
            || (v == best.value && (z, x) < (best.z, best.x))
            || best.value.is_nan();
        if better && v.is_finite() {
            best.z = z;
            best.x = x;
            best.value = v;
        }
    };

    for i in 0..n {
        let z = z_of(v_at(i));
        let xb = x_bound(delta, z);
        for j in 0..n {
            let x = u_at(j) * xb;
            let v = f(z, x);
            evaluations += 1;
            cells.push((v, i, j));
            consider(z, x, v, &mut best);
        }
    }

    cells.sort_by(|a, b| {
        a.0.partial_cmp(&b.0)
            .unwrap_or(core::cmp::Ordering::Equal)
            .then((a.1, a.2).cmp(&(b.1, b.2)))
    });
    let mut starts: Vec<(f64, usize, usize)> = Vec::with_capacity(POLISH_STARTS);
    for &(v, i, j) in &cells {
        if starts.len() == POLISH_STARTS || !v.is_finite() {
            break;
        }
        let far = starts
            .iter()
            .all(|&(_, si, sj)| si.abs_diff(i) > 2 || sj.abs_diff(j) > 2);
        if far {
            starts.push((v, i, j));
        }
    }

    for (cell_value, i, j) in starts {
        let (mut vc, mut uc) = (v_at(i), u_at(j));
        let mut current = cell_value;
        for _ in 0..MAX_RECENTER {
            let v_lo = (vc - 2.0 * hv).max(0.0);
            let v_hi = (vc + 2.0 * hv).min(1.0);
            let u_lo = (uc - 2.0 * hu).max(-1.0);
            let u_hi = (uc + 2.0 * hu).min(1.0);
            let mut inner_best = |v: f64, evaluations: &mut usize| {
                let z = z_of(v);
                let xb = x_bound(delta, z);
                let r = golden::minimize(|u| f(z, u * xb), u_lo, u_hi, POLISH_TOL, 200);
                *evaluations += r.evaluations;
                (z, r.x, xb, r.value)
            };
            let outer = golden::minimize(
                |v| inner_best(v, &mut evaluations).3,
                v_lo,
                v_hi,
                POLISH_TOL,
                200,
            );
            let (z, u, xb, value) = inner_best(outer.x, &mut evaluations);
            consider(z, u * xb, value, &mut best);
            // stop once recentering no longer helps
            if !(value < current - POLISH_TOL * current.abs().max(1.0)) {
                break;
            }
            current = value;
            vc = outer.x;
            uc = u;
        }
    }
    best.evaluations = evaluations;
    best
}
