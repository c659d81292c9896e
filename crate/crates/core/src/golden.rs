//! Derivative-free minimization of unimodal functions on an interval.

/// Result of [`minimize`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GoldenMin {
    pub x: f64,
    pub value: f64,
    pub evaluations: usize,
}

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Golden-section search for the minimum of `f` on `[a, b]`.
///
/// Stops once the bracket is narrower than `rel_tol·max(1, |a|+|b|)` or after
/// `max_iter` shrink steps. The endpoints are evaluated too, so a monotone `f`
/// returns the exact endpoint.
pub fn minimize(
    mut f: impl FnMut(f64) -> f64,
    a: f64,
    b: f64,
    rel_tol: f64,
    max_iter: usize,
) -> GoldenMin {
    let (mut lo, mut hi) = if a <= b { (a, b) } else { (b, a) };
    let scale = 1.0f64.max(lo.abs() + hi.abs());
    let mut best = GoldenMin {
        x: lo,
        value: f(lo),
        evaluations: 1,
    };
    let consider = |x: f64, v: f64, best: &mut GoldenMin| {
        best.evaluations += 1;
        if v < best.value {
            best.x = x;
            best.value = v;
        }
    };
    let fhi = f(hi);
    consider(hi, fhi, &mut best);
    if hi - lo <= rel_tol * scale {
        return best;
    }

    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    consider(x1, f1, &mut best);
    let mut f2 = f(x2);
    consider(x2, f2, &mut best);
    for _ in 0..max_iter {
        if hi - lo <= rel_tol * scale {
            break;
        }
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
            consider(x1, f1, &mut best);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
            consider(x2, f2, &mut best);
        }
    }
    best
}
