mod common;

use std::f64::consts::{FRAC_PI_4, FRAC_PI_8};

use common::{eps1_brute, solve_model};
use rand::Rng;
use sepverify_core::analytic::{
    eps1_feasible_membership, inner_value_commuting, inner_value_noncommuting, objective_reduced,
    p10_commuting, p10_eps1, region_classify, solve_reduced, Region,
};
use sepverify_core::model::{Formulation, Scenario};
use sepverify_core::oracle::inner_max;
use sepverify_core::qcore::{embed, SymmetrizedStrategy};
use sepverify_core::search::{x_bound, z_range};

/// Random LMI-feasible `(z, x)`; one draw in ten has `x = 0`.
fn feasible_point(rng: &mut impl Rng, delta: f64) -> (f64, f64) {
    let (lo, hi) = z_range(delta);
    let z = rng.gen_range(lo..=hi);
    let x = if rng.gen_bool(0.1) {
        0.0
    } else {
        rng.gen_range(-1.0..=1.0) * x_bound(delta, z)
    };
    (z, x)
}

fn sc(theta: f64, delta: f64, eps: f64) -> Scenario {
    Scenario::new(theta, delta, eps).unwrap()
}

#[test]
fn objective_matches_inner_solutions_piecewise() {
    let mut rng = common::rng(31);
    for _ in 0..10_000 {
        let s = common::scenario(&mut rng);
        let (z, x) = feasible_point(&mut rng, s.delta());
        let t = 1.0 - s.delta() - z;
        let direct = objective_reduced(z, x, &s).unwrap();
        let inner = if x == 0.0 {
            inner_value_commuting(t, z, &s)
        } else {
            inner_value_noncommuting(t, z, x, &s)
        }
        .unwrap();
        assert!((direct - inner.value).abs() <= 1e-10, "{s:?} z={z} x={x}: {direct} vs {}", inner.value);
    }
}

#[test]
fn objective_matches_numerical_inner_dual() {
    let mut rng = common::rng(32);
    for _ in 0..500 {
        let s = common::scenario(&mut rng);
        let (z, x) = feasible_point(&mut rng, s.delta());
        let t = 1.0 - s.delta() - z;
        let omega = (x * s.cos2() + z * s.sin2()).abs();
        let Ok(strategy) = SymmetrizedStrategy::new(t, z, x, omega) else {
            continue;
        };
        let effect = embed(&strategy, &s.state()).unwrap();
        let numeric = inner_max(&effect, &s.state(), s.epsilon()).value;
        let closed = objective_reduced(z, x, &s).unwrap();
        assert!((numeric - closed).abs() <= 1e-8, "{s:?} z={z} x={x}: {numeric} vs {closed}");
    }
}

/// Bisects `[a, b]` down to adjacent points in different regions.
fn region_bracket(s: &Scenario, z: f64, mut a: f64, mut b: f64) -> (f64, f64) {
    let ra = region_classify(z, a, s);
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if region_classify(z, m, s) == ra {
            a = m;
        } else {
            b = m;
        }
    }
    (a, b)
}

/// Boundary in `x ∈ [a, b]` between two regions.
fn region_boundary(s: &Scenario, z: f64, a: f64, b: f64) -> f64 {
    let (a, b) = region_bracket(s, z, a, b);
    0.5 * (a + b)
}

#[test]
fn objective_is_continuous_across_region_boundaries() {
    let mut rng = common::rng(33);
    let mut crossings = 0;
    for _ in 0..2000 {
        let s = common::scenario(&mut rng);
        let (lo, hi) = z_range(s.delta());
        let z = rng.gen_range(lo..=hi);
        let xb = x_bound(s.delta(), z);
        let n = 400;
        let xs: Vec<f64> = (0..=n).map(|k| -xb + 2.0 * xb * k as f64 / n as f64).collect();
        for w in xs.windows(2) {
            if region_classify(z, w[0], &s) == region_classify(z, w[1], &s) {
                continue;
            }
            let (a, b) = region_bracket(&s, z, w[0], w[1]);
            let left = objective_reduced(z, a, &s).unwrap();
            let right = objective_reduced(z, b, &s).unwrap();
            assert!((left - right).abs() <= 1e-10, "{s:?} z={z} x={a}: {left} vs {right}");
            crossings += 1;
        }
    }
    assert!(crossings > 50, "only {crossings} boundary crossings sampled");
}

/// Per slice of constant `z`, the smallest value outside region I is
/// either attained at `x = 0` (the commuting line) or is no smaller than the
/// smallest value in region I. Over the whole set, region I (whose closure
/// contains the commuting optimum) attains the minimum.
#[test]
fn region_one_dominates() {
    let mut rng = common::rng(34);
    let mut checked = 0;
    for _ in 0..20 {
        let s = common::scenario(&mut rng);
        let (lo, hi) = z_range(s.delta());
        let mut zs: Vec<f64> = (0..100).map(|i| lo + (hi - lo) * (i as f64 + 0.5) / 100.0).collect();
        zs.push(p10_commuting(&s).z_star);
        let mut global_one: f64 = f64::INFINITY;
        let mut global_rest = f64::INFINITY;
        for z in zs {
            let xb = x_bound(s.delta(), z);
            let n = 2000;
            let mut min_one = f64::INFINITY;
            let mut rest: Option<(f64, f64)> = None;
            let mut prev: Option<(f64, Region)> = None;
            for k in 0..=n {
                let x = -xb + 2.0 * xb * k as f64 / n as f64;
                let x = if k == n / 2 { 0.0 } else { x };
                let region = region_classify(z, x, &s);
                let v = objective_reduced(z, x, &s).unwrap();
                if region == Region::I {
                    min_one = min_one.min(v);
                } else if rest.map_or(true, |(b, _)| v < b) {
                    rest = Some((v, x));
                }
                // region I is closed; include its boundary points
                if let Some((px, pr)) = prev {
                    if (pr == Region::I) != (region == Region::I) {
                        let xc = region_boundary(&s, z, px, x);
                        min_one = min_one.min(objective_reduced(z, xc, &s).unwrap());
                    }
                }
                prev = Some((x, region));
            }
            global_one = global_one.min(min_one);
            if let Some((min_rest, arg)) = rest {
                global_rest = global_rest.min(min_rest);
                if min_one.is_finite() && arg != 0.0 {
                    assert!(min_rest >= min_one - 1e-9, "{s:?} z={z}: {min_rest} < {min_one} at x={arg}");
                    checked += 1;
                }
            }
        }
        // the global minimizer sits in (the closure of) region I
        let r = solve_reduced(&s);
        let sdp = solve_model(&s, Formulation::Reduced).primal_value;
        assert!((r.value - sdp).abs() <= 1e-6, "{s:?}: {} vs {sdp}", r.value);
        let t = 1.0 - s.delta() - r.z;
        let y1_hat = (t - r.z) + ((1.0 - s.epsilon()) / s.epsilon()).sqrt() * r.x.abs();
        let omega = (r.x * s.cos2() + r.z * s.sin2()).abs();
        assert!(y1_hat <= omega + 1e-6, "{s:?}: minimizer {r:?} outside region I");
        assert!(global_rest >= sdp - 1e-9 && global_one >= sdp - 1e-9);
    }
    assert!(checked > 100, "only {checked} slices had both regions");
}

#[test]
fn objective_increases_with_abs_x_outside_region_one() {
    let mut rng = common::rng(35);
    let mut checked = 0;
    while checked < 5000 {
        let s = common::scenario(&mut rng);
        let (z, x) = feasible_point(&mut rng, s.delta());
        if x == 0.0 {
            continue;
        }
        let region = region_classify(z, x, &s);
        if region == Region::I {
            continue;
        }
        let h = 1e-7;
        let x2 = x + h * x.signum();
        if x2.abs() > x_bound(s.delta(), z) || region_classify(z, x2, &s) != region {
            continue;
        }
        let (a, b) = (objective_reduced(z, x, &s).unwrap(), objective_reduced(z, x2, &s).unwrap());
        assert!(b >= a - 1e-13, "{s:?} z={z} x={x} {region:?}: {a} -> {b}");
        checked += 1;
    }
}

#[test]
fn eps1_closed_form_matches_reduced_search_and_brute_force() {
    for i in 0..20 {
        for j in 0..20 {
            let theta = FRAC_PI_4 * i as f64 / 19.0;
            let delta = j as f64 / 19.0;
            let (closed, geom) = p10_eps1(theta, delta).unwrap();
            let searched = solve_reduced(&sc(theta, delta, 1.0)).value;
            assert!((closed - searched).abs() <= 1e-7, "θ={theta} δ={delta}: {closed} vs {searched}");
            let brute = eps1_brute(theta, delta);
            assert!((closed - brute).abs() <= 1e-7, "θ={theta} δ={delta}: {closed} vs brute {brute}");
            assert!(geom.x0 <= 1e-15 && geom.x1 <= 1e-15);
            assert_eq!(geom.x_star, geom.x0.max(geom.x1));
        }
    }
}

#[test]
fn eps1_reference_point() {
    let (v, g) = p10_eps1(FRAC_PI_8, 0.1).unwrap();
    let brute = eps1_brute(FRAC_PI_8, 0.1);
    assert!((v - brute).abs() <= 1e-9, "{v} vs {brute}");
    // high-precision evaluation of the closed form
    assert!((v - 0.088_035_371_152_861).abs() <= 1e-12);
    assert!((g.x0 - -0.281_481_498_570_644).abs() <= 1e-12);
    assert!((g.x1 - -0.303_922_341_946_346).abs() <= 1e-12);
    assert_eq!(g.x_star, g.x0);
    let r = solve_reduced(&sc(FRAC_PI_8, 0.1, 1.0));
    assert!((r.x - g.x0).abs() <= 1e-5, "{r:?}");
}

#[test]
fn commuting_value_is_optimal_at_perfect_fidelity() {
    for i in 0..=20 {
        let theta = FRAC_PI_4 * i as f64 / 20.0;
        for e in [0.1, 0.25, 0.5, 0.75, 0.9, 1.0] {
            let s = sc(theta, 0.0, e);
            let closed = p10_commuting(&s).value;
            // at δ = 0 the feasible set forces x = 0; scan z directly
            let (lo, hi) = z_range(0.0);
            let (mut a, mut b) = (lo, hi);
            let mut best = f64::INFINITY;
            let mut arg = a;
            for _ in 0..30 {
                let n = 1000;
                for k in 0..=n {
                    let z = a + (b - a) * k as f64 / n as f64;
                    let v = objective_reduced(z, 0.0, &s).unwrap();
                    if v < best {
                        best = v;
                        arg = z;
                    }
                }
                let h = (b - a) / n as f64;
                a = (arg - 2.0 * h).max(lo);
                b = (arg + 2.0 * h).min(hi);
            }
            assert!((closed - best).abs() <= 1e-9, "{s:?}: {closed} vs scan {best}");
            let r = solve_reduced(&s);
            assert_eq!(r.x, 0.0);
            assert!((closed - r.value).abs() <= 1e-9, "{s:?}: {closed} vs {}", r.value);
        }
    }
}

#[test]
fn commuting_bound_dominates_eps1_value() {
    for i in 0..=50 {
        for j in 0..=50 {
            let theta = FRAC_PI_4 * i as f64 / 50.0;
            let delta = j as f64 / 50.0;
            let (v, _) = p10_eps1(theta, delta).unwrap();
            let c = p10_commuting(&sc(theta, delta, 1.0)).value;
            assert!(v <= c + 1e-15, "θ={theta} δ={delta}: {v} > {c}");
        }
    }
}

#[test]
fn solve_reduced_matches_reduced_sdp() {
    let mut rng = common::rng(36);
    for _ in 0..40 {
        let s = common::scenario(&mut rng);
        let r = solve_reduced(&s);
        let sdp = solve_model(&s, Formulation::Reduced).primal_value;
        assert!((r.value - sdp).abs() <= 1e-6, "{s:?}: search {} sdp {sdp}", r.value);
        assert!((objective_reduced(r.z, r.x, &s).unwrap() - r.value).abs() <= 1e-12);
    }
}

#[test]
fn eps1_membership_examples() {
    let m = eps1_feasible_membership(0.0, 0.0, FRAC_PI_8, 0.5).unwrap();
    assert!(m.in_p0 && m.in_p1 && !m.in_k);
    let d = 0.3;
    assert!(eps1_feasible_membership((1.0 - d) / 2.0, 0.0, FRAC_PI_8, d).unwrap().in_p0);
    assert!(!eps1_feasible_membership((1.0 - d) / 2.0 + 1e-9, 0.0, FRAC_PI_8, d).unwrap().in_p0);
    let s = sc(FRAC_PI_8, d, 1.0);
    let z_star = p10_commuting(&s).z_star;
    assert!(eps1_feasible_membership(z_star, 0.0, FRAC_PI_8, d).unwrap().in_k);
    assert!(!eps1_feasible_membership(z_star - 1e-9, 0.0, FRAC_PI_8, d).unwrap().in_k);
    // δ = 0 leaves only the segment x = 0, z ≥ 0 in P1
    let m = eps1_feasible_membership(0.1, 0.0, FRAC_PI_8, 0.0).unwrap();
    assert!(m.in_p1);
    assert!(!eps1_feasible_membership(0.1, 0.01, FRAC_PI_8, 0.0).unwrap().in_p1);
}

#[test]
fn eps1_feasible_set_is_p0_and_p1() {
    // the LMI-feasible set of the reduced problem is P0 ∩ P1
    let mut rng = common::rng(37);
    for _ in 0..2000 {
        let theta = common::theta(&mut rng);
        let delta = rng.gen_range(0.01..0.99);
        let z = rng.gen_range(-0.6..0.6);
        let x = rng.gen_range(-0.6..0.6);
        let m = eps1_feasible_membership(z, x, theta, delta).unwrap();
        let (zl, zh) = z_range(delta);
        let inside = z >= zl && z <= zh && x.abs() <= x_bound(delta, z);
        let margin = (x.abs() - x_bound(delta, z)).abs().min((z - zl).abs()).min((z - zh).abs());
        if margin > 1e-9 {
            assert_eq!(inside, m.in_p0 && m.in_p1, "z={z} x={x} δ={delta}");
        }
    }
}
