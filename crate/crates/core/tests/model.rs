mod common;

use std::f64::consts::{FRAC_PI_4, FRAC_PI_8};

use common::{eps1_brute, solve_model};
use sepverify_core::model::{extract_strategy, Formulation, Scenario};
use sepverify_core::oracle::inner_max;
use sepverify_core::qcore::{embed, is_ppt, SymmetrizedStrategy};

const THETAS: [f64; 5] = [0.0, FRAC_PI_4 / 4.0, FRAC_PI_8, 3.0 * FRAC_PI_4 / 4.0, FRAC_PI_4];
const DELTAS: [f64; 5] = [0.0, 0.25, 0.5, 0.75, 1.0];
const EPSILONS: [f64; 5] = [0.2, 0.4, 0.6, 0.8, 1.0];

/// `value[i][j][k]` for `THETAS[i]`, `DELTAS[j]`, `EPSILONS[k]`.
fn grid_values(which: Formulation) -> Vec<Vec<Vec<f64>>> {
    THETAS
        .iter()
        .map(|&t| {
            DELTAS
                .iter()
                .map(|&d| {
                    EPSILONS
                        .iter()
                        .map(|&e| solve_model(&Scenario::new(t, d, e).unwrap(), which).primal_value)
                        .collect()
                })
                .collect()
        })
        .collect()
}

#[test]
fn full_and_reduced_agree_on_grid() {
    let full = grid_values(Formulation::Full);
    let reduced = grid_values(Formulation::Reduced);
    for i in 0..5 {
        for j in 0..5 {
            for k in 0..5 {
                let (a, b) = (full[i][j][k], reduced[i][j][k]);
                assert!((a - b).abs() <= 1e-6, "({i},{j},{k}): full {a} reduced {b}");
            }
        }
    }
}

#[test]
fn value_is_monotone_and_bounded_below() {
    let v = grid_values(Formulation::Full);
    for i in 0..5 {
        for j in 0..5 {
            for k in 0..5 {
                let (d, e) = (DELTAS[j], EPSILONS[k]);
                assert!(v[i][j][k] >= (1.0 - d) * (1.0 - e) - 1e-8, "({i},{j},{k})");
                if j + 1 < 5 {
                    assert!(v[i][j + 1][k] <= v[i][j][k] + 1e-8, "δ step at ({i},{j},{k})");
                }
                if k + 1 < 5 {
                    assert!(v[i][j][k + 1] <= v[i][j][k] + 1e-8, "ε step at ({i},{j},{k})");
                }
            }
        }
    }
}

#[test]
fn inner_problem_has_no_duality_gap_at_the_optimum() {
    for &t in &THETAS {
        for &d in &DELTAS {
            for &e in &EPSILONS {
                let sc = Scenario::new(t, d, e).unwrap();
                for which in [Formulation::Full, Formulation::Reduced] {
                    let sol = solve_model(&sc, which);
                    let (omega, dual) = extract_strategy(&sol, which, &sc).unwrap();
                    let worst = inner_max(&omega, &sc.state(), e).value;
                    assert!(
                        (worst - dual.objective(e)).abs() <= 1e-6,
                        "{sc:?} {which:?}: inner {worst} dual {}",
                        dual.objective(e)
                    );
                    assert!(is_ppt(&omega, 1e-9));
                    let fidelity = omega.operator().expectation(&sc.state().state_vector());
                    assert!(fidelity >= 1.0 - d - 1e-7, "{sc:?} {which:?}: {fidelity}");
                }
            }
        }
    }
}

#[test]
fn maximally_entangled_perfect_fidelity_value() {
    let sc = Scenario::new(FRAC_PI_4, 0.0, 1.0).unwrap();
    for which in [Formulation::Full, Formulation::Reduced] {
        let sol = solve_model(&sc, which);
        assert!((sol.primal_value - 1.0 / 3.0).abs() <= 1e-6);
        let (omega, _) = extract_strategy(&sol, which, &sc).unwrap();
        let fidelity = omega.operator().expectation(&sc.state().state_vector());
        assert!((fidelity - 1.0).abs() <= 1e-7, "{which:?}: {fidelity}");
    }
}

#[test]
fn zero_effect_is_optimal_without_fidelity_requirement() {
    for &t in &THETAS {
        for &e in &EPSILONS {
            let sc = Scenario::new(t, 1.0, e).unwrap();
            for which in [Formulation::Full, Formulation::Reduced] {
                let sol = solve_model(&sc, which);
                assert!(sol.primal_value.abs() <= 1e-7);
                let (omega, _) = extract_strategy(&sol, which, &sc).unwrap();
                assert!(inner_max(&omega, &sc.state(), e).value <= 1e-7);
                // with a product state and ε = 1, any multiple of |00⟩⟨00| also scores 0
                if t > 0.0 || e < 1.0 {
                    let top = omega.operator().eigenvalues().into_iter().fold(0.0, f64::max);
                    assert!(top <= 1e-7, "{sc:?} {which:?}: {top}");
                }
            }
        }
    }
}

#[test]
fn epsilon_one_matches_brute_force() {
    let sc = Scenario::new(FRAC_PI_8, 0.1, 1.0).unwrap();
    let reference = eps1_brute(FRAC_PI_8, 0.1);
    assert!((reference - 0.088036).abs() < 1e-6);
    for which in [Formulation::Full, Formulation::Reduced] {
        let v = solve_model(&sc, which).primal_value;
        assert!((v - reference).abs() <= 1e-7, "{which:?}: {v} vs {reference}");
    }
}

#[test]
fn perfect_fidelity_recovers_commuting_value() {
    for t in [FRAC_PI_4 / 4.0, FRAC_PI_8, 3.0 * FRAC_PI_4 / 4.0] {
        for e in [0.25, 0.5, 0.75, 1.0] {
            let sc = Scenario::new(t, 0.0, e).unwrap();
            let expected = 1.0 - e / (1.0 + t.sin() * t.cos());
            let v = solve_model(&sc, Formulation::Reduced).primal_value;
            assert!((v - expected).abs() <= 1e-6, "{sc:?}: {v} vs {expected}");
        }
    }
}

#[test]
fn intermediate_value_lies_between_bounds() {
    let sc = Scenario::new(FRAC_PI_8, 0.1, 0.9).unwrap();
    // commuting value at this point, evaluated by hand
    let (s, c) = FRAC_PI_8.sin_cos();
    let commuting = 0.9 * (1.0 - 0.9 / (1.0 + s * c));
    assert!((commuting - 0.3015751387).abs() < 1e-9);
    let v = solve_model(&sc, Formulation::Reduced).primal_value;
    assert!(v <= commuting + 1e-8 && v >= 0.09 - 1e-8, "{v}");
}

#[test]
fn extracted_strategy_at_perfect_fidelity_is_the_commuting_optimum() {
    let sc = Scenario::new(FRAC_PI_8, 0.0, 0.5).unwrap();
    let s = sc.sin2();
    let z = 1.0 / (2.0 + s);
    let expected = embed(
        &SymmetrizedStrategy::new(1.0 - z, z, 0.0, s / (2.0 + s)).unwrap(),
        &sc.state(),
    )
    .unwrap();
    for which in [Formulation::Full, Formulation::Reduced] {
        let sol = solve_model(&sc, which);
        let (omega, _) = extract_strategy(&sol, which, &sc).unwrap();
        let diff = omega.operator().max_abs_diff(expected.operator());
        assert!(diff <= 1e-6, "{which:?}: {diff}");
    }
}

#[test]
fn extraction_requires_an_optimal_solution() {
    let sc = Scenario::new(FRAC_PI_8, 0.1, 0.9).unwrap();
    let mut sol = solve_model(&sc, Formulation::Reduced);
    sol.status = sepverify_core::sdp::SdpStatus::MaxIterations;
    assert!(extract_strategy(&sol, Formulation::Reduced, &sc).is_err());
}
