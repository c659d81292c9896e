#![allow(dead_code)]

use std::f64::consts::FRAC_PI_4;

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sepverify_core::model::{build_full_sdp, build_reduced_sdp, Formulation, Scenario};
use sepverify_core::qcore::{DensityMatrix, Effect, HermitianOperator, PureState2Q};
use sepverify_core::sdp::{solve, SdpSettings, SdpSolution};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn hermitian(rng: &mut impl Rng, scale: f64) -> HermitianOperator {
    let mut m = vec![Complex64::new(0.0, 0.0); 16];
    for i in 0..4 {
        m[i * 4 + i] = Complex64::new(scale * rng.gen_range(-1.0..1.0), 0.0);
        for j in (i + 1)..4 {
            let v = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) * scale;
            m[i * 4 + j] = v;
            m[j * 4 + i] = v.conj();
        }
    }
    HermitianOperator::new(4, m).unwrap()
}

/// Random effect: a Hermitian matrix with its spectrum clipped to [0, 1].
pub fn effect(rng: &mut impl Rng) -> Effect {
    let h = hermitian(rng, 0.7).add(&HermitianOperator::identity(4).scaled(0.5)).unwrap();
    Effect::clipped(&h)
}

pub fn unit_vector(rng: &mut impl Rng) -> Vec<Complex64> {
    let v: Vec<Complex64> = (0..4)
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    let n = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|c| c / n).collect()
}

/// Random mixed state of rank up to 4.
pub fn density(rng: &mut impl Rng) -> HermitianOperator {
    let weights: Vec<f64> = (0..4).map(|_| rng.gen_range(0.0..1.0)).collect();
    let total: f64 = weights.iter().sum();
    let mut rho = HermitianOperator::zero(4);
    for w in weights {
        let v = unit_vector(rng);
        rho = rho.add(&HermitianOperator::projector(&v).scaled(w / total)).unwrap();
    }
    rho
}

/// Random state with `⟨ψ|σ|ψ⟩ ≤ cap`, obtained by mixing a random state
/// with a random pure state orthogonal to ψ.
pub fn density_with_cap(rng: &mut impl Rng, state: &PureState2Q, cap: f64) -> DensityMatrix {
    let psi = state.state_vector();
    let rho = density(rng);
    let f = rho.expectation(&psi);
    let mut v = unit_vector(rng);
    let along: Complex64 = psi.iter().zip(&v).map(|(p, x)| p.conj() * x).sum();
    for (x, p) in v.iter_mut().zip(&psi) {
        *x -= along * p;
    }
    let n = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    let v: Vec<Complex64> = v.into_iter().map(|c| c / n).collect();
    let p = if f <= cap { 1.0 } else { cap / f } * rng.gen_range(0.0..=1.0f64);
    let sigma = rho.scaled(p).add(&HermitianOperator::projector(&v).scaled(1.0 - p)).unwrap();
    DensityMatrix::new(sigma).unwrap()
}

pub fn theta(rng: &mut impl Rng) -> f64 {
    rng.gen_range(0.0..=FRAC_PI_4)
}

pub fn scenario(rng: &mut impl Rng) -> Scenario {
    Scenario::new(theta(rng), rng.gen_range(0.0..=1.0), rng.gen_range(0.02..=1.0)).unwrap()
}

pub fn solve_model(sc: &Scenario, which: Formulation) -> SdpSolution {
    let problem = match which {
        Formulation::Full => build_full_sdp(sc),
        Formulation::Reduced => build_reduced_sdp(sc),
    };
    let sol = solve(&problem, &SdpSettings::default()).unwrap();
    assert!(sol.is_optimal(), "{sc:?} {which:?}: {:?}", sol.status);
    sol
}

/// Brute-force `ε = 1` value: `min max{|x cos2θ + z sin2θ|, 1−δ−2z}` over
/// the reduced feasible set. For fixed `z` the best `x` is the clamped root
/// of the first term, leaving a one-dimensional scan in `z` refined by
/// repeated zooming.
pub fn eps1_brute(theta: f64, delta: f64) -> f64 {
    let (s, c) = ((2.0 * theta).sin(), (2.0 * theta).cos());
    let xmax = |z: f64| {
        ((1.0 - delta) * (1.0 - delta - 2.0 * z))
            .min(delta * (delta + 2.0 * z))
            .max(0.0)
            .sqrt()
    };
    let g = |z: f64| {
        let xb = xmax(z);
        let x = if c > 0.0 { (-z * s / c).clamp(-xb, xb) } else { 0.0 };
        (x * c + z * s).abs().max(1.0 - delta - 2.0 * z)
    };
    let (mut lo, mut hi) = (-0.5 * delta, 0.5 * (1.0 - delta));
    let mut best = f64::INFINITY;
    let mut arg = lo;
    for round in 0..40 {
        let n = if round == 0 { 200_000 } else { 2000 };
        let h = (hi - lo) / n as f64;
        for k in 0..=n {
            let z = lo + k as f64 * h;
            let v = g(z);
            if v < best {
                best = v;
                arg = z;
            }
        }
        lo = (arg - 2.0 * h).max(-0.5 * delta);
        hi = (arg + 2.0 * h).min(0.5 * (1.0 - delta));
        if hi - lo < 1e-15 {
            break;
        }
    }
    best
}
