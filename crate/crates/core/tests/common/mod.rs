#![allow(dead_code)]

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use snhopf::reduction::{build_coupling, ByIndex, HarmonicTerm};
use snhopf::{Complex, NormalFormCoefficients, PhaseCouplingSet, SystemParams};
use std::f64::consts::PI;

pub const INDICES: [i32; 11] = [-1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11];

pub fn random_complex(rng: &mut ChaCha8Rng, scale: f64) -> Complex {
    Complex::new(rng.gen_range(-scale..scale), rng.gen_range(-scale..scale))
}

pub fn random_state(rng: &mut ChaCha8Rng, n: usize) -> Vec<Complex> {
    (0..n).map(|_| random_complex(rng, 1.0)).collect()
}

pub fn random_phases(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(-PI..PI)).collect()
}

pub fn random_coeffs(rng: &mut ChaCha8Rng) -> NormalFormCoefficients {
    let mut c = NormalFormCoefficients::uncoupled(Complex::new(
        rng.gen_range(-2.0..-0.2),
        rng.gen_range(-1.0..1.0),
    ));
    for k in INDICES {
        *c.get_mut(k).unwrap() = random_complex(rng, 1.0);
    }
    c
}

pub fn random_params(rng: &mut ChaCha8Rng, n: usize) -> SystemParams {
    SystemParams {
        lambda: rng.gen_range(0.01..0.5),
        omega: rng.gen_range(0.5..2.0),
        epsilon: rng.gen_range(0.0..0.5),
        n_osc: n,
        coeffs: random_coeffs(rng),
    }
}

/// Derived coupling of a random normal form, with a random fifth-order correction.
pub fn random_coupling(rng: &mut ChaCha8Rng, n: usize) -> PhaseCouplingSet {
    let delta = rng.gen_range(-1.0..1.0);
    build_coupling(&random_params(rng, n), delta).unwrap()
}

/// Coupling set with arbitrary `(beta, gamma)`, not necessarily reachable from a
/// normal form.
pub fn synthetic_coupling(rng: &mut ChaCha8Rng, n: usize) -> PhaseCouplingSet {
    let mut beta = ByIndex::default();
    let mut gamma = ByIndex::default();
    for k in INDICES {
        beta.set(k, rng.gen_range(0.0..1.0));
        gamma.set(k, rng.gen_range(-PI..PI));
    }
    let corr = HarmonicTerm::new(rng.gen_range(0.0..0.2), rng.gen_range(-PI..PI), 1);
    PhaseCouplingSet::from_beta_gamma(
        n,
        rng.gen_range(0.01..0.5),
        0.1,
        rng.gen_range(0.05..1.0),
        1.0,
        beta,
        gamma,
        corr,
    )
}

pub fn rel_close(a: Complex, b: Complex, tol: f64) -> bool {
    (a - b).norm() <= tol * a.norm().max(b.norm()).max(1.0)
}
