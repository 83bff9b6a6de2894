mod common;

use common::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use snhopf::integrator::{
    compare, default_step, extract_phases, integrate, integrate_final, integrate_full,
    integrate_phase, step_halving_error, torus_state,
};
use snhopf::normal_form::full_rhs_into;
use snhopf::reduction::build_coupling;
use snhopf::{wrap_to_pi, Complex, NormalFormCoefficients, SystemParams};

fn single(lambda: f64, omega: f64, a1: Complex) -> SystemParams {
    SystemParams {
        lambda,
        omega,
        epsilon: 0.0,
        n_osc: 2,
        coeffs: NormalFormCoefficients::uncoupled(a1),
    }
}

/// `u = r^2` solves the logistic equation `u' = 2u(lambda + a u)`.
fn radial_exact(lambda: f64, a: f64, r0: f64, t: f64) -> f64 {
    let u0 = r0 * r0;
    let e = (2.0 * lambda * t).exp();
    (lambda * u0 * e / (lambda - a * u0 * (e - 1.0))).sqrt()
}

fn three_oscillator(a2: f64, epsilon: f64, lambda: f64) -> SystemParams {
    SystemParams {
        lambda,
        omega: 1.0,
        epsilon,
        n_osc: 3,
        coeffs: NormalFormCoefficients {
            a1: Complex::new(-1.0, 0.0),
            a2: Complex::new(a2, 0.0),
            ..Default::default()
        },
    }
}

#[test]
fn constant_phase_drift_is_exact() {
    let traj = integrate(
        |_: &[f64], out: &mut [f64]| out.fill(1.7),
        &[0.2, 3.0],
        0.01,
        10.0,
    )
    .unwrap();
    for (t, s) in traj.times.iter().zip(&traj.states) {
        assert!((s[0] - 0.2 - 1.7 * t).abs() < 1e-11);
    }
}

#[test]
fn radius_converges_to_limit_cycle() {
    let p = single(0.1, 1.0, Complex::new(-1.0, 0.0));
    let z0 = [Complex::new(0.01, 0.0), Complex::new(0.01, 0.0)];
    let traj = integrate_full(&p, &z0, 0.01, 200.0, 100).unwrap();
    for (t, z) in traj.times.iter().zip(&traj.states) {
        assert!((z[0].norm() - radial_exact(0.1, -1.0, 0.01, *t)).abs() < 1e-9);
    }
    let (_, z) = traj.last().unwrap();
    assert!((z[0].norm() - 0.1f64.sqrt()).abs() < 1e-6);
}

#[test]
fn rk4_global_order() {
    let p = single(0.5, 1.0, Complex::new(-1.0, 0.7));
    let z0 = [Complex::new(0.05, 0.0); 2];
    let err = |dt: f64| {
        let z = integrate_final(
            |z: &[Complex], o: &mut [Complex]| full_rhs_into(z, &p, o),
            &z0,
            dt,
            20.0,
        )
        .unwrap();
        (z[0].norm() - radial_exact(0.5, -1.0, 0.05, 20.0)).abs()
    };
    let (e1, e2) = (err(0.2), err(0.1));
    assert!(e1 / e2 >= 12.0, "{e1} / {e2}");
}

#[test]
fn step_halving_scales_as_fourth_power() {
    let p = single(0.5, 1.0, Complex::new(-1.0, 0.7));
    let z0 = [Complex::new(0.05, 0.0); 2];
    let f = |z: &[Complex], o: &mut [Complex]| full_rhs_into(z, &p, o);
    let e1 = step_halving_error(f, &z0, 0.2, 20.0).unwrap();
    let e2 = step_halving_error(f, &z0, 0.1, 20.0).unwrap();
    let ratio = e1 / e2;
    assert!((8.0..=32.0).contains(&ratio), "{ratio}");
}

#[test]
fn torus_attracts_small_perturbations() {
    let lambda = 0.1;
    let p = three_oscillator(0.3, lambda * lambda / 2.0, lambda);
    let r = lambda.sqrt();
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let phi = random_phases(&mut rng, 3);
    let on = torus_state(r, &phi);
    let off: Vec<Complex> = on
        .iter()
        .map(|z| z + random_complex(&mut rng, 0.02))
        .collect();
    let dt = default_step(1.0, lambda);
    let a = integrate_full(&p, &on, dt, 200.0, 100).unwrap();
    let b = integrate_full(&p, &off, dt, 200.0, 100).unwrap();
    let (_, za) = a.last().unwrap();
    let (_, zb) = b.last().unwrap();
    for (x, y) in za.iter().zip(zb) {
        assert!((x.norm() - r).abs() < 1e-3);
        assert!((x.norm() - y.norm()).abs() < 1e-4);
    }
}

#[test]
fn uncoupled_models_agree() {
    let mut p = three_oscillator(0.3, 0.0, 0.1);
    p.coeffs.a1 = Complex::new(-1.0, 0.4);
    let c = build_coupling(&p, 0.0).unwrap();
    let phi = [0.1, 2.0, -1.0];
    let z0 = torus_state(c.r_star_sq.sqrt(), &phi);
    let run = |dt: f64| {
        let full = integrate_full(&p, &z0, dt, 500.0, 10).unwrap();
        let ph = integrate_phase(&c, &phi, dt, 500.0, 10).unwrap();
        compare(&full, &ph).unwrap()
    };
    let dt = default_step(c.omega_cap, p.lambda);
    let (coarse, fine) = (run(dt), run(dt / 2.0));
    assert!(coarse.max_phase_dev < 1e-8, "{coarse:?}");
    // the phase model is exact here; what remains is the RK4 rotation error of
    // the full model, which must shrink at fourth order
    let (e1, e2) = (
        (coarse.freq_full - coarse.freq_phase).abs(),
        (fine.freq_full - fine.freq_phase).abs(),
    );
    assert!(e1 < 1e-5 && e1 / e2 >= 12.0, "{e1} {e2}");
}

#[test]
fn small_lambda_truncation_error_is_small() {
    let (lambda, eps) = (0.05, 0.0025);
    let p = three_oscillator(0.3, eps, lambda);
    let c = build_coupling(&p, 0.0).unwrap();
    let phi = [0.3, 1.1, 4.0];
    let z0 = torus_state(c.r_star_sq.sqrt(), &phi);
    let dt = default_step(c.omega_cap, lambda);
    let t_end = 1.0 / (eps * lambda);
    let full = integrate_full(&p, &z0, dt, t_end, 1).unwrap();
    let ph = integrate_phase(&c, &phi, dt, t_end, 1).unwrap();
    let rep = compare(&full, &ph).unwrap();
    assert!(rep.max_phase_dev < 0.1, "{rep:?}");
}

#[test]
fn unwrapped_phases_differ_from_arg_by_whole_turns() {
    let mut rng = ChaCha8Rng::seed_from_u64(32);
    let p = random_params(&mut rng, 4);
    let r = (p.lambda / -p.coeffs.a1.re).sqrt();
    let z0: Vec<Complex> = (0..4)
        .map(|_| Complex::from_polar(r, rng.gen_range(0.0..6.0)))
        .collect();
    let full = integrate_full(&p, &z0, 0.05, 60.0, 1).unwrap();
    let ph = extract_phases(&full).unwrap();
    for (z, phi) in full.states.iter().zip(&ph.states) {
        for (w, x) in z.iter().zip(phi) {
            let turns = (x - w.arg()) / std::f64::consts::TAU;
            assert!((turns - turns.round()).abs() < 1e-9);
            assert!(wrap_to_pi(x - w.arg()).abs() < 1e-9);
        }
    }
}

#[test]
fn deviation_halves_with_eps_at_fixed_horizon() {
    let lambda: f64 = 0.1;
    let coeffs = NormalFormCoefficients {
        a1: Complex::new(-1.0, 1.0),
        a2: Complex::new(-0.3, 0.0),
        ..Default::default()
    };
    let phi = [0.4, 1.9, 3.8];
    let dev = |epsilon: f64| {
        let p = SystemParams {
            lambda,
            omega: 1.0,
            epsilon,
            n_osc: 3,
            coeffs,
        };
        let c = build_coupling(&p, 0.0).unwrap();
        let dt = default_step(c.omega_cap, lambda);
        let t_end = 1.0 / (lambda * lambda);
        let full = integrate_full(&p, &torus_state(c.r_star_sq.sqrt(), &phi), dt, t_end, 1).unwrap();
        let ph = integrate_phase(&c, &phi, dt, t_end, 1).unwrap();
        compare(&full, &ph).unwrap().max_phase_dev
    };
    let ratio = dev(lambda * lambda / 2.0) / dev(lambda * lambda);
    assert!((0.3..=0.8).contains(&ratio), "{ratio}");
}
