mod common;

use common::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use snhopf::cluster::{
    ab_coefficients, find_roots, g_factored, sync_stability, two_cluster_h, ClusterConfig,
    SyncStability,
};
use snhopf::integrator::integrate_phase;
use snhopf::phase_model::phase_rhs_naive;
use std::f64::consts::{PI, TAU};

#[test]
fn restriction_with_derived_coupling() {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    for n in 2..=12usize {
        for qn in 1..n {
            let c = random_coupling(&mut rng, n);
            let cfg = ClusterConfig::from_counts(qn, n - qn).unwrap();
            let (a, b) = (rng.gen_range(0.0..TAU), rng.gen_range(0.0..TAU));
            let phi: Vec<f64> = (0..n).map(|j| if j < qn { a } else { b }).collect();
            let r = phase_rhs_naive(&phi, &c).unwrap();
            let (h1, h2) = two_cluster_h(a, b, &cfg, &c);
            assert!((r[0] - r[n - 1] - c.epsilon * (h1 - h2)).abs() < 1e-12);
            assert!((r[0] - c.omega_cap - c.epsilon * h1).abs() < 1e-12);
        }
    }
}

#[test]
fn predicted_cluster_roots_are_equilibria_of_the_network() {
    // every root of G is a relative equilibrium: the two clusters rotate rigidly
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let mut checked = 0;
    while checked < 20 {
        let (qn, pn) = (rng.gen_range(1..6), rng.gen_range(1..6));
        let n = qn + pn;
        let c = random_coupling(&mut rng, n);
        let cfg = ClusterConfig::from_counts(qn, pn).unwrap();
        for root in find_roots(&cfg, &c, 720).unwrap().roots() {
            let phi: Vec<f64> = (0..n)
                .map(|j| if j < qn { root.psi } else { 0.0 })
                .collect();
            let r = phase_rhs_naive(&phi, &c).unwrap();
            assert!((r[0] - r[n - 1]).abs() < 1e-9, "{root:?}");
            checked += 1;
        }
    }
}

#[test]
fn sync_stability_predicts_phase_dynamics() {
    let mut rng = ChaCha8Rng::seed_from_u64(43);
    let mut seen = [false; 2];
    for _ in 0..40 {
        let (qn, pn) = (2, 1);
        let c = random_coupling(&mut rng, 3).with_epsilon(0.1);
        let cfg = ClusterConfig::from_counts(qn, pn).unwrap();
        let cc = ab_coefficients(&cfg, &c);
        let slope = cc.a1_coef + cc.a2_coef;
        if slope.abs() < 0.05 {
            continue;
        }
        // small cluster separation evolves as Psi' ~ eps (A1 + A2) Psi
        let psi0 = 1e-4;
        let t_end = 0.5 / (c.epsilon * slope.abs());
        let traj = integrate_phase(&c, &[psi0, psi0, 0.0], 0.01, t_end, 1000).unwrap();
        let (_, last) = traj.last().unwrap();
        let psi = last[0] - last[2];
        match sync_stability(&cc) {
            SyncStability::Stable => {
                assert!(psi.abs() < psi0);
                seen[0] = true;
            }
            SyncStability::Unstable => {
                assert!(psi.abs() > psi0);
                seen[1] = true;
            }
            SyncStability::Degenerate => unreachable!(),
        }
        let predicted = psi0 * (c.epsilon * slope * t_end).exp();
        assert!(
            (psi - predicted).abs() < 1e-2 * predicted.abs(),
            "{psi} vs {predicted}"
        );
        assert!((g_factored(psi0, &cc) / psi0 - slope).abs() < 1e-3 * slope.abs().max(1.0));
    }
    assert!(seen[0] && seen[1]);
}

#[test]
fn equal_clusters_have_antiphase_root() {
    let mut rng = ChaCha8Rng::seed_from_u64(44);
    for _ in 0..50 {
        let c = random_coupling(&mut rng, 4);
        let cfg = ClusterConfig::from_counts(2, 2).unwrap();
        let roots = find_roots(&cfg, &c, 360).unwrap();
        assert!(roots.roots().iter().any(|r| (r.psi - PI).abs() < 1e-10));
    }
}
