mod common;

use common::*;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use snhopf::normal_form::{coupling_field, equivariant_basis, full_rhs, uncoupled_field};
use snhopf::{Complex, NormalFormCoefficients};

/// Term-by-term summation of the basis, one loop per index.
fn basis_oracle(z: &[Complex], k: i32) -> Complex {
    let n = z.len() as f64;
    let w = z[0];
    let mut acc = Complex::new(0.0, 0.0);
    match k {
        -1 => z.iter().for_each(|&a| acc += a / n),
        2 => z.iter().for_each(|&a| acc += w * w * a.conj() / n),
        3 => z.iter().for_each(|&a| acc += w.norm_sqr() * a / n),
        4 => z.iter().for_each(|&a| acc += w * a.norm_sqr() / n),
        6 => z.iter().for_each(|&a| acc += w.conj() * a * a / n),
        8 => z.iter().for_each(|&a| acc += a.norm_sqr() * a / n),
        5 | 7 | 9 | 10 => {
            for &a in z {
                for &b in z {
                    acc += match k {
                        5 => w * a * b.conj(),
                        7 => w.conj() * a * b,
                        9 => a * a * b.conj(),
                        _ => a * b.norm_sqr(),
                    } / (n * n);
                }
            }
        }
        11 => {
            for &a in z {
                for &b in z {
                    for &c in z {
                        acc += a * b * c.conj() / (n * n * n);
                    }
                }
            }
        }
        _ => unreachable!(),
    }
    acc
}

#[test]
fn basis_matches_loop_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for n in 2..=8 {
        for _ in 0..20 {
            let z = random_state(&mut rng, n);
            for k in INDICES {
                let got = equivariant_basis(&z, k).unwrap();
                assert!(
                    rel_close(got, basis_oracle(&z, k), 1e-12),
                    "k = {k}, n = {n}"
                );
            }
        }
    }
}

#[test]
fn coupling_field_matches_loop_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for n in 2..=8 {
        for _ in 0..20 {
            let z = random_state(&mut rng, n);
            let c = random_coeffs(&mut rng);
            let expect: Complex = INDICES
                .iter()
                .map(|&k| c.get(k).unwrap() * basis_oracle(&z, k))
                .sum();
            assert!(rel_close(coupling_field(&z, &c).unwrap(), expect, 1e-12));
        }
    }
}

#[test]
fn uncoupled_examples() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let mut p = random_params(&mut rng, 3);
    p.lambda = 0.1;
    p.omega = 1.0;
    p.coeffs.a1 = Complex::new(-1.0, 0.0);
    assert_eq!(
        uncoupled_field(Complex::new(0.0, 0.0), &p),
        Complex::new(0.0, 0.0)
    );
    let v = uncoupled_field(Complex::new(0.1, 0.0), &p);
    assert!((v - Complex::new(0.009, 0.1)).norm() < 1e-15);
    let r = 0.1f64.sqrt();
    let v = uncoupled_field(Complex::new(r, 0.0), &p);
    assert!((v - Complex::new(0.0, r)).norm() < 1e-15);
}

#[test]
fn limit_cycle_is_tangent_without_coupling() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    let mut p = random_params(&mut rng, 5);
    p.epsilon = 0.0;
    let r = (p.lambda / -p.coeffs.a1.re).sqrt();
    let z: Vec<Complex> = (0..5)
        .map(|_| Complex::from_polar(r, rng.gen_range(0.0..6.0)))
        .collect();
    for (zj, vj) in z.iter().zip(full_rhs(&z, &p).unwrap()) {
        assert!((vj * zj.conj()).re.abs() < 1e-14);
    }
}

#[test]
fn diagonal_is_invariant() {
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    for n in 2..=8 {
        let p = random_params(&mut rng, n);
        let w = random_complex(&mut rng, 1.0);
        let v = full_rhs(&vec![w; n], &p).unwrap();
        assert!(v.iter().all(|x| rel_close(*x, v[0], 1e-14)));
    }
}

#[test]
fn wrong_dimension_is_rejected() {
    let mut rng = ChaCha8Rng::seed_from_u64(16);
    let p = random_params(&mut rng, 4);
    assert!(full_rhs(&random_state(&mut rng, 3), &p).is_err());
    assert!(equivariant_basis(&random_state(&mut rng, 3), 12).is_err());
    let bad = NormalFormCoefficients::uncoupled(Complex::new(0.5, 0.0));
    assert!(bad.validate().is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn permutation_equivariance(seed in any::<u64>(), n in 2usize..=8) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = random_params(&mut rng, n);
        let z = random_state(&mut rng, n);
        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(&mut rng);
        let zp: Vec<Complex> = perm.iter().map(|&i| z[i]).collect();
        let v = full_rhs(&z, &p).unwrap();
        let vp = full_rhs(&zp, &p).unwrap();
        for (j, &i) in perm.iter().enumerate() {
            prop_assert!(rel_close(vp[j], v[i], 1e-12));
        }
    }

    #[test]
    fn rotation_equivariance(seed in any::<u64>(), n in 2usize..=8, theta in -10.0f64..10.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = random_params(&mut rng, n);
        let z = random_state(&mut rng, n);
        let rot = Complex::from_polar(1.0, theta);
        let zr: Vec<Complex> = z.iter().map(|w| w * rot).collect();
        let v = full_rhs(&z, &p).unwrap();
        let vr = full_rhs(&zr, &p).unwrap();
        for (a, b) in v.iter().zip(&vr) {
            prop_assert!(rel_close(a * rot, *b, 1e-12));
        }
    }
}
