use core::f64::consts::{FRAC_1_SQRT_2, PI, TAU};

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::spin_algebra::{build_spin_operators, dot_operator};

fn random_angles(rng: &mut ChaCha8Rng) -> DirectionAngles {
    // uniform on the sphere
    let z: f64 = rng.random_range(-1.0..=1.0);
    DirectionAngles::new(z.acos(), rng.random_range(0.0..TAU)).unwrap()
}

fn random_state(rng: &mut ChaCha8Rng, dim: usize) -> Vec<Complex64> {
    let v: Vec<Complex64> = (0..dim)
        .map(|_| c64(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    let n = vec_norm(&v);
    v.into_iter().map(|z| z / n).collect()
}

#[test]
fn angles_validate_ranges() {
    assert!(DirectionAngles::new(-0.1, 0.0).is_err());
    assert!(DirectionAngles::new(PI + 1e-9, 0.0).is_err());
    assert!(DirectionAngles::new(1.0, TAU).is_err());
    assert!(DirectionAngles::new(PI, 0.0).is_ok());
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for _ in 0..100 {
        let a = random_angles(&mut rng);
        assert!((a.unit_vector().norm() - 1.0).abs() <= 1e-15);
        let back = DirectionAngles::from_vector(&a.unit_vector()).unwrap();
        assert!((back.unit_vector() - a.unit_vector()).max_abs() < 1e-14);
    }
}

#[test]
fn ket_at_north_pole_is_top_state() {
    for twice_s in 0..=8 {
        let ket = ket_from_angles(SpinLabel::new(twice_s), DirectionAngles::new(0.0, 1.3).unwrap());
        assert_eq!(ket.amplitudes()[0], c64(1.0, 0.0));
        assert!(ket.amplitudes()[1..].iter().all(|z| z.norm() == 0.0));
    }
}

#[test]
fn spin_half_ket_formula() {
    let (theta, phi) = (1.1, 4.0);
    let ket = ket_from_angles(SpinLabel::HALF, DirectionAngles::new(theta, phi).unwrap());
    let a = ket.amplitudes();
    assert!((a[0] - c64((theta / 2.0).cos(), 0.0)).norm() < 1e-16);
    assert!((a[1] - Complex64::from_polar((theta / 2.0).sin(), phi)).norm() < 1e-16);
}

#[test]
fn spin_one_equator_ket() {
    let ket = ket_from_angles(SpinLabel::ONE, DirectionAngles::new(PI / 2.0, 0.0).unwrap());
    let want = [0.5, FRAC_1_SQRT_2, 0.5];
    for (a, w) in ket.amplitudes().iter().zip(want) {
        assert!((a - c64(w, 0.0)).norm() < 1e-15);
    }
    assert!((vec_norm(ket.amplitudes()) - 1.0).abs() < 1e-15);
    let ops = build_spin_operators(SpinLabel::ONE);
    let (eig, raise) = highest_weight_residuals(&ket, &ops).unwrap();
    assert!(eig <= 1e-12 && raise <= 1e-12);
}

#[test]
fn kets_are_normalized_and_highest_weight() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for twice_s in 1..=12 {
        let ops = build_spin_operators(SpinLabel::new(twice_s));
        for _ in 0..20 {
            let ket = ket_from_angles(ops.label(), random_angles(&mut rng));
            assert!((vec_norm(ket.amplitudes()) - 1.0).abs() <= 1e-13);
            let (eig, raise) = highest_weight_residuals(&ket, &ops).unwrap();
            assert!(eig <= 1e-11 && raise <= 1e-11, "2s={twice_s}: {eig:e} {raise:e}");
        }
    }
}

#[test]
fn highest_weight_examples() {
    let ops = build_spin_operators(SpinLabel::new(5));
    let top = ket_from_angles(ops.label(), DirectionAngles::new(0.0, 0.0).unwrap());
    let (a, b) = highest_weight_residuals(&top, &ops).unwrap();
    assert!(a <= 1e-13 && b <= 1e-13);
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..50 {
        let ket = ket_from_angles(ops.label(), random_angles(&mut rng));
        let (a, b) = highest_weight_residuals(&ket, &ops).unwrap();
        assert!(a <= 1e-11 && b <= 1e-11);
    }
    let wrong = build_spin_operators(SpinLabel::HALF);
    assert!(highest_weight_residuals(&top, &wrong).is_err());
}

#[test]
fn outer_projector_examples() {
    let north = ket_from_angles(SpinLabel::HALF, DirectionAngles::new(0.0, 0.0).unwrap());
    let rho = projector_outer(&north);
    assert_eq!(rho.matrix(), &ComplexMatrix::diagonal(&[c64(1.0, 0.0), c64(0.0, 0.0)]));

    let eq = ket_from_angles(SpinLabel::HALF, DirectionAngles::new(PI / 2.0, 0.0).unwrap());
    let rho = projector_outer(&eq);
    assert!(rho.matrix().as_slice().iter().all(|z| (z - c64(0.5, 0.0)).norm() < 1e-15));

    let ket = ket_from_angles(SpinLabel::ONE, DirectionAngles::new(PI / 2.0, 0.0).unwrap());
    let rho = projector_outer(&ket);
    let want = [0.25, FRAC_1_SQRT_2 / 2.0, 0.25, FRAC_1_SQRT_2 / 2.0, 0.5, FRAC_1_SQRT_2 / 2.0, 0.25, FRAC_1_SQRT_2 / 2.0, 0.25];
    for (a, w) in rho.matrix().as_slice().iter().zip(want) {
        assert!((a - c64(w, 0.0)).norm() < 1e-15);
    }
    assert!((rho.trace() - c64(1.0, 0.0)).norm() < 1e-15);
    assert!(rho.idempotency_residual() < 1e-15);
    rho.validate().unwrap();
}

#[test]
fn polynomial_projector_spin_half_closed_form() {
    let ops = build_spin_operators(SpinLabel::HALF);
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..50 {
        let n = random_angles(&mut rng).unit_vector();
        let rho = projector_polynomial(&ops, &n).unwrap();
        let mut want = dot_operator(&n, &ops);
        want[(0, 0)] += c64(0.5, 0.0);
        want[(1, 1)] += c64(0.5, 0.0);
        assert!(rho.matrix().max_abs_diff(&want).unwrap() <= 1e-14);
    }
}

#[test]
fn polynomial_projector_spin_one_along_z() {
    let ops = build_spin_operators(SpinLabel::ONE);
    let rho = projector_polynomial(&ops, &Vec3::Z).unwrap();
    assert_eq!(rho.matrix(), &ComplexMatrix::diagonal(&[c64(1.0, 0.0), c64(0.0, 0.0), c64(0.0, 0.0)]));
}

#[test]
fn polynomial_projector_rejects_non_unit() {
    let ops = build_spin_operators(SpinLabel::ONE);
    assert!(matches!(
        projector_polynomial(&ops, &Vec3::new(0.5, 0.0, 0.0)),
        Err(Error::NotUnitVector { .. })
    ));
}

#[test]
fn projector_forms_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for twice_s in 1..=12 {
        let ops = build_spin_operators(SpinLabel::new(twice_s));
        for _ in 0..200 {
            let angles = random_angles(&mut rng);
            let poly = projector_polynomial(&ops, &angles.unit_vector()).unwrap();
            let outer = projector_outer(&ket_from_angles(ops.label(), angles));
            assert!(poly.matrix().max_abs_diff(outer.matrix()).unwrap() <= 1e-10);
            assert!(poly.idempotency_residual() <= 1e-11);
            assert!((poly.trace() - c64(1.0, 0.0)).norm() <= 1e-12);
        }
    }
}

#[test]
fn projector_annihilates_lower_weights() {
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    for twice_s in 1..=12 {
        let ops = build_spin_operators(SpinLabel::new(twice_s));
        let n = random_angles(&mut rng).unit_vector();
        let rho = projector_polynomial(&ops, &n).unwrap();
        let e = eigh(&ops.projection(&n)).unwrap();
        // ascending: the last eigenvalue is m = s
        for k in 0..twice_s as usize {
            let v = e.vector(k);
            assert!(vec_norm(&rho.matrix().mat_vec(&v).unwrap()) <= 1e-10);
        }
        let top = e.vector(twice_s as usize);
        let kept = rho.matrix().mat_vec(&top).unwrap();
        let diff: Vec<Complex64> = kept.iter().zip(&top).map(|(a, b)| a - b).collect();
        assert!(vec_norm(&diff) <= 1e-10);
    }
}

#[test]
fn coefficients_small_spins() {
    let half = polynomial_coefficients(SpinLabel::HALF);
    let r = |n: i64, d: i64| BigRational::new(BigInt::from(n), BigInt::from(d));
    assert_eq!(half.exact(), [r(1, 2), r(1, 1)]);
    assert_eq!(half.coefficients(), [0.5, 1.0]);

    let one = polynomial_coefficients(SpinLabel::ONE);
    assert_eq!(one.exact(), [r(0, 1), r(1, 2), r(1, 2)]);
    for (x, want) in [(1.0, 1.0), (0.0, 0.0), (-1.0, 0.0)] {
        assert_eq!(one.evaluate_scalar(x), want);
    }
}

#[test]
fn coefficients_interpolate_the_indicator() {
    for twice_s in 0..=24 {
        let label = SpinLabel::new(twice_s);
        let poly = polynomial_coefficients(label);
        assert_eq!(poly.degree(), twice_s as usize);
        // Exactly: p(s) = 1 and p(m) = 0 for the other weights.
        for i in 0..label.dim() {
            let m = BigRational::new(BigInt::from(twice_s as i64 - 2 * i as i64), BigInt::from(2));
            let value = poly.exact().iter().rev().fold(BigRational::zero(), |acc, a| acc * &m + a);
            let want = if i == 0 { BigRational::one() } else { BigRational::zero() };
            assert_eq!(value, want, "2s={twice_s}, i={i}");
        }
    }
}

#[test]
fn coefficients_match_float_product() {
    let mut rng = ChaCha8Rng::seed_from_u64(16);
    for twice_s in 1..=12 {
        let label = SpinLabel::new(twice_s);
        let s = label.s();
        let poly = polynomial_coefficients(label);
        for _ in 0..50 {
            let x: f64 = rng.random_range(-s..=s);
            let product: f64 = (0..twice_s).map(|t| {
                let mp = -s + t as f64;
                (x - mp) / (s - mp)
            }).product();
            assert!((poly.evaluate_scalar(x) - product).abs() <= 1e-12, "2s={twice_s} x={x}");
        }
    }
}

#[test]
fn coefficient_polynomial_reproduces_projector() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for twice_s in 1..=12 {
        let ops = build_spin_operators(SpinLabel::new(twice_s));
        let poly = polynomial_coefficients(ops.label());
        for _ in 0..10 {
            let angles = random_angles(&mut rng);
            let via_sum = poly.evaluate(&ops.projection(&angles.unit_vector()));
            let outer = projector_outer(&ket_from_angles(ops.label(), angles));
            assert!(via_sum.max_abs_diff(outer.matrix()).unwrap() <= 1e-10);
        }
    }
}

fn bloch_vector(a: Complex64, b: Complex64) -> Vec3 {
    // Tr(rho sigma) for rho = |psi><psi|, psi = (a, b), computed entrywise.
    let ab = a.conj() * b;
    Vec3::new(2.0 * ab.re, 2.0 * ab.im, a.norm_sqr() - b.norm_sqr())
}

#[test]
fn constellation_of_coherent_states_is_one_point() {
    let mut rng = ChaCha8Rng::seed_from_u64(18);
    for twice_s in 1..=8 {
        let label = SpinLabel::new(twice_s);
        for _ in 0..25 {
            let angles = random_angles(&mut rng);
            let ket = ket_from_angles(label, angles);
            let stars = majorana_constellation(ket.amplitudes(), label).unwrap();
            assert_eq!(stars.len(), twice_s as usize);
            for star in stars.stars() {
                assert!((star.norm() - 1.0).abs() <= 1e-10);
                let off = star.angle_to(&angles.unit_vector());
                assert!(off <= 1e-6, "2s={twice_s}: star {off:e} rad from n");
            }
            assert!(stars.spread() <= 1e-6);
        }
    }
}

#[test]
fn constellation_at_the_poles() {
    for twice_s in 1..=6 {
        let label = SpinLabel::new(twice_s);
        for (theta, want) in [(0.0, Vec3::Z), (PI, -Vec3::Z)] {
            let ket = ket_from_angles(label, DirectionAngles::new(theta, 0.7).unwrap());
            let stars = majorana_constellation(ket.amplitudes(), label).unwrap();
            assert!(stars.stars().iter().all(|s| s.angle_to(&want) < 1e-12));
        }
    }
}

#[test]
fn spin_one_m_zero_has_antipodal_stars() {
    let zero = [c64(0.0, 0.0), c64(1.0, 0.0), c64(0.0, 0.0)];
    let stars = majorana_constellation(&zero, SpinLabel::ONE).unwrap();
    assert_eq!(stars.len(), 2);
    assert!((stars.stars()[0] + stars.stars()[1]).max_abs() <= 1e-10);
    assert_eq!(coherent_fit(&zero, SpinLabel::ONE, DEFAULT_FIT_TOLERANCE).unwrap(), None);
}

#[test]
fn spin_half_star_is_bloch_vector() {
    let mut rng = ChaCha8Rng::seed_from_u64(19);
    for _ in 0..200 {
        let psi = random_state(&mut rng, 2);
        let stars = majorana_constellation(&psi, SpinLabel::HALF).unwrap();
        let bloch = bloch_vector(psi[0], psi[1]);
        assert!((stars.stars()[0] - bloch).max_abs() <= 1e-9);
    }
}

#[test]
fn every_spin_half_state_is_coherent() {
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    for _ in 0..500 {
        let psi = random_state(&mut rng, 2);
        let angles = coherent_fit(&psi, SpinLabel::HALF, 1e-10).unwrap().expect("coherent");
        let ket = ket_from_angles(SpinLabel::HALF, angles);
        let overlap: Complex64 = ket.amplitudes().iter().zip(&psi).map(|(a, b)| a.conj() * b).sum();
        assert!(overlap.norm() >= 1.0 - 1e-10);
    }
}

#[test]
fn fit_recovers_angles_through_global_phase() {
    let label = SpinLabel::ONE;
    let ket = ket_from_angles(label, DirectionAngles::new(1.1, 2.2).unwrap());
    let phase = Complex64::from_polar(1.0, 0.7);
    let shifted: Vec<Complex64> = ket.amplitudes().iter().map(|a| a * phase).collect();
    let fit = coherent_fit(&shifted, label, DEFAULT_FIT_TOLERANCE).unwrap().unwrap();
    assert!((fit.theta() - 1.1).abs() <= 1e-9);
    assert!((fit.phi() - 2.2).abs() <= 1e-9);
}

#[test]
fn fit_rejects_generic_higher_spin_states() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for twice_s in 2..=8 {
        let psi = random_state(&mut rng, twice_s as usize + 1);
        assert_eq!(coherent_fit(&psi, SpinLabel::new(twice_s), DEFAULT_FIT_TOLERANCE).unwrap(), None);
    }
}

#[test]
fn constellation_is_phase_invariant() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    for twice_s in 1..=8 {
        let label = SpinLabel::new(twice_s);
        let states = [
            random_state(&mut rng, label.dim()),
            ket_from_angles(label, random_angles(&mut rng)).amplitudes().to_vec(),
        ];
        for psi in states {
            let phase = Complex64::from_polar(1.0, rng.random_range(0.0..TAU));
            let rotated: Vec<Complex64> = psi.iter().map(|a| a * phase).collect();
            let a = majorana_constellation(&psi, label).unwrap();
            let b = majorana_constellation(&rotated, label).unwrap();
            // match as multisets
            let mut used = alloc::vec![false; b.len()];
            for sa in a.stars() {
                let (j, d) = b
                    .stars()
                    .iter()
                    .enumerate()
                    .filter(|(j, _)| !used[*j])
                    .map(|(j, sb)| (j, (*sa - *sb).max_abs()))
                    .min_by(|x, y| x.1.total_cmp(&y.1))
                    .unwrap();
                used[j] = true;
                assert!(d <= 1e-10, "2s={twice_s}: {d:e}");
            }
        }
    }
}

#[test]
fn constellation_errors() {
    assert_eq!(majorana_constellation(&[c64(0.0, 0.0); 3], SpinLabel::ONE), Err(Error::ZeroVector));
    assert!(matches!(
        majorana_constellation(&[c64(1.0, 0.0); 2], SpinLabel::ONE),
        Err(Error::DimensionMismatch { .. })
    ));
}

#[test]
fn density_validation() {
    let label = SpinLabel::HALF;
    assert!(DensityMatrix::new(ComplexMatrix::identity(2), label).is_err());
    let neg = ComplexMatrix::diagonal(&[c64(1.5, 0.0), c64(-0.5, 0.0)]);
    assert!(DensityMatrix::new(neg, label).is_err());
    let skew = ComplexMatrix::from_row_major(alloc::vec![c64(0.5, 0.0), c64(0.1, 0.0), c64(0.0, 0.0), c64(0.5, 0.0)]).unwrap();
    assert!(DensityMatrix::new(skew, label).is_err());
    DensityMatrix::maximally_mixed(SpinLabel::new(4)).validate().unwrap();
}
