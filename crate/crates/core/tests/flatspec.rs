mod common;

use approx::assert_relative_eq;
use common::DEEP;
use num_complex::Complex64;
use proptest::prelude::*;
use stokes_spectra::flatspec::{origin_resonances, COLLISION_TOL};
use stokes_spectra::{find_collisions, flat_eigenvalue, CollisionSearch, DispersionModel, Smoothness};

fn residual_scale(model: &DispersionModel, q1: f64, q2: f64) -> f64 {
    [model.omega(q1).unwrap(), model.omega(q2).unwrap(), 1.0]
        .iter()
        .fold(0.0, |acc: f64, v| acc.max(v.abs()))
}

#[test]
fn flat_eigenvalues() {
    let model = DispersionModel::kawahara(1.0, -0.25);
    assert_eq!(flat_eigenvalue(&model, 1, 0.0).unwrap(), Complex64::new(0.0, 0.0));
    assert_eq!(flat_eigenvalue(&model, -1, 0.0).unwrap().norm(), 0.0);
    let omega_half = 0.125 - 0.25 / 32.0;
    let lambda = flat_eigenvalue(&model, 0, 0.5).unwrap();
    assert_eq!(lambda.re, 0.0);
    assert_relative_eq!(lambda.im.abs(), (omega_half - 0.375f64).abs(), epsilon = 1e-15);
    assert!(flat_eigenvalue(&DispersionModel::akers_milewski(1.0), 0, 0.0).is_err());
}

#[test]
fn collisions_satisfy_their_invariants() {
    for model in common::sample_models() {
        for m in 1..=3 {
            let found = find_collisions(&model, m, &CollisionSearch::default()).unwrap();
            for c in &found {
                assert_eq!(c.k2 - c.k1, m as i64);
                assert_eq!(c.lambda0.re, 0.0);
                assert!(c.p0 > 0.0 && c.p0 < 1.0);
                let gap = flat_eigenvalue(&model, c.k1, c.p0).unwrap() - flat_eigenvalue(&model, c.k2, c.p0).unwrap();
                assert!(gap.norm() < COLLISION_TOL * residual_scale(&model, c.q1(), c.q2()), "{model} {c:?}");
                // The mirror collision lies at 1 - p0 with shifted modes.
                let (k1, k2, p) = c.mirrored();
                assert!(
                    found.iter().any(|d| d.k1 == k1 && d.k2 == k2 && (d.p0 - p).abs() < 1e-9),
                    "{model}: mirror of {c:?} missing"
                );
            }
        }
    }
}

#[test]
fn triad_krein_signature_is_the_sign_of_the_wavenumber_ratio() {
    for model in common::sample_models() {
        for c in find_collisions(&model, 1, &CollisionSearch::default()).unwrap() {
            assert_eq!(c.krein_negative, c.q2() / c.q1() < 0.0, "{model} {c:?}");
        }
    }
}

#[test]
fn reference_collisions_are_found() {
    let cases = [
        (DispersionModel::capillary_whitham(DEEP, 2.5), 1, 0.0608, 0.2681),
        (DispersionModel::akers_milewski(2.0), 1, 0.3536, 0.1464),
        (DispersionModel::kawahara(1.0, -0.25), 2, 0.2277, 0.3675),
        (DispersionModel::capillary_whitham(DEEP, 0.25), 2, 0.2177, 0.1363),
    ];
    for (model, m, im, p0) in cases {
        let found = find_collisions(&model, m, &CollisionSearch::default()).unwrap();
        assert!(
            found.iter().any(|c| (c.p0 - p0).abs() <= 1e-3 && (c.lambda0.im.abs() - im).abs() <= 1e-3),
            "{model}: {found:?}"
        );
    }
}

#[test]
fn modulational_triple_at_the_origin() {
    for model in common::sample_models() {
        let expected = match model.smoothness() {
            Smoothness::Smooth => vec![-1, 0, 1],
            // The mean mode sits on the jump and leaves the kernel.
            Smoothness::DiscontinuousAtZero => vec![-1, 1],
        };
        assert_eq!(origin_resonances(&model, -20, 20).unwrap(), expected, "{model}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn capillary_collisions_come_in_mirror_pairs(sigma in 0.6..3.0f64, m in 1u32..=2) {
        let model = DispersionModel::capillary_whitham(DEEP, sigma);
        let search = CollisionSearch::default();
        let found = find_collisions(&model, m, &search).unwrap();
        let cell = 1.0 / search.grid as f64;
        // Mirrors of collisions within one grid cell of an edge are not resolved.
        for c in found.iter().filter(|c| c.p0.min(1.0 - c.p0) > cell) {
            let (k1, k2, p) = c.mirrored();
            let mirror = found.iter().find(|d| d.k1 == k1 && d.k2 == k2 && (d.p0 - p).abs() < 1e-9);
            prop_assert!(mirror.is_some());
            prop_assert!((c.lambda0.im + mirror.unwrap().lambda0.im).abs() < 1e-9);
        }
    }
}
