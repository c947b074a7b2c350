mod common;

use approx::assert_relative_eq;
use common::{log_space, residual_slope, DEEP};
use proptest::prelude::*;
use stokes_spectra::stokes::traveling_wave_residual;
use stokes_spectra::{stokes_expand, stokes_numeric, DispersionModel, Error, WaveSource};

#[test]
fn second_order_coefficients() {
    let wave = stokes_expand(&DispersionModel::kawahara(1.0, -0.25), 0.1, 2).unwrap();
    let WaveSource::Expansion { c_series, cos_coeffs, .. } = &wave.source else {
        panic!("expansion expected");
    };
    assert_eq!(c_series[1], 0.0);
    assert_relative_eq!(c_series[2], 2.0 / 3.0, epsilon = 1e-15);
    assert_relative_eq!(cos_coeffs[1][2], 2.0 / 3.0, epsilon = 1e-15);
    assert_eq!(cos_coeffs[0][1], 1.0);
    assert_eq!(wave.coeffs[0], 0.0);
    assert_relative_eq!(wave.coeffs[1], 0.05, epsilon = 1e-15);
}

#[test]
fn zero_amplitude_is_the_flat_state() {
    for model in common::sample_models() {
        for wave in [stokes_expand(&model, 0.0, 2).unwrap(), stokes_numeric(&model, 0.0, 32).unwrap()] {
            assert!(wave.coeffs.iter().all(|&u| u == 0.0));
            assert_eq!(wave.c, model.c0());
        }
    }
}

#[test]
fn expansion_residual_is_small_near_a_quartic_resonance() {
    let model = DispersionModel::capillary_whitham(DEEP, 0.25);
    let second = stokes_expand(&model, 1e-4, 2).unwrap().residual().unwrap();
    let third = stokes_expand(&model, 1e-4, 3).unwrap().residual().unwrap();
    assert!(second < 2e-11, "{second}");
    assert!(third < 1e-13, "{third}");
}

#[test]
fn resonant_second_harmonic_is_rejected() {
    let model = DispersionModel::capillary_whitham(DEEP, 0.5);
    assert!(matches!(stokes_expand(&model, 1e-3, 2), Err(Error::WiltonResonance { mode: 2, .. })));
}

#[test]
fn galerkin_wave_agrees_with_the_expansion() {
    let model = DispersionModel::kawahara(1.0, -0.25);
    let numeric = stokes_numeric(&model, 1e-3, 32).unwrap();
    let expanded = stokes_expand(&model, 1e-3, 2).unwrap();
    assert!((numeric.c - expanded.c).abs() < 1e-8);
    assert!(numeric.residual().unwrap() < 1e-12);
    assert_eq!(numeric.coeffs[1], 5e-4);
}

#[test]
fn second_harmonic_ratio_of_the_discontinuous_symbol() {
    let model = DispersionModel::akers_milewski(2.0);
    let c2 = 1.0 / (2.0 * (model.c0() - model.phase_velocity(2.0).unwrap()));
    let ratios: Vec<f64> = [1e-2, 1e-3]
        .iter()
        .map(|&eps| {
            let wave = stokes_numeric(&model, eps, 32).unwrap();
            assert!(wave.coeffs.iter().all(|u| u.is_finite()));
            wave.coeffs[2] / (wave.coeffs[1] * wave.coeffs[1])
        })
        .collect();
    assert!((ratios[1] - 2.0 * c2).abs() < (ratios[0] - 2.0 * c2).abs().max(1e-12));
    assert!((ratios[1] - 2.0 * c2).abs() < 1e-5);
}

#[test]
fn residual_scales_with_the_truncation_order() {
    let epsilons = log_space(1e-4, 1e-2, 5);
    for model in common::sample_models() {
        for order in [2, 3] {
            let slope = residual_slope(&model, order, &epsilons);
            assert!((slope - (order + 1) as f64).abs() <= 0.2, "{model} order {order}: {slope}");
        }
    }
}

#[test]
fn residual_of_a_cosine_is_its_linear_defect() {
    // For u = cos x at c = c0 only (cos^2 x)' = -sin 2x remains.
    let model = DispersionModel::kawahara(1.0, -0.25);
    let residual = traveling_wave_residual(&model, &[0.0, 0.5], model.c0()).unwrap();
    assert_relative_eq!(residual, 1.0, epsilon = 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn speed_of_expansion_and_galerkin_wave_differ_at_fourth_order(eps in 1e-4..1e-2f64, sigma in 1.0..3.0f64) {
        let model = DispersionModel::capillary_whitham(DEEP, sigma);
        let numeric = stokes_numeric(&model, eps, 32).unwrap();
        let expanded = stokes_expand(&model, eps, 2).unwrap();
        prop_assert!((numeric.c - expanded.c).abs() < 10.0 * eps.powi(3), "{}", (numeric.c - expanded.c).abs());
    }
}
