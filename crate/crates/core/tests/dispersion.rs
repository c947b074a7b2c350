mod common;

use approx::assert_relative_eq;
use common::DEEP;
use proptest::prelude::*;
use stokes_spectra::dispersion::central_difference;
use stokes_spectra::{DispersionModel, Error, Smoothness};

fn model_strategy() -> impl Strategy<Value = DispersionModel> {
    prop_oneof![
        (-3.0..3.0f64, -1.0..1.0f64).prop_map(|(a, b)| DispersionModel::kawahara(a, b)),
        (0.2..5.0f64).prop_map(DispersionModel::whitham),
        Just(DispersionModel::whitham(DEEP)),
        (0.2..5.0f64, 0.0..3.0f64).prop_map(|(h, s)| DispersionModel::capillary_whitham(h, s)),
        (0.0..3.0f64).prop_map(|s| DispersionModel::capillary_whitham(DEEP, s)),
        (0.1..3.0f64).prop_map(DispersionModel::akers_milewski),
    ]
}

proptest! {
    #[test]
    fn frequency_is_odd(model in model_strategy(), k in 0.1..10.0f64) {
        let sum = model.omega(k).unwrap() + model.omega(-k).unwrap();
        prop_assert!(sum.abs() < 1e-12 * model.omega(k).unwrap().abs().max(1.0), "sum {sum}");
    }

    #[test]
    fn derivatives_match_central_differences(model in model_strategy(), k in 0.3..6.0f64, side in prop::bool::ANY) {
        let k = if side { k } else { -k };
        let slope = central_difference(|x| model.omega(x).unwrap(), k);
        let exact = model.group_velocity(k).unwrap();
        prop_assert!((slope - exact).abs() <= 1e-6 * exact.abs().max(1.0), "{slope} vs {exact}");
        let curvature = central_difference(|x| model.group_velocity(x).unwrap(), k);
        let exact = model.second_derivative(k).unwrap();
        prop_assert!((curvature - exact).abs() <= 1e-6 * exact.abs().max(1.0), "{curvature} vs {exact}");
    }

    #[test]
    fn deep_water_is_the_large_depth_limit(k in 0.5..5.0f64, sigma in 0.0..3.0f64) {
        let finite = DispersionModel::capillary_whitham(1e3, sigma).omega(k).unwrap();
        let deep = DispersionModel::capillary_whitham(DEEP, sigma).omega(k).unwrap();
        prop_assert!((finite - deep).abs() < 1e-8);
        let finite = DispersionModel::whitham(1e3).omega(k).unwrap();
        let deep = DispersionModel::whitham(DEEP).omega(k).unwrap();
        prop_assert!((finite - deep).abs() < 1e-8);
    }

    #[test]
    fn phase_velocity_is_continuous_at_the_origin(h in 0.2..5.0f64, sigma in 0.0..3.0f64) {
        let model = DispersionModel::capillary_whitham(h, sigma);
        let at_zero = model.phase_velocity(0.0).unwrap();
        prop_assert!((at_zero - h.sqrt()).abs() < 1e-12);
        prop_assert!((model.phase_velocity(1e-6).unwrap() - at_zero).abs() < 1e-9);
    }
}

#[test]
fn tabulated_values() {
    let kawahara = DispersionModel::kawahara(1.0, -0.25);
    assert_eq!(kawahara.omega(2.0).unwrap(), 0.0);
    assert_eq!(kawahara.phase_velocity(1.0).unwrap(), 0.75);
    assert_eq!(kawahara.phase_velocity(2.0).unwrap(), 0.0);
    assert_eq!(kawahara.group_velocity(1.0).unwrap(), 1.75);
    assert_relative_eq!(DispersionModel::kawahara(-3.0, 1.0).second_derivative(1.0).unwrap(), 2.0, epsilon = 1e-12);

    let am = DispersionModel::akers_milewski(1.0);
    assert_eq!(am.omega(-2.0).unwrap(), -9.0);
    assert_eq!(am.group_velocity(1.0).unwrap(), 4.0);
    assert_eq!(am.group_velocity(1.0).unwrap() - am.omega(1.0).unwrap(), 0.0);

    let whitham = DispersionModel::whitham(2.0);
    assert_eq!(whitham.omega(0.0).unwrap(), 0.0);
    assert!(whitham.omega(1e-12).unwrap().abs() < 1e-11);
    assert_relative_eq!(whitham.phase_velocity(0.0).unwrap(), 2f64.sqrt(), epsilon = 1e-15);
}

#[test]
fn discontinuous_symbol_rejects_the_origin() {
    let am = DispersionModel::akers_milewski(1.0);
    assert_eq!(am.smoothness(), Smoothness::DiscontinuousAtZero);
    assert!(matches!(am.omega(0.0), Err(Error::JumpDiscontinuity { .. })));
    assert!(matches!(am.phase_velocity(0.0), Err(Error::JumpDiscontinuity { .. })));
    assert!(am.group_velocity(0.0).is_err());
    assert_eq!(DispersionModel::whitham(2.0).smoothness(), Smoothness::Smooth);
}

#[test]
fn model_strings_round_trip() {
    for text in ["kawahara:a=1,b=-0.25", "whitham:h=inf,sigma=2.5", "whitham:h=2", "akersmilewski:sigma=1"] {
        let model: DispersionModel = text.parse().unwrap();
        let again: DispersionModel = model.to_string().parse().unwrap();
        assert_eq!(model, again);
    }
    for bad in ["", "kawahara:a=1", "boussinesq:h=1", "whitham:h=-1", "kawahara:a=x,b=1"] {
        let err = bad.parse::<DispersionModel>().unwrap_err();
        assert!(err.is_config(), "{bad}: {err}");
    }
}
