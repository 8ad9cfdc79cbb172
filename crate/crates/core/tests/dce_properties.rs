use casq_core::constants::FOUR_PI_EPS0;
use casq_core::dce::{self, OscillationParams, CLOSED_FORM_COEFFICIENT};
use casq_core::quadrature::QuadratureSpec;
use casq_core::selftest::log_log_slope;
use nalgebra::Vector3;
use proptest::prelude::*;
use std::f64::consts::PI;

fn params(a: f64, r_max: f64, omega: f64, dir: Vector3<f64>) -> OscillationParams {
    OscillationParams::new(r_max, omega, FOUR_PI_EPS0 * a * a * a, dir).unwrap()
}

fn spec() -> QuadratureSpec {
    QuadratureSpec::default().with_rel_tol(1e-8)
}

#[test]
fn grid_ratio_constant() {
    for r_max in [2e-8, 1e-7, 5e-7] {
        for f in [1e3, 1e5, 1e7] {
            let p = params(2e-10, r_max, 2.0 * PI * f, Vector3::z());
            let ratio = dce::dce_rate_numeric(&p, &spec()).unwrap().gamma_total / dce::dce_rate_closed(&p);
            assert!((0.95..=1.05).contains(&ratio), "{ratio}");
        }
    }
}

#[test]
fn coefficient_within_five_percent() {
    let r = dce::dce_rate_numeric(&params(1.6e-10, 1e-7, 2.0 * PI * 1e5, Vector3::z()), &spec()).unwrap();
    assert!(((r.coefficient - CLOSED_FORM_COEFFICIENT) / CLOSED_FORM_COEFFICIENT).abs() <= 0.05);
}

#[test]
fn scaling_slopes_by_fit() {
    let omega = 2.0 * PI * 1e5;
    let by_a: Vec<_> = [1e-10, 2e-10, 5e-10, 1e-9]
        .iter()
        .map(|&a| (a, dce::dce_rate_numeric(&params(a, 1e-7, omega, Vector3::z()), &spec()).unwrap().gamma_total))
        .collect();
    assert!((log_log_slope(&by_a) - 6.0).abs() <= 0.01);
    // a/r_max fixed at 1e-3: v_max ∝ r_max
    let by_v: Vec<_> = [1e-7, 2e-7, 5e-7, 1e-6]
        .iter()
        .map(|&r| (omega * r, dce::dce_rate_numeric(&params(1e-3 * r, r, omega, Vector3::z()), &spec()).unwrap().gamma_total))
        .collect();
    assert!((log_log_slope(&by_v) - 8.0).abs() <= 0.01);
}

#[test]
fn spectrum_shape() {
    let r = dce::dce_rate_numeric(&params(1.6e-10, 1e-7, 2.0 * PI * 1e5, Vector3::new(1.0, 2.0, -0.5)), &spec()).unwrap();
    let s: Vec<f64> = r.spectrum.iter().map(|p| p.1).collect();
    let n = s.len();
    assert!(s[0] < 0.05 * s[n / 2] && s[n - 1] < 0.05 * s[n / 2]);
    for i in 0..n / 2 {
        assert!(s[i] < s[i + 1] && s[n - 1 - i] < s[n - 2 - i]);
    }
    for i in 0..n {
        assert!(((s[i] - s[n - 1 - i]) / s[i]).abs() <= 1e-6);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn isotropy(d in prop::array::uniform3(-1.0f64..1.0)) {
        let d = Vector3::from(d);
        prop_assume!(d.norm() > 0.1);
        let p = params(1.6e-10, 1e-7, 2.0 * PI * 1e5, Vector3::z());
        let base = dce::dce_rate_numeric(&p, &spec()).unwrap();
        let turned = dce::dce_rate_numeric(&p.with_direction(d).unwrap(), &spec()).unwrap();
        prop_assert!(((turned.gamma_total - base.gamma_total) / base.gamma_total).abs() <= 1e-6);
    }

    #[test]
    fn closed_form_eighth_power(r in 1e-8f64..1e-6, f in 1e3f64..1e7) {
        // v_max doubled at fixed a, r_max by doubling ω_cm: 2⁸ from v, 2 from ω
        let p = params(1e-10, r, 2.0 * PI * f, Vector3::z());
        let q = params(1e-10, r, 4.0 * PI * f, Vector3::z());
        prop_assert!((dce::dce_rate_closed(&q) / dce::dce_rate_closed(&p) / 512.0 - 1.0).abs() <= 1e-12);
    }
}
