use casq_core::quadrature::{integrate_adaptive, integrate_improper, integrate_iterated, Limits, QuadratureSpec};
use proptest::prelude::*;
use std::f64::consts::PI;

fn spec() -> QuadratureSpec {
    QuadratureSpec::default()
}

fn smooth(c: [f64; 3]) -> impl Fn(f64) -> f64 {
    move |x| c[0] * (c[1] * x).sin() + c[2] * (-x * x).exp()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn linearity(alpha in -5.0f64..5.0, beta in -5.0f64..5.0,
                 c in prop::array::uniform3(-3.0f64..3.0), d in prop::array::uniform3(-3.0f64..3.0),
                 a in -2.0f64..0.0, b in 0.1f64..3.0) {
        let (f, g) = (smooth(c), smooth(d));
        let lhs = integrate_adaptive(|x| alpha * f(x) + beta * g(x), a, b, &spec()).unwrap();
        let rf = integrate_adaptive(&f, a, b, &spec()).unwrap();
        let rg = integrate_adaptive(&g, a, b, &spec()).unwrap();
        let rhs = alpha * rf.value + beta * rg.value;
        let budget = lhs.error_estimate + alpha.abs() * rf.error_estimate + beta.abs() * rg.error_estimate;
        prop_assert!((lhs.value - rhs).abs() <= budget + 1e-14 * (lhs.value.abs() + 1.0));
    }

    #[test]
    fn interval_additivity(c in prop::array::uniform3(-3.0f64..3.0), a in -3.0f64..-0.5, b in 0.5f64..3.0, s in 0.01f64..0.99) {
        let f = smooth(c);
        let m = a + s * (b - a);
        let whole = integrate_adaptive(&f, a, b, &spec()).unwrap();
        let left = integrate_adaptive(&f, a, m, &spec()).unwrap();
        let right = integrate_adaptive(&f, m, b, &spec()).unwrap();
        let budget = whole.error_estimate + left.error_estimate + right.error_estimate;
        prop_assert!((whole.value - left.value - right.value).abs() <= budget + 1e-14);
    }

    #[test]
    fn determinism(c in prop::array::uniform3(-3.0f64..3.0), a in -3.0f64..0.0, b in 0.0f64..3.0) {
        let f = smooth(c);
        let r1 = integrate_adaptive(&f, a, b, &spec()).unwrap();
        let r2 = integrate_adaptive(&f, a, b, &spec()).unwrap();
        prop_assert_eq!(r1.value.to_bits(), r2.value.to_bits());
        prop_assert_eq!(r1.error_estimate.to_bits(), r2.error_estimate.to_bits());
    }

    #[test]
    fn reduction_formula(n in 1i32..7) {
        // ∫(1+u²)^{-n} du = π C(2n-2, n-1) / 4^{n-1}
        let r = integrate_improper(|u| (1.0 + u * u).powi(-n), &spec()).unwrap();
        let mut binom = 1.0;
        for k in 0..(n - 1) {
            binom = binom * f64::from(2 * n - 2 - k) / f64::from(k + 1);
        }
        let exact = PI * binom / 4f64.powi(n - 1);
        prop_assert!((r.value - exact).abs() <= 1e-10);
    }

    #[test]
    fn converged_results_meet_tolerance(c in prop::array::uniform3(-3.0f64..3.0), rel in 1e-12f64..1e-4) {
        let s = QuadratureSpec::default().with_rel_tol(rel);
        let r = integrate_adaptive(smooth(c), -1.0, 2.0, &s).unwrap();
        prop_assert!(r.error_estimate >= 0.0);
        if r.converged {
            prop_assert!(r.error_estimate <= r.tolerance);
        }
    }
}

#[test]
fn solid_angle() {
    let r = integrate_iterated(
        |x| x[0].sin(),
        &[Limits::Fixed(0.0, PI), Limits::Fixed(0.0, 2.0 * PI)],
        &spec(),
    )
    .unwrap();
    assert!((r.value - 4.0 * PI).abs() < 1e-9);
}

#[test]
fn triangle_area() {
    let r = integrate_iterated(|_| 1.0, &[Limits::Fixed(0.0, 1.0), Limits::dependent(|o| (0.0, o[0]))], &spec()).unwrap();
    assert!((r.value - 0.5).abs() < 1e-14);
}
