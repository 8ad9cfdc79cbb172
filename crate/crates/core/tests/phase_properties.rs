use casq_core::constants::{C, FOUR_PI_EPS0};
use casq_core::mirror_phases::{self, MirrorScenario};
use casq_core::quadrature::QuadratureSpec;
use casq_core::sagnac::{self, SpinningParticle};
use casq_core::species::{bundled_species_db, find_species, AtomSpecies};
use casq_core::trajectories::{TimeWindow, Trajectory1D, Trajectory3D};
use nalgebra::{Rotation3, Vector3};
use proptest::prelude::*;

fn rb() -> AtomSpecies {
    find_species(&bundled_species_db(), "Rb87-D2").unwrap().clone()
}

fn spec() -> QuadratureSpec {
    QuadratureSpec::default()
}

fn rel(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        ((a - b) / b).abs()
    }
}

fn two_paths() -> impl Strategy<Value = MirrorScenario> {
    (1e-7f64..5e-7, 0.1f64..0.8, 1e3f64..1e5, 0.0f64..6.0, 1e-7f64..5e-7, -1e-3f64..1e-3).prop_map(
        |(c, frac, w, ph, h2, v2)| {
            let t = 2e-4;
            let win = TimeWindow::bounded(0.0, t).unwrap();
            let v2 = if h2 + v2 * t < 5e-8 { v2.abs() } else { v2 };
            MirrorScenario::new(
                rb(),
                vec![
                    Trajectory1D::harmonic(c, frac * c, w, ph, win).unwrap(),
                    Trajectory1D::linear(h2, v2, win).unwrap(),
                ],
            )
            .unwrap()
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn nonlocal_antisymmetric(scn in two_paths()) {
        let a = mirror_phases::nonlocal_phase(&scn, &spec()).unwrap();
        let b = mirror_phases::nonlocal_phase(&scn.swapped().unwrap(), &spec()).unwrap();
        prop_assert!((a.value + b.value).abs() <= a.error_estimate + b.error_estimate + 1e-15 * a.value.abs());
    }

    #[test]
    fn nonlocal_geometric(scn in two_paths(), lambda in prop::sample::select(vec![0.5, 2.0, 10.0])) {
        let base = mirror_phases::nonlocal_phase(&scn, &spec()).unwrap().value;
        let fast = scn.map_paths(|p| p.reparametrize(lambda)).unwrap();
        prop_assert!(rel(mirror_phases::nonlocal_phase(&fast, &spec()).unwrap().value, base) <= 1e-8);
        let back = scn.map_paths(|p| p.reverse()).unwrap();
        prop_assert!(rel(mirror_phases::nonlocal_phase(&back, &spec()).unwrap().value, -base) <= 1e-8);
    }

    #[test]
    fn quasi_static_dynamical(scn in two_paths(), lambda in prop::sample::select(vec![0.5, 2.0, 10.0])) {
        let fast = scn.map_paths(|p| p.reparametrize(lambda)).unwrap();
        for i in 0..2 {
            let base = mirror_phases::quasi_static_phase(&scn, i, &spec()).unwrap().value;
            let scaled = mirror_phases::quasi_static_phase(&fast, i, &spec()).unwrap().value;
            prop_assert!(rel(scaled, base / lambda) <= 1e-10);
        }
    }

    #[test]
    fn total_is_finite_and_consistent(scn in two_paths()) {
        let t = mirror_phases::total_phase_difference(&scn, &spec()).unwrap();
        prop_assert!(t.value.is_finite());
        let b = &t.breakdown;
        prop_assert_eq!(t.value, mirror_phases::total_from_terms(b["phi1_qs"], b["phi2_qs"], b["phi1_mot"], b["phi2_mot"], b["phi12"]));
    }

    #[test]
    fn motional_small_against_quasi_static(h in 1e-7f64..1e-6, beta in 1e-8f64..1e-4) {
        let v = beta * C;
        let t = 0.2 * h / v;
        let scn = MirrorScenario::new(rb(), vec![Trajectory1D::linear(h, v, TimeWindow::bounded(0.0, t).unwrap()).unwrap()]).unwrap();
        let mot = mirror_phases::motional_phase_mirror(&scn, 0, &spec()).unwrap().value;
        let qs = mirror_phases::quasi_static_phase(&scn, 0, &spec()).unwrap().value;
        prop_assert!((mot / qs).abs() <= 10.0 * beta);
        prop_assert!(mot < 0.0);
    }
}

fn particle(omega: Vector3<f64>) -> SpinningParticle {
    SpinningParticle::new(FOUR_PI_EPS0 * 8e-27, 2e16, 1e13, omega, 2e-9).unwrap()
}

fn sagnac_case() -> impl Strategy<Value = (Trajectory3D, Vector3<f64>)> {
    (
        prop::array::uniform3(-3e-8f64..3e-8),
        prop::array::uniform3(-5.0f64..5.0),
        prop::array::uniform3(-1e5f64..1e5),
    )
        .prop_filter_map("path clear of the particle", |(o, v, w)| {
            let v = Vector3::from(v);
            if v.norm() < 0.1 {
                return None;
            }
            let t = 6e-8 / v.norm();
            let traj = Trajectory3D::straight_line(Vector3::from(o), v, TimeWindow::bounded(-t, t).unwrap()).unwrap();
            (traj.closest_approach() > 4e-9).then_some((traj, Vector3::from(w)))
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn sagnac_linear_in_rotation((traj, w) in sagnac_case()) {
        let s = rb();
        let one = sagnac::sagnac_phase(&s, &particle(w), &traj, &spec()).unwrap();
        let two = sagnac::sagnac_phase(&s, &particle(2.0 * w), &traj, &spec()).unwrap();
        prop_assert!((two.value - 2.0 * one.value).abs() <= 2.0 * one.error_estimate + two.error_estimate + 1e-14 * one.value.abs());
    }

    #[test]
    fn sagnac_geometric((traj, w) in sagnac_case(), lambda in prop::sample::select(vec![0.5, 2.0, 10.0])) {
        let s = rb();
        let p = particle(w);
        let base = sagnac::sagnac_phase(&s, &p, &traj, &spec()).unwrap().value;
        prop_assume!(base.abs() > 1e-300);
        prop_assert!(rel(sagnac::sagnac_phase(&s, &p, &traj.reparametrize(lambda).unwrap(), &spec()).unwrap().value, base) <= 1e-8);
        prop_assert!(rel(sagnac::sagnac_phase(&s, &p, &traj.reverse().unwrap(), &spec()).unwrap().value, -base) <= 1e-8);
    }

    #[test]
    fn sagnac_rotation_covariant((traj, w) in sagnac_case(), axis in prop::array::uniform3(-3.0f64..3.0)) {
        let s = rb();
        let rot = Rotation3::from_scaled_axis(Vector3::from(axis));
        let base = sagnac::sagnac_phase(&s, &particle(w), &traj, &spec()).unwrap().value;
        prop_assume!(base.abs() > 1e-300);
        let turned = sagnac::sagnac_phase(&s, &particle(rot * w), &traj.rotated(&rot), &spec()).unwrap().value;
        prop_assert!(rel(turned, base) <= 1e-8);
    }
}

#[test]
fn sagnac_planar_riemann_sum() {
    // path in the z = 0 plane, Ω tilted out of the plane
    let s = rb();
    let w = Vector3::new(0.6, -0.3, 0.9) * 1e5;
    let p = particle(w);
    let (t0, t1) = (-2e-8, 3e-8);
    let traj = Trajectory3D::straight_line(Vector3::new(1e-9, 7e-9, 0.0), Vector3::new(1.5, 0.4, 0.0), TimeWindow::bounded(t0, t1).unwrap()).unwrap();
    let numeric = sagnac::sagnac_phase(&s, &p, &traj, &spec()).unwrap();
    let prefactor = numeric.breakdown["prefactor"];
    let n = 1_000_000;
    let dt = (t1 - t0) / n as f64;
    let v = traj.velocity(0.0).unwrap();
    let mut sum = 0.0;
    for i in 0..n {
        let r = traj.position(t0 + (i as f64 + 0.5) * dt).unwrap();
        sum += v.dot(&(w.cross(&r) / r.norm_squared().powi(4))) * dt;
    }
    assert!(rel(numeric.value, prefactor * sum) <= 1e-6, "{} vs {}", numeric.value, prefactor * sum);
    // in-plane Ω: Ω×r is along ẑ, orthogonal to dr
    let flat = particle(Vector3::new(1e5, 2e5, 0.0));
    assert!(sagnac::sagnac_phase(&s, &flat, &traj, &spec()).unwrap().value.abs() <= 1e-12 * numeric.value.abs());
}

#[test]
fn sagnac_closed_form_random_tuples() {
    let db = bundled_species_db();
    let mut i = 0;
    for species in &db {
        for &(y, v, omega) in &[(6e-9, 3.0, 1e4), (-9e-9, 250.0, 3e6), (7.5e-9, 0.5, 2e5)] {
            i += 1;
            let p = particle(Vector3::new(0.0, 0.0, omega));
            let traj = Trajectory3D::straight_line(Vector3::new(0.0, y, 0.0), Vector3::new(v, 0.0, 0.0), TimeWindow::improper(true)).unwrap();
            let numeric = sagnac::sagnac_phase(species, &p, &traj, &spec()).unwrap().value;
            let closed = sagnac::sagnac_phase_straightline(species, &p, y).unwrap();
            assert!(rel(-numeric, closed) <= 1e-6, "{i}: {numeric:e} vs {closed:e}");
        }
    }
    assert!(i >= 10);
}

#[test]
fn nonlocal_one_armed_far_path() {
    let win = TimeWindow::bounded(0.0, 1e-4).unwrap();
    let scn = MirrorScenario::new(
        rb(),
        vec![Trajectory1D::linear(1e-7, 1e-3, win).unwrap(), Trajectory1D::constant(1e-2, win).unwrap()],
    )
    .unwrap();
    let t = mirror_phases::total_phase_difference(&scn, &spec()).unwrap();
    let phi1 = t.breakdown["phi1_qs"] + t.breakdown["phi1_mot"];
    assert!(rel(t.value, phi1) <= 1e-10);
}
