//! Sagnac-type phases of atoms passing a spinning polarizable particle.
//!
//! Sign convention: [`sagnac_phase`] evaluates the line integral as
//! written, so a path `r(t) = (v t, y, 0)` with `v > 0` and `Ω = Ω ẑ`
//! gives `-(15π/16)(ℓ_Ω/y)⁶ sgn(y)`, the negative of
//! [`sagnac_phase_straightline`]. Magnitudes agree.

use nalgebra::Vector3;
use num_complex::Complex64;
use std::f64::consts::PI;

use crate::constants::{C, FOUR_PI_EPS0, HBAR};
use crate::error::{Error, Result};
use crate::phase::PhaseResult;
use crate::quadrature::{line_integral, QuadratureSpec};
use crate::species::{AtomSpecies, POLE_GUARD};
use crate::trajectories::Trajectory3D;

/// Ratio `ω d_min / c` above which the quasi-static response is doubtful.
pub const NEAR_FIELD_LIMIT: f64 = 0.1;

/// Spherical particle with a Lorentz-oscillator polarizability, spinning
/// at constant angular velocity about its centre at the origin.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinningParticle {
    alpha0: f64,
    omega_s: f64,
    gamma: f64,
    omega: Vector3<f64>,
    radius: f64,
}

impl SpinningParticle {
    pub fn new(alpha0: f64, omega_s: f64, gamma: f64, omega: Vector3<f64>, radius: f64) -> Result<Self> {
        let bad = |what: &str| Err(Error::InvalidParameter(what.to_string()));
        if !(alpha0 > 0.0 && alpha0.is_finite()) {
            return bad("particle alpha0 must be positive");
        }
        if !(omega_s > 0.0 && omega_s.is_finite()) {
            return bad("particle resonance must be positive");
        }
        if !(gamma >= 0.0 && gamma.is_finite()) {
            return bad("particle damping must be non-negative");
        }
        if !(radius >= 0.0 && radius.is_finite()) {
            return bad("particle radius must be non-negative");
        }
        if !omega.iter().all(|x| x.is_finite()) {
            return bad("angular velocity must be finite");
        }
        Ok(SpinningParticle {
            alpha0,
            omega_s,
            gamma,
            omega,
            radius,
        })
    }

    pub fn alpha0(&self) -> f64 {
        self.alpha0
    }

    pub fn omega_s(&self) -> f64 {
        self.omega_s
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn angular_velocity(&self) -> Vector3<f64> {
        self.omega
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn with_angular_velocity(mut self, omega: Vector3<f64>) -> Self {
        self.omega = omega;
        self
    }

    fn check_pole(&self, omega: f64) -> Result<()> {
        if self.gamma == 0.0 && (omega.abs() - self.omega_s).abs() < POLE_GUARD * self.omega_s {
            return Err(Error::PoleProximity {
                omega,
                resonance: self.omega_s,
            });
        }
        Ok(())
    }

    /// `ω_S² - ω² - iγω`.
    fn denominator(&self, omega: f64) -> Complex64 {
        Complex64::new(self.omega_s * self.omega_s - omega * omega, -self.gamma * omega)
    }
}

/// `α_S(ω) = α₀ ω_S² / (ω_S² - ω² - iγω)`.
pub fn alpha_s(particle: &SpinningParticle, omega: f64) -> Result<Complex64> {
    particle.check_pole(omega)?;
    let a = particle.alpha0 * particle.omega_s * particle.omega_s;
    Ok(a / particle.denominator(omega))
}

/// `Re d²α_S/dω²`.
pub fn re_alpha_second(particle: &SpinningParticle, omega: f64) -> Result<f64> {
    particle.check_pole(omega)?;
    let a = particle.alpha0 * particle.omega_s * particle.omega_s;
    let d = particle.denominator(omega);
    let d_prime = Complex64::new(-2.0 * omega, -particle.gamma);
    // (A/D)'' = -A D''/D² + 2A D'²/D³ with D'' = -2
    let second = 2.0 * a / (d * d) + 2.0 * a * d_prime * d_prime / (d * d * d);
    Ok(second.re)
}

/// `Σ_e |d_ge|² Re α_S''(ω_eg) / ((4πε₀)² ħ)`, s·m⁶·rad⁻¹.
fn transition_sum(species: &AtomSpecies, particle: &SpinningParticle) -> Result<f64> {
    let mut sum = 0.0;
    for tr in species.transitions() {
        sum += tr.d2 * re_alpha_second(particle, tr.omega_eg)?;
    }
    Ok(sum / (FOUR_PI_EPS0 * FOUR_PI_EPS0 * HBAR))
}

/// `ℓ_Ω = (Σ_e |d_ge|² Re α_S''(ω_eg) |Ω| / ((4πε₀)² ħ))^{1/6}`.
pub fn ell_omega(species: &AtomSpecies, particle: &SpinningParticle) -> Result<f64> {
    let radicand = transition_sum(species, particle)? * particle.omega.norm();
    if radicand < 0.0 {
        return Err(Error::NegativeRadicand { value: radicand });
    }
    Ok(radicand.powf(1.0 / 6.0))
}

/// `φ = Σ_e [3|d_eg|² Re α_S''(ω_eg) / ((4πε₀)² ħ)] ∫ dr·(Ω×r)/r⁸`.
///
/// The particle radius is the collision guard. A warning is attached when
/// the closest approach is not in the near field of the lowest transition.
pub fn sagnac_phase(
    species: &AtomSpecies,
    particle: &SpinningParticle,
    traj: &Trajectory3D,
    spec: &QuadratureSpec,
) -> Result<PhaseResult> {
    let prefactor = 3.0 * transition_sum(species, particle)?;
    let omega = particle.omega;
    let closest = traj.closest_approach();
    let integral = if omega == Vector3::zeros() {
        None
    } else {
        Some(line_integral(
            |r| {
                let r2 = r.norm_squared();
                omega.cross(r) / (r2 * r2 * r2 * r2)
            },
            traj,
            particle.radius,
            spec,
        )?)
    };
    let mut result = match integral {
        Some(ref i) => PhaseResult::from_integral(i, prefactor),
        None => PhaseResult::exact(0.0),
    };
    result = result.with_term("prefactor", prefactor);
    let omega_min = species.lowest_transition();
    let ratio = omega_min * closest / C;
    if ratio > NEAR_FIELD_LIMIT {
        result.warnings.push(format!(
            "closest approach {closest:e} m is outside the near field: omega_eg*d/c = {ratio:.3}"
        ));
    }
    Ok(result)
}

/// `(15π/16)(ℓ_Ω/y)⁶ sgn(y)`.
pub fn sagnac_phase_straightline(species: &AtomSpecies, particle: &SpinningParticle, y: f64) -> Result<f64> {
    if y == 0.0 || !y.is_finite() {
        return Err(Error::ZeroImpactParameter);
    }
    let ell = ell_omega(species, particle)?;
    Ok(15.0 * PI / 16.0 * (ell / y).abs().powi(6) * y.signum())
}

/// Total phase of two straight paths at `y₂ = -y₁`, two-level species:
/// `(21π/16)(ℓ_Ω/y₁)⁶`. Breakdown: `local_difference` `(30π/16)(ℓ/y₁)⁶`,
/// `nonlocal` `-(9π/16)(ℓ/y₁)⁶`, `ratio_total_to_local`.
pub fn sagnac_total_symmetric(
    species: &AtomSpecies,
    particle: &SpinningParticle,
    y1: f64,
) -> Result<PhaseResult> {
    if !species.is_two_level() {
        return Err(Error::NotTwoLevel {
            name: species.name().to_string(),
            transitions: species.transitions().len(),
        });
    }
    if !(y1 > 0.0 && y1.is_finite()) {
        return Err(if y1 == 0.0 {
            Error::ZeroImpactParameter
        } else {
            Error::InvalidParameter(format!("y1 must be positive, got {y1}"))
        });
    }
    let scale = (ell_omega(species, particle)? / y1).powi(6);
    let local = sagnac_phase_straightline(species, particle, y1)?
        - sagnac_phase_straightline(species, particle, -y1)?;
    let total = 21.0 * PI / 16.0 * scale;
    let nonlocal = total - local;
    let ratio = if local != 0.0 { total / local } else { 21.0 / 30.0 };
    Ok(PhaseResult::exact(total)
        .with_term("local_difference", local)
        .with_term("nonlocal", nonlocal)
        .with_term("ratio_total_to_local", ratio))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trajectories::TimeWindow;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn particle(omega: f64) -> SpinningParticle {
        SpinningParticle::new(1e-30, 1e17, 0.0, Vector3::new(0.0, 0.0, omega), 1e-9).unwrap()
    }

    fn atom() -> AtomSpecies {
        AtomSpecies::two_level("a", 2.4e15, 1.3e-57).unwrap()
    }

    #[test]
    fn lorentz_values() {
        let p = particle(1.0);
        assert_eq!(alpha_s(&p, 0.0).unwrap(), Complex64::new(1e-30, 0.0));
        let v = alpha_s(&p, 1e17 / 2f64.sqrt()).unwrap();
        assert_relative_eq!(v.re, 2e-30, max_relative = 1e-14);
        assert_eq!(v.im, 0.0);
        assert!(matches!(alpha_s(&p, 1e17), Err(Error::PoleProximity { .. })));
        let damped = SpinningParticle::new(1e-30, 1e17, 1e15, Vector3::zeros(), 0.0).unwrap();
        assert!(alpha_s(&damped, 1e17).is_ok());
    }

    #[test]
    fn second_derivative_static() {
        let p = particle(1.0);
        assert_relative_eq!(re_alpha_second(&p, 0.0).unwrap(), 2e-30 / 1e34, max_relative = 1e-14);
    }

    #[test]
    fn second_derivative_symbolic_undamped() {
        // d²/dω² [A/(s - ω²)] = 2A/(s-ω²)² + 8Aω²/(s-ω²)³
        let p = particle(1.0);
        let a = 1e-30 * 1e34;
        for &w in &[1e15, 3e16, 5e16, 2e17] {
            let s = 1e34 - w * w;
            let oracle = 2.0 * a / (s * s) + 8.0 * a * w * w / (s * s * s);
            assert_relative_eq!(re_alpha_second(&p, w).unwrap(), oracle, max_relative = 1e-12);
        }
    }

    #[test]
    fn second_derivative_finite_difference() {
        for &gamma in &[0.0, 1e15, 3e16] {
            let p = SpinningParticle::new(1e-30, 1e17, gamma, Vector3::z(), 0.0).unwrap();
            let h = 1e-4 * 1e17;
            for &w in &[1e16, 4e16, 6e16, 1.5e17] {
                let f = |x: f64| alpha_s(&p, x).unwrap().re;
                let fd = (f(w + h) - 2.0 * f(w) + f(w - h)) / (h * h);
                let exact = re_alpha_second(&p, w).unwrap();
                assert_relative_eq!(fd, exact, max_relative = 1e-6);
            }
        }
    }

    #[test]
    fn ell_omega_scaling_and_formula() {
        let s = atom();
        assert_eq!(ell_omega(&s, &particle(0.0)).unwrap(), 0.0);
        let l1 = ell_omega(&s, &particle(10.0)).unwrap();
        let l64 = ell_omega(&s, &particle(640.0)).unwrap();
        assert_relative_eq!(l64 / l1, 2.0, max_relative = 1e-13);
        let direct = (1.3e-57 * 2.0 * 1e-30 * 10.0 / (1e34 * FOUR_PI_EPS0 * FOUR_PI_EPS0 * HBAR)).powf(1.0 / 6.0);
        assert_relative_eq!(l1, direct, max_relative = 1e-3);
        // orientation of Ω does not enter ℓ
        let tilted = particle(10.0).with_angular_velocity(Vector3::new(6.0, 8.0, 0.0));
        assert_relative_eq!(ell_omega(&s, &tilted).unwrap(), l1, max_relative = 1e-14);
    }

    #[test]
    fn negative_radicand_reported() {
        // above resonance the undamped Re α'' is negative
        let s = AtomSpecies::two_level("hi", 5e17, 1e-57).unwrap();
        match ell_omega(&s, &particle(1.0)) {
            Err(Error::NegativeRadicand { value }) => assert!(value < 0.0),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn straightline_closed_form() {
        let s = atom();
        let p = particle(1e3);
        let ell = ell_omega(&s, &p).unwrap();
        assert_relative_eq!(sagnac_phase_straightline(&s, &p, ell).unwrap(), 15.0 * PI / 16.0, max_relative = 1e-12);
        let y = 3.0 * ell;
        let a = sagnac_phase_straightline(&s, &p, y).unwrap();
        assert_eq!(sagnac_phase_straightline(&s, &p, -y).unwrap(), -a);
        assert_relative_eq!(a / sagnac_phase_straightline(&s, &p, 2.0 * y).unwrap(), 64.0, max_relative = 1e-12);
        assert!(matches!(sagnac_phase_straightline(&s, &p, 0.0), Err(Error::ZeroImpactParameter)));
    }

    #[test]
    fn symmetric_total() {
        let s = atom();
        let p = particle(1e3);
        let ell = ell_omega(&s, &p).unwrap();
        let r = sagnac_total_symmetric(&s, &p, ell).unwrap();
        assert_relative_eq!(r.value, 21.0 * PI / 16.0, max_relative = 1e-12);
        assert_relative_eq!(r.breakdown["local_difference"], 30.0 * PI / 16.0, max_relative = 1e-12);
        assert_relative_eq!(r.breakdown["nonlocal"], -9.0 * PI / 16.0, max_relative = 1e-12);
        assert_relative_eq!(r.breakdown["ratio_total_to_local"], 0.7, max_relative = 1e-12);
        let r2 = sagnac_total_symmetric(&s, &p, 2.0 * ell).unwrap();
        assert_relative_eq!(r.value / r2.value, 64.0, max_relative = 1e-12);
        let multi = AtomSpecies::new(
            "m",
            vec![
                crate::species::Transition::new(2e15, 1e-57).unwrap(),
                crate::species::Transition::new(3e15, 1e-57).unwrap(),
            ],
        )
        .unwrap();
        assert!(matches!(sagnac_total_symmetric(&multi, &p, ell), Err(Error::NotTwoLevel { .. })));
    }

    fn passing(y: f64, v: f64) -> Trajectory3D {
        Trajectory3D::straight_line(Vector3::new(0.0, y, 0.0), Vector3::new(v, 0.0, 0.0), TimeWindow::improper(true))
            .unwrap()
    }

    #[test]
    fn straightline_numeric_convention() {
        let s = atom();
        let p = particle(1e3);
        let spec = QuadratureSpec::default();
        for &y in &[2e-8, -5e-8] {
            let numeric = sagnac_phase(&s, &p, &passing(y, 3.0), &spec).unwrap();
            let closed = sagnac_phase_straightline(&s, &p, y).unwrap();
            assert_relative_eq!(numeric.value, -closed, max_relative = 1e-6);
        }
    }

    #[test]
    fn zero_rotation_and_radial_path() {
        let s = atom();
        let spec = QuadratureSpec::default();
        let r = sagnac_phase(&s, &particle(0.0), &passing(1e-8, 1.0), &spec).unwrap();
        assert_eq!(r.value, 0.0);
        let radial = Trajectory3D::straight_line(
            Vector3::new(1e-8, 2e-8, 3e-8),
            Vector3::new(1.0, 2.0, 3.0),
            TimeWindow::bounded(0.0, 1e-7).unwrap(),
        )
        .unwrap();
        let r = sagnac_phase(&s, &particle(1e3), &radial, &spec).unwrap();
        assert!(r.value.abs() < 1e-12 * sagnac_phase_straightline(&s, &particle(1e3), 1e-8).unwrap().abs());
    }

    #[test]
    fn uncertified_and_collision() {
        let s = atom();
        let spec = QuadratureSpec::default();
        let t = Trajectory3D::straight_line(Vector3::new(0.0, 1e-8, 0.0), Vector3::x(), TimeWindow::improper(false))
            .unwrap();
        assert!(sagnac_phase(&s, &particle(1.0), &t, &spec).is_err());
        let close = passing(5e-10, 1.0);
        assert!(matches!(sagnac_phase(&s, &particle(1.0), &close, &spec), Err(Error::CollisionGuard { .. })));
    }

    #[test]
    fn near_field_warning() {
        let s = atom();
        let spec = QuadratureSpec::default();
        assert!(sagnac_phase(&s, &particle(1.0), &passing(1e-8, 1.0), &spec).unwrap().warnings.is_empty());
        assert_eq!(sagnac_phase(&s, &particle(1.0), &passing(1e-6, 1.0), &spec).unwrap().warnings.len(), 1);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn imaginary_part_passive(w in 0.0f64..5e17, gamma in 1e10f64..1e17) {
            let p = SpinningParticle::new(1e-30, 1e17, gamma, Vector3::z(), 0.0).unwrap();
            prop_assert!(alpha_s(&p, w).unwrap().im >= 0.0);
        }

        #[test]
        fn undamped_second_derivative_even(w in 0.0f64..0.9e17) {
            let p = particle(1.0);
            prop_assert_eq!(re_alpha_second(&p, w).unwrap(), re_alpha_second(&p, -w).unwrap());
        }
    }
}
