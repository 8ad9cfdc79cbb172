//! Photon-pair emission by a polarizable ground-state atom oscillating
//! harmonically in free space.
//!
//! The interaction is `H = -(α/2)[E·E + 2 E·(v×B)]` evaluated on the moving
//! dipole, with `α` frozen at its static value and the `B²` term dropped.
//! To first order in the motion the pair amplitude collects the field
//! displacement `E(r(t)) ≈ E + (r·∇)E` and the `v×B` cross term. Under the
//! rotating-wave approximation only the `e^{iω_cm t}` part of the motion
//! contributes, so the two photons satisfy `ω₁ + ω₂ = ω_cm`.
//!
//! Rates count photons: [`EmissionResult::gamma_total`] is twice the pair
//! rate, and `∫ spectrum dω = gamma_total`.

use nalgebra::{Matrix3, Vector3};
use num_complex::Complex64;
use std::f64::consts::PI;

use crate::constants::{C, EPSILON_0, FOUR_PI_EPS0, HBAR};
use crate::error::{Error, Result};
use crate::quadrature::{try_integrate_adaptive, try_integrate_iterated, Limits, QuadratureSpec};

/// `23 / (5670 π)`.
pub const CLOSED_FORM_COEFFICIENT: f64 = 23.0 / (5670.0 * PI);

/// Relative width of the energy shell accepted by
/// [`pair_emission_amplitude`].
pub const SHELL_TOLERANCE: f64 = 1e-9;

/// Number of spectrum samples returned by [`dce_rate_numeric`].
pub const SPECTRUM_SAMPLES: usize = 33;

#[derive(Debug, Clone, PartialEq)]
pub struct OscillationParams {
    r_max: f64,
    omega_cm: f64,
    alpha0: f64,
    direction: Vector3<f64>,
}

impl OscillationParams {
    /// `r(t) = r_max cos(ω_cm t) n̂`; `direction` is normalized here.
    /// `r_max = 0` is the atom at rest.
    pub fn new(r_max: f64, omega_cm: f64, alpha0: f64, direction: Vector3<f64>) -> Result<Self> {
        let bad = |s: &str| Err(Error::InvalidParameter(s.to_string()));
        if !(r_max >= 0.0 && r_max.is_finite()) {
            return bad("oscillation amplitude must be non-negative");
        }
        if !(omega_cm > 0.0 && omega_cm.is_finite()) {
            return bad("oscillation frequency must be positive");
        }
        if !(alpha0 > 0.0 && alpha0.is_finite()) {
            return bad("static polarizability must be positive");
        }
        let norm = direction.norm();
        if !(norm > 0.0 && norm.is_finite()) {
            return bad("oscillation direction must be a non-zero finite vector");
        }
        Ok(OscillationParams {
            r_max,
            omega_cm,
            alpha0,
            direction: direction / norm,
        })
    }

    fn at_rest(&self) -> bool {
        self.r_max == 0.0
    }

    pub fn r_max(&self) -> f64 {
        self.r_max
    }

    pub fn omega_cm(&self) -> f64 {
        self.omega_cm
    }

    pub fn alpha0(&self) -> f64 {
        self.alpha0
    }

    pub fn direction(&self) -> Vector3<f64> {
        self.direction
    }

    pub fn v_max(&self) -> f64 {
        self.omega_cm * self.r_max
    }

    /// `a = (α₀ / 4πε₀)^{1/3}`.
    pub fn equivalent_radius(&self) -> f64 {
        (self.alpha0 / FOUR_PI_EPS0).cbrt()
    }

    pub fn with_r_max(&self, r_max: f64) -> Result<Self> {
        Self::new(r_max, self.omega_cm, self.alpha0, self.direction)
    }

    pub fn with_direction(&self, direction: Vector3<f64>) -> Result<Self> {
        Self::new(self.r_max, self.omega_cm, self.alpha0, direction)
    }
}

/// A plane-wave photon: wavevector (1/m) and a real polarization vector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Photon {
    pub k: Vector3<f64>,
    pub polarization: Vector3<f64>,
}

impl Photon {
    /// Photon with polarization index `lambda ∈ {0, 1}` from
    /// [`transverse_basis`].
    pub fn new(k: Vector3<f64>, lambda: usize) -> Result<Self> {
        let basis = transverse_basis(&k)?;
        let polarization = *basis.get(lambda).ok_or_else(|| {
            Error::InvalidParameter(format!("polarization index must be 0 or 1, got {lambda}"))
        })?;
        Ok(Photon { k, polarization })
    }

    /// Photon with an arbitrary test polarization; only its transverse
    /// part couples.
    pub fn with_polarization(k: Vector3<f64>, polarization: Vector3<f64>) -> Self {
        Photon { k, polarization }
    }

    pub fn omega(&self) -> f64 {
        C * self.k.norm()
    }
}

/// Two real unit vectors orthogonal to `k` and to each other, right-handed
/// with `k̂`.
pub fn transverse_basis(k: &Vector3<f64>) -> Result<[Vector3<f64>; 2]> {
    let norm = k.norm();
    if !(norm > 0.0 && norm.is_finite()) {
        return Err(Error::InvalidParameter("wavevector must be non-zero".into()));
    }
    let khat = k / norm;
    let helper = if khat.z.abs() < 0.9 {
        Vector3::z()
    } else {
        Vector3::x()
    };
    let e1 = helper.cross(&khat).normalize();
    let e2 = khat.cross(&e1);
    Ok([e1, e2])
}

/// Coupling tensor `T` (1/m) of the pair amplitude `ε₁ᵀ T ε₂`, for unit
/// directions `u1`, `u2` and frequencies `ω₁ + ω₂ = ω_cm`:
/// `T = (K·n) I + K₀ [u₂ nᵀ + n u₁ᵀ - (n·u₁ + n·u₂) I]`,
/// `K = (ω₁ u₁ + ω₂ u₂)/c`, `K₀ = ω_cm/c`. `T(2,1) = T(1,2)ᵀ`.
pub fn pair_emission_tensor(
    direction: &Vector3<f64>,
    u1: &Vector3<f64>,
    omega1: f64,
    u2: &Vector3<f64>,
    omega2: f64,
) -> Matrix3<f64> {
    let n = direction;
    let (c1, c2) = (n.dot(u1), n.dot(u2));
    let k_dot_n = (omega1 * c1 + omega2 * c2) / C;
    let k0 = (omega1 + omega2) / C;
    Matrix3::identity() * (k_dot_n - k0 * (c1 + c2)) + (u2 * n.transpose() + n * u1.transpose()) * k0
}

/// `-i α₀ ħ √(ω₁ω₂) r_max / (4ε₀)`: the amplitude is this times `ε₁ᵀ T ε₂`.
fn amplitude_prefactor(params: &OscillationParams, omega1: f64, omega2: f64) -> f64 {
    params.alpha0 * HBAR * (omega1 * omega2).sqrt() * params.r_max / (4.0 * EPSILON_0)
}

/// Vacuum-to-pair matrix element density of the first-order interaction
/// (J·m³ per photon, continuum normalization `d³k/(2π)³`).
/// Polarizations are projected onto the plane transverse to each `k`.
pub fn pair_emission_amplitude(params: &OscillationParams, photon1: &Photon, photon2: &Photon) -> Result<Complex64> {
    let (w1, w2) = (photon1.omega(), photon2.omega());
    let sum = w1 + w2;
    if (sum - params.omega_cm).abs() > SHELL_TOLERANCE * params.omega_cm {
        return Err(Error::RwaViolation {
            photon_sum: sum,
            omega_cm: params.omega_cm,
        });
    }
    if params.at_rest() {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let transverse = |p: &Photon| {
        let khat = p.k.normalize();
        (p.polarization - khat * khat.dot(&p.polarization), khat)
    };
    let (e1, u1) = transverse(photon1);
    let (e2, u2) = transverse(photon2);
    let t = pair_emission_tensor(&params.direction, &u1, w1, &u2, w2);
    let m = e1.dot(&(t * e2));
    Ok(Complex64::new(0.0, -amplitude_prefactor(params, w1, w2) * m))
}

/// `Σ_{λ₁λ₂} |ε₁ᵀ T ε₂|² = Tr(P₁ T P₂ Tᵀ)` with `P = I - u uᵀ`.
fn polarization_sum(t: &Matrix3<f64>, u1: &Vector3<f64>, u2: &Vector3<f64>) -> f64 {
    let p1 = Matrix3::identity() - u1 * u1.transpose();
    let p2 = Matrix3::identity() - u2 * u2.transpose();
    (p1 * t * p2 * t.transpose()).trace()
}

fn unit_vector(cos_theta: f64, phi: f64) -> Vector3<f64> {
    let sin_theta = (1.0 - cos_theta * cos_theta).max(0.0).sqrt();
    Vector3::new(sin_theta * phi.cos(), sin_theta * phi.sin(), cos_theta)
}

/// Product rule over the sphere, exact for polynomials of degree ≤ 7 in
/// the Cartesian components of `u`: 4-point Gauss-Legendre in `cos θ`
/// times 8 equally spaced `φ`.
struct SphereRule {
    points: Vec<(Vector3<f64>, f64)>,
}

impl SphereRule {
    fn new() -> Self {
        let a = (3.0 / 7.0 - 2.0 / 7.0 * (6.0f64 / 5.0).sqrt()).sqrt();
        let b = (3.0 / 7.0 + 2.0 / 7.0 * (6.0f64 / 5.0).sqrt()).sqrt();
        let wa = (18.0 + 30.0f64.sqrt()) / 36.0;
        let wb = (18.0 - 30.0f64.sqrt()) / 36.0;
        let gl = [(-b, wb), (-a, wa), (a, wa), (b, wb)];
        let n_phi = 8;
        let w_phi = 2.0 * PI / n_phi as f64;
        let mut points = Vec::with_capacity(gl.len() * n_phi);
        for &(x, w) in &gl {
            for j in 0..n_phi {
                let phi = w_phi * (j as f64 + 0.5);
                points.push((unit_vector(x, phi), w * w_phi));
            }
        }
        SphereRule { points }
    }
}

/// `∫dΩ₂ Σ_λ |ε₁ᵀ T ε₂|²` for photon 1 along `u1`. The summand has degree 4
/// in `u2`, so the product rule is exact.
fn photon2_angular(params: &OscillationParams, rule: &SphereRule, u1: &Vector3<f64>, omega1: f64) -> f64 {
    let omega2 = params.omega_cm - omega1;
    rule.points
        .iter()
        .map(|(u2, w)| w * polarization_sum(&pair_emission_tensor(&params.direction, u1, omega1, u2, omega2), u1, u2))
        .sum()
}

/// Golden-rule weight turning the angular integral of `Σ|T|²` into
/// `dΓ/dω₁`: `(2π/ħ²) (2π)⁻⁶ (ω₁ω₂)²/c⁶ · prefactor²`.
fn spectral_weight(params: &OscillationParams, omega1: f64) -> f64 {
    let omega2 = params.omega_cm - omega1;
    if omega1 <= 0.0 || omega2 <= 0.0 {
        return 0.0;
    }
    let pref = amplitude_prefactor(params, omega1, omega2);
    let phase_space = (omega1 * omega2 / (C * C * C)).powi(2);
    2.0 * PI / (HBAR * HBAR) / (2.0 * PI).powi(6) * phase_space * pref * pref
}

/// Photon spectrum `dΓ/dω` (1/s per rad/s) at `ω ∈ [0, ω_cm]`; zero at
/// both ends.
pub fn spectral_density(params: &OscillationParams, omega: f64, spec: &QuadratureSpec) -> Result<f64> {
    if !(0.0..=params.omega_cm).contains(&omega) {
        return Err(Error::RwaViolation {
            photon_sum: omega,
            omega_cm: params.omega_cm,
        });
    }
    let weight = spectral_weight(params, omega);
    if weight == 0.0 {
        return Ok(0.0);
    }
    let rule = SphereRule::new();
    let r = try_integrate_iterated(
        |x: &[f64]| Ok::<f64, Error>(photon2_angular(params, &rule, &unit_vector(x[0], x[1]), omega)),
        &[Limits::Fixed(-1.0, 1.0), Limits::Fixed(0.0, 2.0 * PI)],
        spec,
    )?;
    Ok(weight * r.value)
}

/// `Γ = (23/(5670π)) (a/r_max)⁶ (v_max/c)⁸ ω_cm`, photons per second.
pub fn dce_rate_closed(params: &OscillationParams) -> f64 {
    CLOSED_FORM_COEFFICIENT * closed_form_scale(params)
}

/// `(a/r_max)⁶ (v_max/c)⁸ ω_cm`, assembled in log space.
pub fn closed_form_scale(params: &OscillationParams) -> f64 {
    let ln = 6.0 * (params.equivalent_radius() / params.r_max).ln()
        + 8.0 * (params.v_max() / C).ln()
        + params.omega_cm.ln();
    ln.exp()
}

#[derive(Debug, Clone, PartialEq)]
pub struct EmissionResult {
    /// Photon emission rate, 1/s (two photons per pair).
    pub gamma_total: f64,
    /// `gamma_total / 2`.
    pub pair_rate: f64,
    /// `gamma_total / ((a/r_max)⁶ (v_max/c)⁸ ω_cm)`; 0 for an atom at rest.
    pub coefficient: f64,
    /// `(ω, dΓ/dω)` at `ω_cm (i+1)/(N+1)`, photon-counting.
    pub spectrum: Vec<(f64, f64)>,
    pub error_estimate: f64,
    pub converged: bool,
    pub evaluations: usize,
}

/// Mode-integrated emission rate: `∫dω₁ ∫dΩ₁` adaptively, `∫dΩ₂` by the
/// exact product rule, polarizations summed by transverse projectors.
pub fn dce_rate_numeric(params: &OscillationParams, spec: &QuadratureSpec) -> Result<EmissionResult> {
    let rule = SphereRule::new();
    let w = params.omega_cm;
    let r = try_integrate_iterated(
        |x: &[f64]| {
            let weight = spectral_weight(params, x[0]);
            if weight == 0.0 {
                return Ok::<f64, Error>(0.0);
            }
            Ok(weight * photon2_angular(params, &rule, &unit_vector(x[1], x[2]), x[0]))
        },
        &[
            Limits::Fixed(0.0, w),
            Limits::Fixed(-1.0, 1.0),
            Limits::Fixed(0.0, 2.0 * PI),
        ],
        spec,
    )?;
    let spectrum = (0..SPECTRUM_SAMPLES)
        .map(|i| {
            let omega = w * (i + 1) as f64 / (SPECTRUM_SAMPLES + 1) as f64;
            spectral_density(params, omega, spec).map(|s| (omega, s))
        })
        .collect::<Result<Vec<_>>>()?;
    let scale = closed_form_scale(params);
    Ok(EmissionResult {
        gamma_total: r.value,
        pair_rate: 0.5 * r.value,
        coefficient: if params.at_rest() { 0.0 } else { r.value / scale },
        spectrum,
        error_estimate: r.error_estimate,
        converged: r.converged,
        evaluations: r.evaluations,
    })
}

/// `∫ dΓ/dω dω` by a separate one-dimensional quadrature of
/// [`spectral_density`]; agrees with `gamma_total`.
pub fn integrated_spectrum(params: &OscillationParams, spec: &QuadratureSpec) -> Result<f64> {
    let inner = spec.inner();
    Ok(try_integrate_adaptive(
        |w| spectral_density(params, w, &inner),
        0.0,
        params.omega_cm,
        spec,
    )?
    .value)
}
