//! Interferometer phases for atoms moving near a perfect mirror at `z = 0`.
//!
//! The atom-mirror interaction is the nonretarded image-dipole potential
//! `U(z) = -⟨d²⟩ / (48 π ε₀ z³)`. On top of the quasi-static phase
//! `-(1/ħ) ∫ U dt`, motion gives a local correction from averaging `U`
//! over the round-trip light time `τ = 2z/c`, and a nonlocal phase shared
//! by two paths.

use crate::constants::{C, EPSILON_0, FOUR_PI_EPS0, HBAR};
use crate::error::{Error, Result};
use crate::phase::PhaseResult;
use crate::quadrature::{try_integrate_adaptive, try_integrate_iterated, IntegralResult, Limits, QuadratureSpec};
use crate::species::AtomSpecies;
use crate::trajectories::{light_delay, TimeWindow, Trajectory1D, TrajectoryError};

/// Default near-contact cutoff, m.
pub const DEFAULT_Z_MIN: f64 = 1e-9;

/// One or two paths of the same species in front of the mirror.
#[derive(Debug, Clone, PartialEq)]
pub struct MirrorScenario {
    species: AtomSpecies,
    paths: Vec<Trajectory1D>,
    z_min: f64,
}

impl MirrorScenario {
    pub fn new(species: AtomSpecies, paths: Vec<Trajectory1D>) -> Result<Self> {
        Self::with_z_min(species, paths, DEFAULT_Z_MIN)
    }

    pub fn with_z_min(species: AtomSpecies, paths: Vec<Trajectory1D>, z_min: f64) -> Result<Self> {
        if paths.is_empty() || paths.len() > 2 {
            return Err(Error::PathCount {
                expected: if paths.is_empty() { 1 } else { 2 },
                found: paths.len(),
            });
        }
        if !(z_min >= 0.0) {
            return Err(Error::InvalidParameter(format!("z_min must be non-negative, got {z_min}")));
        }
        for p in &paths {
            if p.window().is_improper() {
                return Err(TrajectoryError::ImproperWindow.into());
            }
            let (_, lowest) = p.lowest_point();
            if lowest < z_min {
                return Err(Error::CollisionGuard {
                    distance: lowest,
                    guard: z_min,
                });
            }
        }
        if paths.len() == 2 && paths[0].window() != paths[1].window() {
            return Err(Error::WindowMismatch);
        }
        Ok(MirrorScenario {
            species,
            paths,
            z_min,
        })
    }

    pub fn species(&self) -> &AtomSpecies {
        &self.species
    }

    pub fn paths(&self) -> &[Trajectory1D] {
        &self.paths
    }

    pub fn z_min(&self) -> f64 {
        self.z_min
    }

    pub fn window(&self) -> TimeWindow {
        self.paths[0].window()
    }

    fn path(&self, index: usize) -> Result<&Trajectory1D> {
        self.paths.get(index).ok_or(Error::PathCount {
            expected: index + 1,
            found: self.paths.len(),
        })
    }

    fn two_paths(&self) -> Result<(&Trajectory1D, &Trajectory1D)> {
        if self.paths.len() != 2 {
            return Err(Error::PathCount {
                expected: 2,
                found: self.paths.len(),
            });
        }
        Ok((&self.paths[0], &self.paths[1]))
    }

    /// Same scenario with every path transformed by `f`.
    pub fn map_paths(
        &self,
        f: impl Fn(&Trajectory1D) -> std::result::Result<Trajectory1D, TrajectoryError>,
    ) -> Result<Self> {
        let paths = self.paths.iter().map(f).collect::<std::result::Result<Vec<_>, _>>()?;
        Self::with_z_min(self.species.clone(), paths, self.z_min)
    }

    /// Same scenario with the two paths exchanged.
    pub fn swapped(&self) -> Result<Self> {
        let mut paths = self.paths.clone();
        paths.reverse();
        Self::with_z_min(self.species.clone(), paths, self.z_min)
    }
}

/// `C₃ = ⟨d²⟩ / (48 π ε₀)`, so that `U(z) = -C₃ / z³`.
pub fn vdw_coefficient(species: &AtomSpecies) -> f64 {
    species.mean_square_dipole() / (48.0 * std::f64::consts::PI * EPSILON_0)
}

pub fn vdw_potential(species: &AtomSpecies, z: f64) -> Result<f64> {
    if !(z > 0.0) {
        return Err(TrajectoryError::NonPositiveDistance(z).into());
    }
    Ok(-vdw_coefficient(species) / (z * z * z))
}

/// `φ^qs = -(1/ħ) ∫ U(z(t)) dt` for one path.
pub fn quasi_static_phase(
    scenario: &MirrorScenario,
    path_index: usize,
    spec: &QuadratureSpec,
) -> Result<PhaseResult> {
    let path = scenario.path(path_index)?;
    let (a, b) = path.window().bounds().ok_or(TrajectoryError::ImproperWindow)?;
    let integral = try_integrate_adaptive(
        |t| {
            let z = path.position(t)?;
            Ok::<f64, Error>(1.0 / (z * z * z))
        },
        a,
        b,
        spec,
    )?;
    Ok(PhaseResult::from_integral(
        &integral,
        vdw_coefficient(scenario.species()) / HBAR,
    ))
}

/// `(U(z + dz) - U(z)) / C₃` without cancellation.
fn potential_step(z: f64, dz: f64) -> f64 {
    let zp = z + dz;
    dz * (zp * zp + zp * z + z * z) / (z * z * z * zp * zp * zp)
}

/// `Ū(t) - U(t)` where `Ū(t) = (1/τ) ∫_t^{t+τ} U(z(t')) dt'` and
/// `τ = 2 z(t) / c`.
pub fn coarse_graining_residual(
    species: &AtomSpecies,
    traj: &Trajectory1D,
    t: f64,
    spec: &QuadratureSpec,
) -> Result<IntegralResult> {
    let z = traj.position(t)?;
    let tau = light_delay(z)?;
    let c3 = vdw_coefficient(species);
    let mut r = try_integrate_adaptive(
        |x| Ok::<f64, Error>(potential_step(z, traj.displacement(t, tau * x)?)),
        0.0,
        1.0,
        spec,
    )?;
    r.value *= c3;
    r.error_estimate *= c3;
    r.tolerance *= c3;
    Ok(r)
}

/// Coarse-grained potential `Ū(z(t))`, J.
pub fn coarse_grained_potential(
    species: &AtomSpecies,
    traj: &Trajectory1D,
    t: f64,
    spec: &QuadratureSpec,
) -> Result<f64> {
    let u = vdw_potential(species, traj.position(t)?)?;
    Ok(u + coarse_graining_residual(species, traj, t, spec)?.value)
}

/// Leading order in `v/c` of the motional phase,
/// `-(3C₃/ħc) ∫ ż/z³ dt = (3C₃/2ħc) (1/z_end² - 1/z_start²)`.
pub fn motional_phase_first_order(species: &AtomSpecies, traj: &Trajectory1D) -> Result<f64> {
    let (a, b) = traj.window().bounds().ok_or(TrajectoryError::ImproperWindow)?;
    let (za, zb) = (traj.position(a)?, traj.position(b)?);
    let c3 = vdw_coefficient(species);
    Ok(1.5 * c3 / (HBAR * C) * (1.0 / (zb * zb) - 1.0 / (za * za)))
}

/// `φ^mot = -(1/ħ) ∫ (Ū - U) dt` for one path.
///
/// The breakdown carries the first-order closed form and, for two-level
/// species, the single-path limit of the two-path formula
/// `(K/8) ∫ ż/z³ dt` together with the ratio of the two.
pub fn motional_phase_mirror(
    scenario: &MirrorScenario,
    path_index: usize,
    spec: &QuadratureSpec,
) -> Result<PhaseResult> {
    let path = scenario.path(path_index)?;
    let (a, b) = path.window().bounds().ok_or(TrajectoryError::ImproperWindow)?;
    let integral = try_integrate_iterated(
        |v: &[f64]| {
            let (t, x) = (v[0], v[1]);
            let z = path.position(t)?;
            let tau = light_delay(z)?;
            Ok::<f64, Error>(potential_step(z, path.displacement(t, tau * x)?))
        },
        &[Limits::Fixed(a, b), Limits::Fixed(0.0, 1.0)],
        spec,
    )?;
    let c3 = vdw_coefficient(scenario.species());
    let first_order = motional_phase_first_order(scenario.species(), path)?;
    let mut result = PhaseResult::from_integral(&integral, -c3 / HBAR).with_term("first_order", first_order);
    if scenario.species().is_two_level() {
        let (za, zb) = (path.position(a)?, path.position(b)?);
        // ∫ ż/z³ dt = -(1/2)(1/z_b² - 1/z_a²)
        let local_limit = nonlocal_prefactor(scenario.species())? / 8.0
            * (-0.5 * (1.0 / (zb * zb) - 1.0 / (za * za)));
        result = result.with_term("two_path_local_limit", local_limit);
        if local_limit != 0.0 {
            result = result.with_term("first_order_over_two_path_local_limit", first_order / local_limit);
        }
    }
    Ok(result)
}

/// `K = 3 ω₀ α(0) / (4π ε₀ c)` for a two-level species.
pub fn nonlocal_prefactor(species: &AtomSpecies) -> Result<f64> {
    if !species.is_two_level() {
        return Err(Error::NotTwoLevel {
            name: species.name().to_string(),
            transitions: species.transitions().len(),
        });
    }
    let omega0 = species.transitions()[0].omega_eg;
    Ok(3.0 * omega0 * species.alpha_static() / (FOUR_PI_EPS0 * C))
}

/// `φ₁₂ = K ∫ (ż₁ - ż₂) / (z₁ + z₂)³ dt`.
pub fn nonlocal_phase(scenario: &MirrorScenario, spec: &QuadratureSpec) -> Result<PhaseResult> {
    let (p1, p2) = scenario.two_paths()?;
    let k = nonlocal_prefactor(scenario.species())?;
    let (a, b) = p1.window().bounds().ok_or(TrajectoryError::ImproperWindow)?;
    let integral = try_integrate_adaptive(
        |t| {
            let s = p1.position(t)? + p2.position(t)?;
            Ok::<f64, Error>((p1.velocity(t)? - p2.velocity(t)?) / (s * s * s))
        },
        a,
        b,
        spec,
    )?;
    let mut result = PhaseResult::from_integral(&integral, k).with_term("prefactor", k);
    if let (Some(v1), Some(v2)) = (p1.parallel_velocity(), p2.parallel_velocity()) {
        if v1 != v2 {
            result.warnings.push(format!(
                "paths declare different parallel velocities ({v1} vs {v2} m/s); the two-path formula assumes equal ones"
            ));
        }
    }
    Ok(result)
}

/// `Δφ = φ₁ - φ₂ + φ₁₂` with `φ_j = φ_j^qs + φ_j^mot`.
pub fn total_phase_difference(scenario: &MirrorScenario, spec: &QuadratureSpec) -> Result<PhaseResult> {
    scenario.two_paths()?;
    let qs1 = quasi_static_phase(scenario, 0, spec)?;
    let qs2 = quasi_static_phase(scenario, 1, spec)?;
    let mot1 = motional_phase_mirror(scenario, 0, spec)?;
    let mot2 = motional_phase_mirror(scenario, 1, spec)?;
    let nl = nonlocal_phase(scenario, spec)?;
    let value = total_from_terms(qs1.value, qs2.value, mot1.value, mot2.value, nl.value);
    let parts = [&qs1, &qs2, &mot1, &mot2, &nl];
    let mut result = PhaseResult {
        value,
        error_estimate: parts.iter().map(|p| p.error_estimate).sum(),
        converged: parts.iter().all(|p| p.converged),
        evaluations: parts.iter().map(|p| p.evaluations).sum(),
        breakdown: Default::default(),
        warnings: nl.warnings.clone(),
    };
    result = result
        .with_term("phi1_qs", qs1.value)
        .with_term("phi2_qs", qs2.value)
        .with_term("phi1_mot", mot1.value)
        .with_term("phi2_mot", mot2.value)
        .with_term("phi12", nl.value);
    Ok(result)
}

/// Bookkeeping used by [`total_phase_difference`].
pub fn total_from_terms(phi1_qs: f64, phi2_qs: f64, phi1_mot: f64, phi2_mot: f64, phi12: f64) -> f64 {
    (phi1_qs + phi1_mot) - (phi2_qs + phi2_mot) + phi12
}
