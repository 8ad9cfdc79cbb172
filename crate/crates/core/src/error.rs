use thiserror::Error;

use crate::quadrature::QuadratureError;
use crate::species::SpeciesError;
use crate::trajectories::TrajectoryError;

/// Errors raised by the phase and rate computations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),

    #[error(transparent)]
    Trajectory(#[from] TrajectoryError),

    #[error(transparent)]
    Species(#[from] SpeciesError),

    #[error("path comes within {distance:e} m, inside the guard distance {guard:e} m")]
    CollisionGuard { distance: f64, guard: f64 },

    #[error("operation needs a two-level species; '{name}' has {transitions} transitions")]
    NotTwoLevel { name: String, transitions: usize },

    #[error("transition-weighted sum under the sixth root is negative: {value:e}")]
    NegativeRadicand { value: f64 },

    #[error("impact parameter must be non-zero")]
    ZeroImpactParameter,

    #[error("frequency {omega:e} rad/s is within the pole guard of the resonance at {resonance:e} rad/s")]
    PoleProximity { omega: f64, resonance: f64 },

    #[error("photon pair off the energy shell: omega1 + omega2 = {photon_sum:e} rad/s, expected {omega_cm:e} rad/s")]
    RwaViolation { photon_sum: f64, omega_cm: f64 },

    #[error("two-path operation needs paths with identical windows")]
    WindowMismatch,

    #[error("expected {expected} path(s), got {found}")]
    PathCount { expected: usize, found: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

impl Error {
    /// Whether the failure is a numerical non-convergence (as opposed to
    /// invalid input).
    pub fn is_non_convergence(&self) -> bool {
        matches!(self, Error::Quadrature(QuadratureError::NonConvergent { .. }))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
