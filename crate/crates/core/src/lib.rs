//! Motion-induced quantum-electrodynamic observables for neutral atoms.
//!
//! - [`dce`]: photon-pair emission by an atom oscillating in vacuum.
//! - [`mirror_phases`]: quasi-static, motional and nonlocal phases of
//!   interferometer paths near a perfect mirror.
//! - [`sagnac`]: geometric phases acquired near a spinning particle.
//!
//! Everything is SI. Numerical results come from the deterministic
//! adaptive engine in [`quadrature`].

// `!(x > 0.0)` rejects NaN along with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

pub mod constants;
pub mod dce;
pub mod error;
pub mod mirror_phases;
pub mod phase;
pub mod quadrature;
pub mod sagnac;
pub mod selftest;
pub mod species;
pub mod trajectories;

pub use error::{Error, Result};
pub use phase::PhaseResult;
pub use quadrature::{IntegralResult, QuadratureSpec};
pub use species::{AtomSpecies, Transition};
pub use trajectories::{TimeWindow, Trajectory1D, Trajectory3D};

/// Crate version, recorded in reports.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
