//! Atomic internal structure: ground-state transitions and the lossless
//! polarizability built from them.

use std::collections::HashSet;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::constants::{FOUR_PI_EPS0, HBAR};

/// Default pole guard, as a fraction of each transition frequency.
pub const POLE_GUARD: f64 = 1e-6;

/// Environment variable naming a species database to use instead of the
/// bundled one.
pub const SPECIES_DB_ENV: &str = "CASQ_SPECIES_DB";

const BUNDLED_DB: &str = include_str!("../data/species.json");

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpeciesError {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("duplicate species '{0}'")]
    DuplicateSpecies(String),

    #[error("unknown species '{0}'")]
    UnknownSpecies(String),

    #[error("invalid species '{name}': {reason}")]
    Invalid { name: String, reason: String },

    #[error("omega = {omega:e} rad/s lies within the pole guard of the transition at {omega_eg:e} rad/s")]
    PoleProximity { omega: f64, omega_eg: f64 },

    #[error("i/o error on {path}: {message}")]
    Io { path: String, message: String },
}

/// One ground-to-excited transition.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Transition {
    /// Angular frequency ω_eg, rad/s.
    #[serde(rename = "omega_eg_rad_per_s")]
    pub omega_eg: f64,
    /// Squared dipole matrix element |d_eg|², summed over excited
    /// sublevels, C²·m².
    #[serde(rename = "d2_C2m2")]
    pub d2: f64,
}

impl Transition {
    pub fn new(omega_eg: f64, d2: f64) -> Result<Self, String> {
        if !(omega_eg > 0.0 && omega_eg.is_finite()) {
            return Err(format!("omega_eg_rad_per_s must be positive, got {omega_eg}"));
        }
        if !(d2 >= 0.0 && d2.is_finite()) {
            return Err(format!("d2_C2m2 must be non-negative, got {d2}"));
        }
        Ok(Transition { omega_eg, d2 })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AtomSpecies {
    name: String,
    transitions: Vec<Transition>,
}

impl AtomSpecies {
    pub fn new(name: impl Into<String>, transitions: Vec<Transition>) -> Result<Self, SpeciesError> {
        let name = name.into();
        let invalid = |reason: String| SpeciesError::Invalid {
            name: name.clone(),
            reason,
        };
        if transitions.is_empty() {
            return Err(invalid("at least one transition is required".into()));
        }
        for (i, t) in transitions.iter().enumerate() {
            Transition::new(t.omega_eg, t.d2).map_err(|e| invalid(format!("transitions[{i}].{e}")))?;
        }
        let mut seen = HashSet::new();
        if !transitions.iter().all(|t| seen.insert(t.omega_eg.to_bits())) {
            return Err(invalid("transition frequencies must be distinct".into()));
        }
        Ok(AtomSpecies { name, transitions })
    }

    /// Two-level model with transition frequency `omega0` and |d|² = `d2`.
    pub fn two_level(name: impl Into<String>, omega0: f64, d2: f64) -> Result<Self, SpeciesError> {
        let name = name.into();
        let t = Transition::new(omega0, d2).map_err(|reason| SpeciesError::Invalid {
            name: name.clone(),
            reason,
        })?;
        Self::new(name, vec![t])
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn transitions(&self) -> &[Transition] {
        &self.transitions
    }

    pub fn is_two_level(&self) -> bool {
        self.transitions.len() == 1
    }

    pub fn lowest_transition(&self) -> f64 {
        self.transitions
            .iter()
            .map(|t| t.omega_eg)
            .fold(f64::INFINITY, f64::min)
    }

    /// α(ω) = Σ_e 2 ω_eg |d_eg|² / [3ħ (ω_eg² − ω²)], F·m².
    pub fn alpha_of_omega(&self, omega: f64) -> Result<f64, SpeciesError> {
        self.alpha_of_omega_guarded(omega, POLE_GUARD)
    }

    /// As [`alpha_of_omega`](Self::alpha_of_omega) with an explicit guard
    /// band `|ω| − ω_eg| < guard · ω_eg`.
    pub fn alpha_of_omega_guarded(&self, omega: f64, guard: f64) -> Result<f64, SpeciesError> {
        for t in &self.transitions {
            if (omega.abs() - t.omega_eg).abs() < guard * t.omega_eg {
                return Err(SpeciesError::PoleProximity {
                    omega,
                    omega_eg: t.omega_eg,
                });
            }
        }
        Ok(self
            .transitions
            .iter()
            .map(|t| 2.0 * t.omega_eg * t.d2 / (3.0 * HBAR * (t.omega_eg * t.omega_eg - omega * omega)))
            .sum())
    }

    /// Static polarizability α(0).
    pub fn alpha_static(&self) -> f64 {
        self.transitions
            .iter()
            .map(|t| 2.0 * t.d2 / (3.0 * HBAR * t.omega_eg))
            .sum()
    }

    /// Length `a` with α(0) = 4πε₀a³.
    pub fn equivalent_radius(&self) -> f64 {
        equivalent_radius(self.alpha_static())
    }

    /// ⟨d²⟩ = Σ_e |d_eg|².
    pub fn mean_square_dipole(&self) -> f64 {
        self.transitions.iter().map(|t| t.d2).sum()
    }
}

/// `a = (α / 4πε₀)^{1/3}`.
pub fn equivalent_radius(alpha: f64) -> f64 {
    (alpha / FOUR_PI_EPS0).cbrt()
}

/// `α = 4πε₀ a³`.
pub fn alpha_from_radius(a: f64) -> f64 {
    FOUR_PI_EPS0 * a * a * a
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpecies {
    name: String,
    transitions: Vec<Transition>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDb {
    species: Vec<RawSpecies>,
}

#[derive(Serialize)]
struct DbRef<'a> {
    species: &'a [AtomSpecies],
}

/// Parse a species database from its JSON text.
pub fn parse_species_db(text: &str) -> Result<Vec<AtomSpecies>, SpeciesError> {
    let raw: RawDb = serde_json::from_str(text).map_err(|e| SpeciesError::Parse(e.to_string()))?;
    let mut names = HashSet::new();
    let mut out = Vec::with_capacity(raw.species.len());
    for (i, s) in raw.species.into_iter().enumerate() {
        for (j, t) in s.transitions.iter().enumerate() {
            if let Err(reason) = Transition::new(t.omega_eg, t.d2) {
                return Err(SpeciesError::Parse(format!(
                    "species[{i}].transitions[{j}].{reason}"
                )));
            }
        }
        if !names.insert(s.name.clone()) {
            return Err(SpeciesError::DuplicateSpecies(s.name));
        }
        let species = AtomSpecies::new(s.name, s.transitions)
            .map_err(|e| SpeciesError::Parse(format!("species[{i}]: {e}")))?;
        out.push(species);
    }
    Ok(out)
}

pub fn load_species_db(path: impl AsRef<Path>) -> Result<Vec<AtomSpecies>, SpeciesError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| SpeciesError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    parse_species_db(&text)
}

/// Serialize in the database schema.
pub fn species_db_to_json(species: &[AtomSpecies]) -> String {
    serde_json::to_string_pretty(&DbRef { species }).expect("species serialize")
}

/// The database shipped with the crate.
pub fn bundled_species_db() -> Vec<AtomSpecies> {
    parse_species_db(BUNDLED_DB).expect("bundled species database is valid")
}

/// Database named by `CASQ_SPECIES_DB`, or the bundled one when unset.
pub fn default_species_db() -> Result<Vec<AtomSpecies>, SpeciesError> {
    match std::env::var_os(SPECIES_DB_ENV) {
        Some(path) => load_species_db(path),
        None => Ok(bundled_species_db()),
    }
}

pub fn find_species<'a>(db: &'a [AtomSpecies], name: &str) -> Result<&'a AtomSpecies, SpeciesError> {
    db.iter()
        .find(|s| s.name == name)
        .ok_or_else(|| SpeciesError::UnknownSpecies(name.to_string()))
}
