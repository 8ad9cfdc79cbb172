//! Scenario files: JSON documents with unit-suffixed keys.

use std::path::Path;

use casq_core::dce::OscillationParams;
use casq_core::mirror_phases::{MirrorScenario, DEFAULT_Z_MIN};
use casq_core::sagnac::{self, SpinningParticle};
use casq_core::species::{find_species, AtomSpecies};
use casq_core::trajectories::{TimeWindow, Trajectory1D, Trajectory3D};
use casq_core::QuadratureSpec;
use nalgebra::Vector3;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioKind {
    QuasiStatic,
    MotionalMirror,
    Nonlocal,
    TotalMirror,
    Sagnac,
    SagnacStraightLine,
    SagnacSymmetric,
    DceClosed,
    DceNumeric,
}

impl ScenarioKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ScenarioKind::QuasiStatic => "quasi_static",
            ScenarioKind::MotionalMirror => "motional_mirror",
            ScenarioKind::Nonlocal => "nonlocal",
            ScenarioKind::TotalMirror => "total_mirror",
            ScenarioKind::Sagnac => "sagnac",
            ScenarioKind::SagnacStraightLine => "sagnac_straight_line",
            ScenarioKind::SagnacSymmetric => "sagnac_symmetric",
            ScenarioKind::DceClosed => "dce_closed",
            ScenarioKind::DceNumeric => "dce_numeric",
        }
    }

    fn is_mirror(self) -> bool {
        matches!(
            self,
            ScenarioKind::QuasiStatic | ScenarioKind::MotionalMirror | ScenarioKind::Nonlocal | ScenarioKind::TotalMirror
        )
    }

    fn is_single_path(self) -> bool {
        matches!(self, ScenarioKind::QuasiStatic | ScenarioKind::MotionalMirror)
    }

    fn is_sagnac(self) -> bool {
        matches!(
            self,
            ScenarioKind::Sagnac | ScenarioKind::SagnacStraightLine | ScenarioKind::SagnacSymmetric
        )
    }

    fn is_dce(self) -> bool {
        matches!(self, ScenarioKind::DceClosed | ScenarioKind::DceNumeric)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WindowSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_start_s: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_end_s: Option<f64>,
    #[serde(default)]
    pub improper: bool,
    #[serde(default)]
    pub decay_certified: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sample1 {
    pub t_s: f64,
    pub z_m: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sample3 {
    pub t_s: f64,
    pub r_m: [f64; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "motion", rename_all = "snake_case", deny_unknown_fields)]
pub enum PathSpec {
    Constant {
        h_m: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        parallel_velocity_m_per_s: Option<f64>,
    },
    Linear {
        h_m: f64,
        v_m_per_s: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        parallel_velocity_m_per_s: Option<f64>,
    },
    Harmonic {
        center_m: f64,
        amplitude_m: f64,
        omega_rad_per_s: f64,
        #[serde(default)]
        phase_rad: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        parallel_velocity_m_per_s: Option<f64>,
    },
    Polyline {
        samples: Vec<Sample1>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        parallel_velocity_m_per_s: Option<f64>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "motion", rename_all = "snake_case", deny_unknown_fields)]
pub enum TrajectorySpec {
    StraightLine { r0_m: [f64; 3], v_m_per_s: [f64; 3] },
    Polyline { samples: Vec<Sample3> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParticleSpec {
    #[serde(rename = "alpha0_F_m2")]
    pub alpha0_f_m2: f64,
    pub resonance_rad_per_s: f64,
    #[serde(default)]
    pub gamma_rad_per_s: f64,
    pub omega_rad_per_s: [f64; 3],
    #[serde(default)]
    pub radius_m: f64,
}

fn z_axis() -> [f64; 3] {
    [0.0, 0.0, 1.0]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OscillationSpec {
    pub r_max_m: f64,
    pub omega_cm_rad_per_s: f64,
    #[serde(default = "z_axis")]
    pub direction: [f64; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct QuadratureOverrides {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadratureOverrides {
    fn default() -> Self {
        let d = QuadratureSpec::default();
        QuadratureOverrides {
            rel_tol: d.rel_tol,
            abs_tol: d.abs_tol,
            max_subdivisions: d.max_subdivisions,
        }
    }
}

/// The on-disk scenario. Fields not used by `kind` must be absent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub kind: ScenarioKind,
    pub species: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<WindowSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub paths: Vec<PathSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path_index: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub z_min_m: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub particle: Option<ParticleSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trajectory: Option<TrajectorySpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y_m: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y_ell: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y1_m: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y1_ell: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oscillation: Option<OscillationSpec>,
    #[serde(default)]
    pub quadrature: QuadratureOverrides,
}

/// Every unit-suffixed key of the schema with its unit suffix. `ell`
/// means multiples of the rotation length `ℓ_Ω`.
pub const UNIT_KEYS: &[(&str, &str)] = &[
    ("t_start_s", "s"),
    ("t_end_s", "s"),
    ("t_s", "s"),
    ("h_m", "m"),
    ("z_m", "m"),
    ("r_m", "m"),
    ("r0_m", "m"),
    ("center_m", "m"),
    ("amplitude_m", "m"),
    ("radius_m", "m"),
    ("y_m", "m"),
    ("y_ell", "ell"),
    ("y1_m", "m"),
    ("y1_ell", "ell"),
    ("r_max_m", "m"),
    ("z_min_m", "m"),
    ("v_m_per_s", "m_per_s"),
    ("parallel_velocity_m_per_s", "m_per_s"),
    ("omega_rad_per_s", "rad_per_s"),
    ("omega_cm_rad_per_s", "rad_per_s"),
    ("resonance_rad_per_s", "rad_per_s"),
    ("gamma_rad_per_s", "rad_per_s"),
    ("phase_rad", "rad"),
    ("alpha0_F_m2", "F_m2"),
];

const PLAIN_KEYS: &[&str] = &[
    "kind",
    "species",
    "window",
    "improper",
    "decay_certified",
    "paths",
    "path_index",
    "motion",
    "samples",
    "particle",
    "trajectory",
    "oscillation",
    "direction",
    "quadrature",
    "rel_tol",
    "abs_tol",
    "max_subdivisions",
];

/// Keys whose stem is known but whose unit suffix is not: the expected
/// spellings for the longest matching stem.
fn unit_alternatives(key: &str) -> Option<Vec<&'static str>> {
    if PLAIN_KEYS.contains(&key) || UNIT_KEYS.iter().any(|(k, _)| *k == key) {
        return None;
    }
    let stem_of = |(k, u): &(&'static str, &'static str)| &k[..k.len() - u.len() - 1];
    let best = UNIT_KEYS
        .iter()
        .filter(|e| key.starts_with(&format!("{}_", stem_of(e))))
        .map(|e| stem_of(e).len())
        .max()?;
    Some(
        UNIT_KEYS
            .iter()
            .filter(|e| stem_of(e).len() == best && key.starts_with(&format!("{}_", stem_of(e))))
            .map(|(k, _)| *k)
            .collect(),
    )
}

fn check_units(value: &Value, path: &str) -> Result<(), CliError> {
    let join = |p: &str, k: &str| if p.is_empty() { k.to_string() } else { format!("{p}.{k}") };
    match value {
        Value::Object(map) => {
            for (k, v) in map {
                if let Some(expected) = unit_alternatives(k) {
                    return Err(CliError::UnitMismatch {
                        path: join(path, k),
                        expected: expected.join(" or "),
                    });
                }
                check_units(v, &join(path, k))?;
            }
        }
        Value::Array(items) => {
            for (i, v) in items.iter().enumerate() {
                check_units(v, &join(path, &i.to_string()))?;
            }
        }
        _ => {}
    }
    Ok(())
}

fn parse_error(path: &str, message: impl Into<String>) -> CliError {
    CliError::Parse {
        path: path.to_string(),
        message: message.into(),
    }
}

fn invalid(path: &str, source: impl Into<casq_core::Error>) -> CliError {
    CliError::Invalid {
        path: path.to_string(),
        source: source.into(),
    }
}

/// A validated scenario together with its resolved species.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub file: ScenarioFile,
    pub species: AtomSpecies,
}

/// Core objects built from a scenario.
#[derive(Debug, Clone)]
pub enum Prepared {
    Mirror { scenario: MirrorScenario, path_index: usize },
    Sagnac { particle: SpinningParticle, trajectory: Trajectory3D },
    SagnacStraightLine { particle: SpinningParticle, y: f64 },
    SagnacSymmetric { particle: SpinningParticle, y1: f64 },
    Dce(OscillationParams),
}

impl Scenario {
    pub fn kind(&self) -> ScenarioKind {
        self.file.kind
    }

    pub fn quadrature(&self) -> Result<QuadratureSpec, CliError> {
        let q = &self.file.quadrature;
        QuadratureSpec::new(q.rel_tol, q.abs_tol, q.max_subdivisions).map_err(|e| invalid("quadrature", e))
    }

    /// Canonical JSON value: defaults filled, fields in schema order.
    pub fn canonical_value(&self) -> Value {
        serde_json::to_value(&self.file).expect("scenario serializes")
    }

    pub fn prepare(&self) -> Result<Prepared, CliError> {
        let f = &self.file;
        if f.kind.is_mirror() {
            let window = build_window(f.window.as_ref())?;
            let paths = f
                .paths
                .iter()
                .enumerate()
                .map(|(i, p)| build_path(p, window).map_err(|e| invalid(&format!("paths.{i}"), e)))
                .collect::<Result<Vec<_>, _>>()?;
            let scenario = MirrorScenario::with_z_min(self.species.clone(), paths, f.z_min_m.unwrap_or(DEFAULT_Z_MIN))
                .map_err(|e| invalid("paths", e))?;
            return Ok(Prepared::Mirror {
                scenario,
                path_index: f.path_index.unwrap_or(0),
            });
        }
        if f.kind.is_sagnac() {
            let p = f.particle.as_ref().expect("validated");
            let particle = SpinningParticle::new(
                p.alpha0_f_m2,
                p.resonance_rad_per_s,
                p.gamma_rad_per_s,
                Vector3::from(p.omega_rad_per_s),
                p.radius_m,
            )
            .map_err(|e| invalid("particle", e))?;
            let length = |m: Option<f64>, ell: Option<f64>, key: &str| -> Result<f64, CliError> {
                match (m, ell) {
                    (Some(m), None) => Ok(m),
                    (None, Some(x)) => Ok(x * sagnac::ell_omega(&self.species, &particle).map_err(|e| invalid(key, e))?),
                    _ => unreachable!("validated"),
                }
            };
            return Ok(match f.kind {
                ScenarioKind::Sagnac => {
                    let window = build_window(f.window.as_ref())?;
                    let trajectory = build_trajectory(f.trajectory.as_ref().expect("validated"), window)
                        .map_err(|e| invalid("trajectory", e))?;
                    Prepared::Sagnac { particle, trajectory }
                }
                ScenarioKind::SagnacStraightLine => Prepared::SagnacStraightLine {
                    y: length(f.y_m, f.y_ell, "y_ell")?,
                    particle,
                },
                _ => Prepared::SagnacSymmetric {
                    y1: length(f.y1_m, f.y1_ell, "y1_ell")?,
                    particle,
                },
            });
        }
        let o = f.oscillation.as_ref().expect("validated");
        let params = OscillationParams::new(
            o.r_max_m,
            o.omega_cm_rad_per_s,
            self.species.alpha_static(),
            Vector3::from(o.direction),
        )
        .map_err(|e| invalid("oscillation", e))?;
        Ok(Prepared::Dce(params))
    }
}

fn build_window(w: Option<&WindowSpec>) -> Result<TimeWindow, CliError> {
    let w = w.expect("validated");
    if w.improper {
        if w.t_start_s.is_some() || w.t_end_s.is_some() {
            return Err(parse_error("window", "an improper window takes no t_start_s/t_end_s"));
        }
        return Ok(TimeWindow::improper(w.decay_certified));
    }
    match (w.t_start_s, w.t_end_s) {
        (Some(a), Some(b)) => TimeWindow::bounded(a, b).map_err(|e| invalid("window", e)),
        (None, _) => Err(parse_error("window", "missing field `t_start_s`")),
        (_, None) => Err(parse_error("window", "missing field `t_end_s`")),
    }
}

fn build_path(p: &PathSpec, window: TimeWindow) -> Result<Trajectory1D, casq_core::Error> {
    let (traj, parallel) = match p {
        PathSpec::Constant {
            h_m,
            parallel_velocity_m_per_s,
        } => (Trajectory1D::constant(*h_m, window)?, parallel_velocity_m_per_s),
        PathSpec::Linear {
            h_m,
            v_m_per_s,
            parallel_velocity_m_per_s,
        } => (Trajectory1D::linear(*h_m, *v_m_per_s, window)?, parallel_velocity_m_per_s),
        PathSpec::Harmonic {
            center_m,
            amplitude_m,
            omega_rad_per_s,
            phase_rad,
            parallel_velocity_m_per_s,
        } => (
            Trajectory1D::harmonic(*center_m, *amplitude_m, *omega_rad_per_s, *phase_rad, window)?,
            parallel_velocity_m_per_s,
        ),
        PathSpec::Polyline {
            samples,
            parallel_velocity_m_per_s,
        } => (
            Trajectory1D::polyline(samples.iter().map(|s| (s.t_s, s.z_m)).collect(), window)?,
            parallel_velocity_m_per_s,
        ),
    };
    Ok(match parallel {
        Some(v) => traj.with_parallel_velocity(*v),
        None => traj,
    })
}

fn build_trajectory(t: &TrajectorySpec, window: TimeWindow) -> Result<Trajectory3D, casq_core::Error> {
    Ok(match t {
        TrajectorySpec::StraightLine { r0_m, v_m_per_s } => {
            Trajectory3D::straight_line(Vector3::from(*r0_m), Vector3::from(*v_m_per_s), window)?
        }
        TrajectorySpec::Polyline { samples } => {
            Trajectory3D::polyline(samples.iter().map(|s| (s.t_s, Vector3::from(s.r_m))).collect(), window)?
        }
    })
}

/// Presence rules per kind; fills defaults.
fn check_fields(f: &mut ScenarioFile) -> Result<(), CliError> {
    let kind = f.kind;
    let name = kind.as_str();
    let require = |present: bool, key: &str| {
        if present {
            Ok(())
        } else {
            Err(parse_error("", format!("missing field `{key}` required by kind {name}")))
        }
    };
    let forbid = |present: bool, key: &str| {
        if present {
            Err(parse_error(key, format!("field `{key}` is not used by kind {name}")))
        } else {
            Ok(())
        }
    };

    let mirror = kind.is_mirror();
    let sagnac = kind.is_sagnac();
    require(!mirror || !f.paths.is_empty(), "paths")?;
    forbid(!mirror && !f.paths.is_empty(), "paths")?;
    forbid(!mirror && f.z_min_m.is_some(), "z_min_m")?;
    forbid(!kind.is_single_path() && f.path_index.is_some(), "path_index")?;
    let needs_window = mirror || kind == ScenarioKind::Sagnac;
    require(!needs_window || f.window.is_some(), "window")?;
    forbid(!needs_window && f.window.is_some(), "window")?;
    require(!sagnac || f.particle.is_some(), "particle")?;
    forbid(!sagnac && f.particle.is_some(), "particle")?;
    require(kind != ScenarioKind::Sagnac || f.trajectory.is_some(), "trajectory")?;
    forbid(kind != ScenarioKind::Sagnac && f.trajectory.is_some(), "trajectory")?;
    let straight = kind == ScenarioKind::SagnacStraightLine;
    let symmetric = kind == ScenarioKind::SagnacSymmetric;
    require(!straight || f.y_m.is_some() || f.y_ell.is_some(), "y_m")?;
    forbid(f.y_m.is_some() && f.y_ell.is_some(), "y_ell")?;
    forbid(!straight && f.y_m.is_some(), "y_m")?;
    forbid(!straight && f.y_ell.is_some(), "y_ell")?;
    require(!symmetric || f.y1_m.is_some() || f.y1_ell.is_some(), "y1_m")?;
    forbid(f.y1_m.is_some() && f.y1_ell.is_some(), "y1_ell")?;
    forbid(!symmetric && f.y1_m.is_some(), "y1_m")?;
    forbid(!symmetric && f.y1_ell.is_some(), "y1_ell")?;
    require(!kind.is_dce() || f.oscillation.is_some(), "oscillation")?;
    forbid(!kind.is_dce() && f.oscillation.is_some(), "oscillation")?;

    let expected_paths = match kind {
        ScenarioKind::Nonlocal | ScenarioKind::TotalMirror => Some(2..=2),
        ScenarioKind::QuasiStatic | ScenarioKind::MotionalMirror => Some(1..=2),
        _ => None,
    };
    if let Some(range) = expected_paths {
        if !range.contains(&f.paths.len()) {
            return Err(parse_error(
                "paths",
                format!("kind {name} takes {}..={} paths, got {}", range.start(), range.end(), f.paths.len()),
            ));
        }
    }
    if kind.is_single_path() {
        let index = *f.path_index.get_or_insert(0);
        if index >= f.paths.len() {
            return Err(parse_error("path_index", format!("no path with index {index}")));
        }
    }
    if mirror {
        f.z_min_m.get_or_insert(DEFAULT_Z_MIN);
    }
    Ok(())
}

/// Parses and validates scenario JSON text against a species database.
pub fn parse_scenario_str(text: &str, db: &[AtomSpecies]) -> Result<Scenario, CliError> {
    let value: Value = serde_json::from_str(text)
        .map_err(|e| parse_error("", format!("{e}")))?;
    scenario_from_value(value, db)
}

/// Validates an already-parsed JSON document.
pub fn scenario_from_value(value: Value, db: &[AtomSpecies]) -> Result<Scenario, CliError> {
    check_units(&value, "")?;
    let mut file: ScenarioFile = serde_path_to_error::deserialize(value).map_err(|e| {
        let path = e.path().to_string();
        parse_error(if path == "." { "" } else { &path }, e.inner().to_string())
    })?;
    check_fields(&mut file)?;
    let species = find_species(db, &file.species)?.clone();
    let scenario = Scenario { file, species };
    scenario.quadrature()?;
    scenario.prepare()?;
    Ok(scenario)
}

/// Reads and validates a scenario file.
pub fn parse_scenario(path: &Path, db: &[AtomSpecies]) -> Result<Scenario, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path.display(), e))?;
    parse_scenario_str(&text, db).map_err(|e| match e {
        CliError::Parse { path: field, message } => CliError::Parse {
            path: if field.is_empty() {
                path.display().to_string()
            } else {
                format!("{}: {field}", path.display())
            },
            message,
        },
        other => other,
    })
}
