//! Dispatch of a validated scenario to exactly one compute operation.

use std::collections::BTreeMap;

use casq_core::constants;
use casq_core::dce;
use casq_core::mirror_phases;
use casq_core::sagnac;
use casq_core::PhaseResult;
use serde::{Deserialize, Serialize};

use crate::error::CliError;
use crate::scenario::{Prepared, Scenario};

/// Result of one scenario run. Contains no timing so that reruns are
/// byte-identical.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub toolkit_version: String,
    pub constants_hash: String,
    /// Fully qualified name of the compute operation behind `value`.
    pub operation: String,
    pub kind: String,
    pub species: String,
    pub value: f64,
    /// `rad` or `per_s`.
    pub unit: String,
    pub error_estimate: f64,
    pub converged: bool,
    pub breakdown: BTreeMap<String, f64>,
    pub warnings: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spectrum: Option<Vec<[f64; 2]>>,
}

impl Report {
    fn new(scenario: &Scenario, operation: &str, unit: &str, phase: PhaseResult) -> Self {
        Report {
            toolkit_version: casq_core::VERSION.to_string(),
            constants_hash: constants::table_hash(),
            operation: operation.to_string(),
            kind: scenario.kind().as_str().to_string(),
            species: scenario.species.name().to_string(),
            value: phase.value,
            unit: unit.to_string(),
            error_estimate: phase.error_estimate,
            converged: phase.converged,
            breakdown: phase.breakdown,
            warnings: phase.warnings,
            spectrum: None,
        }
    }
}

pub fn run_scenario(scenario: &Scenario) -> Result<Report, CliError> {
    use crate::scenario::ScenarioKind as K;
    let spec = scenario.quadrature()?;
    let species = &scenario.species;
    let rad = |op: &str, phase: PhaseResult| Ok(Report::new(scenario, op, "rad", phase));
    match (scenario.kind(), scenario.prepare()?) {
        (K::QuasiStatic, Prepared::Mirror { scenario: s, path_index }) => rad(
            "mirror_phases::quasi_static_phase",
            mirror_phases::quasi_static_phase(&s, path_index, &spec)?,
        ),
        (K::MotionalMirror, Prepared::Mirror { scenario: s, path_index }) => rad(
            "mirror_phases::motional_phase_mirror",
            mirror_phases::motional_phase_mirror(&s, path_index, &spec)?,
        ),
        (K::Nonlocal, Prepared::Mirror { scenario: s, .. }) => {
            rad("mirror_phases::nonlocal_phase", mirror_phases::nonlocal_phase(&s, &spec)?)
        }
        (K::TotalMirror, Prepared::Mirror { scenario: s, .. }) => rad(
            "mirror_phases::total_phase_difference",
            mirror_phases::total_phase_difference(&s, &spec)?,
        ),
        (K::Sagnac, Prepared::Sagnac { particle, trajectory }) => rad(
            "sagnac::sagnac_phase",
            sagnac::sagnac_phase(species, &particle, &trajectory, &spec)?,
        ),
        (K::SagnacStraightLine, Prepared::SagnacStraightLine { particle, y }) => {
            let value = sagnac::sagnac_phase_straightline(species, &particle, y)?;
            let ell = sagnac::ell_omega(species, &particle)?;
            rad(
                "sagnac::sagnac_phase_straightline",
                PhaseResult::exact(value).with_term("ell_omega_m", ell).with_term("y_m", y),
            )
        }
        (K::SagnacSymmetric, Prepared::SagnacSymmetric { particle, y1 }) => rad(
            "sagnac::sagnac_total_symmetric",
            sagnac::sagnac_total_symmetric(species, &particle, y1)?,
        ),
        (K::DceClosed, Prepared::Dce(params)) => {
            let gamma = dce::dce_rate_closed(&params);
            let phase = PhaseResult::exact(gamma)
                .with_term("pair_rate", 0.5 * gamma)
                .with_term("coefficient", dce::CLOSED_FORM_COEFFICIENT)
                .with_term("v_max_m_per_s", params.v_max());
            Ok(Report::new(scenario, "dce::dce_rate_closed", "per_s", phase))
        }
        (K::DceNumeric, Prepared::Dce(params)) => {
            let r = dce::dce_rate_numeric(&params, &spec)?;
            let phase = PhaseResult {
                value: r.gamma_total,
                error_estimate: r.error_estimate,
                converged: r.converged,
                evaluations: r.evaluations,
                breakdown: BTreeMap::new(),
                warnings: Vec::new(),
            }
            .with_term("pair_rate", r.pair_rate)
            .with_term("coefficient", r.coefficient)
            .with_term("closed_form", dce::dce_rate_closed(&params))
            .with_term("v_max_m_per_s", params.v_max());
            let mut report = Report::new(scenario, "dce::dce_rate_numeric", "per_s", phase);
            report.spectrum = Some(r.spectrum.into_iter().map(|(w, s)| [w, s]).collect());
            Ok(report)
        }
        (kind, _) => unreachable!("prepare() matches kind {}", kind.as_str()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::parse_scenario_str;
    use casq_core::species::bundled_species_db;
    use std::f64::consts::PI;

    fn run(text: &str) -> Report {
        run_scenario(&parse_scenario_str(text, &bundled_species_db()).unwrap()).unwrap()
    }

    #[test]
    fn straight_line_at_rotation_length() {
        let r = run(r#"{
            "kind": "sagnac_straight_line", "species": "Rb87-D2", "y_ell": 1.0,
            "particle": {"alpha0_F_m2": 1e-30, "resonance_rad_per_s": 2e16, "omega_rad_per_s": [0, 0, 1e6]}
        }"#);
        assert!((r.value.abs() - 15.0 * PI / 16.0).abs() < 1e-12, "{}", r.value);
        assert_eq!(r.operation, "sagnac::sagnac_phase_straightline");
        assert_eq!(r.unit, "rad");
    }

    #[test]
    fn identical_paths_have_no_nonlocal_phase() {
        let r = run(r#"{
            "kind": "nonlocal", "species": "Rb87-D2",
            "window": {"t_start_s": 0.0, "t_end_s": 1e-6},
            "paths": [{"motion": "linear", "h_m": 1e-7, "v_m_per_s": 0.01},
                      {"motion": "linear", "h_m": 1e-7, "v_m_per_s": 0.01}]
        }"#);
        assert!(r.value.abs() <= casq_core::QuadratureSpec::default().abs_tol);
    }

    #[test]
    fn reports_are_deterministic() {
        let text = r#"{
            "kind": "quasi_static", "species": "Cs133-D2",
            "window": {"t_start_s": 0.0, "t_end_s": 1e-4},
            "paths": [{"motion": "harmonic", "center_m": 2e-7, "amplitude_m": 5e-8, "omega_rad_per_s": 1e5}]
        }"#;
        let (a, b) = (run(text), run(text));
        assert_eq!(a, b);
        assert_eq!(a.value.to_bits(), b.value.to_bits());
    }

    #[test]
    fn dce_numeric_matches_closed_form() {
        let r = run(r#"{
            "kind": "dce_numeric", "species": "Rb87-D2",
            "oscillation": {"r_max_m": 1e-10, "omega_cm_rad_per_s": 1e15},
            "quadrature": {"rel_tol": 1e-8}
        }"#);
        let closed = r.breakdown["closed_form"];
        assert!(((r.value - closed) / closed).abs() < 1e-6);
        assert_eq!(r.spectrum.as_ref().unwrap().len(), dce::SPECTRUM_SAMPLES);
    }
}
