//! Parameter sweeps over a dotted path into the canonical scenario JSON.

use casq_core::species::AtomSpecies;
use rayon::prelude::*;
use serde_json::Value;

use crate::error::CliError;
use crate::run::{run_scenario, Report};
use crate::scenario::{scenario_from_value, Scenario};

#[derive(Debug, Clone, PartialEq)]
pub enum SweepValues {
    List(Vec<f64>),
    Range { from: f64, to: f64, points: usize, log: bool },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub param: String,
    pub values: SweepValues,
}

impl SweepSpec {
    /// Parameter values in ascending order. Range endpoints are exact.
    pub fn values(&self) -> Result<Vec<f64>, CliError> {
        let mut out = match &self.values {
            SweepValues::List(v) => {
                if v.is_empty() {
                    return Err(CliError::Sweep("empty value list".into()));
                }
                v.clone()
            }
            &SweepValues::Range { from, to, points, log } => {
                if points < 2 {
                    return Err(CliError::Sweep(format!("a range needs at least 2 points, got {points}")));
                }
                if log && !(from > 0.0 && to > 0.0) {
                    return Err(CliError::Sweep(format!("log sweep needs positive endpoints, got {from} and {to}")));
                }
                let n = (points - 1) as f64;
                let (a, b) = if log { (from.log10(), to.log10()) } else { (from, to) };
                (0..points)
                    .map(|i| match i {
                        0 => from,
                        i if i == points - 1 => to,
                        i => {
                            let x = a + (b - a) * (i as f64 / n);
                            if log {
                                10f64.powf(x)
                            } else {
                                x
                            }
                        }
                    })
                    .collect()
            }
        };
        if let Some(bad) = out.iter().find(|v| !v.is_finite()) {
            return Err(CliError::Sweep(format!("non-finite parameter value {bad}")));
        }
        out.sort_by(f64::total_cmp);
        Ok(out)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub param_value: f64,
    pub outcome: Result<Report, String>,
    /// Exit code class of a failed row; 0 on success.
    pub exit_code: u8,
}

/// A parameter value with the scenario it produces.
pub type SweepCase = (f64, Result<Scenario, CliError>);

/// Mutable reference to the numeric leaf at `path`.
fn leaf<'a>(root: &'a mut Value, path: &str) -> Result<&'a mut Value, CliError> {
    let bad = |reason: String| CliError::BadParameterPath {
        path: path.to_string(),
        reason,
    };
    let mut node = root;
    for part in path.split('.') {
        node = match node {
            Value::Object(map) => map.get_mut(part).ok_or_else(|| bad(format!("no key `{part}`")))?,
            Value::Array(items) => {
                let i: usize = part.parse().map_err(|_| bad(format!("`{part}` is not an array index")))?;
                let len = items.len();
                items.get_mut(i).ok_or_else(|| bad(format!("index {i} out of range for length {len}")))?
            }
            _ => return Err(bad(format!("`{part}` descends into a scalar"))),
        };
    }
    if !node.is_number() {
        return Err(bad("target is not a number".into()));
    }
    Ok(node)
}

/// One scenario per value; fails only if the path does not resolve.
pub fn sweep_scenarios(
    scenario: &Scenario,
    spec: &SweepSpec,
    db: &[AtomSpecies],
) -> Result<Vec<SweepCase>, CliError> {
    let base = scenario.canonical_value();
    leaf(&mut base.clone(), &spec.param)?;
    Ok(spec
        .values()?
        .into_iter()
        .map(|x| {
            let mut doc = base.clone();
            let target = leaf(&mut doc, &spec.param).expect("resolved above");
            *target = if target.is_u64() && x >= 0.0 && x.fract() == 0.0 {
                Value::from(x as u64)
            } else {
                Value::from(x)
            };
            (x, scenario_from_value(doc, db))
        })
        .collect())
}

/// Runs every row on a pool of `jobs` workers. Row order follows the
/// parameter values, independent of scheduling.
pub fn sweep(scenario: &Scenario, spec: &SweepSpec, jobs: usize, db: &[AtomSpecies]) -> Result<Vec<SweepRow>, CliError> {
    let cases = sweep_scenarios(scenario, spec, db)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| CliError::Sweep(e.to_string()))?;
    Ok(pool.install(|| {
        cases
            .into_par_iter()
            .map(|(x, case)| {
                let outcome = case.and_then(|s| run_scenario(&s));
                let exit_code = match &outcome {
                    Ok(r) if !r.converged => crate::error::EXIT_NON_CONVERGENT,
                    Ok(_) => 0,
                    Err(e) => e.exit_code(),
                };
                SweepRow {
                    param_value: x,
                    outcome: outcome.map_err(|e| e.to_string()),
                    exit_code,
                }
            })
            .collect()
    }))
}

/// Runs independent scenarios on `jobs` workers, preserving input order.
pub fn run_many(scenarios: &[Scenario], jobs: usize) -> Result<Vec<Result<Report, CliError>>, CliError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| CliError::Sweep(e.to_string()))?;
    Ok(pool.install(|| scenarios.par_iter().map(run_scenario).collect()))
}
