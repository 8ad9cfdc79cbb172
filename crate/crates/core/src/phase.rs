use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::quadrature::IntegralResult;

/// A phase in radians with its quadrature error and named contributions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseResult {
    pub value: f64,
    pub error_estimate: f64,
    pub converged: bool,
    pub evaluations: usize,
    pub breakdown: BTreeMap<String, f64>,
    pub warnings: Vec<String>,
}

impl PhaseResult {
    /// Exact value with no quadrature behind it.
    pub fn exact(value: f64) -> Self {
        PhaseResult {
            value,
            error_estimate: 0.0,
            converged: true,
            evaluations: 0,
            breakdown: BTreeMap::new(),
            warnings: Vec::new(),
        }
    }

    /// `scale * integral`.
    pub fn from_integral(integral: &IntegralResult, scale: f64) -> Self {
        PhaseResult {
            value: scale * integral.value,
            error_estimate: scale.abs() * integral.error_estimate,
            converged: integral.converged,
            evaluations: integral.evaluations,
            breakdown: BTreeMap::new(),
            warnings: Vec::new(),
        }
    }

    pub fn with_term(mut self, name: &str, value: f64) -> Self {
        self.breakdown.insert(name.to_string(), value);
        self
    }
}
