//! Named residual checks shared by reports and the verification pipeline.

use serde::{Deserialize, Serialize};

/// A residual compared against a tolerance. Checks pass when the residual
/// is finite and strictly below the tolerance, or strictly above it for
/// negative controls.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl Check {
    /// Passes when `residual < tolerance`.
    pub fn below(name: impl Into<String>, residual: f64, tolerance: f64) -> Self {
        let pass = residual.is_finite() && residual < tolerance;
        Self { name: name.into(), residual, tolerance, pass }
    }

    /// Passes when `residual > tolerance`.
    pub fn above(name: impl Into<String>, residual: f64, tolerance: f64) -> Self {
        let pass = residual.is_finite() && residual > tolerance;
        Self { name: name.into(), residual, tolerance, pass }
    }

    pub fn failed(name: impl Into<String>, tolerance: f64) -> Self {
        Self { name: name.into(), residual: f64::NAN, tolerance, pass: false }
    }
}
