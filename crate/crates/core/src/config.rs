//! Run configuration, read from TOML.
//!
//! ```toml
//! hbar = 1.0            # positive; HAMLIFT_HBAR overrides it
//! seed = 7              # seeds probe generation
//!
//! [grid]
//! n = 256               # power of two, at least 16
//! x_min = -10.0
//! x_max = 10.0
//!
//! [integrator]
//! method = "rk4"        # or "symplectic_leapfrog"
//! steps = 4000
//!
//! [hamiltonian]
//! preset = "oscillator" # or inline quadratic blocks a, b, c for ½a x² + b xp + ½c p²
//!
//! [propagation]
//! method = "eigensolve" # or "split_step", "metaplectic"
//! steps = 2000
//!
//! [verify]
//! covariance_tau = 0.5
//! ```
//!
//! Every key is optional and falls back to the value shown.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::correspondence::{PropagationMethod, QuantumHamiltonian, SeparableHamiltonian};
use crate::error::{HamliftError, Result};
use crate::grid::Grid;
use crate::hamiltonian_flow::{presets, HamiltonianSpec, Method, QuadraticHamiltonian};

pub const HBAR_ENV: &str = "HAMLIFT_HBAR";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridConfig {
    pub n: usize,
    pub x_min: f64,
    pub x_max: f64,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self { n: 256, x_min: -10.0, x_max: 10.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct IntegratorConfig {
    pub method: Method,
    pub steps: usize,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self { method: Method::Rk4, steps: 4000 }
    }
}

/// A `[hamiltonian]` table replaces the default preset entirely, so inline
/// blocks need no `preset` to be cleared.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HamiltonianConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
}

impl Default for HamiltonianConfig {
    fn default() -> Self {
        Self { preset: Some("oscillator".into()), a: None, b: None, c: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PropagationConfig {
    pub method: PropagationMethod,
    pub steps: usize,
}

impl Default for PropagationConfig {
    fn default() -> Self {
        Self { method: PropagationMethod::Eigensolve, steps: 2000 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VerifyConfig {
    /// Ordering parameter used by the covariance checks.
    pub covariance_tau: f64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self { covariance_tau: 0.5 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub hbar: f64,
    pub seed: u64,
    pub grid: GridConfig,
    pub integrator: IntegratorConfig,
    pub hamiltonian: HamiltonianConfig,
    pub propagation: PropagationConfig,
    pub verify: VerifyConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            hbar: 1.0,
            seed: 7,
            grid: GridConfig::default(),
            integrator: IntegratorConfig::default(),
            hamiltonian: HamiltonianConfig::default(),
            propagation: PropagationConfig::default(),
            verify: VerifyConfig::default(),
        }
    }
}

/// Dotted key on the line where a parse error points, e.g. `grid.n`.
fn key_at(source: &str, offset: usize) -> String {
    let offset = offset.min(source.len());
    let line_start = source[..offset].rfind('\n').map_or(0, |i| i + 1);
    let line = source[line_start..].lines().next().unwrap_or("").trim();
    let section = source[..line_start]
        .lines()
        .rev()
        .map(str::trim)
        .find(|l| l.starts_with('['))
        .map(|l| l.trim_matches(|c| c == '[' || c == ']').trim().to_string());
    if line.starts_with('[') {
        return line.trim_matches(|c| c == '[' || c == ']').trim().to_string();
    }
    let key = line.split('=').next().unwrap_or("").trim().to_string();
    match section {
        Some(s) if !key.is_empty() => format!("{s}.{key}"),
        Some(s) => s,
        None => key,
    }
}

fn config_error(key: impl Into<String>, message: impl Into<String>) -> HamliftError {
    HamliftError::Config { key: key.into(), message: message.into() }
}

impl RunConfig {
    /// Parses and validates TOML text.
    pub fn from_toml_str(source: &str) -> Result<Self> {
        let config: RunConfig = toml::from_str(source).map_err(|e| {
            let key = e.span().map(|s| key_at(source, s.start)).unwrap_or_default();
            config_error(if key.is_empty() { "<document>".to_string() } else { key }, e.message().to_string())
        })?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| HamliftError::Io(format!("cannot read config {}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    /// Applies `HAMLIFT_HBAR` when set.
    pub fn apply_env(&mut self) -> Result<()> {
        self.apply_hbar_override(std::env::var(HBAR_ENV).ok().as_deref())
    }

    pub fn apply_hbar_override(&mut self, value: Option<&str>) -> Result<()> {
        if let Some(v) = value {
            self.hbar = v.trim().parse().map_err(|_| config_error(HBAR_ENV, format!("`{v}` is not a number")))?;
            self.validate()?;
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.hbar.is_finite() && self.hbar > 0.0) {
            return Err(config_error("hbar", format!("must be positive, got {}", self.hbar)));
        }
        let g = &self.grid;
        if g.n < 16 || !g.n.is_power_of_two() {
            return Err(config_error("grid.n", format!("must be a power of two of at least 16, got {}", g.n)));
        }
        if !(g.x_min.is_finite() && g.x_max.is_finite() && g.x_min < g.x_max) {
            return Err(config_error("grid.x_max", format!("must exceed grid.x_min ({} vs {})", g.x_max, g.x_min)));
        }
        if self.integrator.steps == 0 {
            return Err(config_error("integrator.steps", "must be at least 1"));
        }
        if self.propagation.steps == 0 {
            return Err(config_error("propagation.steps", "must be at least 1"));
        }
        let tau = self.verify.covariance_tau;
        if !(0.0..=1.0).contains(&tau) {
            return Err(config_error("verify.covariance_tau", format!("must lie in [0, 1], got {tau}")));
        }
        let h = &self.hamiltonian;
        let inline = [h.a, h.b, h.c];
        match (&h.preset, inline.iter().any(Option::is_some)) {
            (Some(_), true) => {
                return Err(config_error("hamiltonian", "give either `preset` or the blocks `a`, `b`, `c`, not both"))
            }
            (None, false) => return Err(config_error("hamiltonian", "needs `preset` or the blocks `a`, `b`, `c`")),
            (Some(name), false) if !presets::PRESET_NAMES.contains(&name.as_str()) => {
                return Err(config_error(
                    "hamiltonian.preset",
                    format!("unknown preset `{name}` (known: {})", presets::PRESET_NAMES.join(", ")),
                ))
            }
            _ => {}
        }
        if let Some((k, v)) = ["a", "b", "c"].iter().zip(inline).find(|(_, v)| v.is_some_and(|v| !v.is_finite())) {
            return Err(config_error(format!("hamiltonian.{k}"), format!("must be finite, got {v:?}")));
        }
        Ok(())
    }

    pub fn grid(&self) -> Result<Grid> {
        Grid::new(self.grid.n, self.grid.x_min, self.grid.x_max, self.hbar)
    }

    fn inline_quadratic(&self) -> Option<Result<QuadraticHamiltonian>> {
        let h = &self.hamiltonian;
        h.preset.is_none().then(|| {
            QuadraticHamiltonian::from_blocks1(h.a.unwrap_or(0.0), h.b.unwrap_or(0.0), h.c.unwrap_or(0.0), "inline")
        })
    }

    /// The classical Hamiltonian.
    pub fn classical(&self) -> Result<HamiltonianSpec> {
        match (self.inline_quadratic(), &self.hamiltonian.preset) {
            (Some(q), _) => Ok(q?.to_spec()),
            (None, Some(name)) => presets::by_name(name),
            (None, None) => Err(config_error("hamiltonian", "no Hamiltonian given")),
        }
    }

    /// The Hamiltonian as a quadratic form, for commands that need one.
    pub fn quadratic(&self) -> Result<QuadraticHamiltonian> {
        match (self.inline_quadratic(), &self.hamiltonian.preset) {
            (Some(q), _) => q,
            (None, Some(name)) => presets::quadratic_by_name(name).map_err(|e| config_error("hamiltonian.preset", e.to_string())),
            (None, None) => Err(config_error("hamiltonian", "no Hamiltonian given")),
        }
    }

    /// The Hamiltonian for Schrödinger propagation: quadratic forms and the
    /// quartic oscillator.
    pub fn quantum(&self) -> Result<QuantumHamiltonian> {
        if self.hamiltonian.preset.as_deref() == Some("quartic") {
            return Ok(SeparableHamiltonian::quartic(0.1).into());
        }
        self.quadratic().map(Into::into)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn key_of(src: &str) -> String {
        match RunConfig::from_toml_str(src) {
            Err(HamliftError::Config { key, .. }) => key,
            other => panic!("expected a config error, got {other:?}"),
        }
    }

    #[test]
    fn defaults_and_round_trip() {
        let c = RunConfig::from_toml_str("").unwrap();
        assert_eq!(c, RunConfig::default());
        let text = toml::to_string(&c).unwrap();
        assert_eq!(RunConfig::from_toml_str(&text).unwrap(), c);
        assert_eq!(c.grid().unwrap().len(), 256);
    }

    #[test]
    fn offending_keys_are_named() {
        assert_eq!(key_of("hbar = -1.0"), "hbar");
        assert_eq!(key_of("[grid]\nn = 100\n"), "grid.n");
        assert_eq!(key_of("[grid]\nn = \"big\"\n"), "grid.n");
        assert_eq!(key_of("[grid]\nn = 64\nwidth = 3\n"), "grid.width");
        assert_eq!(key_of("[integrator]\nmethod = \"euler\"\n"), "integrator.method");
        assert_eq!(key_of("[verify]\ncovariance_tau = 2.0\n"), "verify.covariance_tau");
        assert_eq!(key_of("[hamiltonian]\npreset = \"nope\"\n"), "hamiltonian.preset");
        assert_eq!(key_of("[hamiltonian]\npreset = \"free\"\na = 1.0\n"), "hamiltonian");
        assert_eq!(key_of("[bogus]\n"), "bogus");
    }

    #[test]
    fn inline_blocks_and_env_override() {
        let mut c = RunConfig::from_toml_str("[hamiltonian]\na = 1.0\nc = 2.0\n").unwrap();
        let q = c.quadratic().unwrap();
        assert_eq!(q.matrix(0.0)[(1, 1)], 2.0);
        c.apply_hbar_override(Some("0.5")).unwrap();
        assert_eq!(c.hbar, 0.5);
        assert!(matches!(c.apply_hbar_override(Some("x")), Err(HamliftError::Config { .. })));
        assert!(c.apply_hbar_override(Some("0")).is_err());
        let pendulum = RunConfig::from_toml_str("[hamiltonian]\npreset = \"pendulum\"\n").unwrap();
        assert!(pendulum.classical().is_ok());
        assert!(pendulum.quadratic().is_err());
        assert!(RunConfig::from_toml_str("[hamiltonian]\npreset = \"quartic\"\n").unwrap().quantum().is_ok());
    }
}
