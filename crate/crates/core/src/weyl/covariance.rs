//! Symplectic covariance of τ-quantization: `Op_τ(a ∘ s⁻¹) = S Op_τ(a) S⁻¹`
//! for the metaplectic `S` over `s`, which holds exactly when `τ = ½`.

use serde::{Deserialize, Serialize};

use super::kernel::{symbol_to_kernel, TauParameter};
use super::symbol::Symbol;
use crate::error::Result;
use crate::grid::{Grid, WaveFunction};
use crate::metaplectic::{apply_quadratic_fourier, project_metaplectic};
use crate::phase_space::{dual_generating, QuadraticGeneratingFunction};

/// Ten coherent states on two rings around the origin.
pub fn covariance_probes(grid: &Grid) -> Result<Vec<WaveFunction>> {
    (0..10)
        .map(|i| {
            let r = if i < 5 { 0.6 } else { 1.3 };
            let angle = i as f64 * 2.0 * std::f64::consts::PI / 5.0 + if i < 5 { 0.0 } else { 0.4 };
            WaveFunction::coherent(*grid, r * angle.cos(), r * angle.sin())
        })
        .collect()
}

/// `max_ψ ‖Op_τ(a ∘ s⁻¹)ψ − S^W Op_τ(a) S^{W*}ψ‖` over [`covariance_probes`];
/// `w = None` stands for the identity.
pub fn covariance_residual(
    a: &Symbol,
    w: Option<&QuadraticGeneratingFunction>,
    tau: TauParameter,
    grid: &Grid,
) -> Result<f64> {
    let probes = covariance_probes(grid)?;
    let plain = symbol_to_kernel(a, tau, grid).to_operator();
    let Some(w) = w else {
        let mut worst = 0.0f64;
        for psi in &probes {
            let out = plain.apply(psi)?;
            worst = worst.max(out.distance(&plain.apply(psi)?)?);
        }
        return Ok(worst);
    };
    let s = project_metaplectic(w)?;
    let moved = symbol_to_kernel(&a.compose_inverse(&s)?, tau, grid).to_operator();
    let dual = dual_generating(w);
    let mut worst = 0.0f64;
    for psi in &probes {
        let lhs = moved.apply(psi)?;
        let rhs = apply_quadratic_fourier(w, &plain.apply(&apply_quadratic_fourier(&dual, psi)?)?)?;
        worst = worst.max(lhs.distance(&rhs)?);
    }
    Ok(worst)
}

/// One covariance measurement, as exported in reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CovarianceRecord {
    pub tau: f64,
    /// `[P, L, Q, m]`.
    #[serde(rename = "W")]
    pub generating_function: [f64; 4],
    pub symbol: String,
    pub residual: f64,
}

impl CovarianceRecord {
    pub fn measure(a: &Symbol, w: &QuadraticGeneratingFunction, tau: TauParameter, grid: &Grid) -> Result<Self> {
        let residual = covariance_residual(a, Some(w), tau, grid)?;
        Ok(Self {
            tau: tau.value(),
            generating_function: [w.p[(0, 0)], w.l[(0, 0)], w.q[(0, 0)], f64::from(w.maslov)],
            symbol: a.label().to_string(),
            residual,
        })
    }
}
