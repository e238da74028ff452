use std::fmt;
use std::sync::Arc;

use rustfft::num_complex::Complex64;

use super::propagate::Propagator;
use crate::error::{HamliftError, Result};
use crate::grid::{Grid, WaveFunction};

pub type EvolveFn = Arc<dyn Fn(f64, &WaveFunction) -> Result<WaveFunction> + Send + Sync>;

/// A one-parameter family `t ↦ F(t)` of operators on grid wavefunctions,
/// given by its action.
#[derive(Clone)]
pub struct UnitaryFamily {
    grid: Grid,
    label: String,
    evolve: EvolveFn,
}

impl fmt::Debug for UnitaryFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("UnitaryFamily").field("label", &self.label).field("grid", &self.grid).finish()
    }
}

impl UnitaryFamily {
    pub fn new(grid: Grid, label: impl Into<String>, evolve: EvolveFn) -> Self {
        Self { grid, label: label.into(), evolve }
    }

    pub fn identity(grid: Grid) -> Self {
        Self::new(grid, "identity", Arc::new(|_, psi| Ok(psi.clone())))
    }

    /// `F(t) = e^{−itĤ/ħ}` through a propagator.
    pub fn from_propagator(propagator: Propagator) -> Self {
        let grid = *propagator.grid();
        let label = format!("{} ({})", propagator.hamiltonian().label(), propagator.method());
        Self::new(grid, label, Arc::new(move |t, psi| propagator.propagate(psi, t)))
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn apply(&self, t: f64, psi: &WaveFunction) -> Result<WaveFunction> {
        self.grid.check_same(psi.grid())?;
        (self.evolve)(t, psi)
    }

    /// `max_t |‖F(t)ψ‖ − ‖ψ‖|`.
    pub fn norm_defect(&self, psi: &WaveFunction, times: &[f64]) -> Result<f64> {
        let n0 = psi.norm();
        times.iter().try_fold(0.0f64, |worst, &t| Ok(worst.max((self.apply(t, psi)?.norm() - n0).abs())))
    }

    /// `‖F(t₀ + h)ψ − F(t₀)ψ‖` for each offset `h`.
    pub fn continuity_profile(&self, psi: &WaveFunction, t0: f64, offsets: &[f64]) -> Result<Vec<f64>> {
        let base = self.apply(t0, psi)?;
        offsets.iter().map(|&h| self.apply(t0 + h, psi)?.distance(&base)).collect()
    }

    /// `‖F(s)F(t)ψ − F(s + t)ψ‖`.
    pub fn group_defect(&self, psi: &WaveFunction, s: f64, t: f64) -> Result<f64> {
        let lhs = self.apply(s, &self.apply(t, psi)?)?;
        lhs.distance(&self.apply(s + t, psi)?)
    }
}

/// Finite-difference scheme for the generator estimate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Difference {
    /// `iħ(F(Δt)ψ − ψ)/Δt`, first order.
    #[default]
    Forward,
    /// `iħ(F(Δt)ψ − F(−Δt)ψ)/2Δt`, second order.
    Central,
}

/// Estimates `Âψ` for the generator of `F(t) = e^{−itÂ/ħ}`.
pub fn stone_generator_estimate(
    family: &UnitaryFamily,
    psi: &WaveFunction,
    dt: f64,
    scheme: Difference,
) -> Result<WaveFunction> {
    if !(dt > 0.0) {
        return Err(HamliftError::InvalidArgument(format!("time step must be positive, got {dt}")));
    }
    let ih = Complex64::new(0.0, family.grid().hbar());
    let (ahead, behind, span) = match scheme {
        Difference::Forward => (family.apply(dt, psi)?, psi.clone(), dt),
        Difference::Central => (family.apply(dt, psi)?, family.apply(-dt, psi)?, 2.0 * dt),
    };
    Ok(ahead.sub(&behind)?.scaled(ih / span))
}
