use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::hamiltonian::QuantumHamiltonian;
use crate::error::{HamliftError, Result};
use crate::grid::{Fourier, Grid, WaveFunction};
use crate::metaplectic::{compose_metaplectic, GridOperator};
use crate::phase_space::{factor_through, QuadraticGeneratingFunction};

/// How `e^{−itĤ/ħ}` is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PropagationMethod {
    /// Diagonalize the dense `Ĥ` once; exact up to round-off for any `t`.
    #[default]
    Eigensolve,
    /// Strang splitting: half potential kick, kinetic drift, half kick.
    SplitStep,
    /// Products of quadratic Fourier transforms covering the classical flow.
    Metaplectic,
}

impl PropagationMethod {
    pub const ALL: [PropagationMethod; 3] =
        [PropagationMethod::Eigensolve, PropagationMethod::SplitStep, PropagationMethod::Metaplectic];

    pub fn name(&self) -> &'static str {
        match self {
            PropagationMethod::Eigensolve => "eigensolve",
            PropagationMethod::SplitStep => "split_step",
            PropagationMethod::Metaplectic => "metaplectic",
        }
    }
}

impl fmt::Display for PropagationMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PropagationMethod {
    type Err = HamliftError;

    fn from_str(s: &str) -> Result<Self> {
        match s.replace('-', "_").as_str() {
            "eigensolve" => Ok(PropagationMethod::Eigensolve),
            "split_step" => Ok(PropagationMethod::SplitStep),
            "metaplectic" => Ok(PropagationMethod::Metaplectic),
            other => Err(HamliftError::InvalidArgument(format!(
                "unknown propagation method `{other}` (expected eigensolve, split_step or metaplectic)"
            ))),
        }
    }
}

#[derive(Debug, Clone)]
enum Engine {
    Eigen { vectors: DMatrix<Complex64>, values: DVector<f64> },
    Split { fourier_len: usize },
    Metaplectic { generator: DMatrix<f64> },
}

/// A Schrödinger propagator for one Hamiltonian on one grid. Eigensolve
/// factors `Ĥ` at construction so repeated calls are cheap.
#[derive(Debug, Clone)]
pub struct Propagator {
    grid: Grid,
    hamiltonian: QuantumHamiltonian,
    method: PropagationMethod,
    steps: usize,
    engine: Engine,
}

fn incompatible(method: PropagationMethod, reason: &str) -> HamliftError {
    HamliftError::IncompatibleMethod { method: method.name().into(), reason: reason.into() }
}

impl Propagator {
    /// `steps` is the number of Strang steps per call for split-step
    /// propagation; the other methods do not time-step.
    pub fn new(hamiltonian: QuantumHamiltonian, grid: Grid, method: PropagationMethod, steps: usize) -> Result<Self> {
        let engine = match method {
            PropagationMethod::Eigensolve => {
                if hamiltonian.is_time_dependent() {
                    return Err(incompatible(method, "needs a time-independent Hamiltonian"));
                }
                let eig = hamiltonian.operator_matrix(&grid, 0.0)?.symmetric_eigen();
                Engine::Eigen { vectors: eig.eigenvectors, values: eig.eigenvalues }
            }
            PropagationMethod::SplitStep => {
                if steps == 0 {
                    return Err(HamliftError::InvalidArgument("split-step propagation needs at least one step".into()));
                }
                if hamiltonian.split_parts(0.0).is_none() {
                    return Err(incompatible(method, "needs a Hamiltonian of the form T(p) + V(x)"));
                }
                Engine::Split { fourier_len: grid.len() }
            }
            PropagationMethod::Metaplectic => match &hamiltonian {
                QuantumHamiltonian::Quadratic(h) if !h.is_time_dependent() && h.n() == 1 => {
                    Engine::Metaplectic { generator: crate::phase_space::j_matrix(1) * h.matrix(0.0) }
                }
                _ => return Err(incompatible(method, "needs a time-independent quadratic Hamiltonian in one dimension")),
            },
        };
        Ok(Self { grid, hamiltonian, method, steps, engine })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn hamiltonian(&self) -> &QuantumHamiltonian {
        &self.hamiltonian
    }

    pub fn method(&self) -> PropagationMethod {
        self.method
    }

    /// `ψ(t)` from `ψ(0) = psi`.
    pub fn propagate(&self, psi: &WaveFunction, t: f64) -> Result<WaveFunction> {
        self.propagate_between(psi, 0.0, t)
    }

    /// Evolves `psi` from time `t_from` to `t_to`.
    pub fn propagate_between(&self, psi: &WaveFunction, t_from: f64, t_to: f64) -> Result<WaveFunction> {
        self.grid.check_same(psi.grid())?;
        let t = t_to - t_from;
        if t == 0.0 {
            return Ok(psi.clone());
        }
        let hbar = self.grid.hbar();
        match &self.engine {
            Engine::Eigen { vectors, values } => {
                let mut c = vectors.adjoint() * psi.to_dvector();
                for (ck, &e) in c.iter_mut().zip(values.iter()) {
                    *ck *= Complex64::from_polar(1.0, -e * t / hbar);
                }
                WaveFunction::from_dvector(self.grid, &(vectors * c))
            }
            Engine::Split { fourier_len } => self.split_step(psi, t_from, t, *fourier_len),
            Engine::Metaplectic { generator } => metaplectic_step(generator, &self.grid, t)?.apply(psi),
        }
    }

    fn split_step(&self, psi: &WaveFunction, t0: f64, t: f64, n: usize) -> Result<WaveFunction> {
        let fourier = Fourier::new(n);
        let hbar = self.grid.hbar();
        let dt = t / self.steps as f64;
        let (xs, ps) = (self.grid.xs(), self.grid.ps());
        let multipliers = |tm: f64| -> Result<(Vec<Complex64>, Vec<Complex64>)> {
            let (kin, pot) = self
                .hamiltonian
                .split_parts(tm)
                .ok_or_else(|| incompatible(self.method, "Hamiltonian lost the form T(p) + V(x)"))?;
            let kick = xs.iter().map(|&x| Complex64::from_polar(1.0, -0.5 * pot(x) * dt / hbar)).collect();
            let drift = ps.iter().map(|&p| Complex64::from_polar(1.0, -kin(p) * dt / hbar)).collect();
            Ok((kick, drift))
        };
        let fixed = if self.hamiltonian.is_time_dependent() { None } else { Some(multipliers(t0)?) };
        let mut buf = psi.values().to_vec();
        for i in 0..self.steps {
            let fresh;
            let (kick, drift) = match &fixed {
                Some(m) => m,
                None => {
                    fresh = multipliers(t0 + (i as f64 + 0.5) * dt)?;
                    &fresh
                }
            };
            buf.iter_mut().zip(kick).for_each(|(v, k)| *v *= k);
            fourier.apply_multiplier(&mut buf, drift);
            buf.iter_mut().zip(kick).for_each(|(v, k)| *v *= k);
        }
        WaveFunction::new(self.grid, buf)
    }
}

/// Largest substep norm `‖e^{δJM} − I‖_∞` for which a step is factored
/// through the Fourier transform.
const MAX_SUBSTEP_DEVIATION: f64 = 0.5;

/// `e^{−itĤ/ħ}` for quadratic `Ĥ` as a product of quadratic Fourier
/// transforms. The flow `e^{tJM}` is cut into `k` equal substeps close to the
/// identity. Each is written as `s^{W0} · (s^{W0})⁻¹ s_δ` with `W0 = (0, 1, 0)`,
/// and `(s^{W0})⁻¹ s_δ` stays free along the whole path from the identity. The
/// lift is therefore the continuous one, which is the propagator itself.
fn metaplectic_step(generator: &DMatrix<f64>, grid: &Grid, t: f64) -> Result<GridOperator> {
    let id = DMatrix::<f64>::identity(2, 2);
    let mut k = ((generator * t).amax() / MAX_SUBSTEP_DEVIATION).ceil().max(1.0) as usize;
    let sub = loop {
        let s = (generator * (t / k as f64)).exp();
        if (&s - &id).amax() < MAX_SUBSTEP_DEVIATION {
            break s;
        }
        k += 1;
    };
    let s = crate::phase_space::SymplecticMatrix::new(sub, 1e-9)?;
    let fourier = QuadraticGeneratingFunction::new1(0.0, 1.0, 0.0)?;
    let factors = factor_through(&s, &fourier)?.factors();
    let all: Vec<_> = std::iter::repeat_n(factors, k).flatten().collect();
    compose_metaplectic(*grid, &all)
}

/// One-shot propagation of `psi0` to time `t`.
pub fn propagate_schrodinger(
    hamiltonian: &QuantumHamiltonian,
    psi0: &WaveFunction,
    t: f64,
    steps: usize,
    method: PropagationMethod,
) -> Result<WaveFunction> {
    Propagator::new(hamiltonian.clone(), *psi0.grid(), method, steps)?.propagate(psi0, t)
}
