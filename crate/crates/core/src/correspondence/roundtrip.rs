use std::collections::BTreeMap;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::hamiltonian::QuantumHamiltonian;
use super::propagate::{PropagationMethod, Propagator};
use crate::error::{HamliftError, Result};
use crate::grid::{Grid, WaveFunction};
use crate::hamiltonian_flow::{integrate_variational, QuadraticHamiltonian};
use crate::metaplectic::{apply_quadratic_fourier, project_metaplectic};
use crate::phase_space::{dual_generating, symplectic_residual, PhaseSpacePoint, QuadraticGeneratingFunction};
use crate::report::Check;
use crate::weyl::{hermiticity_residual, weyl_quantize_quadratic};

/// Settings for [`correspondence_roundtrip_with`].
#[derive(Debug, Clone)]
pub struct RoundtripOptions {
    /// Defaults to eigensolve, or split-step for time-dependent `H`.
    pub method: Option<PropagationMethod>,
    /// Split-step steps.
    pub steps: usize,
    /// RK4 steps for the classical flow and its Jacobian.
    pub classical_steps: usize,
    /// The conjugating symplectic map, given by its generating function.
    pub conjugator: QuadraticGeneratingFunction,
}

impl Default for RoundtripOptions {
    fn default() -> Self {
        Self {
            method: None,
            steps: 2000,
            classical_steps: 4000,
            conjugator: QuadraticGeneratingFunction::new1(0.0, 1.0, 0.0).expect("L = 1 is invertible"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundtripParameters {
    pub n_points: usize,
    pub x_min: f64,
    pub x_max: f64,
    pub hbar: f64,
    pub time: f64,
    pub method: PropagationMethod,
    pub steps: usize,
    pub classical_steps: usize,
    pub probes: usize,
}

/// Residuals of the classical and quantum legs of the flow–propagator
/// dictionary for one quadratic Hamiltonian.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrespondenceReport {
    pub hamiltonian_label: String,
    pub classical_residuals: BTreeMap<String, f64>,
    pub quantum_residuals: BTreeMap<String, f64>,
    /// Distance between the two routes `C(s f_t s⁻¹)` and `S F_t S⁻¹`.
    pub roundtrip_residual: f64,
    pub parameters: RoundtripParameters,
    /// Every residual against its tolerance.
    pub checks: Vec<Check>,
}

impl CorrespondenceReport {
    pub fn tolerance(name: &str) -> f64 {
        match name {
            "hermiticity" => 1e-10,
            "symplecticity" | "linearity" | "closed_form" => 1e-8,
            "norm" | "ehrenfest_mean" => 1e-6,
            _ => 1e-5,
        }
    }

    /// Every residual as a check, named `classical.*`, `quantum.*` and `roundtrip`.
    fn evaluate_checks(&self) -> Vec<Check> {
        let legs = [("classical", &self.classical_residuals), ("quantum", &self.quantum_residuals)];
        legs.into_iter()
            .flat_map(|(leg, map)| {
                map.iter().map(move |(k, &v)| Check::below(format!("{leg}.{k}"), v, Self::tolerance(k)))
            })
            .chain(std::iter::once(Check::below("roundtrip", self.roundtrip_residual, Self::tolerance("roundtrip"))))
            .collect()
    }

    pub fn max_residual(&self) -> f64 {
        self.classical_residuals
            .values()
            .chain(self.quantum_residuals.values())
            .fold(self.roundtrip_residual, |a, &b| a.max(b))
    }
}

pub fn correspondence_roundtrip(
    h: &QuadraticHamiltonian,
    grid: &Grid,
    t: f64,
    probes: &[PhaseSpacePoint],
) -> Result<CorrespondenceReport> {
    correspondence_roundtrip_with(h, grid, t, probes, &RoundtripOptions::default())
}

/// Runs four legs on coherent states centered at `probes`:
/// the classical flow and its Jacobian `S_t`; `Ĥ` and `F_t`; first and
/// second moments of `F_tψ` against `f_t(z₀)` and `S_tΣ₀S_tᵀ`; and the two
/// routes `C(s f_t s⁻¹)ψ` and `S F_t S⁻¹ψ` for the conjugator `s`.
pub fn correspondence_roundtrip_with(
    h: &QuadraticHamiltonian,
    grid: &Grid,
    t: f64,
    probes: &[PhaseSpacePoint],
    options: &RoundtripOptions,
) -> Result<CorrespondenceReport> {
    if h.n() != 1 {
        return Err(HamliftError::DimensionMismatch { expected: 1, got: h.n() });
    }
    if probes.is_empty() {
        return Err(HamliftError::InvalidArgument("need at least one probe point".into()));
    }
    let method = options.method.unwrap_or(if h.is_time_dependent() {
        PropagationMethod::SplitStep
    } else {
        PropagationMethod::Eigensolve
    });

    let spec = h.to_spec();
    let mut classical = BTreeMap::new();
    let mut flows = Vec::with_capacity(probes.len());
    let (mut symp, mut lin) = (0.0f64, 0.0f64);
    let mut jacobian = DMatrix::identity(2, 2);
    for z0 in probes {
        let traj = integrate_variational(&spec, z0, 0.0, t, options.classical_steps)?;
        jacobian = traj.final_jacobian().clone();
        symp = symp.max(symplectic_residual(&jacobian)?);
        lin = lin.max((traj.final_state() - &jacobian * z0.to_vector()).amax());
        flows.push(traj.final_state().clone());
    }
    classical.insert("symplecticity".to_string(), symp);
    classical.insert("linearity".to_string(), lin);
    if !h.is_time_dependent() {
        classical.insert("closed_form".to_string(), (&jacobian - h.flow_matrix(t)?.matrix()).amax());
    }

    let mut quantum = BTreeMap::new();
    let raw = weyl_quantize_quadratic(h, grid, 0.0)?.to_dense()?;
    quantum.insert("hermiticity".to_string(), hermiticity_residual(&raw));
    let propagator = Propagator::new(QuantumHamiltonian::Quadratic(h.clone()), *grid, method, options.steps)?;
    let states: Vec<WaveFunction> =
        probes.iter().map(|z| WaveFunction::coherent(*grid, z.x[0], z.p[0])).collect::<Result<_>>()?;
    let (mut norm, mut mean, mut cov) = (0.0f64, 0.0f64, 0.0f64);
    for (psi, ft) in states.iter().zip(&flows) {
        let out = propagator.propagate(psi, t)?;
        norm = norm.max((out.norm() - psi.norm()).abs());
        let (m0, mt) = (psi.moments(), out.moments());
        mean = mean.max((mt.mean() - ft).amax());
        let expected = &jacobian * m0.covariance() * jacobian.transpose();
        cov = cov.max((mt.covariance() - expected).amax());
    }
    quantum.insert("norm".to_string(), norm);
    quantum.insert("ehrenfest_mean".to_string(), mean);
    quantum.insert("ehrenfest_covariance".to_string(), cov);

    let w = &options.conjugator;
    let s = project_metaplectic(w)?;
    let moved = Propagator::new(QuantumHamiltonian::Quadratic(h.conjugate(&s)), *grid, method, options.steps)?;
    let dual = dual_generating(w);
    let mut routes = 0.0f64;
    for psi in &states {
        let classical_route = moved.propagate(psi, t)?;
        let quantum_route = apply_quadratic_fourier(w, &propagator.propagate(&apply_quadratic_fourier(&dual, psi)?, t)?)?;
        routes = routes.max(classical_route.distance(&quantum_route)?);
    }

    let mut report = CorrespondenceReport {
        hamiltonian_label: h.label().to_string(),
        classical_residuals: classical,
        quantum_residuals: quantum,
        roundtrip_residual: routes,
        parameters: RoundtripParameters {
            n_points: grid.len(),
            x_min: grid.x_min(),
            x_max: grid.x_max(),
            hbar: grid.hbar(),
            time: t,
            method,
            steps: options.steps,
            classical_steps: options.classical_steps,
            probes: probes.len(),
        },
        checks: Vec::new(),
    };
    report.checks = report.evaluate_checks();
    Ok(report)
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;

    fn probes() -> Vec<PhaseSpacePoint> {
        vec![PhaseSpacePoint::new1(1.0, 0.0), PhaseSpacePoint::new1(-0.5, 0.8), PhaseSpacePoint::new1(0.3, -1.1)]
    }

    fn grid() -> Grid {
        Grid::centered(256, 12.0, 1.0).unwrap()
    }

    #[test]
    fn zero_hamiltonian_is_exact() {
        let h = QuadraticHamiltonian::from_blocks1(0.0, 0.0, 0.0, "zero").unwrap();
        let r = correspondence_roundtrip(&h, &grid(), 1.0, &probes()).unwrap();
        assert!(r.max_residual() < 1e-10, "{r:?}");
        assert!(r.checks.iter().all(|c| c.pass));
    }

    #[test]
    fn oscillator_period() {
        let h = QuadraticHamiltonian::from_blocks1(1.0, 0.0, 1.0, "oscillator").unwrap();
        let r = correspondence_roundtrip(&h, &grid(), 2.0 * PI, &probes()).unwrap();
        assert!(r.quantum_residuals["ehrenfest_mean"] < 1e-6, "{r:?}");
        assert!(r.quantum_residuals["ehrenfest_covariance"] < 1e-5, "{r:?}");
        assert!(r.roundtrip_residual < 1e-5, "{r:?}");
        assert!(r.checks.iter().all(|c| c.pass), "{:?}", r.checks);
    }

    #[test]
    fn shear_moves_center() {
        let h = QuadraticHamiltonian::from_blocks1(0.0, 0.0, 1.0, "free").unwrap();
        let shear = QuadraticGeneratingFunction::new1(1.0, 1.0, 0.0).unwrap();
        let options = RoundtripOptions { conjugator: shear, ..Default::default() };
        let t = 1.5;
        // The sheared intermediate states spread, so the domain is wider here.
        let g = Grid::centered(512, 16.0, 1.0).unwrap();
        let r = correspondence_roundtrip_with(&h, &g, t, &probes(), &options).unwrap();
        assert!(r.checks.iter().all(|c| c.pass), "{:?}", r.checks);
        let z = &probes()[1];
        let psi = WaveFunction::coherent(g, z.x[0], z.p[0]).unwrap();
        let p = Propagator::new(QuantumHamiltonian::Quadratic(h), g, PropagationMethod::Eigensolve, 1).unwrap();
        let m = p.propagate(&psi, t).unwrap().moments();
        assert!((m.mean_x - (z.x[0] + t * z.p[0])).abs() < 1e-6);
        assert!((m.mean_p - z.p[0]).abs() < 1e-6);
    }

    #[test]
    fn serializes_with_stable_names() {
        let h = QuadraticHamiltonian::from_blocks1(0.0, 0.0, 0.0, "zero").unwrap();
        let r = correspondence_roundtrip(&h, &Grid::centered(64, 8.0, 1.0).unwrap(), 0.5, &probes()[..1]).unwrap();
        let v = serde_json::to_value(&r).unwrap();
        for key in ["hamiltonian_label", "classical_residuals", "quantum_residuals", "roundtrip_residual", "parameters", "checks"] {
            assert!(v.get(key).is_some(), "{key}");
        }
        assert_eq!(v["parameters"]["method"], "eigensolve");
    }
}
