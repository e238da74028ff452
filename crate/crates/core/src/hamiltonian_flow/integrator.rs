//! Fixed-step integration of Hamilton's equations and of the variational
//! equation `dS/dt = J H''(z_t, t) S`.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::spec::{hamilton_vector_field, HamiltonianSpec};
use crate::error::{HamliftError, Result};
use crate::phase_space::{j_matrix, symplectic_residual, PhaseSpacePoint};

/// States whose norm exceeds this are reported as diverged.
pub const DIVERGENCE_THRESHOLD: f64 = 1e12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    #[default]
    Rk4,
    SymplecticLeapfrog,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Rk4 => "rk4",
            Method::SymplecticLeapfrog => "symplectic_leapfrog",
        })
    }
}

impl FromStr for Method {
    type Err = HamliftError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rk4" => Ok(Method::Rk4),
            "symplectic_leapfrog" | "leapfrog" => Ok(Method::SymplecticLeapfrog),
            other => Err(HamliftError::InvalidArgument(format!("unknown integrator `{other}`"))),
        }
    }
}

/// The two-parameter map `f_{t_to, t_from}` of a Hamiltonian.
#[derive(Debug, Clone)]
pub struct FlowMap {
    pub hamiltonian: HamiltonianSpec,
    pub t_from: f64,
    pub t_to: f64,
    pub steps: usize,
    pub method: Method,
}

/// Sampled solution, one state per step including both endpoints.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<DVector<f64>>,
}

impl Trajectory {
    pub fn final_state(&self) -> &DVector<f64> {
        self.states.last().expect("trajectory holds at least the initial state")
    }
}

fn check_state(y: &DVector<f64>, t: f64) -> Result<()> {
    if y.iter().any(|v| !v.is_finite()) || y.norm() > DIVERGENCE_THRESHOLD {
        return Err(HamliftError::Divergence { time: t });
    }
    Ok(())
}

/// Classical fourth-order stepper for `ẏ = f(y, t)`.
pub(crate) fn rk4<F>(f: F, y0: &DVector<f64>, t0: f64, t1: f64, steps: usize, mut record: Option<&mut Trajectory>) -> Result<DVector<f64>>
where
    F: Fn(&DVector<f64>, f64) -> Result<DVector<f64>>,
{
    let mut y = y0.clone();
    if let Some(r) = record.as_deref_mut() {
        r.times.push(t0);
        r.states.push(y.clone());
    }
    if t0 == t1 {
        return Ok(y);
    }
    let h = (t1 - t0) / steps as f64;
    for i in 0..steps {
        let t = t0 + i as f64 * h;
        let k1 = f(&y, t)?;
        let k2 = f(&(&y + &k1 * (0.5 * h)), t + 0.5 * h)?;
        let k3 = f(&(&y + &k2 * (0.5 * h)), t + 0.5 * h)?;
        let k4 = f(&(&y + &k3 * h), t + h)?;
        y += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
        let t_next = if i + 1 == steps { t1 } else { t0 + (i + 1) as f64 * h };
        check_state(&y, t_next)?;
        if let Some(r) = record.as_deref_mut() {
            r.times.push(t_next);
            r.states.push(y.clone());
        }
    }
    Ok(y)
}

fn leapfrog(h_spec: &HamiltonianSpec, y0: &DVector<f64>, t0: f64, t1: f64, steps: usize, mut record: Option<&mut Trajectory>) -> Result<DVector<f64>> {
    let n = h_spec.n();
    let mut y = y0.clone();
    if let Some(r) = record.as_deref_mut() {
        r.times.push(t0);
        r.states.push(y.clone());
    }
    if t0 == t1 {
        return Ok(y);
    }
    let h = (t1 - t0) / steps as f64;
    for i in 0..steps {
        let g = h_spec.grad(&y, t0)?;
        for k in 0..n {
            y[n + k] -= 0.5 * h * g[k];
        }
        let g = h_spec.grad(&y, t0)?;
        for k in 0..n {
            y[k] += h * g[n + k];
        }
        let g = h_spec.grad(&y, t0)?;
        for k in 0..n {
            y[n + k] -= 0.5 * h * g[k];
        }
        let t_next = if i + 1 == steps { t1 } else { t0 + (i + 1) as f64 * h };
        check_state(&y, t_next)?;
        if let Some(r) = record.as_deref_mut() {
            r.times.push(t_next);
            r.states.push(y.clone());
        }
    }
    Ok(y)
}

impl FlowMap {
    pub fn new(hamiltonian: HamiltonianSpec, t_from: f64, t_to: f64, steps: usize) -> Self {
        Self { hamiltonian, t_from, t_to, steps, method: Method::Rk4 }
    }

    pub fn with_method(mut self, method: Method) -> Self {
        self.method = method;
        self
    }

    fn validate(&self, z0: &DVector<f64>) -> Result<()> {
        if self.steps == 0 {
            return Err(HamliftError::InvalidArgument("steps must be at least 1".into()));
        }
        if !self.t_from.is_finite() || !self.t_to.is_finite() {
            return Err(HamliftError::NonFinite("flow time window".into()));
        }
        if z0.len() != 2 * self.hamiltonian.n() {
            return Err(HamliftError::DimensionMismatch { expected: 2 * self.hamiltonian.n(), got: z0.len() });
        }
        if self.method == Method::SymplecticLeapfrog {
            if self.hamiltonian.is_time_dependent() {
                return Err(HamliftError::IncompatibleMethod {
                    method: self.method.to_string(),
                    reason: "Hamiltonian depends on time".into(),
                });
            }
            if !self.hamiltonian.is_separable() {
                return Err(HamliftError::IncompatibleMethod {
                    method: self.method.to_string(),
                    reason: "Hamiltonian is not marked separable (T(p) + V(x))".into(),
                });
            }
        }
        Ok(())
    }

    fn run(&self, z0: &DVector<f64>, record: Option<&mut Trajectory>) -> Result<DVector<f64>> {
        self.validate(z0)?;
        check_state(z0, self.t_from)?;
        match self.method {
            Method::Rk4 => {
                let h = &self.hamiltonian;
                rk4(|y, t| hamilton_vector_field(h, y, t), z0, self.t_from, self.t_to, self.steps, record)
            }
            Method::SymplecticLeapfrog => leapfrog(&self.hamiltonian, z0, self.t_from, self.t_to, self.steps, record),
        }
    }

    /// `f_{t_to, t_from}(z0)` without recording intermediate states.
    pub fn apply(&self, z0: &DVector<f64>) -> Result<DVector<f64>> {
        self.run(z0, None)
    }

    pub fn trajectory(&self, z0: &DVector<f64>) -> Result<Trajectory> {
        let mut traj = Trajectory { times: Vec::with_capacity(self.steps + 1), states: Vec::with_capacity(self.steps + 1) };
        self.run(z0, Some(&mut traj))?;
        Ok(traj)
    }
}

pub fn integrate_flow(flow: &FlowMap, z0: &PhaseSpacePoint) -> Result<(PhaseSpacePoint, Trajectory)> {
    let traj = flow.trajectory(&z0.to_vector())?;
    Ok((PhaseSpacePoint::from_vector(traj.final_state())?, traj))
}

/// `S_t = Df_t(z₀)` sampled along the base trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct JacobianTrajectory {
    pub base_point: PhaseSpacePoint,
    pub times: Vec<f64>,
    pub states: Vec<DVector<f64>>,
    pub jacobians: Vec<DMatrix<f64>>,
}

impl JacobianTrajectory {
    pub fn final_jacobian(&self) -> &DMatrix<f64> {
        self.jacobians.last().expect("at least the initial sample")
    }

    pub fn final_state(&self) -> &DVector<f64> {
        self.states.last().expect("at least the initial sample")
    }

    /// Largest `‖SᵀJS − J‖_∞` over the samples.
    pub fn max_symplectic_residual(&self) -> f64 {
        self.jacobians.iter().map(|s| symplectic_residual(s).unwrap_or(f64::INFINITY)).fold(0.0, f64::max)
    }
}

fn pack(z: &DVector<f64>, s: &DMatrix<f64>) -> DVector<f64> {
    DVector::from_iterator(z.len() + s.len(), z.iter().chain(s.iter()).copied())
}

fn unpack(y: &DVector<f64>, dim: usize) -> (DVector<f64>, DMatrix<f64>) {
    let z = DVector::from_iterator(dim, y.iter().take(dim).copied());
    let s = DMatrix::from_iterator(dim, dim, y.iter().skip(dim).copied());
    (z, s)
}

fn variational_rhs(h: &HamiltonianSpec, j: &DMatrix<f64>, y: &DVector<f64>, t: f64) -> Result<DVector<f64>> {
    let dim = j.nrows();
    let (z, s) = unpack(y, dim);
    let dz = hamilton_vector_field(h, &z, t)?;
    let ds = j * h.hess(&z, t)? * s;
    Ok(pack(&dz, &ds))
}

/// Co-integrates `z_t` and `S_t` from `t_from` to `t_to` with RK4.
pub fn integrate_variational(h: &HamiltonianSpec, z0: &PhaseSpacePoint, t_from: f64, t_to: f64, steps: usize) -> Result<JacobianTrajectory> {
    if steps == 0 {
        return Err(HamliftError::InvalidArgument("steps must be at least 1".into()));
    }
    if z0.dim() != h.n() {
        return Err(HamliftError::DimensionMismatch { expected: h.n(), got: z0.dim() });
    }
    let dim = 2 * h.n();
    let j = j_matrix(h.n());
    let y0 = pack(&z0.to_vector(), &DMatrix::identity(dim, dim));
    let mut traj = Trajectory { times: Vec::new(), states: Vec::new() };
    rk4(|y, t| variational_rhs(h, &j, y, t), &y0, t_from, t_to, steps, Some(&mut traj))?;
    let (states, jacobians) = traj.states.iter().map(|y| unpack(y, dim)).unzip();
    Ok(JacobianTrajectory { base_point: z0.clone(), times: traj.times, states, jacobians })
}

/// End point and Jacobian only.
pub(crate) fn flow_with_jacobian(h: &HamiltonianSpec, z: &DVector<f64>, t_from: f64, t_to: f64, steps: usize) -> Result<(DVector<f64>, DMatrix<f64>)> {
    let dim = 2 * h.n();
    let j = j_matrix(h.n());
    let y0 = pack(z, &DMatrix::identity(dim, dim));
    let y = rk4(|y, t| variational_rhs(h, &j, y, t), &y0, t_from, t_to, steps, None)?;
    Ok(unpack(&y, dim))
}
