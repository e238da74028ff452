//! Extended phase space `ℝ²ⁿ⁺²`: time and energy adjoined as a conjugate pair
//! so that a time-dependent `H` becomes the autonomous `H̃ = H − E`.
//!
//! Coordinates are ordered `(x, E | p, t)`: the energy occupies the last
//! position slot and time the last momentum slot. With this placement the
//! extended Hamilton equations give `dt/ds = 1` and `dE/ds = ∂H/∂t`.

use std::sync::Arc;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use super::integrator::FlowMap;
use super::spec::{GradFn, HamiltonianSpec, ScalarFn};
use crate::error::{HamliftError, Result};
use crate::phase_space::PhaseSpacePoint;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtendedPoint {
    pub z: PhaseSpacePoint,
    pub t: f64,
    pub energy: f64,
}

impl ExtendedPoint {
    pub fn new(z: PhaseSpacePoint, t: f64, energy: f64) -> Result<Self> {
        if !(t.is_finite() && energy.is_finite()) {
            return Err(HamliftError::NonFinite("extended point".into()));
        }
        Ok(Self { z, t, energy })
    }

    pub fn to_vector(&self) -> DVector<f64> {
        let n = self.z.dim();
        let mut v = DVector::zeros(2 * n + 2);
        for i in 0..n {
            v[i] = self.z.x[i];
            v[n + 1 + i] = self.z.p[i];
        }
        v[n] = self.energy;
        v[2 * n + 1] = self.t;
        v
    }

    pub fn from_vector(v: &DVector<f64>) -> Result<Self> {
        if v.len() < 4 || v.len() % 2 != 0 {
            return Err(HamliftError::InvalidArgument(format!("extended vector length {} is not 2n + 2", v.len())));
        }
        let n = v.len() / 2 - 1;
        let x = v.rows(0, n).iter().copied().collect();
        let p = v.rows(n + 1, n).iter().copied().collect();
        Self::new(PhaseSpacePoint::new(x, p)?, v[2 * n + 1], v[n])
    }
}

fn split(v: &DVector<f64>, n: usize) -> (DVector<f64>, f64, f64) {
    let mut z = DVector::zeros(2 * n);
    z.rows_mut(0, n).copy_from(&v.rows(0, n));
    z.rows_mut(n, n).copy_from(&v.rows(n + 1, n));
    (z, v[2 * n + 1], v[n])
}

/// `H̃(x, E, p, t) = H(x, p, t) − E` as an autonomous Hamiltonian on `ℝ²ⁿ⁺²`.
pub fn extend_hamiltonian(h: &HamiltonianSpec) -> HamiltonianSpec {
    let n = h.n();
    let he = h.clone();
    let eval: ScalarFn = Arc::new(move |v: &DVector<f64>, _s: f64| {
        let (z, t, e) = split(v, n);
        Ok(he.eval(&z, t)? - e)
    });
    let hg = h.clone();
    let grad: GradFn = Arc::new(move |v: &DVector<f64>, _s: f64| {
        let (z, t, _) = split(v, n);
        let g = hg.grad(&z, t)?;
        let mut out = DVector::zeros(2 * n + 2);
        out.rows_mut(0, n).copy_from(&g.rows(0, n));
        out[n] = -1.0;
        out.rows_mut(n + 1, n).copy_from(&g.rows(n, n));
        out[2 * n + 1] = hg.time_derivative(&z, t)?;
        Ok(out)
    });
    HamiltonianSpec::with_fd_hessian(n + 1, format!("extended({})", h.label()), eval, grad)
}

/// Flow of `H̃` for `duration` starting from `start`.
pub fn extended_flow(h: &HamiltonianSpec, start: &ExtendedPoint, duration: f64, steps: usize) -> Result<ExtendedPoint> {
    if start.z.dim() != h.n() {
        return Err(HamliftError::DimensionMismatch { expected: h.n(), got: start.z.dim() });
    }
    let ext = extend_hamiltonian(h);
    let out = FlowMap::new(ext, 0.0, duration, steps).apply(&start.to_vector())?;
    ExtendedPoint::from_vector(&out)
}

/// Residuals of the extended-flow bookkeeping against the ordinary flow.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyBookkeeping {
    /// `|z-part − f_{t,t′}(z′)|`.
    pub position: f64,
    /// `|t-part − (t′ + duration)|`.
    pub time: f64,
    /// `|E − (E′ + H(z_t, t) − H(z′, t′))|`.
    pub energy: f64,
}

impl EnergyBookkeeping {
    pub fn max(&self) -> f64 {
        self.position.max(self.time).max(self.energy)
    }
}

pub fn energy_bookkeeping(h: &HamiltonianSpec, start: &ExtendedPoint, duration: f64, steps: usize) -> Result<EnergyBookkeeping> {
    let end = extended_flow(h, start, duration, steps)?;
    let z0 = start.z.to_vector();
    let t_end = start.t + duration;
    let zf = FlowMap::new(h.clone(), start.t, t_end, steps).apply(&z0)?;
    let expected_energy = start.energy + h.eval(&zf, t_end)? - h.eval(&z0, start.t)?;
    Ok(EnergyBookkeeping {
        position: (end.z.to_vector() - &zf).amax(),
        time: (end.t - t_end).abs(),
        energy: (end.energy - expected_energy).abs(),
    })
}
