//! Operations on Hamiltonians that mirror operations on their flows:
//! products, inverses, symplectic conjugation, time rescaling, and
//! compact-support truncation.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use super::integrator::flow_with_jacobian;
use super::spec::{HamiltonianSpec, ScalarFn};
use crate::error::{HamliftError, Result};
use crate::phase_space::{PhaseSpacePoint, SymplecticMatrix};

/// RK4 steps used for the auxiliary flows inside composite Hamiltonians.
/// The count is fixed (independent of `t`) so the composite stays smooth in time.
pub const DEFAULT_INNER_STEPS: usize = 64;

/// `H#K(z, t) = H(z, t) + K((f_t^H)⁻¹(z), t)`, whose flow is `f_t^H ∘ f_t^K`.
///
/// `(f_t^H)⁻¹(z)` is obtained by integrating `H` backward from `t` to `0`,
/// together with its Jacobian for the gradient.
pub fn compose_hamiltonians(h: &HamiltonianSpec, k: &HamiltonianSpec, inner_steps: usize) -> Result<HamiltonianSpec> {
    if h.n() != k.n() {
        return Err(HamliftError::DimensionMismatch { expected: h.n(), got: k.n() });
    }
    let (he, ke) = (h.clone(), k.clone());
    let eval: ScalarFn = Arc::new(move |z: &DVector<f64>, t: f64| {
        let (back, _) = flow_with_jacobian(&he, z, t, 0.0, inner_steps)?;
        Ok(he.eval(z, t)? + ke.eval(&back, t)?)
    });
    let (hg, kg) = (h.clone(), k.clone());
    let grad = Arc::new(move |z: &DVector<f64>, t: f64| {
        let (back, dback) = flow_with_jacobian(&hg, z, t, 0.0, inner_steps)?;
        Ok(hg.grad(z, t)? + dback.transpose() * kg.grad(&back, t)?)
    });
    let label = format!("{}#{}", h.label(), k.label());
    Ok(HamiltonianSpec::with_fd_hessian(h.n(), label, eval, grad).time_dependent(true))
}

/// `K(z, t) = −H(f_t^H(z), t)`, whose flow inverts that of `H`.
pub fn invert_hamiltonian(h: &HamiltonianSpec, inner_steps: usize) -> HamiltonianSpec {
    let he = h.clone();
    let eval: ScalarFn = Arc::new(move |z: &DVector<f64>, t: f64| {
        let (fwd, _) = flow_with_jacobian(&he, z, 0.0, t, inner_steps)?;
        Ok(-he.eval(&fwd, t)?)
    });
    let hg = h.clone();
    let grad = Arc::new(move |z: &DVector<f64>, t: f64| {
        let (fwd, s) = flow_with_jacobian(&hg, z, 0.0, t, inner_steps)?;
        Ok(-(s.transpose() * hg.grad(&fwd, t)?))
    });
    HamiltonianSpec::with_fd_hessian(h.n(), format!("inv({})", h.label()), eval, grad).time_dependent(true)
}

/// `K = H ∘ s⁻¹`, so that `s f_t^H s⁻¹ = f_t^K`.
pub fn conjugate_hamiltonian(h: &HamiltonianSpec, s: &SymplecticMatrix) -> Result<HamiltonianSpec> {
    if s.n() != h.n() {
        return Err(HamliftError::DimensionMismatch { expected: h.n(), got: s.n() });
    }
    let residual = crate::phase_space::symplectic_residual(s.matrix())?;
    let tolerance = 1e-9 * (1.0 + s.matrix().amax().powi(2));
    if residual > tolerance {
        return Err(HamliftError::NotSymplectic { residual, tolerance });
    }
    let sinv = s.inverse().into_matrix();
    let sinv_t = sinv.transpose();
    let (he, hg, hh) = (h.clone(), h.clone(), h.clone());
    let (s1, s2, s3) = (sinv.clone(), sinv.clone(), sinv.clone());
    let (t2, t3) = (sinv_t.clone(), sinv_t);
    Ok(HamiltonianSpec::new(
        h.n(),
        format!("{}∘s⁻¹", h.label()),
        Arc::new(move |z: &DVector<f64>, t: f64| he.eval(&(&s1 * z), t)),
        Arc::new(move |z: &DVector<f64>, t: f64| Ok(&t2 * hg.grad(&(&s2 * z), t)?)),
        Arc::new(move |z: &DVector<f64>, t: f64| Ok(&t3 * hh.hess(&(&s3 * z), t)? * &sinv)),
    )
    .time_dependent(h.is_time_dependent()))
}

/// `K(z, t) = t₀ H(z, t₀ t)`, whose time-1 map is the time-`t₀` map of `H`.
pub fn rescale_time(h: &HamiltonianSpec, t0: f64) -> Result<HamiltonianSpec> {
    if t0 == 0.0 || !t0.is_finite() {
        return Err(HamliftError::InvalidArgument(format!("time scale must be finite and non-zero, got {t0}")));
    }
    let (he, hg, hh) = (h.clone(), h.clone(), h.clone());
    let spec = HamiltonianSpec::new(
        h.n(),
        format!("{}(t₀={t0})", h.label()),
        Arc::new(move |z: &DVector<f64>, t: f64| Ok(t0 * he.eval(z, t0 * t)?)),
        Arc::new(move |z: &DVector<f64>, t: f64| Ok(hg.grad(z, t0 * t)? * t0)),
        Arc::new(move |z: &DVector<f64>, t: f64| Ok(hh.hess(z, t0 * t)? * t0)),
    )
    .time_dependent(h.is_time_dependent())
    .separable(h.is_separable());
    Ok(spec)
}

/// Smooth cutoff `Θ(z)`: one inside `inner_radius` of `center`, zero beyond
/// `outer_radius`, built from `e^{−1/u}` in between.
#[derive(Debug, Clone, PartialEq)]
pub struct BumpTruncation {
    pub center: PhaseSpacePoint,
    pub inner_radius: f64,
    pub outer_radius: f64,
}

fn bump_f(u: f64) -> (f64, f64, f64) {
    if u <= 0.0 {
        return (0.0, 0.0, 0.0);
    }
    let f = (-1.0 / u).exp();
    (f, f / (u * u), f * (1.0 / u.powi(4) - 2.0 / u.powi(3)))
}

impl BumpTruncation {
    pub fn new(center: PhaseSpacePoint, inner_radius: f64, outer_radius: f64) -> Result<Self> {
        if !(inner_radius > 0.0 && inner_radius < outer_radius && outer_radius.is_finite()) {
            return Err(HamliftError::InvalidArgument(format!(
                "need 0 < inner_radius < outer_radius, got {inner_radius}, {outer_radius}"
            )));
        }
        Ok(Self { center, inner_radius, outer_radius })
    }

    /// Radial profile and its first two derivatives in `r`.
    fn profile(&self, r: f64) -> (f64, f64, f64) {
        let w = self.outer_radius - self.inner_radius;
        let s = (r - self.inner_radius) / w;
        if s <= 0.0 {
            return (1.0, 0.0, 0.0);
        }
        if s >= 1.0 {
            return (0.0, 0.0, 0.0);
        }
        let (a, fa1, fa2) = bump_f(1.0 - s);
        let (b, db, d2b) = bump_f(s);
        let (da, d2a) = (-fa1, fa2);
        let d = a + b;
        let dd = da + db;
        let num = da * b - a * db;
        let dnum = d2a * b - a * d2b;
        let g = a / d;
        let g1 = num / (d * d);
        let g2 = (dnum * d - 2.0 * num * dd) / d.powi(3);
        (g, g1 / w, g2 / (w * w))
    }

    /// `(Θ, ∇Θ, Θ'')` at `z`.
    pub fn eval(&self, z: &DVector<f64>) -> (f64, DVector<f64>, DMatrix<f64>) {
        let dim = z.len();
        let d = z - self.center.to_vector();
        let r = d.norm();
        let (phi, dphi, d2phi) = self.profile(r);
        if dphi == 0.0 && d2phi == 0.0 {
            return (phi, DVector::zeros(dim), DMatrix::zeros(dim, dim));
        }
        let u = &d / r;
        let grad = &u * dphi;
        let uu = &u * u.transpose();
        let hess = &uu * d2phi + (DMatrix::identity(dim, dim) - &uu) * (dphi / r);
        (phi, grad, hess)
    }
}

/// `HΘ`: agrees with `H` inside the inner ball and vanishes outside the outer one.
pub fn truncate_support(h: &HamiltonianSpec, theta: &BumpTruncation) -> Result<HamiltonianSpec> {
    if theta.center.dim() != h.n() {
        return Err(HamliftError::DimensionMismatch { expected: h.n(), got: theta.center.dim() });
    }
    let (he, hg, hh) = (h.clone(), h.clone(), h.clone());
    let (c1, c2, c3) = (theta.clone(), theta.clone(), theta.clone());
    Ok(HamiltonianSpec::new(
        h.n(),
        format!("{}·Θ", h.label()),
        Arc::new(move |z: &DVector<f64>, t: f64| {
            let (th, _, _) = c1.eval(z);
            if th == 0.0 {
                return Ok(0.0);
            }
            Ok(th * he.eval(z, t)?)
        }),
        Arc::new(move |z: &DVector<f64>, t: f64| {
            let (th, dth, _) = c2.eval(z);
            if th == 0.0 {
                return Ok(DVector::zeros(z.len()));
            }
            Ok(hg.grad(z, t)? * th + dth * hg.eval(z, t)?)
        }),
        Arc::new(move |z: &DVector<f64>, t: f64| {
            let (th, dth, d2th) = c3.eval(z);
            if th == 0.0 {
                return Ok(DMatrix::zeros(z.len(), z.len()));
            }
            let g = hh.grad(z, t)?;
            let cross = &g * dth.transpose();
            Ok(hh.hess(z, t)? * th + &cross + cross.transpose() + d2th * hh.eval(z, t)?)
        }),
    )
    .time_dependent(h.is_time_dependent()))
}
