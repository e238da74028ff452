use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::error::{HamliftError, Result};
use crate::phase_space::j_matrix;

pub type ScalarFn = Arc<dyn Fn(&DVector<f64>, f64) -> Result<f64> + Send + Sync>;
pub type GradFn = Arc<dyn Fn(&DVector<f64>, f64) -> Result<DVector<f64>> + Send + Sync>;
pub type HessFn = Arc<dyn Fn(&DVector<f64>, f64) -> Result<DMatrix<f64>> + Send + Sync>;

/// Step used for finite-difference derivatives of specs that only supply
/// lower-order callables.
pub const FD_STEP: f64 = 1e-5;

/// An evaluatable Hamiltonian `H(z, t)` on ℝ²ⁿ together with `∇_z H` and
/// the Hessian `H''`.
#[derive(Clone)]
pub struct HamiltonianSpec {
    n: usize,
    eval: ScalarFn,
    grad: GradFn,
    hess: HessFn,
    dtime: Option<ScalarFn>,
    time_dependent: bool,
    separable: bool,
    label: String,
}

impl fmt::Debug for HamiltonianSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("HamiltonianSpec")
            .field("n", &self.n)
            .field("label", &self.label)
            .field("time_dependent", &self.time_dependent)
            .field("separable", &self.separable)
            .finish()
    }
}

impl HamiltonianSpec {
    pub fn new(n: usize, label: impl Into<String>, eval: ScalarFn, grad: GradFn, hess: HessFn) -> Self {
        assert!(n > 0, "phase space dimension must be positive");
        Self { n, eval, grad, hess, dtime: None, time_dependent: false, separable: false, label: label.into() }
    }

    /// Builds a spec whose Hessian is the central difference of `grad`.
    pub fn with_fd_hessian(n: usize, label: impl Into<String>, eval: ScalarFn, grad: GradFn) -> Self {
        let g = grad.clone();
        let hess: HessFn = Arc::new(move |z: &DVector<f64>, t: f64| fd_jacobian(&*g, z, t));
        Self::new(n, label, eval, grad, hess)
    }

    /// Builds a spec from `eval` alone, differentiating numerically.
    pub fn from_eval(n: usize, label: impl Into<String>, eval: ScalarFn) -> Self {
        let e = eval.clone();
        let grad: GradFn = Arc::new(move |z: &DVector<f64>, t: f64| fd_gradient(&*e, z, t));
        Self::with_fd_hessian(n, label, eval, grad)
    }

    pub fn time_dependent(mut self, yes: bool) -> Self {
        self.time_dependent = yes;
        self
    }

    /// Marks `H = T(p) + V(x)`, which the leapfrog stepper requires.
    pub fn separable(mut self, yes: bool) -> Self {
        self.separable = yes;
        self
    }

    /// Supplies `∂H/∂t` analytically.
    pub fn with_time_derivative(mut self, dtime: ScalarFn) -> Self {
        self.dtime = Some(dtime);
        self
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn is_time_dependent(&self) -> bool {
        self.time_dependent
    }

    pub fn is_separable(&self) -> bool {
        self.separable
    }

    fn check_dim(&self, z: &DVector<f64>) -> Result<()> {
        if z.len() != 2 * self.n {
            return Err(HamliftError::DimensionMismatch { expected: 2 * self.n, got: z.len() });
        }
        Ok(())
    }

    pub fn eval(&self, z: &DVector<f64>, t: f64) -> Result<f64> {
        self.check_dim(z)?;
        (self.eval)(z, t)
    }

    pub fn grad(&self, z: &DVector<f64>, t: f64) -> Result<DVector<f64>> {
        self.check_dim(z)?;
        (self.grad)(z, t)
    }

    pub fn hess(&self, z: &DVector<f64>, t: f64) -> Result<DMatrix<f64>> {
        self.check_dim(z)?;
        (self.hess)(z, t)
    }

    /// `∂H/∂t`; zero for time-independent specs, central difference when no
    /// analytic derivative was supplied.
    pub fn time_derivative(&self, z: &DVector<f64>, t: f64) -> Result<f64> {
        self.check_dim(z)?;
        if !self.time_dependent {
            return Ok(0.0);
        }
        match &self.dtime {
            Some(d) => d(z, t),
            None => {
                let h = FD_STEP;
                Ok(((self.eval)(z, t + h)? - (self.eval)(z, t - h)?) / (2.0 * h))
            }
        }
    }
}

/// `X_H(z, t) = J ∇_z H(z, t) = (∇_p H, −∇_x H)`.
pub fn hamilton_vector_field(h: &HamiltonianSpec, z: &DVector<f64>, t: f64) -> Result<DVector<f64>> {
    let g = h.grad(z, t)?;
    if g.iter().any(|v| !v.is_finite()) {
        return Err(HamliftError::NonFinite(format!("gradient of `{}` at t = {t}", h.label())));
    }
    Ok(j_matrix(h.n()) * g)
}

pub(crate) fn fd_gradient(
    f: &(dyn Fn(&DVector<f64>, f64) -> Result<f64> + Send + Sync),
    z: &DVector<f64>,
    t: f64,
) -> Result<DVector<f64>> {
    let mut g = DVector::zeros(z.len());
    let mut zp = z.clone();
    for i in 0..z.len() {
        let h = FD_STEP * (1.0 + z[i].abs());
        zp[i] = z[i] + h;
        let fp = f(&zp, t)?;
        zp[i] = z[i] - h;
        let fm = f(&zp, t)?;
        zp[i] = z[i];
        g[i] = (fp - fm) / (2.0 * h);
    }
    Ok(g)
}

/// Central-difference Jacobian of a vector field, symmetrized (the callers
/// differentiate gradients, whose Jacobians are Hessians).
pub(crate) fn fd_jacobian(
    f: &(dyn Fn(&DVector<f64>, f64) -> Result<DVector<f64>> + Send + Sync),
    z: &DVector<f64>,
    t: f64,
) -> Result<DMatrix<f64>> {
    let m = z.len();
    let mut jac = DMatrix::zeros(m, m);
    let mut zp = z.clone();
    for i in 0..m {
        let h = FD_STEP * (1.0 + z[i].abs());
        zp[i] = z[i] + h;
        let gp = f(&zp, t)?;
        zp[i] = z[i] - h;
        let gm = f(&zp, t)?;
        zp[i] = z[i];
        jac.set_column(i, &((gp - gm) / (2.0 * h)));
    }
    Ok((&jac + jac.transpose()) * 0.5)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian_flow::presets;

    #[test]
    fn vector_field_examples() {
        let osc = presets::oscillator(1);
        let z = DVector::from_vec(vec![1.0, 0.0]);
        assert_eq!(hamilton_vector_field(&osc, &z, 0.0).unwrap(), DVector::from_vec(vec![0.0, -1.0]));

        let c = presets::constant(1, 3.5);
        assert_eq!(hamilton_vector_field(&c, &z, 0.0).unwrap(), DVector::zeros(2));

        let lin = presets::linear_momentum();
        assert_eq!(hamilton_vector_field(&lin, &z, 0.0).unwrap(), DVector::from_vec(vec![1.0, 0.0]));
    }

    #[test]
    fn non_finite_gradient_is_an_error() {
        let bad = HamiltonianSpec::with_fd_hessian(
            1,
            "bad",
            Arc::new(|_z: &DVector<f64>, _t: f64| Ok(0.0)),
            Arc::new(|_z: &DVector<f64>, _t: f64| Ok(DVector::from_vec(vec![f64::NAN, 0.0]))),
        );
        let z = DVector::from_vec(vec![0.0, 0.0]);
        assert!(matches!(hamilton_vector_field(&bad, &z, 0.0), Err(HamliftError::NonFinite(_))));
    }

    #[test]
    fn dimension_checked() {
        let osc = presets::oscillator(2);
        assert!(osc.eval(&DVector::zeros(2), 0.0).is_err());
    }
}
