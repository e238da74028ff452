//! Recovering a Hamiltonian from its flow.
//!
//! For a family `f_t` of symplectomorphisms with `f_0 = id`, the vector field
//! `X = (d/dt f_t)∘f_t⁻¹` is Hamiltonian and
//! `H(z, t) = H(0, t) − ∫₀¹ σ(X(uz, t), z) du`.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use super::integrator::FlowMap;
use super::spec::{HamiltonianSpec, ScalarFn};
use crate::error::{HamliftError, Result};
use crate::phase_space::sigma;

/// A one-parameter family of invertible phase-space maps `f_t`.
pub trait FlowFamily: Send + Sync {
    fn n(&self) -> usize;
    fn forward(&self, z: &DVector<f64>, t: f64) -> Result<DVector<f64>>;
    fn inverse(&self, z: &DVector<f64>, t: f64) -> Result<DVector<f64>>;
}

pub type MatrixPath = Arc<dyn Fn(f64) -> DMatrix<f64> + Send + Sync>;

/// Linear family `z ↦ s_t z`.
#[derive(Clone)]
pub struct LinearFamily {
    n: usize,
    path: MatrixPath,
}

impl LinearFamily {
    pub fn new(n: usize, path: MatrixPath) -> Result<Self> {
        let s0 = path(0.0);
        if s0.nrows() != 2 * n || s0.ncols() != 2 * n {
            return Err(HamliftError::DimensionMismatch { expected: 2 * n, got: s0.nrows() });
        }
        Ok(Self { n, path })
    }

    /// Phase-space rotation generated by `½(x² + p²)` in one degree of freedom.
    pub fn rotation() -> Self {
        let path: MatrixPath = Arc::new(|t: f64| DMatrix::from_row_slice(2, 2, &[t.cos(), t.sin(), -t.sin(), t.cos()]));
        Self { n: 1, path }
    }

    /// Shear `[[1, t], [0, 1]]` generated by `½p²`.
    pub fn shear() -> Self {
        let path: MatrixPath = Arc::new(|t: f64| DMatrix::from_row_slice(2, 2, &[1.0, t, 0.0, 1.0]));
        Self { n: 1, path }
    }

    pub fn identity(n: usize) -> Self {
        Self { n, path: Arc::new(move |_| DMatrix::identity(2 * n, 2 * n)) }
    }
}

impl FlowFamily for LinearFamily {
    fn n(&self) -> usize {
        self.n
    }

    fn forward(&self, z: &DVector<f64>, t: f64) -> Result<DVector<f64>> {
        Ok((self.path)(t) * z)
    }

    fn inverse(&self, z: &DVector<f64>, t: f64) -> Result<DVector<f64>> {
        (self.path)(t)
            .lu()
            .solve(z)
            .ok_or_else(|| HamliftError::Singular(format!("flow matrix at t = {t}")))
    }
}

/// The flow of a Hamiltonian, integrated from time 0 with a fixed step count
/// so that it varies smoothly with `t`.
#[derive(Clone)]
pub struct HamiltonianFamily {
    hamiltonian: HamiltonianSpec,
    steps: usize,
}

impl HamiltonianFamily {
    pub fn new(hamiltonian: HamiltonianSpec, steps: usize) -> Self {
        Self { hamiltonian, steps: steps.max(1) }
    }
}

impl FlowFamily for HamiltonianFamily {
    fn n(&self) -> usize {
        self.hamiltonian.n()
    }

    fn forward(&self, z: &DVector<f64>, t: f64) -> Result<DVector<f64>> {
        FlowMap::new(self.hamiltonian.clone(), 0.0, t, self.steps).apply(z)
    }

    fn inverse(&self, z: &DVector<f64>, t: f64) -> Result<DVector<f64>> {
        FlowMap::new(self.hamiltonian.clone(), t, 0.0, self.steps).apply(z)
    }
}

/// Discretization of the reconstruction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BanyagaOptions {
    /// Time window of interest; the `t`-derivative step is `window / 1024`.
    pub window: f64,
    /// Gauss–Legendre nodes for the `u`-integral.
    pub quad_nodes: usize,
    /// Largest accepted `|f_t(f_t⁻¹(w)) − w|` before the family is declared inconsistent.
    pub roundtrip_tol: f64,
}

impl Default for BanyagaOptions {
    fn default() -> Self {
        Self { window: 1.0, quad_nodes: 16, roundtrip_tol: 1e-6 }
    }
}

/// Gauss–Legendre nodes and weights on `[0, 1]`.
pub fn gauss_legendre_unit(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let (pn, pn1) = if n == 1 { (x, 1.0) } else { (p1, p0) };
            dp = n as f64 * (x * pn - pn1) / (x * x - 1.0);
            let dx = pn / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes.push(0.5 * (1.0 - x));
        weights.push(1.0 / ((1.0 - x * x) * dp * dp));
    }
    (nodes, weights)
}

/// `X(w, t) = (d/dt f_t)(f_t⁻¹(w))` by central differences in `t`.
pub fn family_vector_field(
    family: &dyn FlowFamily,
    w: &DVector<f64>,
    t: f64,
    options: &BanyagaOptions,
) -> Result<DVector<f64>> {
    let y = family.inverse(w, t)?;
    let residual = (family.forward(&y, t)? - w).amax();
    if !(residual <= options.roundtrip_tol * (1.0 + w.amax())) {
        return Err(HamliftError::InconsistentFlow { residual, time: t });
    }
    let h = options.window / 1024.0;
    Ok((family.forward(&y, t + h)? - family.forward(&y, t - h)?) / (2.0 * h))
}

/// Builds the Hamiltonian whose flow is `family`. `origin_value` supplies
/// `H(0, t)` (default 0); the reconstruction fixes `H` only up to that
/// function of time.
pub fn banyaga_reconstruct(
    family: Arc<dyn FlowFamily>,
    origin_value: Option<Arc<dyn Fn(f64) -> f64 + Send + Sync>>,
    options: BanyagaOptions,
) -> Result<HamiltonianSpec> {
    if options.quad_nodes < 8 {
        return Err(HamliftError::InvalidArgument(format!("need at least 8 quadrature nodes, got {}", options.quad_nodes)));
    }
    if !(options.window > 0.0 && options.window.is_finite()) {
        return Err(HamliftError::InvalidArgument(format!("window must be positive, got {}", options.window)));
    }
    let n = family.n();
    let (nodes, weights) = gauss_legendre_unit(options.quad_nodes);
    let eval: ScalarFn = Arc::new(move |z: &DVector<f64>, t: f64| {
        let mut integral = 0.0;
        for (u, w) in nodes.iter().zip(&weights) {
            let x = family_vector_field(&*family, &(z * *u), t, &options)?;
            integral += w * sigma(&x, z);
        }
        let base = origin_value.as_ref().map_or(0.0, |f| f(t));
        Ok(base - integral)
    });
    Ok(HamiltonianSpec::from_eval(n, "reconstructed", eval).time_dependent(true))
}
