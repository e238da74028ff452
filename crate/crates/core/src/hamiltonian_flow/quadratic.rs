use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use super::spec::HamiltonianSpec;
use crate::error::{HamliftError, Result};
use crate::phase_space::{j_matrix, split_blocks, SymplecticMatrix};

pub type MatrixFn = Arc<dyn Fn(f64) -> DMatrix<f64> + Send + Sync>;

/// `H(z, t) = ½ zᵀ M(t) z` with `M = [[A, B], [Bᵀ, C]]` symmetric.
#[derive(Clone)]
pub struct QuadraticHamiltonian {
    n: usize,
    m: MatrixFn,
    time_dependent: bool,
    label: String,
}

impl fmt::Debug for QuadraticHamiltonian {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("QuadraticHamiltonian")
            .field("n", &self.n)
            .field("label", &self.label)
            .field("time_dependent", &self.time_dependent)
            .field("m(0)", &(self.m)(0.0))
            .finish()
    }
}

fn check_symmetric(m: &DMatrix<f64>) -> Result<()> {
    if !m.is_square() || m.nrows() % 2 != 0 || m.nrows() == 0 {
        return Err(HamliftError::InvalidArgument(format!("M must be 2n x 2n, got {}x{}", m.nrows(), m.ncols())));
    }
    if (m - m.transpose()).amax() > 1e-12 * (1.0 + m.amax()) {
        return Err(HamliftError::InvalidArgument("M must be symmetric".into()));
    }
    if m.iter().any(|v| !v.is_finite()) {
        return Err(HamliftError::NonFinite("quadratic Hamiltonian matrix".into()));
    }
    Ok(())
}

impl QuadraticHamiltonian {
    pub fn constant(m: DMatrix<f64>, label: impl Into<String>) -> Result<Self> {
        check_symmetric(&m)?;
        let n = m.nrows() / 2;
        Ok(Self { n, m: Arc::new(move |_| m.clone()), time_dependent: false, label: label.into() })
    }

    /// One degree of freedom: `H = ½A x² + B xp + ½C p²`.
    pub fn from_blocks1(a: f64, b: f64, c: f64, label: impl Into<String>) -> Result<Self> {
        Self::constant(DMatrix::from_row_slice(2, 2, &[a, b, b, c]), label)
    }

    /// `M(t)` supplied as a callable; symmetry is checked at `t = 0`.
    pub fn time_varying(n: usize, m: MatrixFn, label: impl Into<String>) -> Result<Self> {
        let m0 = m(0.0);
        check_symmetric(&m0)?;
        if m0.nrows() != 2 * n {
            return Err(HamliftError::DimensionMismatch { expected: 2 * n, got: m0.nrows() });
        }
        Ok(Self { n, m, time_dependent: true, label: label.into() })
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

    pub fn matrix(&self, t: f64) -> DMatrix<f64> {
        (self.m)(t)
    }

    /// `(A, B, C)` at time `t`.
    pub fn blocks(&self, t: f64) -> (DMatrix<f64>, DMatrix<f64>, DMatrix<f64>) {
        let (a, b, _, c) = split_blocks(&self.matrix(t));
        (a, b, c)
    }

    pub fn eval(&self, z: &DVector<f64>, t: f64) -> f64 {
        0.5 * z.dot(&(self.matrix(t) * z))
    }

    pub fn to_spec(&self) -> HamiltonianSpec {
        let (m1, m2, m3) = (self.m.clone(), self.m.clone(), self.m.clone());
        let (a, b, c) = self.blocks(0.0);
        let separable = !self.time_dependent && b.amax() == 0.0 && a.nrows() > 0 && c.nrows() > 0;
        HamiltonianSpec::new(
            self.n,
            self.label.clone(),
            Arc::new(move |z: &DVector<f64>, t: f64| Ok(0.5 * z.dot(&(m1(t) * z)))),
            Arc::new(move |z: &DVector<f64>, t: f64| Ok(m2(t) * z)),
            Arc::new(move |_z: &DVector<f64>, t: f64| Ok(m3(t))),
        )
        .time_dependent(self.time_dependent)
        .separable(separable)
    }

    /// `H ∘ s⁻¹`, i.e. `M → s⁻ᵀ M s⁻¹`.
    pub fn conjugate(&self, s: &SymplecticMatrix) -> QuadraticHamiltonian {
        let sinv = s.inverse().into_matrix();
        let m = self.m.clone();
        Self {
            n: self.n,
            m: Arc::new(move |t| {
                let r = sinv.transpose() * m(t) * &sinv;
                (&r + r.transpose()) * 0.5
            }),
            time_dependent: self.time_dependent,
            label: format!("{}∘s⁻¹", self.label),
        }
    }

    /// Time-`t` flow matrix `exp(t J M)` of a time-independent quadratic.
    pub fn flow_matrix(&self, t: f64) -> Result<SymplecticMatrix> {
        if self.time_dependent {
            return Err(HamliftError::InvalidArgument(
                "closed-form flow matrix needs a time-independent Hamiltonian".into(),
            ));
        }
        let gen = j_matrix(self.n) * self.matrix(0.0) * t;
        let s = gen.exp();
        SymplecticMatrix::new(s, 1e-9 * (1.0 + gen.amax()))
    }
}
