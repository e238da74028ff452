use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rustfft::num_complex::Complex64;

use crate::error::{HamliftError, Result};
use crate::grid::Grid;
use crate::hamiltonian_flow::QuadraticHamiltonian;
use crate::metaplectic::GridOperator;
use crate::weyl::{momentum_multiplier_matrix, symbol_to_kernel, weyl_quantize_quadratic, Symbol, TauParameter};

pub type KineticFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;
pub type PotentialFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// `H = T(p, t) + V(x, t)`, the form split-step propagation needs.
#[derive(Clone)]
pub struct SeparableHamiltonian {
    label: String,
    kinetic: KineticFn,
    potential: PotentialFn,
    time_dependent: bool,
}

impl SeparableHamiltonian {
    pub fn new(label: impl Into<String>, kinetic: KineticFn, potential: PotentialFn) -> Self {
        Self { label: label.into(), kinetic, potential, time_dependent: false }
    }

    pub fn time_dependent(mut self, yes: bool) -> Self {
        self.time_dependent = yes;
        self
    }

    /// `½p² + λx⁴`.
    pub fn quartic(lambda: f64) -> Self {
        Self::new("quartic", Arc::new(|p, _| 0.5 * p * p), Arc::new(move |x, _| lambda * x.powi(4)))
    }

    pub fn kinetic(&self, p: f64, t: f64) -> f64 {
        (self.kinetic)(p, t)
    }

    pub fn potential(&self, x: f64, t: f64) -> f64 {
        (self.potential)(x, t)
    }

    /// Weyl symbol `T(p) + V(x)` at `t = 0`.
    pub fn symbol(&self) -> Symbol {
        let (k, v) = (self.kinetic.clone(), self.potential.clone());
        Symbol::real(self.label.clone(), move |x, p| k(p, 0.0) + v(x, 0.0))
    }
}

impl fmt::Debug for SeparableHamiltonian {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SeparableHamiltonian")
            .field("label", &self.label)
            .field("time_dependent", &self.time_dependent)
            .finish()
    }
}

/// A Hamiltonian to be quantized and propagated on a grid.
#[derive(Debug, Clone)]
pub enum QuantumHamiltonian {
    Quadratic(QuadraticHamiltonian),
    Separable(SeparableHamiltonian),
    /// A time-independent Weyl symbol.
    Symbol(Symbol),
}

impl From<QuadraticHamiltonian> for QuantumHamiltonian {
    fn from(h: QuadraticHamiltonian) -> Self {
        QuantumHamiltonian::Quadratic(h)
    }
}

impl From<SeparableHamiltonian> for QuantumHamiltonian {
    fn from(h: SeparableHamiltonian) -> Self {
        QuantumHamiltonian::Separable(h)
    }
}

impl From<Symbol> for QuantumHamiltonian {
    fn from(a: Symbol) -> Self {
        QuantumHamiltonian::Symbol(a)
    }
}

impl QuantumHamiltonian {
    pub fn label(&self) -> &str {
        match self {
            QuantumHamiltonian::Quadratic(h) => h.label(),
            QuantumHamiltonian::Separable(h) => &h.label,
            QuantumHamiltonian::Symbol(a) => a.label(),
        }
    }

    pub fn is_time_dependent(&self) -> bool {
        match self {
            QuantumHamiltonian::Quadratic(h) => h.is_time_dependent(),
            QuantumHamiltonian::Separable(h) => h.time_dependent,
            QuantumHamiltonian::Symbol(_) => false,
        }
    }

    /// Dense `Ĥ(t)` on `grid`, symmetrized to be exactly Hermitian.
    pub fn operator_matrix(&self, grid: &Grid, t: f64) -> Result<DMatrix<Complex64>> {
        let m = match self {
            QuantumHamiltonian::Quadratic(h) => weyl_quantize_quadratic(h, grid, t)?.to_dense()?,
            QuantumHamiltonian::Separable(h) => {
                let v = DVector::from_iterator(
                    grid.len(),
                    grid.xs().into_iter().map(|x| Complex64::new(h.potential(x, t), 0.0)),
                );
                momentum_multiplier_matrix(grid, |p| h.kinetic(p, t)) + DMatrix::from_diagonal(&v)
            }
            QuantumHamiltonian::Symbol(a) => symbol_to_kernel(a, TauParameter::WEYL, grid).operator_matrix(),
        };
        if m.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(HamliftError::NonFinite(format!("operator of {}", self.label())));
        }
        Ok((&m + m.adjoint()) * Complex64::new(0.5, 0.0))
    }

    pub fn operator(&self, grid: &Grid, t: f64) -> Result<GridOperator> {
        GridOperator::dense(*grid, self.operator_matrix(grid, t)?)
    }

    /// `(T, V)` at time `t` when `H` has the split form.
    pub(crate) fn split_parts(&self, t: f64) -> Option<(Box<dyn Fn(f64) -> f64 + '_>, Box<dyn Fn(f64) -> f64 + '_>)> {
        match self {
            QuantumHamiltonian::Quadratic(h) if h.n() == 1 => {
                let (a, b, c) = h.blocks(t);
                (b[(0, 0)] == 0.0).then(|| {
                    let (a, c) = (a[(0, 0)], c[(0, 0)]);
                    (
                        Box::new(move |p: f64| 0.5 * c * p * p) as Box<dyn Fn(f64) -> f64>,
                        Box::new(move |x: f64| 0.5 * a * x * x) as Box<dyn Fn(f64) -> f64>,
                    )
                })
            }
            QuantumHamiltonian::Separable(h) => Some((Box::new(move |p| h.kinetic(p, t)), Box::new(move |x| h.potential(x, t)))),
            _ => None,
        }
    }
}
