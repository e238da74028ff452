use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;
use rustfft::num_complex::Complex64;

use crate::error::{HamliftError, Result};
use crate::grid::Grid;
use crate::phase_space::SymplecticMatrix;

pub type SymbolFn = Arc<dyn Fn(f64, f64) -> Complex64 + Send + Sync>;

/// Values of a symbol on a grid's phase lattice: row `j` is `x_j`, column
/// `k` is the FFT-ordered momentum `p_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolTable {
    pub grid: Grid,
    pub values: DMatrix<Complex64>,
}

impl SymbolTable {
    /// Bilinear interpolation, periodic in both `x` and `p`.
    fn interpolate(&self, x: f64, p: f64) -> Complex64 {
        let n = self.grid.len();
        let fx = ((x - self.grid.x_min()) / self.grid.dx()).rem_euclid(n as f64);
        let fp = (p / self.grid.dp()).rem_euclid(n as f64);
        let (j0, k0) = (fx.floor() as usize % n, fp.floor() as usize % n);
        let (j1, k1) = ((j0 + 1) % n, (k0 + 1) % n);
        let (ax, ap) = (fx - fx.floor(), fp - fp.floor());
        let v = &self.values;
        v[(j0, k0)] * ((1.0 - ax) * (1.0 - ap))
            + v[(j1, k0)] * (ax * (1.0 - ap))
            + v[(j0, k1)] * ((1.0 - ax) * ap)
            + v[(j1, k1)] * (ax * ap)
    }
}

#[derive(Clone)]
enum SymbolKind {
    Analytic(SymbolFn),
    Sampled(Arc<SymbolTable>),
}

/// A phase-space observable `a(x, p)`, either as a callable or as a table on
/// a grid's phase lattice.
#[derive(Clone)]
pub struct Symbol {
    kind: SymbolKind,
    label: String,
    real: bool,
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match &self.kind {
            SymbolKind::Analytic(_) => "analytic",
            SymbolKind::Sampled(_) => "sampled",
        };
        f.debug_struct("Symbol").field("label", &self.label).field("kind", &kind).field("real", &self.real).finish()
    }
}

impl Symbol {
    pub fn analytic(label: impl Into<String>, f: SymbolFn) -> Self {
        Self { kind: SymbolKind::Analytic(f), label: label.into(), real: false }
    }

    /// A real-valued observable.
    pub fn real(label: impl Into<String>, f: impl Fn(f64, f64) -> f64 + Send + Sync + 'static) -> Self {
        Self {
            kind: SymbolKind::Analytic(Arc::new(move |x, p| Complex64::new(f(x, p), 0.0))),
            label: label.into(),
            real: true,
        }
    }

    pub fn sampled(label: impl Into<String>, grid: Grid, values: DMatrix<Complex64>) -> Result<Self> {
        if values.nrows() != grid.len() || values.ncols() != grid.len() {
            return Err(HamliftError::DimensionMismatch { expected: grid.len(), got: values.nrows() });
        }
        if values.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(HamliftError::NonFinite("symbol table".into()));
        }
        let real = values.iter().all(|v| v.im == 0.0);
        Ok(Self { kind: SymbolKind::Sampled(Arc::new(SymbolTable { grid, values })), label: label.into(), real })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// Whether the symbol is known to be real-valued.
    pub fn is_real(&self) -> bool {
        self.real
    }

    pub fn table(&self) -> Option<&SymbolTable> {
        match &self.kind {
            SymbolKind::Sampled(t) => Some(t),
            SymbolKind::Analytic(_) => None,
        }
    }

    pub fn eval(&self, x: f64, p: f64) -> Complex64 {
        match &self.kind {
            SymbolKind::Analytic(f) => f(x, p),
            SymbolKind::Sampled(t) => t.interpolate(x, p),
        }
    }

    /// `a(x_j, p_k)`; exact table lookup when sampled on the same grid.
    pub fn lattice_value(&self, grid: &Grid, j: usize, k: usize) -> Complex64 {
        match &self.kind {
            SymbolKind::Sampled(t) if t.grid == *grid => t.values[(j, k)],
            _ => self.eval(grid.x(j), grid.p(k)),
        }
    }

    /// Table of `a(x_j, p_k)` over the phase lattice.
    pub fn sample(&self, grid: &Grid) -> DMatrix<Complex64> {
        let n = grid.len();
        DMatrix::from_fn(n, n, |j, k| self.lattice_value(grid, j, k))
    }

    /// `a ∘ s⁻¹` for a one-degree-of-freedom symplectic matrix.
    pub fn compose_inverse(&self, s: &SymplecticMatrix) -> Result<Symbol> {
        if s.n() != 1 {
            return Err(HamliftError::DimensionMismatch { expected: 1, got: s.n() });
        }
        let inv = s.inverse().into_matrix();
        let (a, b, c, d) = (inv[(0, 0)], inv[(0, 1)], inv[(1, 0)], inv[(1, 1)]);
        let base = self.clone();
        Ok(Symbol {
            kind: SymbolKind::Analytic(Arc::new(move |x, p| base.eval(a * x + b * p, c * x + d * p))),
            label: format!("{}∘s⁻¹", self.label),
            real: self.real,
        })
    }
}

pub const SYMBOL_NAMES: &[&str] = &["one", "x", "p", "x2", "p2", "xp", "oscillator", "gaussian"];

/// Named symbols used by the CLI and the verification suite.
pub fn symbol_by_name(name: &str) -> Result<Symbol> {
    Ok(match name {
        "one" => Symbol::real("one", |_, _| 1.0),
        "x" => Symbol::real("x", |x, _| x),
        "p" => Symbol::real("p", |_, p| p),
        "x2" => Symbol::real("x2", |x, _| x * x),
        "p2" => Symbol::real("p2", |_, p| p * p),
        "xp" => Symbol::real("xp", |x, p| x * p),
        "oscillator" => Symbol::real("oscillator", |x, p| 0.5 * (x * x + p * p)),
        "gaussian" => gaussian_symbol(0.5, -0.3, 1.0),
        other => {
            return Err(HamliftError::InvalidArgument(format!(
                "unknown symbol `{other}` (known: {})",
                SYMBOL_NAMES.join(", ")
            )))
        }
    })
}

/// `exp(−((x − x0)² + (p − p0)²) / 2w²)`.
pub fn gaussian_symbol(x0: f64, p0: f64, width: f64) -> Symbol {
    let w2 = 2.0 * width * width;
    Symbol::real("gaussian", move |x, p| (-((x - x0).powi(2) + (p - p0).powi(2)) / w2).exp())
}
