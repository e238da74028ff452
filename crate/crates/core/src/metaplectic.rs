//! Quadratic Fourier transforms `S^W` on a one-dimensional grid:
//!
//! `S^W ψ(x) = (2πiħ)^{−1/2} i^m √|L| ∫ e^{iW(x, x')/ħ} ψ(x') dx'`.
//!
//! The integral is a Riemann sum over the grid. Expanding
//! `x_j x_l` on the lattice turns the sum into a chirp convolution,
//! evaluated by FFT (Bluestein's algorithm).

use std::f64::consts::PI;

use nalgebra::DMatrix;
use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{HamliftError, Result};
use crate::grid::{Grid, WaveFunction};
use crate::phase_space::{generating_to_symplectic, QuadraticGeneratingFunction, SymplecticMatrix};

/// How the oscillatory sum is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum QuadratureMode {
    /// Chirp multiplication and FFT convolution, `O(N log N)`.
    #[default]
    ChirpZ,
    /// Plain `O(N²)` sum; kept as a cross-check.
    Direct,
}

fn scalar_triple(w: &QuadraticGeneratingFunction) -> Result<(f64, f64, f64)> {
    if w.n() != 1 {
        return Err(HamliftError::DimensionMismatch { expected: 1, got: w.n() });
    }
    Ok((w.p[(0, 0)], w.l[(0, 0)], w.q[(0, 0)]))
}

/// `(2πiħ)^{−1/2} i^m √|L|`.
fn prefactor(w: &QuadraticGeneratingFunction, hbar: f64) -> Complex64 {
    let l = w.l[(0, 0)];
    let modulus = (l.abs() / (2.0 * PI * hbar)).sqrt();
    let phase = -PI / 4.0 + w.maslov as f64 * PI / 2.0;
    Complex64::from_polar(modulus, phase)
}

/// Errors when the chirps `e^{iPx²/2ħ}`, `e^{−iLxx'/ħ}`, `e^{iQx'²/2ħ}` have
/// local frequencies beyond the grid's Nyquist limit `π/Δx`.
pub fn check_nyquist(w: &QuadraticGeneratingFunction, grid: &Grid) -> Result<()> {
    let (p, l, q) = scalar_triple(w)?;
    let freq = (p.abs() + l.abs() + q.abs()) * grid.max_abs_x() / grid.hbar();
    let limit = PI / grid.dx();
    if freq >= limit {
        return Err(HamliftError::Aliasing(format!(
            "chirp frequency {freq:.4} exceeds grid Nyquist limit {limit:.4}; refine the grid or shrink the domain"
        )));
    }
    Ok(())
}

pub fn apply_quadratic_fourier(w: &QuadraticGeneratingFunction, psi: &WaveFunction) -> Result<WaveFunction> {
    apply_quadratic_fourier_with(w, psi, QuadratureMode::ChirpZ)
}

pub fn apply_quadratic_fourier_with(
    w: &QuadraticGeneratingFunction,
    psi: &WaveFunction,
    mode: QuadratureMode,
) -> Result<WaveFunction> {
    let grid = *psi.grid();
    check_nyquist(w, &grid)?;
    let out = match mode {
        QuadratureMode::ChirpZ => chirp_z(w, psi)?,
        QuadratureMode::Direct => direct(w, psi)?,
    };
    WaveFunction::new(grid, out)
}

fn direct(w: &QuadraticGeneratingFunction, psi: &WaveFunction) -> Result<Vec<Complex64>> {
    let (p, l, q) = scalar_triple(w)?;
    let grid = psi.grid();
    let h = grid.hbar();
    let xs = grid.xs();
    let c = prefactor(w, h) * grid.dx();
    Ok(xs
        .iter()
        .map(|&x| {
            let s: Complex64 = xs
                .iter()
                .zip(psi.values())
                .map(|(&y, v)| v * Complex64::from_polar(1.0, (0.5 * p * x * x - l * x * y + 0.5 * q * y * y) / h))
                .sum();
            c * s
        })
        .collect())
}

fn chirp_z(w: &QuadraticGeneratingFunction, psi: &WaveFunction) -> Result<Vec<Complex64>> {
    let (p, l, q) = scalar_triple(w)?;
    let grid = psi.grid();
    let n = grid.len();
    let (h, a, d) = (grid.hbar(), grid.x_min(), grid.dx());
    let alpha = l * d * d / h;
    let m = 2 * n;

    // x_j x_l = a² + ad(j + l) + d² jl and jl = (j² + l² − (j − l)²)/2.
    let mut input = vec![Complex64::new(0.0, 0.0); m];
    for (idx, v) in psi.values().iter().enumerate() {
        let (j, x) = (idx as f64, grid.x(idx));
        input[idx] = v * Complex64::from_polar(1.0, (0.5 * q * x * x - l * a * d * j) / h - 0.5 * alpha * j * j);
    }
    let mut chirp = vec![Complex64::new(0.0, 0.0); m];
    for k in 0..n {
        let c = Complex64::from_polar(1.0, 0.5 * alpha * (k as f64).powi(2));
        chirp[k] = c;
        if k > 0 {
            chirp[m - k] = c;
        }
    }
    let mut planner = FftPlanner::new();
    let fwd = planner.plan_fft_forward(m);
    let inv = planner.plan_fft_inverse(m);
    fwd.process(&mut input);
    fwd.process(&mut chirp);
    input.iter_mut().zip(&chirp).for_each(|(u, c)| *u *= c);
    inv.process(&mut input);

    let c = prefactor(w, h) * d / m as f64;
    Ok((0..n)
        .map(|idx| {
            let (j, x) = (idx as f64, grid.x(idx));
            let post = Complex64::from_polar(1.0, (0.5 * p * x * x - l * a * a - l * a * d * j) / h - 0.5 * alpha * j * j);
            c * post * input[idx]
        })
        .collect())
}

/// The symplectic matrix covered by `S^W`.
pub fn project_metaplectic(w: &QuadraticGeneratingFunction) -> Result<SymplecticMatrix> {
    generating_to_symplectic(w)
}

/// A linear operator on grid wavefunctions.
#[derive(Debug, Clone)]
pub enum GridOperator {
    /// Acts on sample vectors by matrix multiplication.
    Dense { grid: Grid, matrix: DMatrix<Complex64> },
    /// Product `S^{W_1} ⋯ S^{W_k}`; the last factor acts first.
    Metaplectic { grid: Grid, factors: Vec<QuadraticGeneratingFunction> },
}

impl GridOperator {
    pub fn identity(grid: Grid) -> Self {
        GridOperator::Dense { grid, matrix: DMatrix::identity(grid.len(), grid.len()) }
    }

    pub fn dense(grid: Grid, matrix: DMatrix<Complex64>) -> Result<Self> {
        if matrix.nrows() != grid.len() || matrix.ncols() != grid.len() {
            return Err(HamliftError::DimensionMismatch { expected: grid.len(), got: matrix.nrows() });
        }
        Ok(GridOperator::Dense { grid, matrix })
    }

    pub fn grid(&self) -> &Grid {
        match self {
            GridOperator::Dense { grid, .. } | GridOperator::Metaplectic { grid, .. } => grid,
        }
    }

    pub fn apply(&self, psi: &WaveFunction) -> Result<WaveFunction> {
        self.grid().check_same(psi.grid())?;
        match self {
            GridOperator::Dense { grid, matrix } => WaveFunction::from_dvector(*grid, &(matrix * psi.to_dvector())),
            GridOperator::Metaplectic { factors, .. } => {
                let mut out = psi.clone();
                for w in factors.iter().rev() {
                    out = apply_quadratic_fourier(w, &out)?;
                }
                Ok(out)
            }
        }
    }

    /// Matrix of the operator acting on sample vectors.
    pub fn to_dense(&self) -> Result<DMatrix<Complex64>> {
        match self {
            GridOperator::Dense { matrix, .. } => Ok(matrix.clone()),
            GridOperator::Metaplectic { grid, .. } => {
                let n = grid.len();
                let mut m = DMatrix::zeros(n, n);
                for l in 0..n {
                    let mut e = WaveFunction::zeros(*grid);
                    e.values_mut()[l] = Complex64::new(1.0, 0.0);
                    let col = self.apply(&e)?;
                    for (j, v) in col.values().iter().enumerate() {
                        m[(j, l)] = *v;
                    }
                }
                Ok(m)
            }
        }
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &GridOperator) -> Result<GridOperator> {
        self.grid().check_same(other.grid())?;
        let grid = *self.grid();
        match (self, other) {
            (GridOperator::Metaplectic { factors: a, .. }, GridOperator::Metaplectic { factors: b, .. }) => {
                Ok(GridOperator::Metaplectic { grid, factors: a.iter().chain(b).cloned().collect() })
            }
            _ => Ok(GridOperator::Dense { grid, matrix: self.to_dense()? * other.to_dense()? }),
        }
    }

    /// Symplectic matrix covered by a metaplectic product.
    pub fn projection(&self) -> Result<SymplecticMatrix> {
        match self {
            GridOperator::Metaplectic { factors, .. } => {
                let mut s = SymplecticMatrix::identity(1);
                for w in factors {
                    s = s.compose(&generating_to_symplectic(w)?);
                }
                Ok(s)
            }
            GridOperator::Dense { .. } => {
                Err(HamliftError::InvalidArgument("dense operators carry no symplectic projection".into()))
            }
        }
    }
}

/// `S^{W_1} ⋯ S^{W_k}` as a factored operator.
pub fn compose_metaplectic(grid: Grid, ops: &[QuadraticGeneratingFunction]) -> Result<GridOperator> {
    if ops.is_empty() {
        return Err(HamliftError::InvalidArgument("need at least one generating function".into()));
    }
    for w in ops {
        scalar_triple(w)?;
        check_nyquist(w, &grid)?;
    }
    Ok(GridOperator::Metaplectic { grid, factors: ops.to_vec() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phase_space::dual_generating;

    fn grid() -> Grid {
        Grid::centered(256, 10.0, 1.0).unwrap()
    }

    fn probe(g: Grid) -> WaveFunction {
        let a = WaveFunction::coherent(g, 1.0, -0.5).unwrap();
        let b = WaveFunction::gaussian(g, -1.2, 0.8, 0.7, 0.2).unwrap();
        a.add(&b.scaled(Complex64::new(0.3, 0.6))).unwrap()
    }

    #[test]
    fn chirp_matches_direct() {
        let g = grid();
        let psi = probe(g);
        for (p, l, q) in [(0.0, 1.0, 0.0), (0.4, -1.3, 0.7), (-0.2, 0.6, 0.1)] {
            let w = QuadraticGeneratingFunction::new1(p, l, q).unwrap();
            let a = apply_quadratic_fourier_with(&w, &psi, QuadratureMode::ChirpZ).unwrap();
            let b = apply_quadratic_fourier_with(&w, &psi, QuadratureMode::Direct).unwrap();
            assert!(a.distance(&b).unwrap() < 1e-11);
        }
    }

    #[test]
    fn fourier_of_gaussian() {
        // ∫ e^{−ixy/ħ} e^{−y²/2ħ} dy = √(2πħ) e^{−x²/2ħ}, so the prefactor leaves e^{−iπ/4}.
        let g = grid();
        let psi = WaveFunction::from_fn(g, |x| Complex64::new((-x * x / 2.0).exp(), 0.0)).unwrap();
        let w = QuadraticGeneratingFunction::new1(0.0, 1.0, 0.0).unwrap();
        let out = apply_quadratic_fourier(&w, &psi).unwrap();
        let phase = Complex64::from_polar(1.0, -PI / 4.0);
        for (o, v) in out.values().iter().zip(psi.values()) {
            assert!((o - phase * v).norm() < 1e-12);
        }
    }

    #[test]
    fn dual_inverts_and_preserves_norm() {
        let g = grid();
        let psi = probe(g).normalized().unwrap();
        let w = QuadraticGeneratingFunction::new1(0.3, -0.9, -0.5).unwrap();
        let fwd = apply_quadratic_fourier(&w, &psi).unwrap();
        assert!((fwd.norm() - 1.0).abs() < 1e-10);
        let back = apply_quadratic_fourier(&dual_generating(&w), &fwd).unwrap();
        assert!(back.distance(&psi).unwrap() < 1e-10);
    }

    #[test]
    fn double_fourier_is_parity() {
        let g = grid();
        let psi = probe(g).normalized().unwrap();
        let w = QuadraticGeneratingFunction::new1(0.0, 1.0, 0.0).unwrap();
        let twice = apply_quadratic_fourier(&w, &apply_quadratic_fourier(&w, &psi).unwrap()).unwrap();
        let n = g.len();
        let parity = WaveFunction::new(g, (0..n).map(|j| psi.values()[(n - j) % n]).collect()).unwrap();
        assert!((twice.inner(&parity).unwrap().norm() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn aliasing_rejected() {
        let g = Grid::centered(64, 10.0, 1.0).unwrap();
        let w = QuadraticGeneratingFunction::new1(5.0, 1.0, 0.0).unwrap();
        let psi = WaveFunction::coherent(g, 0.0, 0.0).unwrap();
        assert!(matches!(apply_quadratic_fourier(&w, &psi), Err(HamliftError::Aliasing(_))));
    }

    #[test]
    fn gaussian_covariance_transport() {
        let g = Grid::centered(512, 12.0, 1.0).unwrap();
        let psi = WaveFunction::gaussian(g, 0.0, 0.0, 0.8, 0.1).unwrap();
        let sigma = psi.moments().covariance();
        for (p, l, q) in [(1.0, 1.0, 1.0), (0.3, -0.8, 0.2)] {
            let w = QuadraticGeneratingFunction::new1(p, l, q).unwrap();
            let s = project_metaplectic(&w).unwrap();
            let out = apply_quadratic_fourier(&w, &psi).unwrap();
            let expected = s.matrix() * &sigma * s.matrix().transpose();
            assert!((out.moments().covariance() - expected).amax() < 1e-9);
        }
    }

    #[test]
    fn operator_composition() {
        let g = Grid::centered(128, 12.0, 1.0).unwrap();
        let w = QuadraticGeneratingFunction::new1(0.2, 0.7, -0.1).unwrap();
        let op = compose_metaplectic(g, &[w.clone(), dual_generating(&w)]).unwrap();
        let psi = WaveFunction::coherent(g, 0.5, 0.5).unwrap();
        let d = op.apply(&psi).unwrap().distance(&psi).unwrap();
        assert!(d < 1e-10, "{d}");
        assert!((op.projection().unwrap().matrix() - DMatrix::identity(2, 2)).amax() < 1e-12);

        let single = compose_metaplectic(g, &[w.clone()]).unwrap();
        let dense = GridOperator::dense(g, single.to_dense().unwrap()).unwrap();
        let a = dense.apply(&psi).unwrap();
        let b = apply_quadratic_fourier(&w, &psi).unwrap();
        assert!(a.distance(&b).unwrap() < 1e-12);
        let both = dense.compose(&compose_metaplectic(g, &[dual_generating(&w)]).unwrap()).unwrap();
        assert!(both.apply(&psi).unwrap().distance(&psi).unwrap() < 1e-10);

        let other = Grid::centered(64, 12.0, 1.0).unwrap();
        assert!(matches!(single.compose(&GridOperator::identity(other)), Err(HamliftError::GridMismatch)));
    }
}
