use nalgebra::DMatrix;
use rustfft::num_complex::Complex64;

use crate::error::{HamliftError, Result};
use crate::grid::{Fourier, Grid};
use crate::hamiltonian_flow::QuadraticHamiltonian;
use crate::metaplectic::GridOperator;

/// Matrix of the Fourier multiplier `F⁻¹ diag(f(p_k)) F` on sample vectors.
pub fn momentum_multiplier_matrix(grid: &Grid, f: impl Fn(f64) -> f64) -> DMatrix<Complex64> {
    let n = grid.len();
    let mut col: Vec<Complex64> = grid.ps().into_iter().map(|p| Complex64::new(f(p), 0.0)).collect();
    Fourier::new(n).inverse(&mut col);
    DMatrix::from_fn(n, n, |j, l| col[(j + n - l) % n])
}

pub fn position_matrix(grid: &Grid) -> DMatrix<Complex64> {
    DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(grid.len(), grid.xs().into_iter().map(|x| Complex64::new(x, 0.0))))
}

/// Weyl operator of `H = ½A x² + B xp + ½C p²` at time `t`:
/// `Ĥ = ½A X² + B (XP + PX)/2 + ½C P²` with the spectral momentum `P = −iħ∂_x`.
/// `(XP + PX)/2` equals `X(−iħ∂_x) − iħ/2`.
pub fn weyl_quantize_quadratic(h: &QuadraticHamiltonian, grid: &Grid, t: f64) -> Result<GridOperator> {
    if h.n() != 1 {
        return Err(HamliftError::DimensionMismatch { expected: 1, got: h.n() });
    }
    let (a, b, c) = h.blocks(t);
    let (a, b, c) = (a[(0, 0)], b[(0, 0)], c[(0, 0)]);
    let n = grid.len();
    let mut m = DMatrix::<Complex64>::zeros(n, n);
    for (j, x) in grid.xs().into_iter().enumerate() {
        m[(j, j)] += Complex64::new(0.5 * a * x * x, 0.0);
    }
    if c != 0.0 {
        m += momentum_multiplier_matrix(grid, |p| 0.5 * c * p * p);
    }
    if b != 0.0 {
        let x = position_matrix(grid);
        let p = momentum_multiplier_matrix(grid, |p| p);
        let xp = &x * &p;
        m += (&xp + xp.adjoint()) * Complex64::new(0.5 * b, 0.0);
    }
    GridOperator::dense(*grid, m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::WaveFunction;
    use crate::weyl::{apply_tau_operator, hermiticity_residual, TauParameter};

    #[test]
    fn oscillator_ground_energy() {
        let g = Grid::centered(512, 12.0, 1.0).unwrap();
        let h = QuadraticHamiltonian::from_blocks1(1.0, 0.0, 1.0, "osc").unwrap();
        let m = weyl_quantize_quadratic(&h, &g, 0.0).unwrap().to_dense().unwrap();
        assert!(hermiticity_residual(&m) < 1e-12);
        let eig = m.symmetric_eigenvalues();
        let lowest = eig.iter().cloned().fold(f64::INFINITY, f64::min);
        assert!((lowest - 0.5).abs() < 1e-6, "{lowest}");
    }

    #[test]
    fn dilation_generator_on_gaussian() {
        let g = Grid::centered(256, 10.0, 1.0).unwrap();
        let h = QuadraticHamiltonian::from_blocks1(0.0, 1.0, 0.0, "xp").unwrap();
        let op = weyl_quantize_quadratic(&h, &g, 0.0).unwrap();
        let psi = WaveFunction::from_fn(g, |x| Complex64::new((-x * x / 2.0).exp(), 0.0)).unwrap();
        let out = op.apply(&psi).unwrap();
        // −iħ(xψ' + ψ/2) with ψ' = −xψ
        let expected = WaveFunction::from_fn(g, |x| Complex64::new(0.0, -(0.5 - x * x)) * (-x * x / 2.0).exp()).unwrap();
        assert!(out.distance(&expected).unwrap() < 1e-10);
    }

    #[test]
    fn position_only_is_multiplication() {
        let g = Grid::centered(64, 8.0, 1.0).unwrap();
        let h = QuadraticHamiltonian::from_blocks1(3.0, 0.0, 0.0, "x2").unwrap();
        let m = weyl_quantize_quadratic(&h, &g, 0.0).unwrap().to_dense().unwrap();
        for j in 0..64 {
            for l in 0..64 {
                let expected = if j == l { 1.5 * g.x(j).powi(2) } else { 0.0 };
                assert!((m[(j, l)] - Complex64::new(expected, 0.0)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn agrees_with_weyl_kernel() {
        let g = Grid::centered(64, 8.0, 1.0).unwrap();
        let h = QuadraticHamiltonian::from_blocks1(0.7, -0.4, 1.3, "q").unwrap();
        let op = weyl_quantize_quadratic(&h, &g, 0.0).unwrap();
        let psi = WaveFunction::coherent(g, 0.4, -0.6).unwrap();
        let sym = crate::weyl::Symbol::real("q", |x, p| 0.35 * x * x - 0.4 * x * p + 0.65 * p * p);
        let a = apply_tau_operator(&sym, TauParameter::WEYL, &psi).unwrap();
        assert!(op.apply(&psi).unwrap().distance(&a).unwrap() < 1e-10);
    }
}
