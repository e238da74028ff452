//! Uniform periodic grids in one dimension and complex wavefunctions on them.
//!
//! A grid of `N` points on `[x_min, x_max)` has spacing `Δx = L/N` and a dual
//! momentum lattice `p_k = kΔp`, `k ∈ [−N/2, N/2)`, with `Δp = 2πħ/L`.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{HamliftError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    n_points: usize,
    x_min: f64,
    x_max: f64,
    hbar: f64,
}

impl Grid {
    pub fn new(n_points: usize, x_min: f64, x_max: f64, hbar: f64) -> Result<Self> {
        if n_points < 16 || !n_points.is_power_of_two() {
            return Err(HamliftError::InvalidArgument(format!("grid size must be a power of two ≥ 16, got {n_points}")));
        }
        if !(x_min.is_finite() && x_max.is_finite() && x_max > x_min) {
            return Err(HamliftError::InvalidArgument(format!("need x_min < x_max, got [{x_min}, {x_max}]")));
        }
        if !(hbar > 0.0 && hbar.is_finite()) {
            return Err(HamliftError::InvalidArgument(format!("hbar must be positive, got {hbar}")));
        }
        Ok(Self { n_points, x_min, x_max, hbar })
    }

    /// Grid on `[−half_width, half_width)`.
    pub fn centered(n_points: usize, half_width: f64, hbar: f64) -> Result<Self> {
        Self::new(n_points, -half_width, half_width, hbar)
    }

    pub fn len(&self) -> usize {
        self.n_points
    }

    pub fn is_empty(&self) -> bool {
        self.n_points == 0
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn length(&self) -> f64 {
        self.x_max - self.x_min
    }

    pub fn dx(&self) -> f64 {
        self.length() / self.n_points as f64
    }

    pub fn dp(&self) -> f64 {
        2.0 * std::f64::consts::PI * self.hbar / self.length()
    }

    pub fn x(&self, j: usize) -> f64 {
        self.x_min + j as f64 * self.dx()
    }

    pub fn xs(&self) -> Vec<f64> {
        (0..self.n_points).map(|j| self.x(j)).collect()
    }

    /// Signed momentum index of FFT bin `k`.
    pub fn momentum_index(&self, k: usize) -> i64 {
        let n = self.n_points as i64;
        let k = k as i64;
        if k < n / 2 {
            k
        } else {
            k - n
        }
    }

    /// Momentum of FFT bin `k`.
    pub fn p(&self, k: usize) -> f64 {
        self.momentum_index(k) as f64 * self.dp()
    }

    /// Momenta in FFT bin order.
    pub fn ps(&self) -> Vec<f64> {
        (0..self.n_points).map(|k| self.p(k)).collect()
    }

    /// Largest `|x|` on the grid.
    pub fn max_abs_x(&self) -> f64 {
        self.x_min.abs().max(self.x(self.n_points - 1).abs())
    }

    /// Symmetric about the origin, so that the origin is a lattice point and
    /// `x_j ↦ −x_j` permutes the lattice.
    pub fn is_centered(&self) -> bool {
        (self.x_min + self.x_max).abs() <= 1e-12 * self.length()
    }

    pub fn check_same(&self, other: &Grid) -> Result<()> {
        if self != other {
            return Err(HamliftError::GridMismatch);
        }
        Ok(())
    }
}

/// Forward/inverse FFT plans for one grid size. The inverse is normalized by `1/N`.
#[derive(Clone)]
pub struct Fourier {
    n: usize,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl Fourier {
    pub fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self { n, fwd: planner.plan_fft_forward(n), inv: planner.plan_fft_inverse(n) }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// `X_k = Σ_j x_j e^{−2πijk/N}`.
    pub fn forward(&self, buf: &mut [Complex64]) {
        self.fwd.process(buf);
    }

    /// `x_j = (1/N) Σ_k X_k e^{2πijk/N}`.
    pub fn inverse(&self, buf: &mut [Complex64]) {
        self.inv.process(buf);
        let scale = 1.0 / self.n as f64;
        buf.iter_mut().for_each(|v| *v *= scale);
    }

    /// `F⁻¹ diag(mult) F` applied to `buf`.
    pub fn apply_multiplier(&self, buf: &mut [Complex64], mult: &[Complex64]) {
        self.forward(buf);
        buf.iter_mut().zip(mult).for_each(|(v, m)| *v *= m);
        self.inverse(buf);
    }
}

/// Largest entry modulus of a complex matrix.
pub fn max_modulus(m: &DMatrix<Complex64>) -> f64 {
    m.iter().map(|v| v.norm()).fold(0.0, f64::max)
}

#[derive(Debug, Clone, PartialEq)]
pub struct WaveFunction {
    grid: Grid,
    values: Vec<Complex64>,
}

/// First and second moments of a state, in the phase-space (Wigner) sense.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Moments {
    pub mean_x: f64,
    pub mean_p: f64,
    pub var_x: f64,
    pub var_p: f64,
    /// Symmetrized `½⟨XP + PX⟩ − ⟨X⟩⟨P⟩`.
    pub cov_xp: f64,
}

impl Moments {
    pub fn mean(&self) -> DVector<f64> {
        DVector::from_vec(vec![self.mean_x, self.mean_p])
    }

    pub fn covariance(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(2, 2, &[self.var_x, self.cov_xp, self.cov_xp, self.var_p])
    }
}

impl WaveFunction {
    pub fn new(grid: Grid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(HamliftError::DimensionMismatch { expected: grid.len(), got: values.len() });
        }
        if values.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(HamliftError::NonFinite("wavefunction samples".into()));
        }
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: Grid) -> Self {
        Self { grid, values: vec![Complex64::new(0.0, 0.0); grid.len()] }
    }

    pub fn from_fn(grid: Grid, f: impl Fn(f64) -> Complex64) -> Result<Self> {
        Self::new(grid, grid.xs().into_iter().map(f).collect())
    }

    /// Coherent state centered at `(x0, p0)`:
    /// `(πħ)^{−1/4} e^{−(x−x0)²/2ħ} e^{ip0(x − x0/2)/ħ}`, covariance `(ħ/2) I`.
    pub fn coherent(grid: Grid, x0: f64, p0: f64) -> Result<Self> {
        let h = grid.hbar();
        let norm = (std::f64::consts::PI * h).powf(-0.25);
        Self::from_fn(grid, |x| {
            let amp = norm * (-(x - x0).powi(2) / (2.0 * h)).exp();
            Complex64::from_polar(amp, p0 * (x - 0.5 * x0) / h)
        })
    }

    /// Pure Gaussian with mean `(x0, p0)`, position variance `var_x` and
    /// position–momentum covariance `cov_xp`; its momentum variance is then
    /// fixed by purity, `var_x var_p − cov_xp² = ħ²/4`.
    pub fn gaussian(grid: Grid, x0: f64, p0: f64, var_x: f64, cov_xp: f64) -> Result<Self> {
        if !(var_x > 0.0) {
            return Err(HamliftError::InvalidArgument(format!("position variance must be positive, got {var_x}")));
        }
        let h = grid.hbar();
        let a = h / (2.0 * var_x);
        let b = cov_xp / var_x;
        let norm = (a / (std::f64::consts::PI * h)).powf(0.25);
        Self::from_fn(grid, |x| {
            let d = x - x0;
            let amp = norm * (-a * d * d / (2.0 * h)).exp();
            Complex64::from_polar(amp, (b * d * d / 2.0 + p0 * (x - 0.5 * x0)) / h)
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn to_dvector(&self) -> DVector<Complex64> {
        DVector::from_column_slice(&self.values)
    }

    pub fn from_dvector(grid: Grid, v: &DVector<Complex64>) -> Result<Self> {
        Self::new(grid, v.iter().copied().collect())
    }

    /// `⟨self, other⟩ = Σ conj(self) other Δx`.
    pub fn inner(&self, other: &WaveFunction) -> Result<Complex64> {
        self.grid.check_same(&other.grid)?;
        let s: Complex64 = self.values.iter().zip(&other.values).map(|(a, b)| a.conj() * b).sum();
        Ok(s * self.grid.dx())
    }

    pub fn norm(&self) -> f64 {
        (self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.grid.dx()).sqrt()
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm();
        if n == 0.0 {
            return Err(HamliftError::InvalidArgument("cannot normalize the zero state".into()));
        }
        Ok(self.scaled(Complex64::new(1.0 / n, 0.0)))
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        Self { grid: self.grid, values: self.values.iter().map(|v| v * c).collect() }
    }

    pub fn add(&self, other: &WaveFunction) -> Result<Self> {
        self.grid.check_same(&other.grid)?;
        Ok(Self { grid: self.grid, values: self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect() })
    }

    pub fn sub(&self, other: &WaveFunction) -> Result<Self> {
        self.grid.check_same(&other.grid)?;
        Ok(Self { grid: self.grid, values: self.values.iter().zip(&other.values).map(|(a, b)| a - b).collect() })
    }

    /// `‖self − other‖` in L².
    pub fn distance(&self, other: &WaveFunction) -> Result<f64> {
        Ok(self.sub(other)?.norm())
    }

    /// `|⟨self, other⟩| / (‖self‖ ‖other‖)`.
    pub fn fidelity(&self, other: &WaveFunction) -> Result<f64> {
        Ok(self.inner(other)?.norm() / (self.norm() * other.norm()))
    }

    /// Largest `|ψ|` over the first and last `width` samples.
    pub fn boundary_magnitude(&self, width: usize) -> f64 {
        let n = self.values.len();
        let w = width.min(n);
        self.values[..w].iter().chain(&self.values[n - w..]).map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Spectral momentum operator `P = F⁻¹ diag(p_k) F` applied to the state.
    pub fn momentum_applied(&self, fourier: &Fourier) -> Self {
        let mult: Vec<Complex64> = self.grid.ps().into_iter().map(|p| Complex64::new(p, 0.0)).collect();
        let mut buf = self.values.clone();
        fourier.apply_multiplier(&mut buf, &mult);
        Self { grid: self.grid, values: buf }
    }

    pub fn moments(&self) -> Moments {
        let fourier = Fourier::new(self.grid.len());
        let dx = self.grid.dx();
        let xs = self.grid.xs();
        let total: f64 = self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * dx;
        let ex = |f: &dyn Fn(f64) -> f64| -> f64 {
            self.values.iter().zip(&xs).map(|(v, &x)| f(x) * v.norm_sqr()).sum::<f64>() * dx / total
        };
        let mean_x = ex(&|x| x);
        let var_x = ex(&|x| (x - mean_x).powi(2));

        let mut spec = self.values.clone();
        fourier.forward(&mut spec);
        let weight: f64 = spec.iter().map(|v| v.norm_sqr()).sum();
        let ps = self.grid.ps();
        let mean_p = spec.iter().zip(&ps).map(|(v, p)| p * v.norm_sqr()).sum::<f64>() / weight;
        let var_p = spec.iter().zip(&ps).map(|(v, p)| (p - mean_p).powi(2) * v.norm_sqr()).sum::<f64>() / weight;

        let pv = self.momentum_applied(&fourier);
        let xp: f64 = self
            .values
            .iter()
            .zip(&pv.values)
            .zip(&xs)
            .map(|((v, w), &x)| (v.conj() * w * x).re)
            .sum::<f64>()
            * dx
            / total;
        Moments { mean_x, mean_p, var_x, var_p, cov_xp: xp - mean_x * mean_p }
    }
}
