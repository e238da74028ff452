//! τ-quantization on a grid. With the momentum lattice dual to the position
//! grid, the kernel of `Op_τ(a)` is
//!
//! `K(x_j, x_l) = (1/NΔx) Σ_k e^{2πik(j−l)/N} a((1−τ)x_j + τx_l, p_k)`
//!
//! and `Op_τ(a)ψ(x_j) = Σ_l K(x_j, x_l) ψ(x_l) Δx`.

use std::collections::HashMap;
use std::f64::consts::PI;

use log::warn;
use nalgebra::DMatrix;
use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::symbol::Symbol;
use crate::error::{HamliftError, Result};
use crate::grid::{Fourier, Grid, WaveFunction};
use crate::metaplectic::GridOperator;

/// Ordering parameter `τ ∈ [0, 1]`; `τ = ½` is Weyl quantization.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TauParameter(f64);

impl TauParameter {
    pub const WEYL: TauParameter = TauParameter(0.5);

    pub fn new(tau: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&tau) {
            return Err(HamliftError::InvalidArgument(format!("tau must lie in [0, 1], got {tau}")));
        }
        Ok(Self(tau))
    }

    pub fn value(&self) -> f64 {
        self.0
    }

    /// `(a, q)` with `τ = a / 2^q` for `q ≤ 6`.
    fn dyadic(&self) -> Option<(i64, u32)> {
        (0..=6u32).find_map(|q| {
            let scaled = self.0 * f64::from(1u32 << q);
            (scaled.fract() == 0.0).then_some((scaled as i64, q))
        })
    }
}

/// Kernel matrix `K(x_j, x_l)` of a τ-operator.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelMatrix {
    pub grid: Grid,
    pub tau: TauParameter,
    pub values: DMatrix<Complex64>,
}

impl KernelMatrix {
    /// Matrix acting on sample vectors: `K Δx`.
    pub fn operator_matrix(&self) -> DMatrix<Complex64> {
        &self.values * Complex64::new(self.grid.dx(), 0.0)
    }

    pub fn to_operator(&self) -> GridOperator {
        GridOperator::Dense { grid: self.grid, matrix: self.operator_matrix() }
    }

    /// `max |M − M†|` for `M = K Δx`; zero for self-adjoint operators.
    pub fn hermiticity_residual(&self) -> f64 {
        hermiticity_residual(&self.operator_matrix())
    }
}

pub fn hermiticity_residual(m: &DMatrix<Complex64>) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for j in 0..n {
        for l in j..n {
            worst = worst.max((m[(j, l)] - m[(l, j)].conj()).norm());
        }
    }
    worst
}

fn symbol_column(a: &Symbol, grid: &Grid, x: f64, lattice_row: Option<usize>) -> Vec<Complex64> {
    (0..grid.len())
        .map(|k| match lattice_row {
            Some(j) => a.lattice_value(grid, j, k),
            None => a.eval(x, grid.p(k)),
        })
        .collect()
}

fn warn_if_aliased(a: &Symbol, grid: &Grid) {
    let nyquist = grid.len() / 2;
    let mut edge = 0.0f64;
    let mut peak = 0.0f64;
    for j in (0..grid.len()).step_by(8) {
        edge = edge.max(a.lattice_value(grid, j, nyquist).norm());
        peak = peak.max(a.lattice_value(grid, j, 0).norm());
    }
    if edge > 1e-8 * peak.max(1.0) {
        warn!("symbol `{}` does not decay at the momentum cutoff (|a| = {edge:.3e}); expect aliasing", a.label());
    }
}

/// Kernel of `Op_τ(a)` on `grid`.
pub fn symbol_to_kernel(a: &Symbol, tau: TauParameter, grid: &Grid) -> KernelMatrix {
    warn_if_aliased(a, grid);
    let n = grid.len();
    let mut values = DMatrix::zeros(n, n);
    match tau.dyadic() {
        Some((num, q)) => {
            // Evaluation points lie on the lattice refined by 2^q: key = 2^q j − num (j − l).
            let fourier = Fourier::new(n);
            let den = 1i64 << q;
            let mut cache: HashMap<i64, Vec<Complex64>> = HashMap::new();
            for j in 0..n {
                for l in 0..n {
                    let d = j as i64 - l as i64;
                    let key = den * j as i64 - num * d;
                    let col = cache.entry(key).or_insert_with(|| {
                        let lattice_row = (key % den == 0).then_some((key / den) as usize);
                        let x = grid.x_min() + key as f64 / den as f64 * grid.dx();
                        let mut col = symbol_column(a, grid, x, lattice_row);
                        fourier.inverse(&mut col);
                        col
                    });
                    values[(j, l)] = col[d.rem_euclid(n as i64) as usize] / grid.dx();
                }
            }
        }
        None => {
            let t = tau.value();
            let ps = grid.ps();
            let scale = 1.0 / (n as f64 * grid.dx());
            for j in 0..n {
                for l in 0..n {
                    let x = (1.0 - t) * grid.x(j) + t * grid.x(l);
                    let phase = 2.0 * PI * (j as f64 - l as f64) / n as f64;
                    let s: Complex64 = ps
                        .iter()
                        .enumerate()
                        .map(|(k, &p)| a.eval(x, p) * Complex64::from_polar(1.0, phase * grid.momentum_index(k) as f64))
                        .sum();
                    values[(j, l)] = s * scale;
                }
            }
        }
    }
    KernelMatrix { grid: *grid, tau, values }
}

/// Recovers `a_τ(x_j, p_k) = ∫ e^{−ip_k y/ħ} K(x_j + τy, x_j − (1−τ)y) dy`.
///
/// For `τ ∈ {0, 1}` the sheared points are lattice points. For `τ = ½` the
/// `y`-step is `2Δx`, which keeps them on the lattice but folds momenta with
/// period `NΔp/2`, so only `|p| < NΔp/4` is recovered and the rest is set to
/// zero. Other `τ` use bilinear interpolation of `K`.
pub fn kernel_to_symbol(kernel: &KernelMatrix) -> Result<Symbol> {
    let grid = kernel.grid;
    let n = grid.len();
    let tau = kernel.tau.value();
    let fourier = Fourier::new(n);
    let k = &kernel.values;
    let last = (n - 1) as f64;
    // Bilinear read inside the grid; `None` when the pair leaves it.
    let at = |r: f64, c: f64| -> Option<Complex64> {
        if !(0.0..=last).contains(&r) || !(0.0..=last).contains(&c) {
            return None;
        }
        let (r0, c0) = (r.floor() as usize, c.floor() as usize);
        let (r1, c1) = ((r0 + 1).min(n - 1), (c0 + 1).min(n - 1));
        let (ar, ac) = (r - r.floor(), c - c.floor());
        Some(
            k[(r0, c0)] * ((1.0 - ar) * (1.0 - ac))
                + k[(r1, c0)] * (ar * (1.0 - ac))
                + k[(r0, c1)] * ((1.0 - ar) * ac)
                + k[(r1, c1)] * (ar * ac),
        )
    };
    // The kernel is periodic in j − l, so a separation class may be read at
    // any representative whose pair stays on the grid. Classes with no such
    // pair lie where the symbol is not recoverable and are left at zero.
    let read = |j: f64, m: i64, t: f64| -> Complex64 {
        [0, -(n as i64), n as i64]
            .into_iter()
            .find_map(|shift| {
                let m = (m + shift) as f64;
                at(j + t * m, j - (1.0 - t) * m)
            })
            .unwrap_or_default()
    };
    let mut table = DMatrix::zeros(n, n);
    let half = n as i64 / 2;
    for j in 0..n {
        let mut buf = vec![Complex64::new(0.0, 0.0); n];
        if tau == 0.5 {
            let dy = 2.0 * grid.dx();
            for m in -(half / 2)..(half / 2) {
                buf[(2 * m).rem_euclid(n as i64) as usize] = read(j as f64, 2 * m, 0.5) * dy;
            }
        } else {
            let dy = grid.dx();
            for m in -half..half {
                buf[m.rem_euclid(n as i64) as usize] = read(j as f64, m, tau) * dy;
            }
        }
        fourier.forward(&mut buf);
        for (kk, v) in buf.into_iter().enumerate() {
            // Even separations only see a(p) + a(p + P/2); keep the central band.
            let in_band = tau != 0.5 || (-(half / 2)..half / 2).contains(&grid.momentum_index(kk));
            table[(j, kk)] = if in_band { v } else { Complex64::new(0.0, 0.0) };
        }
    }
    Symbol::sampled(format!("symbol(τ={tau})"), grid, table)
}

/// `Op_τ(a) ψ` through the τ-kernel.
pub fn apply_tau_operator(a: &Symbol, tau: TauParameter, psi: &WaveFunction) -> Result<WaveFunction> {
    let kernel = symbol_to_kernel(a, tau, psi.grid());
    kernel.to_operator().apply(psi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weyl::symbol::{gaussian_symbol, symbol_by_name};

    fn grid() -> Grid {
        Grid::centered(64, 8.0, 1.0).unwrap()
    }

    #[test]
    fn tau_range() {
        assert!(TauParameter::new(-0.1).is_err());
        assert!(TauParameter::new(1.5).is_err());
        assert_eq!(TauParameter::new(0.25).unwrap().dyadic(), Some((1, 2)));
        assert_eq!(TauParameter::new(0.3).unwrap().dyadic(), None);
    }

    #[test]
    fn constant_symbol_gives_delta() {
        let g = grid();
        for tau in [0.0, 0.3, 0.5, 1.0] {
            let k = symbol_to_kernel(&symbol_by_name("one").unwrap(), TauParameter::new(tau).unwrap(), &g);
            let expected = DMatrix::<Complex64>::identity(64, 64) / Complex64::new(g.dx(), 0.0);
            assert!(crate::grid::max_modulus(&(k.values - expected)) < 1e-10);
        }
    }

    #[test]
    fn position_symbol_is_diagonal() {
        let g = grid();
        let a = Symbol::real("cos", |x, _| x.cos());
        for tau in [0.0, 0.25, 0.5, 0.3, 1.0] {
            let k = symbol_to_kernel(&a, TauParameter::new(tau).unwrap(), &g);
            for j in 0..64 {
                for l in 0..64 {
                    let expected = if j == l { g.x(j).cos() / g.dx() } else { 0.0 };
                    assert!((k.values[(j, l)] - expected).norm() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn momentum_symbol_on_plane_wave() {
        let g = grid();
        let kk = 3;
        let psi = WaveFunction::from_fn(g, |x| Complex64::from_polar(1.0, g.p(kk) * x / g.hbar())).unwrap();
        let out = apply_tau_operator(&symbol_by_name("p").unwrap(), TauParameter::WEYL, &psi).unwrap();
        for (o, v) in out.values().iter().zip(psi.values()) {
            assert!((o - v * g.p(kk)).norm() < 1e-10);
        }
    }

    #[test]
    fn ordering_of_xp() {
        let g = grid();
        let psi = WaveFunction::coherent(g, 0.5, 0.2).unwrap();
        let xp = symbol_by_name("xp").unwrap();
        let r = |t: f64| apply_tau_operator(&xp, TauParameter::new(t).unwrap(), &psi).unwrap();
        let (a0, a1, ah) = (r(0.0), r(1.0), r(0.5));
        let avg = a0.add(&a1).unwrap().scaled(Complex64::new(0.5, 0.0));
        assert!(ah.distance(&avg).unwrap() < 1e-10);
        assert!(a0.distance(&a1).unwrap() > 0.5);
    }

    #[test]
    fn roundtrip_exact_taus() {
        let g = Grid::centered(128, 8.0, 1.0).unwrap();
        let a = gaussian_symbol(0.5, -0.3, 1.0);
        for tau in [0.0, 0.5, 1.0] {
            let k = symbol_to_kernel(&a, TauParameter::new(tau).unwrap(), &g);
            let back = kernel_to_symbol(&k).unwrap();
            let err = crate::grid::max_modulus(&(back.sample(&g) - a.sample(&g)));
            assert!(err < 1e-10, "tau {tau}: {err}");
        }
        let id0 = KernelMatrix {
            grid: g,
            tau: TauParameter::new(0.0).unwrap(),
            values: DMatrix::identity(128, 128) / Complex64::new(g.dx(), 0.0),
        };
        let one = kernel_to_symbol(&id0).unwrap();
        assert!(one.sample(&g).iter().all(|v| (v - Complex64::new(1.0, 0.0)).norm() < 1e-10));
    }

    #[test]
    fn hermiticity() {
        let g = grid();
        let xp = symbol_by_name("xp").unwrap();
        assert!(symbol_to_kernel(&xp, TauParameter::WEYL, &g).hermiticity_residual() < 1e-10);
        assert!(symbol_to_kernel(&xp, TauParameter::new(0.0).unwrap(), &g).hermiticity_residual() > 1e-3);
    }
}
