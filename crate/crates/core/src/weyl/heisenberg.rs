//! Phase-space translations and the Heisenberg–Weyl form of Weyl
//! quantization, `Â = (2πħ)^{−1} ∫ a_σ(z) T̂(z) dz`.
//!
//! Both need a centered grid so that positions `x_j = (j − N/2)Δx` and
//! momenta `p_k` index the same periodic lattice.

use std::f64::consts::PI;

use log::warn;
use nalgebra::DMatrix;
use rustfft::num_complex::Complex64;

use super::symbol::Symbol;
use crate::error::{HamliftError, Result};
use crate::grid::{Fourier, Grid, WaveFunction};
use crate::phase_space::PhaseSpacePoint;

fn require_centered(grid: &Grid) -> Result<()> {
    if !grid.is_centered() {
        return Err(HamliftError::InvalidArgument("phase-space translations need a grid centered on the origin".into()));
    }
    Ok(())
}

/// Snaps `value` to the nearest multiple of `step`, warning when it moves.
fn snap(value: f64, step: f64, what: &str) -> i64 {
    let idx = (value / step).round();
    if (idx * step - value).abs() > 1e-9 * step {
        warn!("{what} {value} is off the lattice; snapped to {}", idx * step);
    }
    idx as i64
}

/// `T̂(z′)` for `z′ = (d Δx, m Δp)` in lattice units.
fn translate_lattice(psi: &WaveFunction, d: i64, m: i64) -> WaveFunction {
    let grid = *psi.grid();
    let n = grid.len() as i64;
    let (dx, dp, h) = (grid.dx(), grid.dp(), grid.hbar());
    let (xs, ps) = (d as f64 * dx, m as f64 * dp);
    let vals = psi.values();
    let out = (0..n)
        .map(|i| {
            let src = vals[(i - d).rem_euclid(n) as usize];
            src * Complex64::from_polar(1.0, ps * (grid.x(i as usize) - 0.5 * xs) / h)
        })
        .collect();
    WaveFunction::new(grid, out).expect("translation preserves finiteness")
}

/// Heisenberg–Weyl operator `T̂(z′)ψ(x) = e^{i(p′x − ½p′x′)/ħ} ψ(x − x′)`,
/// with `z′` snapped to the phase lattice and the shift taken periodically.
pub fn heisenberg_weyl(z: &PhaseSpacePoint, psi: &WaveFunction) -> Result<WaveFunction> {
    if z.dim() != 1 {
        return Err(HamliftError::DimensionMismatch { expected: 1, got: z.dim() });
    }
    let grid = psi.grid();
    require_centered(grid)?;
    let d = snap(z.x[0], grid.dx(), "translation x′");
    let m = snap(z.p[0], grid.dp(), "translation p′");
    Ok(translate_lattice(psi, d, m))
}

fn signed(idx: usize, n: usize) -> i64 {
    idx as i64 - n as i64 / 2
}

/// `a_σ(z) = (2πħ)^{−1} ∫ e^{−iσ(z, z″)/ħ} a(z″) dz″` on the phase lattice,
/// with `σ(z, z″) = p·x″ − x·p″`. The lattice version is exactly involutive.
pub fn symplectic_fourier(a: &Symbol, grid: &Grid) -> Result<Symbol> {
    require_centered(grid)?;
    let n = grid.len();
    let fourier = Fourier::new(n);
    let table = a.sample(grid);
    // Sum over p″: C[j″, j] = Σ_k″ e^{2πi s(j) k″/N} T[j″, k″].
    let mut c = DMatrix::<Complex64>::zeros(n, n);
    for jj in 0..n {
        let mut row: Vec<Complex64> = table.row(jj).iter().copied().collect();
        fourier.inverse(&mut row);
        for j in 0..n {
            let idx = signed(j, n).rem_euclid(n as i64) as usize;
            c[(jj, j)] = row[idx] * n as f64;
        }
    }
    // Sum over x″: Σ_j″ e^{−2πi k s(j″)/N} C[j″, j] = (−1)^k (FFT of C[·, j])_k.
    let mut out = DMatrix::<Complex64>::zeros(n, n);
    for j in 0..n {
        let mut col: Vec<Complex64> = c.column(j).iter().copied().collect();
        fourier.forward(&mut col);
        for (k, v) in col.into_iter().enumerate() {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            out[(j, k)] = v * (sign / n as f64);
        }
    }
    Symbol::sampled(format!("{}_σ", a.label()), *grid, out)
}

/// Weyl operator through translations: `Âψ = (1/N) Σ_{z′} a_σ(z′) T̂(z′)ψ`
/// over the phase lattice.
pub fn apply_weyl_via_hw(a: &Symbol, psi: &WaveFunction) -> Result<WaveFunction> {
    let grid = *psi.grid();
    let n = grid.len();
    let fourier = Fourier::new(n);
    let a_sigma = symplectic_fourier(a, &grid)?;
    let table = a_sigma.table().expect("symplectic transform is sampled");
    let vals = psi.values();
    let mut out = vec![Complex64::new(0.0, 0.0); n];
    let mut buf = vec![Complex64::new(0.0, 0.0); n];
    for jd in 0..n {
        let d = signed(jd, n);
        // Σ_k a_σ(d, k) e^{2πik(s(i) − d/2)/N}, with k signed.
        for (k, b) in buf.iter_mut().enumerate() {
            let ks = grid.momentum_index(k) as f64;
            *b = table.values[(jd, k)] * Complex64::from_polar(1.0, -PI * ks * d as f64 / n as f64);
        }
        if buf.iter().all(|v| v.norm() == 0.0) {
            continue;
        }
        fourier.inverse(&mut buf);
        for (i, o) in out.iter_mut().enumerate() {
            let phase = buf[signed(i, n).rem_euclid(n as i64) as usize];
            let src = vals[(i as i64 - d).rem_euclid(n as i64) as usize];
            *o += phase * src;
        }
    }
    // inverse() divides by N, which is the (1/N) prefactor.
    WaveFunction::new(grid, out)
}
