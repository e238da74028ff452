use nalgebra::DMatrix;
use rustfft::num_complex::Complex64;

use super::hamiltonian::QuantumHamiltonian;
use super::propagate::Propagator;
use crate::error::{HamliftError, Result};
use crate::grid::{Grid, WaveFunction};

/// Solution samples `ψ(t₀ + iΔt)`, `i = 0, …, len − 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledPath {
    pub t0: f64,
    pub dt: f64,
    pub states: Vec<WaveFunction>,
}

impl SampledPath {
    pub fn new(t0: f64, dt: f64, states: Vec<WaveFunction>) -> Result<Self> {
        if !(dt > 0.0) {
            return Err(HamliftError::InvalidArgument(format!("sample spacing must be positive, got {dt}")));
        }
        if states.len() < 3 {
            return Err(HamliftError::InvalidArgument(format!(
                "central differences need at least 3 time samples, got {}",
                states.len()
            )));
        }
        let grid = *states[0].grid();
        for s in &states {
            grid.check_same(s.grid())?;
        }
        Ok(Self { t0, dt, states })
    }

    /// Samples `count` states of `propagator` started from `psi0` at `t0`.
    pub fn sample(propagator: &Propagator, psi0: &WaveFunction, t0: f64, dt: f64, count: usize) -> Result<Self> {
        let mut states = Vec::with_capacity(count);
        let mut psi = psi0.clone();
        for i in 0..count {
            if i > 0 {
                let t = t0 + i as f64 * dt;
                psi = propagator.propagate_between(&psi, t - dt, t)?;
            }
            states.push(psi.clone());
        }
        Self::new(t0, dt, states)
    }

    pub fn grid(&self) -> &Grid {
        self.states[0].grid()
    }

    pub fn time(&self, i: usize) -> f64 {
        self.t0 + i as f64 * self.dt
    }

    /// `∂_tψ` at interior sample `i` by central differences.
    fn derivative(&self, i: usize) -> Result<WaveFunction> {
        let d = self.states[i + 1].sub(&self.states[i - 1])?;
        Ok(d.scaled(Complex64::new(1.0 / (2.0 * self.dt), 0.0)))
    }
}

/// `Ĥ(t)` for each interior sample, computed once when `H` is autonomous.
fn operators(h: &QuantumHamiltonian, path: &SampledPath) -> Result<Vec<DMatrix<Complex64>>> {
    let interior = 1..path.states.len() - 1;
    if h.is_time_dependent() {
        interior.map(|i| h.operator_matrix(path.grid(), path.time(i))).collect()
    } else {
        Ok(vec![h.operator_matrix(path.grid(), path.t0)?; interior.len()])
    }
}

/// `max_i ‖iħ∂_tψ − Ĥ(t)ψ‖` over interior samples.
pub fn schrodinger_residual(path: &SampledPath, h: &QuantumHamiltonian) -> Result<f64> {
    let ih = Complex64::new(0.0, path.grid().hbar());
    let ops = operators(h, path)?;
    let mut worst = 0.0f64;
    for (i, op) in (1..path.states.len() - 1).zip(&ops) {
        let lhs = path.derivative(i)?.scaled(ih);
        let rhs = WaveFunction::from_dvector(*path.grid(), &(op * path.states[i].to_dvector()))?;
        worst = worst.max(lhs.distance(&rhs)?);
    }
    Ok(worst)
}

/// Residual of the extended equation `iħ∂_{t′}Ψ = (Ĥ(t) − iħ∂_t)Ψ` for
/// `Ψ(x, t; t′) = ψ(x, t) e^{iE(t − t′)/ħ}`.
///
/// `∂_t` uses the path's neighbouring samples and `∂_{t′}` uses a central
/// difference of width `dt_prime` around each `t′`. The result is the
/// maximum over interior samples and over `t_primes`.
pub fn extended_schrodinger_check(
    path: &SampledPath,
    h: &QuantumHamiltonian,
    energy: f64,
    t_primes: &[f64],
    dt_prime: f64,
) -> Result<f64> {
    if t_primes.is_empty() {
        return Err(HamliftError::InvalidArgument("need at least one t′ sample".into()));
    }
    if !(dt_prime > 0.0) {
        return Err(HamliftError::InvalidArgument(format!("t′ step must be positive, got {dt_prime}")));
    }
    let hbar = path.grid().hbar();
    let ih = Complex64::new(0.0, hbar);
    let phase = |t: f64, tp: f64| Complex64::from_polar(1.0, energy * (t - tp) / hbar);
    let ops = operators(h, path)?;
    let mut worst = 0.0f64;
    for (i, op) in (1..path.states.len() - 1).zip(&ops) {
        let t = path.time(i);
        let (prev, next) = (path.time(i - 1), path.time(i + 1));
        let h_psi = WaveFunction::from_dvector(*path.grid(), &(op * path.states[i].to_dvector()))?;
        for &tp in t_primes {
            let big = |j: usize, s: f64| path.states[j].scaled(phase(s, tp));
            let d_tp = path.states[i]
                .scaled(phase(t, tp + dt_prime) - phase(t, tp - dt_prime))
                .scaled(Complex64::new(1.0 / (2.0 * dt_prime), 0.0));
            let d_t = big(i + 1, next).sub(&big(i - 1, prev))?.scaled(Complex64::new(1.0 / (2.0 * path.dt), 0.0));
            let lhs = d_tp.scaled(ih);
            let rhs = h_psi.scaled(phase(t, tp)).sub(&d_t.scaled(ih))?;
            worst = worst.max(lhs.distance(&rhs)?);
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::correspondence::PropagationMethod;
    use crate::hamiltonian_flow::QuadraticHamiltonian;

    fn setup(dt: f64) -> (SampledPath, QuantumHamiltonian) {
        let g = Grid::centered(256, 10.0, 1.0).unwrap();
        let h: QuantumHamiltonian = QuadraticHamiltonian::from_blocks1(1.0, 0.0, 1.0, "oscillator").unwrap().into();
        let p = Propagator::new(h.clone(), g, PropagationMethod::Eigensolve, 1).unwrap();
        let psi = WaveFunction::coherent(g, 1.0, 0.0).unwrap();
        (SampledPath::sample(&p, &psi, 0.0, dt, 6).unwrap(), h)
    }

    #[test]
    fn rejects_short_paths() {
        let g = Grid::centered(32, 4.0, 1.0).unwrap();
        let psi = WaveFunction::coherent(g, 0.0, 0.0).unwrap();
        assert!(SampledPath::new(0.0, 0.1, vec![psi.clone(), psi]).is_err());
    }

    #[test]
    fn zero_energy_reduces_to_base_residual() {
        let (path, h) = setup(1e-3);
        let base = schrodinger_residual(&path, &h).unwrap();
        let ext = extended_schrodinger_check(&path, &h, 0.0, &[0.0, 0.4], 1e-4).unwrap();
        assert!((ext - base).abs() < 1e-12 * (1.0 + base), "{ext} vs {base}");
    }

    #[test]
    fn energy_phase_derivative() {
        // iħ∂_{t′}Ψ = EΨ for the explicit phase, here with E = 1
        let (path, _) = setup(1e-3);
        let (e, dtp, hbar) = (1.0, 1e-4, path.grid().hbar());
        let psi = &path.states[2];
        let t = path.time(2);
        for tp in [0.0, 0.3, 2.0] {
            let at = |s: f64| psi.scaled(Complex64::from_polar(1.0, e * (t - s) / hbar));
            let d = at(tp + dtp).sub(&at(tp - dtp)).unwrap().scaled(Complex64::new(0.0, hbar / (2.0 * dtp)));
            let r = d.distance(&at(tp).scaled(Complex64::new(e, 0.0))).unwrap();
            assert!(r < 1e-8, "{r}");
        }
    }

    #[test]
    fn arbitrary_energy_oscillator() {
        let (path, h) = setup(1e-3);
        let r = extended_schrodinger_check(&path, &h, 3.7, &[0.0, 0.25, 1.0], 1e-3).unwrap();
        assert!(r < 1e-4, "{r}");
    }
}
