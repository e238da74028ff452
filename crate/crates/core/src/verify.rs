//! The verification suite: every identity the library implements, checked
//! at desk scale and reported as named residuals.
//!
//! Groups run on scoped threads. The report is sorted by check name and
//! carries no timings, so equal configurations give byte-identical JSON.

use std::f64::consts::PI;
use std::sync::Arc;
use std::thread;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::config::RunConfig;
use crate::correspondence::{
    correspondence_roundtrip_with, extended_schrodinger_check, stone_generator_estimate, Difference, PropagationMethod,
    Propagator, QuantumHamiltonian, RoundtripOptions, SampledPath, UnitaryFamily,
};
use crate::error::Result;
use crate::grid::{Grid, WaveFunction};
use crate::hamiltonian_flow::{
    banyaga_reconstruct, compose_hamiltonians, conjugate_hamiltonian, energy_bookkeeping, integrate_variational,
    invert_hamiltonian, presets, truncate_support, BanyagaOptions, BumpTruncation, ExtendedPoint, FlowFamily, FlowMap,
    HamiltonianSpec, LinearFamily, QuadraticHamiltonian, DEFAULT_INNER_STEPS,
};
use crate::metaplectic::{apply_quadratic_fourier, project_metaplectic};
use crate::phase_space::{dual_generating, symplectic_residual, PhaseSpacePoint, QuadraticGeneratingFunction};
use crate::report::Check;
use crate::weyl::{
    covariance_residual, gaussian_symbol, hermiticity_residual, kernel_to_symbol, symbol_by_name, symbol_to_kernel,
    Symbol, TauParameter,
};

/// Outcome of [`run_verification`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub hbar: f64,
    pub seed: u64,
    pub passed: bool,
    pub checks: Vec<Check>,
}

type Group = fn(&RunConfig) -> Result<Vec<Check>>;

const GROUPS: &[(&str, Group)] = &[
    ("symplecticity", symplecticity),
    ("flow_algebra", flow_algebra),
    ("banyaga", banyaga),
    ("extended_phase_space", extended_phase_space),
    ("metaplectic", metaplectic),
    ("tau_calculus", tau_calculus),
    ("covariance", covariance),
    ("correspondence", correspondence),
    ("stone", stone),
    ("extended_schrodinger", extended_schrodinger),
];

/// Runs every check group. A group that errors contributes one failing
/// check named `<group>.error`.
pub fn run_verification(config: &RunConfig) -> VerifyReport {
    let mut checks: Vec<Check> = thread::scope(|scope| {
        let handles: Vec<_> = GROUPS
            .iter()
            .map(|&(name, group)| (name, scope.spawn(move || group(config))))
            .collect();
        handles
            .into_iter()
            .flat_map(|(name, h)| match h.join() {
                Ok(Ok(checks)) => checks,
                Ok(Err(e)) => {
                    log::error!("check group {name} failed: {e}");
                    vec![Check::failed(format!("{name}.error"), 0.0)]
                }
                Err(_) => vec![Check::failed(format!("{name}.error"), 0.0)],
            })
            .collect()
    });
    checks.sort_by(|a, b| a.name.cmp(&b.name));
    let passed = checks.iter().all(|c| c.pass);
    VerifyReport { hbar: config.hbar, seed: config.seed, passed, checks }
}

fn v2(x: f64, p: f64) -> DVector<f64> {
    DVector::from_vec(vec![x, p])
}

/// Ten points on a Lissajous curve inside `|z| < 1.6`.
fn sample_points() -> Vec<DVector<f64>> {
    (0..10)
        .map(|i| {
            let a = i as f64 * 0.63;
            v2(1.3 * a.cos(), 0.9 * (1.7 * a).sin())
        })
        .collect()
}

fn symplecticity(cfg: &RunConfig) -> Result<Vec<Check>> {
    let bump = BumpTruncation::new(PhaseSpacePoint::origin(1), 2.5, 3.5)?;
    let cases: [(&str, HamiltonianSpec); 3] = [
        ("oscillator", presets::oscillator(1)),
        ("driven_oscillator", presets::driven_oscillator(0.1)),
        ("pendulum_truncated", truncate_support(&presets::pendulum(), &bump)?),
    ];
    let z0 = PhaseSpacePoint::new1(1.0, 0.5);
    cases
        .into_iter()
        .map(|(name, h)| {
            let traj = integrate_variational(&h, &z0, 0.0, 2.0 * PI, cfg.integrator.steps)?;
            let worst = traj.jacobians.iter().map(symplectic_residual).try_fold(0.0f64, |a, r| r.map(|r| a.max(r)))?;
            Ok(Check::below(format!("symplecticity.{name}"), worst, 1e-8))
        })
        .collect()
}

fn flow_algebra(_cfg: &RunConfig) -> Result<Vec<Check>> {
    let (h, k) = (presets::oscillator(1), presets::free(1));
    let t = 0.7;
    let steps = 100;
    let flow = |spec: &HamiltonianSpec, z: &DVector<f64>| FlowMap::new(spec.clone(), 0.0, t, steps).apply(z);
    let hk = compose_hamiltonians(&h, &k, DEFAULT_INNER_STEPS)?;
    let h_bar = invert_hamiltonian(&h, DEFAULT_INNER_STEPS);
    let s = presets::free_quadratic(1).flow_matrix(1.0)?;
    let h_moved = conjugate_hamiltonian(&h, &s)?;
    let (mut comp, mut inv, mut conj) = (0.0f64, 0.0f64, 0.0f64);
    for z in sample_points() {
        comp = comp.max((flow(&hk, &z)? - flow(&h, &flow(&k, &z)?)?).amax());
        inv = inv.max((flow(&h, &flow(&h_bar, &z)?)? - &z).amax());
        let rhs = s.matrix() * flow(&h, &(s.inverse().matrix() * &z))?;
        conj = conj.max((flow(&h_moved, &z)? - rhs).amax());
    }
    Ok(vec![
        Check::below("flow_algebra.composition", comp, 1e-6),
        Check::below("flow_algebra.inverse", inv, 1e-6),
        Check::below("flow_algebra.conjugation", conj, 1e-6),
    ])
}

/// Points on three circles of radius at most 2.
fn disk_points() -> Vec<DVector<f64>> {
    [0.5, 1.0, 2.0]
        .iter()
        .flat_map(|&r| (0..6).map(move |k| (r, k as f64 * 1.047 + 0.2)))
        .map(|(r, a)| v2(r * a.cos(), r * a.sin()))
        .collect()
}

fn banyaga(_cfg: &RunConfig) -> Result<Vec<Check>> {
    let cases: [(&str, LinearFamily, fn(&DVector<f64>) -> f64); 2] = [
        ("rotation", LinearFamily::rotation(), |z| 0.5 * (z[0] * z[0] + z[1] * z[1])),
        ("shear", LinearFamily::shear(), |z| 0.5 * z[1] * z[1]),
    ];
    let mut checks = Vec::new();
    for (name, family, exact) in cases {
        let family: Arc<dyn FlowFamily> = Arc::new(family);
        let h = banyaga_reconstruct(family.clone(), None, BanyagaOptions::default())?;
        let pts = disk_points();
        let scale = pts.iter().map(|z| exact(z).abs()).fold(0.0, f64::max);
        let mut err = 0.0f64;
        for z in &pts {
            for t in [0.25, 0.6] {
                err = err.max((h.eval(z, t)? - exact(z)).abs());
            }
        }
        checks.push(Check::below(format!("banyaga.{name}.hamiltonian"), err / scale, 1e-4));
        let mut flow_err = 0.0f64;
        for z in pts.iter().step_by(3) {
            let rebuilt = FlowMap::new(h.clone(), 0.0, 1.0, 100).apply(z)?;
            flow_err = flow_err.max((rebuilt - family.forward(z, 1.0)?).amax());
        }
        checks.push(Check::below(format!("banyaga.{name}.flow"), flow_err, 1e-4));
    }
    Ok(checks)
}

fn extended_phase_space(cfg: &RunConfig) -> Result<Vec<Check>> {
    let start = ExtendedPoint { z: PhaseSpacePoint::new1(1.0, 0.0), t: 0.0, energy: 0.0 };
    let r = energy_bookkeeping(&presets::driven_oscillator(0.1), &start, 1.0, cfg.integrator.steps)?;
    Ok(vec![Check::below("extended_phase_space.energy_bookkeeping", r.max(), 1e-6)])
}

fn generating_set() -> Result<Vec<(&'static str, QuadraticGeneratingFunction)>> {
    Ok(vec![
        ("fourier", QuadraticGeneratingFunction::new1(0.0, 1.0, 0.0)?),
        ("chirped", QuadraticGeneratingFunction::new1(0.5, 1.2, -0.3)?),
        ("reflected", QuadraticGeneratingFunction::new1(-0.4, -0.8, 0.6)?),
    ])
}

/// Normalized sum of three random Gaussians centered in `[−3, 3]²`.
fn random_state(grid: Grid, rng: &mut ChaCha8Rng) -> Result<WaveFunction> {
    let mut psi = WaveFunction::zeros(grid);
    for _ in 0..3 {
        let g = WaveFunction::gaussian(
            grid,
            rng.gen_range(-3.0..3.0),
            rng.gen_range(-3.0..3.0),
            rng.gen_range(0.3..1.5),
            rng.gen_range(-0.3..0.3),
        )?;
        psi = psi.add(&g.scaled(Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))))?;
    }
    psi.normalized()
}

fn metaplectic(cfg: &RunConfig) -> Result<Vec<Check>> {
    let grid = Grid::centered(1024, 16.0, cfg.hbar)?;
    let ws = generating_set()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let (mut unitarity, mut inverse) = (0.0f64, 0.0f64);
    for i in 0..100 {
        let psi = random_state(grid, &mut rng)?;
        let w = &ws[i % ws.len()].1;
        let out = apply_quadratic_fourier(w, &psi)?;
        unitarity = unitarity.max((out.norm() - 1.0).abs());
        inverse = inverse.max(apply_quadratic_fourier(&dual_generating(w), &out)?.distance(&psi)?);
    }
    let mut checks = vec![
        Check::below("metaplectic.unitarity", unitarity, 1e-6),
        Check::below("metaplectic.inverse", inverse, 1e-6),
    ];
    let psi = WaveFunction::gaussian(grid, 0.0, 0.0, 0.8, 0.2)?;
    let sigma = psi.moments().covariance();
    for (name, w) in &ws {
        let s = project_metaplectic(w)?.into_matrix();
        let out = apply_quadratic_fourier(w, &psi)?.moments().covariance();
        let r = (out - &s * &sigma * s.transpose()).amax();
        checks.push(Check::below(format!("metaplectic.covariance_transport.{name}"), r, 1e-5));
    }
    Ok(checks)
}

fn real_symbols() -> Result<Vec<Symbol>> {
    ["x", "p", "x2", "p2", "xp", "oscillator", "gaussian"].iter().map(|n| symbol_by_name(n)).collect()
}

fn tau_calculus(cfg: &RunConfig) -> Result<Vec<Check>> {
    let grid = Grid::centered(256, 10.0, cfg.hbar)?;
    let mult = Symbol::real("potential", |x, _| (-x * x / 4.0).exp() + 0.3 * x);
    let diag = DMatrix::from_fn(grid.len(), grid.len(), |j, l| {
        if j == l {
            Complex64::new(mult.eval(grid.x(j), 0.0).re, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    let mut multiplication = 0.0f64;
    for tau in [0.0, 0.25, 0.5, 1.0] {
        let k = symbol_to_kernel(&mult, TauParameter::new(tau)?, &grid).operator_matrix();
        multiplication = multiplication.max(crate::grid::max_modulus(&(k - &diag)));
    }
    let gauss = gaussian_symbol(0.5, -0.3, 1.0);
    let mut roundtrip = 0.0f64;
    for tau in [0.0, 0.5, 1.0] {
        let back = kernel_to_symbol(&symbol_to_kernel(&gauss, TauParameter::new(tau)?, &grid))?;
        roundtrip = roundtrip.max(crate::grid::max_modulus(&(back.sample(&grid) - gauss.sample(&grid))));
    }
    let mut herm = 0.0f64;
    for a in real_symbols()? {
        herm = herm.max(hermiticity_residual(&symbol_to_kernel(&a, TauParameter::WEYL, &grid).operator_matrix()));
    }
    let xp = symbol_to_kernel(&symbol_by_name("xp")?, TauParameter::new(0.0)?, &grid);
    Ok(vec![
        Check::below("tau_calculus.multiplication", multiplication, 1e-12),
        Check::below("tau_calculus.roundtrip", roundtrip, 1e-6),
        Check::below("tau_calculus.hermiticity_weyl", herm, 1e-10),
        Check::above("tau_calculus.hermiticity_standard_xp", hermiticity_residual(&xp.operator_matrix()), 1e-3),
    ])
}

fn covariance(cfg: &RunConfig) -> Result<Vec<Check>> {
    let grid = Grid::centered(256, 10.0, cfg.hbar)?;
    let tau = TauParameter::new(cfg.verify.covariance_tau)?;
    let conjugators =
        [("fourier", QuadraticGeneratingFunction::new1(0.0, 1.0, 0.0)?), ("shear", QuadraticGeneratingFunction::new1(1.0, 1.0, 0.0)?)];
    let symbols = [symbol_by_name("xp")?, symbol_by_name("oscillator")?, gaussian_symbol(0.5, -0.3, 1.0)];
    let mut checks = Vec::new();
    let mut control = 0.0f64;
    for (name, w) in &conjugators {
        for a in &symbols {
            let r = covariance_residual(a, Some(w), tau, &grid)?;
            checks.push(Check::below(format!("covariance.{name}.{}", a.label()), r, 1e-5));
            control = control.max(covariance_residual(a, Some(w), TauParameter::new(0.0)?, &grid)?);
        }
    }
    checks.push(Check::above("covariance.standard_ordering_control", control, 1e-2));
    Ok(checks)
}

fn oscillator() -> Result<QuadraticHamiltonian> {
    QuadraticHamiltonian::from_blocks1(1.0, 0.0, 1.0, "oscillator")
}

fn correspondence(cfg: &RunConfig) -> Result<Vec<Check>> {
    let grid = Grid::centered(512, 12.0, cfg.hbar)?;
    let period = 2.0 * PI;
    let steps = (period / 1e-3).round() as usize;
    let options = RoundtripOptions { method: Some(PropagationMethod::SplitStep), steps, ..Default::default() };
    let probes = [PhaseSpacePoint::new1(1.0, 0.0), PhaseSpacePoint::new1(-0.5, 0.8)];
    let report = correspondence_roundtrip_with(&oscillator()?, &grid, period, &probes, &options)?;
    let mut checks: Vec<Check> = report
        .checks
        .into_iter()
        .map(|c| Check { name: format!("correspondence.{}", c.name), ..c })
        .collect();

    let h: QuantumHamiltonian = oscillator()?.into();
    let psi = WaveFunction::coherent(grid, 1.0, 0.5)?;
    let outs = PropagationMethod::ALL
        .iter()
        .map(|&m| Propagator::new(h.clone(), grid, m, steps)?.propagate(&psi, period))
        .collect::<Result<Vec<_>>>()?;
    let mut agree = 0.0f64;
    for i in 0..outs.len() {
        for j in i + 1..outs.len() {
            agree = agree.max(outs[i].distance(&outs[j])?);
        }
    }
    checks.push(Check::below("correspondence.methods_agree", agree, 1e-5));
    Ok(checks)
}

/// Successive error ratios of the generator estimate against `order`.
pub fn refinement_defect(family: &UnitaryFamily, exact: &WaveFunction, psi: &WaveFunction, scheme: Difference, order: f64) -> Result<f64> {
    let errs = [1e-2, 5e-3, 2.5e-3]
        .iter()
        .map(|&dt| stone_generator_estimate(family, psi, dt, scheme)?.distance(exact))
        .collect::<Result<Vec<f64>>>()?;
    Ok(errs.windows(2).map(|w| (w[0] / w[1] / order - 1.0).abs()).fold(0.0, f64::max))
}

fn stone(cfg: &RunConfig) -> Result<Vec<Check>> {
    let grid = Grid::centered(256, 10.0, cfg.hbar)?;
    let h: QuantumHamiltonian = oscillator()?.into();
    let propagator = Propagator::new(h.clone(), grid, PropagationMethod::Eigensolve, 1)?;
    let family = UnitaryFamily::from_propagator(propagator);
    let psi = WaveFunction::coherent(grid, 1.0, 0.5)?;
    let exact = h.operator(&grid, 0.0)?.apply(&psi)?;
    Ok(vec![
        Check::below("stone.forward_order", refinement_defect(&family, &exact, &psi, Difference::Forward, 2.0)?, 0.2),
        Check::below("stone.central_order", refinement_defect(&family, &exact, &psi, Difference::Central, 4.0)?, 0.2),
    ])
}

fn extended_schrodinger(cfg: &RunConfig) -> Result<Vec<Check>> {
    let grid = Grid::centered(256, 10.0, cfg.hbar)?;
    let h: QuantumHamiltonian = oscillator()?.into();
    let propagator = Propagator::new(h.clone(), grid, PropagationMethod::Eigensolve, 1)?;
    let psi = WaveFunction::coherent(grid, 1.0, 0.0)?;
    let path = SampledPath::sample(&propagator, &psi, 0.0, 1e-3, 6)?;
    let r = extended_schrodinger_check(&path, &h, 3.7, &[0.0, 0.25, 1.0], 1e-3)?;
    Ok(vec![Check::below("extended_schrodinger.arbitrary_energy", r, 1e-4)])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_config_passes() {
        let report = run_verification(&RunConfig::default());
        let failed: Vec<_> = report.checks.iter().filter(|c| !c.pass).collect();
        assert!(failed.is_empty(), "{failed:#?}");
        assert!(report.checks.windows(2).all(|w| w[0].name < w[1].name));
    }

    #[test]
    fn standard_ordering_fails_covariance() {
        let mut cfg = RunConfig::default();
        cfg.verify.covariance_tau = 0.0;
        let checks = covariance(&cfg).unwrap();
        assert!(checks.iter().any(|c| c.name.starts_with("covariance.fourier") && !c.pass));
        assert!(checks.iter().find(|c| c.name == "covariance.standard_ordering_control").unwrap().pass);
    }
}
