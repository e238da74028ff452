//! Named Hamiltonians used by the examples, the CLI and the verification
//! suite. All of them carry analytic gradients and Hessians.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use super::quadratic::QuadraticHamiltonian;
use super::spec::HamiltonianSpec;
use crate::error::{HamliftError, Result};

pub fn zero(n: usize) -> HamiltonianSpec {
    constant(n, 0.0).with_label("zero")
}

pub fn constant(n: usize, c: f64) -> HamiltonianSpec {
    HamiltonianSpec::new(
        n,
        "constant",
        Arc::new(move |_z: &DVector<f64>, _t: f64| Ok(c)),
        Arc::new(move |_z: &DVector<f64>, _t: f64| Ok(DVector::zeros(2 * n))),
        Arc::new(move |_z: &DVector<f64>, _t: f64| Ok(DMatrix::zeros(2 * n, 2 * n))),
    )
    .separable(true)
}

/// `½(|x|² + |p|²)`.
pub fn oscillator(n: usize) -> HamiltonianSpec {
    oscillator_quadratic(n).to_spec().with_label("oscillator")
}

pub fn oscillator_quadratic(n: usize) -> QuadraticHamiltonian {
    QuadraticHamiltonian::constant(DMatrix::identity(2 * n, 2 * n), "oscillator").expect("identity is symmetric")
}

/// `½|p|²`; its flow is the shear `(x, p) → (x + tp, p)`.
pub fn free(n: usize) -> HamiltonianSpec {
    free_quadratic(n).to_spec().with_label("free")
}

pub fn free_quadratic(n: usize) -> QuadraticHamiltonian {
    let mut m = DMatrix::zeros(2 * n, 2 * n);
    for i in n..2 * n {
        m[(i, i)] = 1.0;
    }
    QuadraticHamiltonian::constant(m, "free").expect("diagonal is symmetric")
}

/// `H = p` for one degree of freedom.
pub fn linear_momentum() -> HamiltonianSpec {
    HamiltonianSpec::new(
        1,
        "momentum",
        Arc::new(|z: &DVector<f64>, _t: f64| Ok(z[1])),
        Arc::new(|_z: &DVector<f64>, _t: f64| Ok(DVector::from_vec(vec![0.0, 1.0]))),
        Arc::new(|_z: &DVector<f64>, _t: f64| Ok(DMatrix::zeros(2, 2))),
    )
    .separable(true)
}

/// `½(p² + x²) + ε x sin t`.
pub fn driven_oscillator(eps: f64) -> HamiltonianSpec {
    HamiltonianSpec::new(
        1,
        "driven_oscillator",
        Arc::new(move |z: &DVector<f64>, t: f64| Ok(0.5 * (z[0] * z[0] + z[1] * z[1]) + eps * z[0] * t.sin())),
        Arc::new(move |z: &DVector<f64>, t: f64| Ok(DVector::from_vec(vec![z[0] + eps * t.sin(), z[1]]))),
        Arc::new(|_z: &DVector<f64>, _t: f64| Ok(DMatrix::identity(2, 2))),
    )
    .time_dependent(true)
    .separable(true)
    .with_time_derivative(Arc::new(move |z: &DVector<f64>, t: f64| Ok(eps * z[0] * t.cos())))
}

/// `½p² + 1 − cos x`.
pub fn pendulum() -> HamiltonianSpec {
    HamiltonianSpec::new(
        1,
        "pendulum",
        Arc::new(|z: &DVector<f64>, _t: f64| Ok(0.5 * z[1] * z[1] + 1.0 - z[0].cos())),
        Arc::new(|z: &DVector<f64>, _t: f64| Ok(DVector::from_vec(vec![z[0].sin(), z[1]]))),
        Arc::new(|z: &DVector<f64>, _t: f64| Ok(DMatrix::from_row_slice(2, 2, &[z[0].cos(), 0.0, 0.0, 1.0]))),
    )
    .separable(true)
}

/// `½p² + ½x² + λx⁴`.
pub fn quartic(lambda: f64) -> HamiltonianSpec {
    HamiltonianSpec::new(
        1,
        "quartic",
        Arc::new(move |z: &DVector<f64>, _t: f64| {
            Ok(0.5 * z[1] * z[1] + 0.5 * z[0] * z[0] + lambda * z[0].powi(4))
        }),
        Arc::new(move |z: &DVector<f64>, _t: f64| {
            Ok(DVector::from_vec(vec![z[0] + 4.0 * lambda * z[0].powi(3), z[1]]))
        }),
        Arc::new(move |z: &DVector<f64>, _t: f64| {
            Ok(DMatrix::from_row_slice(2, 2, &[1.0 + 12.0 * lambda * z[0] * z[0], 0.0, 0.0, 1.0]))
        }),
    )
    .separable(true)
}

/// `x²p²`, whose flow `x = x₀e^{2ct}`, `p = p₀e^{−2ct}` (`c = x₀p₀`) runs
/// away exponentially.
pub fn x2p2() -> HamiltonianSpec {
    HamiltonianSpec::new(
        1,
        "x2p2",
        Arc::new(|z: &DVector<f64>, _t: f64| Ok(z[0] * z[0] * z[1] * z[1])),
        Arc::new(|z: &DVector<f64>, _t: f64| {
            Ok(DVector::from_vec(vec![2.0 * z[0] * z[1] * z[1], 2.0 * z[0] * z[0] * z[1]]))
        }),
        Arc::new(|z: &DVector<f64>, _t: f64| {
            let (x, p) = (z[0], z[1]);
            Ok(DMatrix::from_row_slice(2, 2, &[2.0 * p * p, 4.0 * x * p, 4.0 * x * p, 2.0 * x * x]))
        }),
    )
}

pub const PRESET_NAMES: &[&str] =
    &["zero", "oscillator", "free", "momentum", "driven_oscillator", "pendulum", "quartic", "x2p2"];

/// Looks up a one-degree-of-freedom preset by name.
pub fn by_name(name: &str) -> Result<HamiltonianSpec> {
    Ok(match name {
        "zero" => zero(1),
        "oscillator" => oscillator(1),
        "free" => free(1),
        "momentum" => linear_momentum(),
        "driven_oscillator" => driven_oscillator(0.1),
        "pendulum" => pendulum(),
        "quartic" => quartic(0.1),
        "x2p2" => x2p2(),
        other => {
            return Err(HamliftError::InvalidArgument(format!(
                "unknown Hamiltonian preset `{other}` (known: {})",
                PRESET_NAMES.join(", ")
            )))
        }
    })
}

/// Quadratic presets, for commands that need the Weyl operator.
pub fn quadratic_by_name(name: &str) -> Result<QuadraticHamiltonian> {
    match name {
        "zero" => QuadraticHamiltonian::from_blocks1(0.0, 0.0, 0.0, "zero"),
        "oscillator" => Ok(oscillator_quadratic(1)),
        "free" => Ok(free_quadratic(1)),
        other => Err(HamliftError::InvalidArgument(format!("preset `{other}` is not quadratic"))),
    }
}
