//! Hamiltonian flows on ℝ²ⁿ and the operations that act on them.

pub mod algebra;
pub mod banyaga;
pub mod extended;
pub mod integrator;
pub mod presets;
pub mod quadratic;
pub mod spec;

pub use algebra::{
    compose_hamiltonians, conjugate_hamiltonian, invert_hamiltonian, rescale_time, truncate_support, BumpTruncation,
    DEFAULT_INNER_STEPS,
};
pub use banyaga::{banyaga_reconstruct, BanyagaOptions, FlowFamily, HamiltonianFamily, LinearFamily};
pub use extended::{energy_bookkeeping, extend_hamiltonian, extended_flow, EnergyBookkeeping, ExtendedPoint};
pub use integrator::{
    integrate_flow, integrate_variational, FlowMap, JacobianTrajectory, Method, Trajectory, DIVERGENCE_THRESHOLD,
};
pub use quadratic::QuadraticHamiltonian;
pub use spec::{hamilton_vector_field, HamiltonianSpec};
