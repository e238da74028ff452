//! Classical flows against quantum propagators: Schrödinger propagation,
//! generator estimates for unitary families, the flow–propagator round trip
//! for quadratic Hamiltonians and the extended Schrödinger equation.

mod extended;
mod hamiltonian;
mod propagate;
mod roundtrip;
mod unitary;

pub use extended::{extended_schrodinger_check, schrodinger_residual, SampledPath};
pub use hamiltonian::{KineticFn, PotentialFn, QuantumHamiltonian, SeparableHamiltonian};
pub use propagate::{propagate_schrodinger, PropagationMethod, Propagator};
pub use roundtrip::{
    correspondence_roundtrip, correspondence_roundtrip_with, CorrespondenceReport, RoundtripOptions, RoundtripParameters,
};
pub use unitary::{stone_generator_estimate, Difference, EvolveFn, UnitaryFamily};
