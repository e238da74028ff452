//! Classical Hamiltonian flows, their quantum counterparts on a grid, and
//! numerical checks of the correspondence between the two.

pub mod config;
pub mod correspondence;
pub mod error;
pub mod grid;
pub mod hamiltonian_flow;
pub mod io;
pub mod metaplectic;
pub mod phase_space;
pub mod report;
pub mod verify;
pub mod weyl;

pub use error::{HamliftError, Result};
