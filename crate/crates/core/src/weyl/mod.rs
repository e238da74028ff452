//! τ-quantization of phase-space symbols on a grid, the Weyl case `τ = ½`,
//! and its Heisenberg–Weyl and covariance properties.

pub mod covariance;
pub mod heisenberg;
pub mod kernel;
pub mod quadratic;
pub mod symbol;

pub use covariance::{covariance_probes, covariance_residual, CovarianceRecord};
pub use heisenberg::{apply_weyl_via_hw, heisenberg_weyl, symplectic_fourier};
pub use kernel::{apply_tau_operator, hermiticity_residual, kernel_to_symbol, symbol_to_kernel, KernelMatrix, TauParameter};
pub use quadratic::{momentum_multiplier_matrix, position_matrix, weyl_quantize_quadratic};
pub use symbol::{gaussian_symbol, symbol_by_name, Symbol, SymbolFn, SymbolTable, SYMBOL_NAMES};
