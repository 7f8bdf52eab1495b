//! Numerical checks for the canonical quantization of electromagnetism in
//! dispersive, absorbing media.
//!
//! The crate implements the concrete objects of that theory — causal
//! magneto-dielectric response models, 1D scattering modes and Green's
//! functions, the free-space dyadic Green's function, and a discretized
//! field-plus-reservoir phase space — and verifies the identities that tie
//! them together: dispersion integrals, the fundamental completeness
//! relation, bosonic commutation of the polariton map, Hamiltonian
//! diagonalization, and the completeness defect of material-only mode
//! expansions near finite objects.

pub mod constants;
pub mod error;
pub mod fano;
pub mod identity;
pub mod kvfmt;
pub mod layered;
pub mod lin;
pub mod quad;
pub mod report;
pub mod response;
pub mod vacuum3d;

pub use constants::Constants;
pub use nalgebra;
pub use error::Error;
pub use report::CheckReport;

/// Convenience alias used throughout the crate.
pub type Complex = num_complex::Complex<f64>;

/// The imaginary unit.
pub const I: Complex = Complex::new(0.0, 1.0);
