//! Pseudo-spectral Galerkin solver for the incompressible Navier–Stokes
//! equations with exponential damping `a(e^{b|u|^r} - 1)u` on a periodic box,
//! with energy-law, stability and decay diagnostics and slow reference oracles.

pub mod diagnostics;
pub mod error;
pub mod integrator;
pub mod io;
pub mod nonlinearity;
pub mod oracle;
pub mod spectral;

pub use error::{Error, Result};
