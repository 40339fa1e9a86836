//! Slow direct-sum implementations of the Galerkin terms, used as ground
//! truth for the FFT kernels on small instances.

mod convolution;
mod damping;
mod modes;
mod reference;

pub use convolution::dense_transport;
pub use damping::{aliasing_study, dense_damping, oversampled_damping};
pub use modes::{DenseMode, DenseModeSet, MAX_DENSE_MODES};
pub use reference::explicit_reference_run;
