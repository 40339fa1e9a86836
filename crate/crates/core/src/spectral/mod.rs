//! Wavenumber lattice, transforms, the Leray/Friedrichs operators and norms.

mod field;
mod grid;
mod norms;
mod operators;
mod transform;

pub use field::{PhysicalVectorField, SpectralVectorField};
pub use grid::{fold_index, make_grid, max_trunc_radius, Grid};
pub use norms::{
    band_l2_norm, gradient_norm_sq, homogeneous_sobolev_norm, l2_norm, lp_norm, sobolev_norm,
};
pub use operators::{a_n_operator, friedrichs_truncate, leray_project};
pub use transform::{forward_transform, inverse_transform};

pub(crate) use operators::project_vector;
pub(crate) use transform::forward_real_pair;
