use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::spectral::{
    forward_real_pair, inverse_transform, project_vector, Grid, PhysicalVectorField,
    SpectralVectorField,
};

/// `A_R div(u ⊗ u)` from collocated velocity samples.
///
/// The six distinct products `u_i u_j` are formed pointwise and transformed
/// in pairs; the divergence, truncation and projection are applied on the
/// ball only. With the ball inside the two-thirds zone every retained
/// product coefficient is alias-free.
pub(crate) fn transport_from_physical(grid: &Grid, u: &PhysicalVectorField) -> SpectralVectorField {
    let c = u.components();
    let n = grid.len();
    let prod = |i: usize, j: usize| -> Vec<f64> { (0..n).map(|x| c[i][x] * c[j][x]).collect() };
    let (p00, p01) = forward_real_pair(grid, &prod(0, 0), Some(&prod(0, 1)));
    let (p02, p11) = forward_real_pair(grid, &prod(0, 2), Some(&prod(1, 1)));
    let (p12, p22) = forward_real_pair(grid, &prod(1, 2), Some(&prod(2, 2)));
    let (p01, p11, p22) = (p01.unwrap(), p11.unwrap(), p22.unwrap());

    let kv = grid.wavevectors();
    let ksq = grid.wavenumber_sq();
    let mut out = SpectralVectorField::zeros(grid);
    let i_unit = Complex64::new(0.0, 1.0);
    for &f in grid.ball() {
        let k = &kv[f];
        let t0 = (p00[f] * k[0] + p01[f] * k[1] + p02[f] * k[2]) * i_unit;
        let t1 = (p01[f] * k[0] + p11[f] * k[1] + p12[f] * k[2]) * i_unit;
        let t2 = (p02[f] * k[0] + p12[f] * k[1] + p22[f] * k[2]) * i_unit;
        out.set(f, project_vector(k, ksq[f], [t0, t1, t2]));
    }
    out
}

pub(crate) fn check_band_limited(u: &SpectralVectorField) -> Result<()> {
    let outside = u.energy_outside(u.grid().trunc_radius());
    if outside > 0.0 {
        let total = u.weighted_sum(|_| 1.0);
        if outside > 1e-28 * total {
            return Err(Error::InvalidField(format!(
                "energy {outside:e} outside the truncation ball |k| <= {}",
                u.grid().trunc_radius()
            )));
        }
    }
    Ok(())
}

/// Dealiased Galerkin transport `A_R div(u ⊗ u)`.
///
/// Rejects fields carrying energy outside the truncation ball, since the
/// alias-free guarantee only covers band-limited input.
pub fn transport_term(u: &SpectralVectorField) -> Result<SpectralVectorField> {
    check_band_limited(u)?;
    let phys = inverse_transform(u);
    Ok(transport_from_physical(u.grid(), &phys))
}
