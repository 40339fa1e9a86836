use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::spectral::{forward_transform, l2_norm, Grid, PhysicalVectorField, SpectralVectorField};

/// Taylor–Green vortex `A(sin x' cos y' cos z', -cos x' sin y' cos z', 0)`
/// with `x' = x/L`, sampled on the grid then passed through `A_R`.
pub fn init_taylor_green(grid: &Grid, amplitude: f64) -> Result<SpectralVectorField> {
    if !amplitude.is_finite() {
        return Err(Error::param("amplitude", "must be finite"));
    }
    let l = grid.box_scale();
    let phys = PhysicalVectorField::from_fn(grid, |x, y, z| {
        let (x, y, z) = (x / l, y / l, z / l);
        [
            amplitude * x.sin() * y.cos() * z.cos(),
            -amplitude * x.cos() * y.sin() * z.cos(),
            0.0,
        ]
    })?;
    let mut u = forward_transform(&phys);
    u.apply_an_on_ball();
    Ok(u)
}

/// Seeded Gaussian field on `0 < |k| <= cutoff`, Hermitian-symmetrized,
/// Leray-projected and rescaled to `‖u‖_{L²} = amplitude`.
pub fn init_random_divfree(
    grid: &Grid,
    seed: u64,
    spectrum_cutoff: f64,
    amplitude: f64,
) -> Result<SpectralVectorField> {
    if !(spectrum_cutoff > 0.0) || spectrum_cutoff > grid.trunc_radius() * (1.0 + 1e-12) {
        return Err(Error::param(
            "spectrum_cutoff",
            format!(
                "must lie in (0, trunc_radius = {}], got {spectrum_cutoff}",
                grid.trunc_radius()
            ),
        ));
    }
    if !(amplitude.is_finite() && amplitude >= 0.0) {
        return Err(Error::param("amplitude", format!("must be >= 0, got {amplitude}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut raw = SpectralVectorField::zeros(grid);
    for &i in grid.ball() {
        if grid.in_ball(i, spectrum_cutoff) {
            let mut v = [Complex64::new(0.0, 0.0); 3];
            for c in v.iter_mut() {
                *c = Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal));
            }
            raw.set(i, v);
        }
    }
    let neg = grid.negated();
    let mut u = SpectralVectorField::zeros(grid);
    for &i in grid.ball() {
        let (a, b) = (raw.at(i), raw.at(neg[i]));
        u.set(i, [0, 1, 2].map(|c| (a[c] + b[c].conj()) * 0.5));
    }
    u.apply_an_on_ball();
    let norm = l2_norm(&u);
    if norm > 0.0 {
        u.scale(amplitude / norm);
    }
    Ok(u)
}
