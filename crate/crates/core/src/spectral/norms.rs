//! Sobolev and Lebesgue norms. Spectral norms are exact sums over the
//! lattice; Lᵖ norms are collocation Riemann sums.

use super::field::{PhysicalVectorField, SpectralVectorField};
use crate::error::{Error, Result};

/// Inhomogeneous `H^s` norm, weight `(1 + |k|²)^s`.
pub fn sobolev_norm(g: &SpectralVectorField, s: f64) -> f64 {
    let ksq = g.grid().wavenumber_sq();
    (g.grid().volume() * g.weighted_sum(|i| (1.0 + ksq[i]).powf(s))).sqrt()
}

/// Homogeneous `Ḣ^s` norm, weight `|k|^{2s}`; the mean mode is skipped.
pub fn homogeneous_sobolev_norm(g: &SpectralVectorField, s: f64) -> f64 {
    let ksq = g.grid().wavenumber_sq();
    let sum = g.weighted_sum(|i| if i == 0 { 0.0 } else { ksq[i].powf(s) });
    (g.grid().volume() * sum).sqrt()
}

pub fn l2_norm(g: &SpectralVectorField) -> f64 {
    (g.grid().volume() * g.weighted_sum(|_| 1.0)).sqrt()
}

/// `‖∇u‖²_{L²} = (2πL)³ Σ |k|² |û|²`.
pub fn gradient_norm_sq(g: &SpectralVectorField) -> f64 {
    let ksq = g.grid().wavenumber_sq();
    g.grid().volume() * g.weighted_sum(|i| ksq[i])
}

/// L² norm of the modes selected by `keep(|k|)`.
pub fn band_l2_norm(g: &SpectralVectorField, keep: impl Fn(f64) -> bool) -> f64 {
    let ksq = g.grid().wavenumber_sq();
    (g.grid().volume() * g.weighted_sum(|i| if keep(ksq[i].sqrt()) { 1.0 } else { 0.0 })).sqrt()
}

/// `((2πL/n)³ Σ_x |f(x)|^p)^{1/p}` with `|f|` the Euclidean vector norm.
pub fn lp_norm(f: &PhysicalVectorField, p: f64) -> Result<f64> {
    if !(p >= 1.0) {
        return Err(Error::param("p", format!("Lp norm needs p >= 1, got {p}")));
    }
    let grid = f.grid();
    let mut s = 0.0;
    for i in 0..grid.len() {
        let v = f.speed(i);
        s += if p == 2.0 { v * v } else { v.powf(p) };
    }
    Ok((grid.cell_volume() * s).powf(1.0 / p))
}
