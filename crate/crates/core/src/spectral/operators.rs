//! Diagonal Fourier multipliers: Leray projection, Friedrichs truncation and
//! their composition `A_R = P ∘ J_R`.

use num_complex::Complex64;

use super::field::SpectralVectorField;
use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Applies `M(k) = I - k kᵀ/|k|²` to one coefficient vector.
#[inline]
pub(crate) fn project_vector(k: &[f64; 3], ksq: f64, u: [Complex64; 3]) -> [Complex64; 3] {
    let dot = (u[0] * k[0] + u[1] * k[1] + u[2] * k[2]) / ksq;
    [u[0] - dot * k[0], u[1] - dot * k[1], u[2] - dot * k[2]]
}

impl SpectralVectorField {
    /// In-place Leray projection; the mean mode is set to zero.
    pub fn leray_project_in_place(&mut self) {
        let grid = self.grid().clone();
        let kv = grid.wavevectors();
        let ksq = grid.wavenumber_sq();
        for i in 0..grid.len() {
            let v = if i == 0 {
                [ZERO; 3]
            } else {
                project_vector(&kv[i], ksq[i], self.at(i))
            };
            self.set(i, v);
        }
    }

    /// Zeroes every coefficient with `|k| > radius` (closed ball kept).
    pub fn truncate_in_place(&mut self, radius: f64) {
        let grid = self.grid().clone();
        for i in 0..grid.len() {
            if !grid.in_ball(i, radius) {
                self.set(i, [ZERO; 3]);
            }
        }
    }

    /// `A_R` restricted to the grid's own ball, touching only the ball modes.
    pub(crate) fn apply_an_on_ball(&mut self) {
        let grid = self.grid().clone();
        let kv = grid.wavevectors();
        let ksq = grid.wavenumber_sq();
        let mut out = SpectralVectorField::zeros(&grid);
        for &i in grid.ball() {
            out.set(i, project_vector(&kv[i], ksq[i], self.at(i)));
        }
        *self = out;
    }
}

pub fn leray_project(g: &SpectralVectorField) -> SpectralVectorField {
    let mut out = g.clone();
    out.leray_project_in_place();
    out
}

/// Friedrichs operator `J_R`: keeps the closed ball `|k| <= radius`.
pub fn friedrichs_truncate(g: &SpectralVectorField, radius: f64) -> Result<SpectralVectorField> {
    if !(radius > 0.0) {
        return Err(Error::param("radius", format!("must be positive, got {radius}")));
    }
    let mut out = g.clone();
    out.truncate_in_place(radius);
    Ok(out)
}

/// `A_R = P ∘ J_R` with `R` the grid's truncation radius.
pub fn a_n_operator(g: &SpectralVectorField) -> SpectralVectorField {
    let mut out = g.clone();
    out.apply_an_on_ball();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::make_grid;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn single_mode(m: [i64; 3], v: [f64; 3]) -> SpectralVectorField {
        let g = make_grid(16, 1.0, 5.0).unwrap();
        let mut f = SpectralVectorField::zeros(&g);
        f.set_mode_pair(m, [c(v[0]), c(v[1]), c(v[2])]).unwrap();
        f
    }

    #[test]
    fn gradient_mode_is_annihilated() {
        let p = leray_project(&single_mode([1, 0, 0], [1.0, 0.0, 0.0]));
        assert_eq!(p.max_abs(), 0.0);
    }

    #[test]
    fn transverse_mode_is_untouched() {
        let f = single_mode([1, 0, 0], [0.0, 1.0, 0.0]);
        let p = leray_project(&f);
        assert_eq!(p.max_abs_diff(&f).unwrap(), 0.0);
    }

    #[test]
    fn diagonal_wavevector_projection() {
        let p = leray_project(&single_mode([1, 1, 0], [1.0, 0.0, 0.0]));
        let i = p.grid().index_of_mode([1, 1, 0]).unwrap();
        let v = p.at(i);
        assert!((v[0] - c(0.5)).norm() < 1e-15);
        assert!((v[1] - c(-0.5)).norm() < 1e-15);
        assert!(v[2].norm() < 1e-15);
    }

    #[test]
    fn mean_mode_is_removed() {
        let g = make_grid(8, 1.0, 2.0).unwrap();
        let mut f = SpectralVectorField::zeros(&g);
        f.set(0, [c(1.0), c(2.0), c(3.0)]);
        assert_eq!(leray_project(&f).mean_norm(), 0.0);
    }

    #[test]
    fn closed_ball_truncation() {
        let f = single_mode([3, 0, 0], [0.0, 1.0, 0.0]);
        assert_eq!(friedrichs_truncate(&f, 2.0).unwrap().max_abs(), 0.0);
        let kept = friedrichs_truncate(&f, 3.0).unwrap();
        assert_eq!(kept.max_abs_diff(&f).unwrap(), 0.0);
    }

    #[test]
    fn two_shell_truncation_keeps_inner_mode() {
        let mut f = single_mode([1, 1, 0], [0.0, 0.0, 1.0]);
        f.set_mode_pair([0, 3, 1], [c(1.0), c(0.0), c(0.0)]).unwrap();
        let inner = single_mode([1, 1, 0], [0.0, 0.0, 1.0]);
        let t = friedrichs_truncate(&f, 2.0).unwrap();
        assert_eq!(t.max_abs_diff(&inner).unwrap(), 0.0);
    }

    #[test]
    fn nonpositive_radius_rejected() {
        let f = single_mode([1, 0, 0], [0.0, 1.0, 0.0]);
        assert!(friedrichs_truncate(&f, 0.0).is_err());
        assert!(friedrichs_truncate(&f, -1.0).is_err());
    }

    #[test]
    fn a_n_kills_gradients_and_fixes_solenoidal_fields() {
        assert_eq!(a_n_operator(&single_mode([2, 1, 0], [2.0, 1.0, 0.0])).max_abs(), 0.0);
        let f = single_mode([2, 1, 0], [1.0, -2.0, 3.0]);
        let af = a_n_operator(&f);
        assert!(a_n_operator(&af).max_abs_diff(&af).unwrap() < 1e-15);
    }
}
