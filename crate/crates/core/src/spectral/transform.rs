//! Three-dimensional transforms between collocation samples and Fourier
//! coefficients.
//!
//! Convention: `f̂(k) = n⁻³ Σ_x f(x) e^{-i k·x}` and `f(x) = Σ_k f̂(k) e^{i k·x}`.
//! Real fields are transformed two at a time by packing them into the real
//! and imaginary parts of one complex array.

use num_complex::Complex64;
use rustfft::Fft;

use super::field::{PhysicalVectorField, SpectralVectorField};
use super::grid::Grid;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub(crate) enum Direction {
    Forward,
    Inverse,
}

/// `out[(c*n + a)*n + b] = inp[(a*n + b)*n + c]`: moves the fastest axis to
/// the front so the next axis becomes contiguous. This is a transpose of an
/// `n² × n` matrix, done in tiles because the power-of-two strides otherwise
/// thrash the cache.
fn rotate(inp: &[Complex64], out: &mut [Complex64], n: usize) {
    // n is a power of two, so the tile divides both extents
    let tile = n.min(32);
    let rows = n * n;
    for r0 in (0..rows).step_by(tile) {
        for c0 in (0..n).step_by(tile) {
            for c in c0..c0 + tile {
                let dst = &mut out[c * rows + r0..c * rows + r0 + tile];
                for (j, d) in dst.iter_mut().enumerate() {
                    *d = inp[(r0 + j) * n + c];
                }
            }
        }
    }
}

/// Unnormalized in-place 3D FFT.
pub(crate) fn fft3(grid: &Grid, data: &mut [Complex64], dir: Direction) {
    let n = grid.n_points();
    let fft: &dyn Fft<f64> = match dir {
        Direction::Forward => grid.fft_forward(),
        Direction::Inverse => grid.fft_inverse(),
    };
    let mut scratch = grid.scratch();
    let mut tmp = vec![Complex64::new(0.0, 0.0); data.len()];
    // three passes: transform the contiguous axis, then rotate the layout
    fft.process_with_scratch(data, &mut scratch);
    rotate(data, &mut tmp, n);
    fft.process_with_scratch(&mut tmp, &mut scratch);
    rotate(&tmp, data, n);
    fft.process_with_scratch(data, &mut scratch);
    rotate(data, &mut tmp, n);
    data.copy_from_slice(&tmp);
}

/// Forward transform of one or two real arrays.
pub(crate) fn forward_real_pair(
    grid: &Grid,
    a: &[f64],
    b: Option<&[f64]>,
) -> (Vec<Complex64>, Option<Vec<Complex64>>) {
    let norm = 1.0 / grid.len() as f64;
    let mut z: Vec<Complex64> = match b {
        Some(b) => a
            .iter()
            .zip(b.iter())
            .map(|(&x, &y)| Complex64::new(x, y))
            .collect(),
        None => a.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
    };
    fft3(grid, &mut z, Direction::Forward);
    match b {
        None => {
            for v in z.iter_mut() {
                *v *= norm;
            }
            (z, None)
        }
        Some(_) => {
            let neg = grid.negated();
            let mut fa = vec![Complex64::new(0.0, 0.0); z.len()];
            let mut fb = vec![Complex64::new(0.0, 0.0); z.len()];
            for i in 0..z.len() {
                let zc = z[neg[i]].conj();
                fa[i] = (z[i] + zc) * (0.5 * norm);
                // (z - zc) / 2i
                let d = (z[i] - zc) * (0.5 * norm);
                fb[i] = Complex64::new(d.im, -d.re);
            }
            (fa, Some(fb))
        }
    }
}

/// Inverse transform of one or two Hermitian coefficient arrays to real samples.
pub(crate) fn inverse_real_pair(
    grid: &Grid,
    a: &[Complex64],
    b: Option<&[Complex64]>,
) -> (Vec<f64>, Option<Vec<f64>>) {
    let mut z: Vec<Complex64> = match b {
        // a + i b
        Some(b) => a
            .iter()
            .zip(b.iter())
            .map(|(x, y)| Complex64::new(x.re - y.im, x.im + y.re))
            .collect(),
        None => a.to_vec(),
    };
    fft3(grid, &mut z, Direction::Inverse);
    let re = z.iter().map(|v| v.re).collect();
    let im = b.map(|_| z.iter().map(|v| v.im).collect());
    (re, im)
}

pub fn forward_transform(f: &PhysicalVectorField) -> SpectralVectorField {
    let grid = f.grid();
    let c = f.components();
    let (f0, f1) = forward_real_pair(grid, &c[0], Some(&c[1]));
    let (f2, _) = forward_real_pair(grid, &c[2], None);
    SpectralVectorField::from_components(grid, [f0, f1.expect("paired"), f2])
        .expect("transform preserves shape")
}

/// Inverse transform; the imaginary residue of non-Hermitian input is dropped.
pub fn inverse_transform(g: &SpectralVectorField) -> PhysicalVectorField {
    let grid = g.grid();
    let c = g.components();
    let (u0, u1) = inverse_real_pair(grid, &c[0], Some(&c[1]));
    let (u2, _) = inverse_real_pair(grid, &c[2], None);
    PhysicalVectorField::from_parts_unchecked(grid, [u0, u1.expect("paired"), u2])
}
