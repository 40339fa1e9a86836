use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

/// Relative slack used for closed-ball membership tests, so that radii given
/// as decimal literals still capture lattice points lying exactly on the
/// sphere.
const BALL_SLACK: f64 = 1e-12;

/// Discretization of the periodic box `[0, 2πL]³` with `n` points per axis.
///
/// Wavenumbers along an axis are `fold(j) / L` where `fold` maps the index
/// range `0..n` onto `(-n/2, n/2]`. Flat storage is row-major over
/// `(i0, i1, i2)` with `i2` fastest; axis `i0` is `x`.
///
/// Cloning is cheap: the lattice tables and FFT plans are shared.
#[derive(Clone)]
pub struct Grid {
    inner: Arc<GridInner>,
}

struct GridInner {
    n: usize,
    box_scale: f64,
    trunc_radius: f64,
    axis_k: Vec<f64>,
    kvec: Vec<[f64; 3]>,
    ksq: Vec<f64>,
    neg: Vec<usize>,
    ball: Vec<usize>,
    fft_forward: Arc<dyn Fft<f64>>,
    fft_inverse: Arc<dyn Fft<f64>>,
    scratch_len: usize,
}

/// Maps an FFT index onto the symmetric range `(-n/2, n/2]`.
pub fn fold_index(j: usize, n: usize) -> i64 {
    if j <= n / 2 {
        j as i64
    } else {
        j as i64 - n as i64
    }
}

/// Largest truncation radius whose quadratic products stay alias-free.
pub fn max_trunc_radius(n_points: usize, box_scale: f64) -> f64 {
    (n_points as f64 / 3.0) / box_scale
}

pub fn make_grid(n_points: usize, box_scale: f64, trunc_radius: f64) -> Result<Grid> {
    Grid::new(n_points, box_scale, trunc_radius)
}

impl Grid {
    pub fn new(n_points: usize, box_scale: f64, trunc_radius: f64) -> Result<Self> {
        if n_points < 8 || !n_points.is_power_of_two() {
            return Err(Error::InvalidGrid(format!(
                "n_points must be a power of two >= 8, got {n_points}"
            )));
        }
        if !(box_scale.is_finite() && box_scale > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "box_scale must be positive and finite, got {box_scale}"
            )));
        }
        let limit = max_trunc_radius(n_points, box_scale);
        if !(trunc_radius.is_finite() && trunc_radius > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "trunc_radius must be positive, got {trunc_radius}"
            )));
        }
        if trunc_radius > limit * (1.0 + BALL_SLACK) {
            return Err(Error::InvalidGrid(format!(
                "trunc_radius {trunc_radius} exceeds the dealiasing bound (n_points/3)/box_scale = {limit}"
            )));
        }

        let n = n_points;
        let axis_k: Vec<f64> = (0..n)
            .map(|j| fold_index(j, n) as f64 / box_scale)
            .collect();
        let total = n * n * n;
        let mut kvec = Vec::with_capacity(total);
        let mut ksq = Vec::with_capacity(total);
        let mut neg = Vec::with_capacity(total);
        let mut ball = Vec::new();
        let r2 = trunc_radius * trunc_radius * (1.0 + BALL_SLACK);
        for i0 in 0..n {
            for i1 in 0..n {
                for i2 in 0..n {
                    let k = [axis_k[i0], axis_k[i1], axis_k[i2]];
                    let k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
                    let flat = kvec.len();
                    kvec.push(k);
                    ksq.push(k2);
                    neg.push(((n - i0) % n * n + (n - i1) % n) * n + (n - i2) % n);
                    if flat != 0 && k2 <= r2 {
                        ball.push(flat);
                    }
                }
            }
        }

        let mut planner = FftPlanner::new();
        let fft_forward = planner.plan_fft_forward(n);
        let fft_inverse = planner.plan_fft_inverse(n);
        let scratch_len = fft_forward
            .get_inplace_scratch_len()
            .max(fft_inverse.get_inplace_scratch_len());

        Ok(Self {
            inner: Arc::new(GridInner {
                n,
                box_scale,
                trunc_radius,
                axis_k,
                kvec,
                ksq,
                neg,
                ball,
                fft_forward,
                fft_inverse,
                scratch_len,
            }),
        })
    }

    pub fn n_points(&self) -> usize {
        self.inner.n
    }

    pub fn box_scale(&self) -> f64 {
        self.inner.box_scale
    }

    pub fn trunc_radius(&self) -> f64 {
        self.inner.trunc_radius
    }

    /// Number of lattice sites, `n³`.
    pub fn len(&self) -> usize {
        self.inner.kvec.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Wavenumbers along one axis, in FFT index order.
    pub fn axis_wavenumbers(&self) -> &[f64] {
        &self.inner.axis_k
    }

    pub fn flat_index(&self, i0: usize, i1: usize, i2: usize) -> usize {
        let n = self.inner.n;
        (i0 * n + i1) * n + i2
    }

    pub fn unflatten(&self, flat: usize) -> [usize; 3] {
        let n = self.inner.n;
        [flat / (n * n), (flat / n) % n, flat % n]
    }

    /// Flat index of the lattice point with integer wavenumber indices
    /// `m` (i.e. physical wavenumber `m / L`), if it is on the grid.
    pub fn index_of_mode(&self, m: [i64; 3]) -> Option<usize> {
        let n = self.inner.n as i64;
        let mut idx = [0usize; 3];
        for (slot, &mi) in idx.iter_mut().zip(m.iter()) {
            if mi <= -n / 2 || mi > n / 2 {
                return None;
            }
            *slot = mi.rem_euclid(n) as usize;
        }
        Some(self.flat_index(idx[0], idx[1], idx[2]))
    }

    /// Integer wavenumber indices of a flat lattice site.
    pub fn mode_of_index(&self, flat: usize) -> [i64; 3] {
        let n = self.inner.n;
        let [i0, i1, i2] = self.unflatten(flat);
        [fold_index(i0, n), fold_index(i1, n), fold_index(i2, n)]
    }

    pub fn wavevectors(&self) -> &[[f64; 3]] {
        &self.inner.kvec
    }

    pub fn wavenumber_sq(&self) -> &[f64] {
        &self.inner.ksq
    }

    /// Flat index of `-k` for every lattice site.
    pub fn negated(&self) -> &[usize] {
        &self.inner.neg
    }

    /// Flat indices of the nonzero modes with `|k| <= trunc_radius`.
    pub fn ball(&self) -> &[usize] {
        &self.inner.ball
    }

    /// Closed-ball membership for an arbitrary radius.
    pub fn in_ball(&self, flat: usize, radius: f64) -> bool {
        self.inner.ksq[flat] <= radius * radius * (1.0 + BALL_SLACK)
    }

    /// Side length `2πL` of the periodic box.
    pub fn box_length(&self) -> f64 {
        2.0 * PI * self.inner.box_scale
    }

    /// Box volume `(2πL)³`.
    pub fn volume(&self) -> f64 {
        self.box_length().powi(3)
    }

    /// Quadrature weight `(2πL/n)³` of one collocation point.
    pub fn cell_volume(&self) -> f64 {
        (self.box_length() / self.inner.n as f64).powi(3)
    }

    /// Collocation coordinate `2πL·j/n` along an axis.
    pub fn coordinate(&self, j: usize) -> f64 {
        self.box_length() * j as f64 / self.inner.n as f64
    }

    pub fn same_as(&self, other: &Grid) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner) || self == other
    }

    pub(crate) fn fft_forward(&self) -> &dyn Fft<f64> {
        self.inner.fft_forward.as_ref()
    }

    pub(crate) fn fft_inverse(&self) -> &dyn Fft<f64> {
        self.inner.fft_inverse.as_ref()
    }

    pub(crate) fn scratch(&self) -> Vec<Complex64> {
        vec![Complex64::new(0.0, 0.0); self.inner.scratch_len]
    }
}

impl PartialEq for Grid {
    fn eq(&self, other: &Self) -> bool {
        self.inner.n == other.inner.n
            && self.inner.box_scale == other.inner.box_scale
            && self.inner.trunc_radius == other.inner.trunc_radius
    }
}

impl fmt::Debug for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Grid")
            .field("n_points", &self.inner.n)
            .field("box_scale", &self.inner.box_scale)
            .field("trunc_radius", &self.inner.trunc_radius)
            .finish()
    }
}
