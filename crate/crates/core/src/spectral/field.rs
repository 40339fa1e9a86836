use num_complex::Complex64;

use super::grid::Grid;
use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Fourier coefficients of a real, periodic vector field.
///
/// Coefficients follow `f(x) = Σ_k f̂(k) e^{i k·x}`, so that
/// `f̂(k) = n⁻³ Σ_x f(x) e^{-i k·x}` and discrete Parseval reads
/// `(2πL/n)³ Σ_x |f(x)|² = (2πL)³ Σ_k |f̂(k)|²`.
#[derive(Clone, Debug)]
pub struct SpectralVectorField {
    grid: Grid,
    comps: [Vec<Complex64>; 3],
}

/// Collocation samples at `x_j = 2πL·j/n`, same flat layout as the grid.
#[derive(Clone, Debug)]
pub struct PhysicalVectorField {
    grid: Grid,
    comps: [Vec<f64>; 3],
}

fn check_len(grid: &Grid, len: usize) -> Result<()> {
    if len != grid.len() {
        return Err(Error::ShapeMismatch {
            expected: grid.len(),
            got: len,
        });
    }
    Ok(())
}

impl SpectralVectorField {
    pub fn zeros(grid: &Grid) -> Self {
        let n = grid.len();
        Self {
            grid: grid.clone(),
            comps: [vec![ZERO; n], vec![ZERO; n], vec![ZERO; n]],
        }
    }

    pub fn from_components(grid: &Grid, comps: [Vec<Complex64>; 3]) -> Result<Self> {
        for c in &comps {
            check_len(grid, c.len())?;
        }
        Ok(Self {
            grid: grid.clone(),
            comps,
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn components(&self) -> &[Vec<Complex64>; 3] {
        &self.comps
    }

    pub fn components_mut(&mut self) -> &mut [Vec<Complex64>; 3] {
        &mut self.comps
    }

    pub fn component(&self, c: usize) -> &[Complex64] {
        &self.comps[c]
    }

    pub fn into_components(self) -> [Vec<Complex64>; 3] {
        self.comps
    }

    /// Coefficient vector at a flat lattice index.
    pub fn at(&self, flat: usize) -> [Complex64; 3] {
        [self.comps[0][flat], self.comps[1][flat], self.comps[2][flat]]
    }

    pub fn set(&mut self, flat: usize, v: [Complex64; 3]) {
        for c in 0..3 {
            self.comps[c][flat] = v[c];
        }
    }

    /// Sets `v` at integer mode `m` and its conjugate at `-m`.
    pub fn set_mode_pair(&mut self, m: [i64; 3], v: [Complex64; 3]) -> Result<()> {
        let i = self
            .grid
            .index_of_mode(m)
            .ok_or_else(|| Error::InvalidField(format!("mode {m:?} is not on the grid")))?;
        let j = self.grid.negated()[i];
        self.set(i, v);
        self.set(j, [v[0].conj(), v[1].conj(), v[2].conj()]);
        Ok(())
    }

    pub fn ensure_same_grid(&self, other: &Self) -> Result<()> {
        if self.grid.same_as(&other.grid) {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }

    /// `self += alpha * other`.
    pub fn axpy(&mut self, alpha: f64, other: &Self) -> Result<()> {
        self.ensure_same_grid(other)?;
        for (a, b) in self.comps.iter_mut().zip(other.comps.iter()) {
            for (x, y) in a.iter_mut().zip(b.iter()) {
                *x += y * alpha;
            }
        }
        Ok(())
    }

    pub fn scale(&mut self, alpha: f64) {
        for c in self.comps.iter_mut() {
            for x in c.iter_mut() {
                *x *= alpha;
            }
        }
    }

    pub fn scaled(mut self, alpha: f64) -> Self {
        self.scale(alpha);
        self
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        let mut out = self.clone();
        out.axpy(-1.0, other)?;
        Ok(out)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        let mut out = self.clone();
        out.axpy(1.0, other)?;
        Ok(out)
    }

    /// Real L² inner product `∫ f·g dx = (2πL)³ Re Σ_k f̂(k)·conj(ĝ(k))`.
    pub fn inner(&self, other: &Self) -> Result<f64> {
        self.ensure_same_grid(other)?;
        let mut s = 0.0;
        for (a, b) in self.comps.iter().zip(other.comps.iter()) {
            for (x, y) in a.iter().zip(b.iter()) {
                s += x.re * y.re + x.im * y.im;
            }
        }
        Ok(s * self.grid.volume())
    }

    /// `Σ_k w(k) |f̂(k)|²` over all components.
    pub(crate) fn weighted_sum(&self, weight: impl Fn(usize) -> f64) -> f64 {
        let mut s = 0.0;
        for i in 0..self.grid.len() {
            let m = self.comps[0][i].norm_sqr() + self.comps[1][i].norm_sqr() + self.comps[2][i].norm_sqr();
            if m != 0.0 {
                s += weight(i) * m;
            }
        }
        s
    }

    /// Largest `|c(k) - conj(c(-k))|` over components and modes.
    pub fn hermitian_defect(&self) -> f64 {
        let neg = self.grid.negated();
        let mut worst: f64 = 0.0;
        for c in &self.comps {
            for (i, x) in c.iter().enumerate() {
                worst = worst.max((x - c[neg[i]].conj()).norm());
            }
        }
        worst
    }

    /// Largest `|k·û(k)| / max(1, ‖û(k)‖)`.
    pub fn divergence_defect(&self) -> f64 {
        let kv = self.grid.wavevectors();
        let mut worst: f64 = 0.0;
        for (i, k) in kv.iter().enumerate() {
            let u = self.at(i);
            let div = u[0] * k[0] + u[1] * k[1] + u[2] * k[2];
            let mag = (u[0].norm_sqr() + u[1].norm_sqr() + u[2].norm_sqr()).sqrt();
            worst = worst.max(div.norm() / mag.max(1.0));
        }
        worst
    }

    /// Magnitude of the mean (k = 0) coefficient.
    pub fn mean_norm(&self) -> f64 {
        let u = self.at(0);
        (u[0].norm_sqr() + u[1].norm_sqr() + u[2].norm_sqr()).sqrt()
    }

    /// Coefficient energy `Σ |û|²` strictly outside the closed ball of `radius`.
    pub fn energy_outside(&self, radius: f64) -> f64 {
        let g = self.grid.clone();
        self.weighted_sum(|i| if g.in_ball(i, radius) { 0.0 } else { 1.0 })
    }

    pub fn is_finite(&self) -> bool {
        self.comps
            .iter()
            .all(|c| c.iter().all(|x| x.re.is_finite() && x.im.is_finite()))
    }

    /// Largest coefficient modulus.
    pub fn max_abs(&self) -> f64 {
        self.comps
            .iter()
            .flat_map(|c| c.iter())
            .fold(0.0, |m, x| m.max(x.norm()))
    }

    /// Largest coefficient-wise difference, `max |a - b|`.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        self.ensure_same_grid(other)?;
        let mut worst: f64 = 0.0;
        for (a, b) in self.comps.iter().zip(other.comps.iter()) {
            for (x, y) in a.iter().zip(b.iter()) {
                worst = worst.max((x - y).norm());
            }
        }
        Ok(worst)
    }

    /// Checks the state invariants of a solver field: finite, Hermitian,
    /// zero-mean, band-limited to the grid's ball and divergence-free.
    pub fn validate_state(&self) -> Result<()> {
        if !self.is_finite() {
            return Err(Error::InvalidField("non-finite coefficients".into()));
        }
        let scale = self.max_abs().max(1e-300);
        if self.hermitian_defect() > 1e-12 * scale.max(1.0) {
            return Err(Error::InvalidField(format!(
                "Hermitian symmetry violated (defect {:e})",
                self.hermitian_defect()
            )));
        }
        if self.mean_norm() != 0.0 {
            return Err(Error::InvalidField("nonzero mean mode".into()));
        }
        let outside = self.energy_outside(self.grid.trunc_radius());
        let total = self.weighted_sum(|_| 1.0);
        if outside > 1e-28 * total.max(f64::MIN_POSITIVE) {
            return Err(Error::InvalidField(format!(
                "energy {outside:e} outside the truncation ball"
            )));
        }
        if self.divergence_defect() > 1e-12 {
            return Err(Error::InvalidField(format!(
                "not divergence-free (defect {:e})",
                self.divergence_defect()
            )));
        }
        Ok(())
    }
}

impl PhysicalVectorField {
    pub fn zeros(grid: &Grid) -> Self {
        let n = grid.len();
        Self {
            grid: grid.clone(),
            comps: [vec![0.0; n], vec![0.0; n], vec![0.0; n]],
        }
    }

    /// Builds a field from samples; rejects wrong lengths and non-finite values.
    pub fn new(grid: &Grid, comps: [Vec<f64>; 3]) -> Result<Self> {
        for c in &comps {
            check_len(grid, c.len())?;
            if let Some(pos) = c.iter().position(|v| !v.is_finite()) {
                return Err(Error::InvalidField(format!(
                    "non-finite sample at grid point {:?}",
                    grid.unflatten(pos)
                )));
            }
        }
        Ok(Self {
            grid: grid.clone(),
            comps,
        })
    }

    /// Samples `f(x, y, z)` at every collocation point.
    pub fn from_fn(grid: &Grid, f: impl Fn(f64, f64, f64) -> [f64; 3]) -> Result<Self> {
        let n = grid.n_points();
        let mut out = Self::zeros(grid);
        for i0 in 0..n {
            let x = grid.coordinate(i0);
            for i1 in 0..n {
                let y = grid.coordinate(i1);
                for i2 in 0..n {
                    let z = grid.coordinate(i2);
                    let v = f(x, y, z);
                    let flat = grid.flat_index(i0, i1, i2);
                    for c in 0..3 {
                        out.comps[c][flat] = v[c];
                    }
                }
            }
        }
        Self::new(grid, out.comps)
    }

    pub(crate) fn from_parts_unchecked(grid: &Grid, comps: [Vec<f64>; 3]) -> Self {
        Self {
            grid: grid.clone(),
            comps,
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn components(&self) -> &[Vec<f64>; 3] {
        &self.comps
    }

    pub fn component(&self, c: usize) -> &[f64] {
        &self.comps[c]
    }

    pub fn at(&self, flat: usize) -> [f64; 3] {
        [self.comps[0][flat], self.comps[1][flat], self.comps[2][flat]]
    }

    /// Pointwise speed `|u(x)|`.
    pub fn speed(&self, flat: usize) -> f64 {
        let v = self.at(flat);
        (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
    }

    pub fn max_speed(&self) -> f64 {
        (0..self.grid.len()).fold(0.0, |m, i| m.max(self.speed(i)))
    }
}
