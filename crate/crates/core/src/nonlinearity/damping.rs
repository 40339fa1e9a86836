use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{
    forward_real_pair, inverse_transform, project_vector, PhysicalVectorField, SpectralVectorField,
};

/// Largest exponent `b·v^r` evaluated before clipping; `e^700` is still finite.
pub const EXP_ARG_LIMIT: f64 = 700.0;

/// Coefficients of the absorption `a (e^{b|u|^r} - 1) u`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DampingParams {
    pub a: f64,
    pub b: f64,
    pub r: f64,
}

impl DampingParams {
    /// `a = 0` is accepted and switches the absorption off.
    pub fn new(a: f64, b: f64, r: f64) -> Result<Self> {
        if !(a.is_finite() && a >= 0.0) {
            return Err(Error::param("a", format!("must be >= 0, got {a}")));
        }
        if !(b.is_finite() && b > 0.0) {
            return Err(Error::param("b", format!("must be > 0, got {b}")));
        }
        if !(r.is_finite() && r >= 1.0) {
            return Err(Error::param("r", format!("must be >= 1, got {r}")));
        }
        Ok(Self { a, b, r })
    }

    /// `e^{b z^r} - 1` without clipping, via `expm1`.
    #[inline]
    pub fn growth(&self, z: f64) -> f64 {
        (self.b * pow_r(z, self.r)).exp_m1()
    }
}

impl Default for DampingParams {
    fn default() -> Self {
        Self {
            a: 1.0,
            b: 1.0,
            r: 4.0,
        }
    }
}

#[inline]
pub(crate) fn pow_r(z: f64, r: f64) -> f64 {
    if r == 4.0 {
        let z2 = z * z;
        z2 * z2
    } else if r == 2.0 {
        z * z
    } else if r == 1.0 {
        z
    } else {
        z.powf(r)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ClipMode {
    Error,
    Saturate,
}

/// Speed cap applied before the exponential is evaluated.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClipPolicy {
    pub v_max: f64,
    pub mode: ClipMode,
}

impl ClipPolicy {
    pub fn new(v_max: f64, mode: ClipMode, p: &DampingParams) -> Result<Self> {
        if !(v_max.is_finite() && v_max > 0.0) {
            return Err(Error::param("v_max", format!("must be positive, got {v_max}")));
        }
        if p.b * pow_r(v_max, p.r) > EXP_ARG_LIMIT * (1.0 + 1e-12) {
            return Err(Error::param(
                "v_max",
                format!(
                    "b*v_max^r = {} exceeds {EXP_ARG_LIMIT}",
                    p.b * pow_r(v_max, p.r)
                ),
            ));
        }
        Ok(Self { v_max, mode })
    }

    /// Saturating policy at `b·v_max^r = 700`.
    pub fn default_for(p: &DampingParams) -> Self {
        Self {
            v_max: (EXP_ARG_LIMIT / p.b).powf(1.0 / p.r),
            mode: ClipMode::Saturate,
        }
    }
}

/// Result of evaluating the damping at one point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PointDamping {
    pub value: [f64; 3],
    pub saturated: bool,
}

/// Scalar factor `g(s)` with damping `= a·g(s)·v` and dissipation density
/// `g(s)·s²`. Above `v_max` the saturated value keeps `g(s)·s` continuous.
/// `Err(())` signals an overflow risk under `ClipMode::Error`.
#[inline]
pub(crate) fn damping_factor(s: f64, p: &DampingParams, clip: &ClipPolicy) -> Result<(f64, bool), ()> {
    if s > clip.v_max {
        match clip.mode {
            ClipMode::Error => Err(()),
            ClipMode::Saturate => Ok((p.growth(clip.v_max) * clip.v_max / s, true)),
        }
    } else {
        Ok((p.growth(s), false))
    }
}

fn overflow(index: Option<[usize; 3]>, speed: f64, clip: &ClipPolicy) -> Error {
    Error::OverflowRisk {
        index: index.unwrap_or([0; 3]),
        speed,
        v_max: clip.v_max,
    }
}

/// `a (e^{b|v|^r} - 1) v`, clipped per `clip`.
pub fn damping_pointwise(v: [f64; 3], p: &DampingParams, clip: &ClipPolicy) -> Result<PointDamping> {
    let s = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    let (g, saturated) = damping_factor(s, p, clip).map_err(|_| overflow(None, s, clip))?;
    let f = p.a * g;
    Ok(PointDamping {
        value: [f * v[0], f * v[1], f * v[2]],
        saturated,
    })
}

/// Pointwise damping over a collocation field, plus its dissipation
/// quadrature `(2πL/n)³ Σ g(|u|)|u|²` and the number of saturated points.
pub(crate) struct CollocatedDamping {
    pub values: Option<[Vec<f64>; 3]>,
    pub dissipation: f64,
    pub saturated: u64,
}

pub(crate) fn collocate_damping(
    u: &PhysicalVectorField,
    p: &DampingParams,
    clip: &ClipPolicy,
    want_values: bool,
) -> Result<CollocatedDamping> {
    let grid = u.grid();
    let n = grid.len();
    let c = u.components();
    let mut values = want_values.then(|| [vec![0.0; n], vec![0.0; n], vec![0.0; n]]);
    let mut diss = 0.0;
    let mut saturated = 0u64;
    for i in 0..n {
        let v = [c[0][i], c[1][i], c[2][i]];
        let s2 = v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
        let s = s2.sqrt();
        let (g, sat) = damping_factor(s, p, clip)
            .map_err(|_| overflow(Some(grid.unflatten(i)), s, clip))?;
        saturated += sat as u64;
        diss += g * s2;
        if let Some(vals) = values.as_mut() {
            let f = p.a * g;
            vals[0][i] = f * v[0];
            vals[1][i] = f * v[1];
            vals[2][i] = f * v[2];
        }
    }
    Ok(CollocatedDamping {
        values,
        dissipation: diss * grid.cell_volume(),
        saturated,
    })
}

/// Transforms collocated damping samples and applies `A_R` on the ball.
pub(crate) fn project_damping(grid: &crate::spectral::Grid, vals: &[Vec<f64>; 3]) -> SpectralVectorField {
    let (d0, d1) = forward_real_pair(grid, &vals[0], Some(&vals[1]));
    let (d2, _) = forward_real_pair(grid, &vals[2], None);
    let d1 = d1.expect("paired");
    let kv = grid.wavevectors();
    let ksq = grid.wavenumber_sq();
    let mut out = SpectralVectorField::zeros(grid);
    for &i in grid.ball() {
        out.set(i, project_vector(&kv[i], ksq[i], [d0[i], d1[i], d2[i]]));
    }
    out
}

/// Galerkin damping term `A_R F[a (e^{b|u|^r} - 1) u]`, evaluated by
/// collocation without dealiasing.
pub fn damping_term(
    u: &SpectralVectorField,
    p: &DampingParams,
    clip: &ClipPolicy,
) -> Result<SpectralVectorField> {
    let grid = u.grid();
    if p.a == 0.0 {
        return Ok(SpectralVectorField::zeros(grid));
    }
    let phys = inverse_transform(u);
    let col = collocate_damping(&phys, p, clip, true)?;
    Ok(project_damping(grid, col.values.as_ref().expect("requested")))
}

/// Grid quadrature of `(e^{b|u|^r} - 1)|u|²` (no factor `a`).
pub fn damping_dissipation(
    u: &SpectralVectorField,
    p: &DampingParams,
    clip: &ClipPolicy,
) -> Result<f64> {
    let phys = inverse_transform(u);
    Ok(collocate_damping(&phys, p, clip, false)?.dissipation)
}
