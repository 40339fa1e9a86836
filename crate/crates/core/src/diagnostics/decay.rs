use serde::Serialize;

use crate::error::{Error, Result};
use crate::integrator::Snapshot;
use crate::nonlinearity::DampingParams;
use crate::spectral::{
    band_l2_norm, homogeneous_sobolev_norm, inverse_transform, l2_norm, lp_norm, sobolev_norm,
    PhysicalVectorField,
};

/// Relative tolerance of the orthogonal split `‖u‖² = ‖w₁‖² + ‖w₂‖²`.
pub const SPLIT_TOL: f64 = 1e-10;
/// Absolute slack of the spectral interpolation inequality.
pub const INTERPOLATION_SLACK: f64 = 1e-12;

/// Grid quadrature of `(e^{b|u|^r} - 1)|u|` over all points.
pub fn damping_flux_l1(f: &PhysicalVectorField, p: &DampingParams) -> f64 {
    let (k1, k2) = k1k2_split(f, p);
    k1 + k2
}

/// Damping flux split into `{|u| <= 1}` and `{|u| > 1}`.
pub fn k1k2_split(f: &PhysicalVectorField, p: &DampingParams) -> (f64, f64) {
    let (mut k1, mut k2) = (0.0, 0.0);
    for i in 0..f.grid().len() {
        let s = f.speed(i);
        let v = p.growth(s) * s;
        if s <= 1.0 {
            k1 += v;
        } else {
            k2 += v;
        }
    }
    let dv = f.grid().cell_volume();
    (k1 * dv, k2 * dv)
}

#[derive(Clone, Debug, Serialize)]
pub struct DecayRow {
    pub t: f64,
    pub l2: f64,
    pub h_neg2: f64,
    /// Modes with `|k| < κ`.
    pub w1_l2: f64,
    /// Modes with `|k| >= κ`.
    pub w2_l2: f64,
    pub lp_10_3: f64,
    pub damping_flux_l1: f64,
    pub k1: f64,
    pub k2: f64,
    pub hdot_3_5: f64,
    pub hdot_1: f64,
    /// `Ḣ^{3/5} / L^{10/3}`, reported only.
    pub embedding_ratio: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct DecayReport {
    pub kappa: f64,
    pub rows: Vec<DecayRow>,
}

impl DecayReport {
    /// True when `select(row)` strictly decreases along the rows.
    pub fn strictly_decreasing(&self, select: impl Fn(&DecayRow) -> f64) -> bool {
        self.rows.windows(2).all(|w| select(&w[1]) < select(&w[0]))
    }
}

/// Norm bookkeeping of the low/high frequency decay argument, one row per
/// snapshot. Fails if the split is not orthogonal, if `‖w₁‖ > (1+κ²)‖u‖_{H⁻²}`,
/// or if `‖u‖_{Ḣ^{3/5}} <= ‖u‖^{2/5}‖u‖_{Ḣ¹}^{3/5}` is violated.
pub fn decay_probe(snapshots: &[Snapshot], kappa: f64, p: &DampingParams) -> Result<DecayReport> {
    if !(kappa.is_finite() && kappa > 0.0) {
        return Err(Error::param("kappa", format!("must be > 0, got {kappa}")));
    }
    if let Some(first) = snapshots.first() {
        for s in &snapshots[1..] {
            first.field.ensure_same_grid(&s.field)?;
        }
    }
    let mut rows = Vec::with_capacity(snapshots.len());
    for snap in snapshots {
        let u = &snap.field;
        let l2 = l2_norm(u);
        let h_neg2 = sobolev_norm(u, -2.0);
        let w1 = band_l2_norm(u, |k| k < kappa);
        let w2 = band_l2_norm(u, |k| k >= kappa);
        let split_err = (l2 * l2 - w1 * w1 - w2 * w2).abs();
        if split_err > SPLIT_TOL * (l2 * l2).max(f64::MIN_POSITIVE) && split_err > 0.0 {
            return Err(Error::InvariantViolation(format!(
                "t = {}: frequency split not orthogonal (defect {split_err:e})",
                snap.time
            )));
        }
        if w1 > (1.0 + kappa * kappa) * h_neg2 * (1.0 + 1e-12) {
            return Err(Error::InvariantViolation(format!(
                "t = {}: ‖w1‖ = {w1:e} exceeds (1+κ²)‖u‖_H⁻² = {:e}",
                snap.time,
                (1.0 + kappa * kappa) * h_neg2
            )));
        }
        let hdot_3_5 = homogeneous_sobolev_norm(u, 0.6);
        let hdot_1 = homogeneous_sobolev_norm(u, 1.0);
        let interp = l2.powf(0.4) * hdot_1.powf(0.6);
        if hdot_3_5 > interp + INTERPOLATION_SLACK * interp.max(1.0) {
            return Err(Error::InvariantViolation(format!(
                "t = {}: interpolation inequality violated ({hdot_3_5:e} > {interp:e})",
                snap.time
            )));
        }
        let phys = inverse_transform(u);
        let lp_10_3 = lp_norm(&phys, 10.0 / 3.0)?;
        let (k1, k2) = k1k2_split(&phys, p);
        rows.push(DecayRow {
            t: snap.time,
            l2,
            h_neg2,
            w1_l2: w1,
            w2_l2: w2,
            lp_10_3,
            damping_flux_l1: k1 + k2,
            k1,
            k2,
            hdot_3_5,
            hdot_1,
            embedding_ratio: if lp_10_3 > 0.0 { hdot_3_5 / lp_10_3 } else { 0.0 },
        });
    }
    Ok(DecayReport { kappa, rows })
}

/// First time at which `values` falls to half its initial value, linearly
/// interpolated between samples; `None` if it never does.
pub fn half_life(times: &[f64], values: &[f64]) -> Option<f64> {
    let v0 = *values.first()?;
    let target = 0.5 * v0;
    for i in 1..times.len().min(values.len()) {
        if values[i] <= target {
            let (t0, t1, a, b) = (times[i - 1], times[i], values[i - 1], values[i]);
            if a == b {
                return Some(t1);
            }
            return Some(t0 + (t1 - t0) * (a - target) / (a - b));
        }
    }
    None
}
