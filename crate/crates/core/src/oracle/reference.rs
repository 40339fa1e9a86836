use std::collections::{BTreeMap, HashMap};

use num_complex::Complex64;

use super::convolution::convolve_transport;
use super::damping::collocated_damping;
use super::modes::{ball_modes, wavenumber_sq, DenseModeSet};
use crate::error::{Error, Result};
use crate::integrator::SimParams;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

struct DenseSystem<'a> {
    modes: Vec<[i64; 3]>,
    ksq: Vec<f64>,
    box_scale: f64,
    radius: f64,
    points: usize,
    p: &'a SimParams,
}

impl DenseSystem<'_> {
    /// `-ν|k|²û - A_R div(u⊗u) - A_R F[a(e^{b|u|^r} - 1)u]`.
    fn rhs(&self, u: &[[Complex64; 3]]) -> Vec<[Complex64; 3]> {
        let active: Vec<_> = self
            .modes
            .iter()
            .zip(u)
            .filter(|(_, a)| a.iter().any(|z| *z != ZERO))
            .map(|(k, a)| (*k, *a))
            .collect();
        let transport = convolve_transport(&active, self.box_scale, self.radius);
        let damping = collocated_damping(&active, self.box_scale, &self.modes, &self.p.damping, self.points);
        self.modes
            .iter()
            .enumerate()
            .map(|(i, k)| {
                let t = transport.get(k).copied().unwrap_or([ZERO; 3]);
                [0, 1, 2].map(|c| -u[i][c] * (self.p.nu * self.ksq[i]) - t[c] - damping[i][c])
            })
            .collect()
    }
}

fn axpy(u: &[[Complex64; 3]], h: f64, k: &[[Complex64; 3]]) -> Vec<[Complex64; 3]> {
    u.iter()
        .zip(k)
        .map(|(a, b)| [0, 1, 2].map(|c| a[c] + b[c] * h))
        .collect()
}

/// Classical explicit RK4 on the full Galerkin system, every term evaluated
/// by direct sums with the damping collocated at `m.base_points`, i.e. the
/// same semi-discrete system the production stepper integrates.
///
/// Requires `dt_ref <= p.dt / 16` and `p.t_end <= 1`.
pub fn explicit_reference_run(m: &DenseModeSet, p: &SimParams, dt_ref: f64) -> Result<DenseModeSet> {
    p.validate()?;
    if !(dt_ref > 0.0 && dt_ref <= p.dt / 16.0 * (1.0 + 1e-12)) {
        return Err(Error::param("dt_ref", format!("must lie in (0, dt/16], got {dt_ref}")));
    }
    if p.t_end > 1.0 {
        return Err(Error::param("t_end", "the reference run is limited to t_end <= 1"));
    }
    let modes = ball_modes(m.box_scale, m.trunc_radius);
    let index: HashMap<_, _> = modes.iter().enumerate().map(|(i, k)| (*k, i)).collect();
    let mut u = vec![[ZERO; 3]; modes.len()];
    for d in &m.modes {
        let i = *index.get(&d.k).ok_or_else(|| {
            Error::InvalidField(format!("mode {:?} lies outside the truncation ball", d.k))
        })?;
        u[i] = d.amp;
    }
    let sys = DenseSystem {
        ksq: modes.iter().map(|k| wavenumber_sq(*k, m.box_scale)).collect(),
        modes,
        box_scale: m.box_scale,
        radius: m.trunc_radius,
        points: m.base_points,
        p,
    };

    let n_steps = (p.t_end / dt_ref - 1e-9).ceil().max(1.0) as usize;
    let h = p.t_end / n_steps as f64;
    for s in 0..n_steps {
        let k1 = sys.rhs(&u);
        let k2 = sys.rhs(&axpy(&u, 0.5 * h, &k1));
        let k3 = sys.rhs(&axpy(&u, 0.5 * h, &k2));
        let k4 = sys.rhs(&axpy(&u, h, &k3));
        for i in 0..u.len() {
            for c in 0..3 {
                u[i][c] += (k1[i][c] + (k2[i][c] + k3[i][c]) * 2.0 + k4[i][c]) * (h / 6.0);
            }
        }
        if u.iter().flatten().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::NonFiniteState {
                time: (s + 1) as f64 * h,
                detail: "reference trajectory blew up".into(),
            });
        }
    }
    let map: BTreeMap<_, _> = sys.modes.into_iter().zip(u).collect();
    DenseModeSet::from_map(m.box_scale, m.base_points, m.trunc_radius, map)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::integrator::SchemeOrder;
    use crate::nonlinearity::DampingParams;
    use crate::oracle::DenseMode;

    fn params(a: f64) -> SimParams {
        let d = DampingParams::new(a, 1.0, 4.0).unwrap();
        SimParams::new(1.0, d, 1e-2, 0.5, 1, SchemeOrder::Four).unwrap()
    }

    #[test]
    fn zero_data_stays_zero() {
        let m = DenseModeSet::new(1.0, 8, 2.0, Vec::new()).unwrap();
        assert!(explicit_reference_run(&m, &params(1.0), 1e-2 / 16.0).unwrap().is_empty());
    }

    #[test]
    fn heat_decay_of_shear_mode() {
        let half = Complex64::new(0.5, 0.0);
        let modes = vec![
            DenseMode { k: [1, 0, 0], amp: [ZERO, half, ZERO] },
            DenseMode { k: [-1, 0, 0], amp: [ZERO, half, ZERO] },
        ];
        let m = DenseModeSet::new(1.0, 8, 2.0, modes).unwrap();
        let out = explicit_reference_run(&m, &params(0.0), 1e-2 / 16.0).unwrap();
        let got = out.as_map()[&[1, 0, 0]][1].re;
        assert!((got - 0.5 * (-0.5f64).exp()).abs() < 1e-12);
    }

    #[test]
    fn coarse_reference_step_rejected() {
        let m = DenseModeSet::new(1.0, 8, 2.0, Vec::new()).unwrap();
        assert!(explicit_reference_run(&m, &params(1.0), 1e-3).is_err());
    }
}
