use serde::Serialize;

use crate::error::{Error, Result};
use crate::integrator::{run, SimParams};
use crate::spectral::{l2_norm, SpectralVectorField};

/// Allowed undershoot of the margin, relative to `‖w(0)‖²`.
pub const MARGIN_SLACK: f64 = 1e-8;

#[derive(Clone, Debug, Serialize)]
pub struct StabilityReport {
    pub times: Vec<f64>,
    /// `‖u(t) - v(t)‖²`.
    pub w_norm_sq: Vec<f64>,
    /// `‖w(0)‖² e^{4t/(ab)}`.
    pub bound: Vec<f64>,
    pub margin: Vec<f64>,
    /// `‖u(0)‖`, the reference scale for the uniqueness check.
    pub u0_norm: f64,
    pub passed: bool,
}

impl StabilityReport {
    pub fn min_margin(&self) -> f64 {
        self.margin.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_w_norm(&self) -> f64 {
        self.w_norm_sq.iter().copied().fold(0.0, f64::max).sqrt()
    }
}

/// Runs `u0` and `u0 + delta` with identical discretization and compares
/// the separation against the Gronwall bound `‖w(0)‖² e^{4t/(ab)}` at every
/// ledger time.
pub fn stability_experiment(
    u0: &SpectralVectorField,
    delta: &SpectralVectorField,
    p: &SimParams,
) -> Result<StabilityReport> {
    let (a, b) = (p.damping.a, p.damping.b);
    if !(a > 0.0 && b > 0.0) {
        return Err(Error::param("damping", "the stability bound needs a > 0 and b > 0"));
    }
    let v0 = u0.add(delta)?;
    let params = p.clone().with_snapshots(1);
    let (ru, rv) = std::thread::scope(|s| {
        let hu = s.spawn(|| run(u0, &params));
        let rv = run(&v0, &params);
        (hu.join().expect("trajectory thread panicked"), rv)
    });
    let (ru, rv) = (ru?, rv?);

    let w0 = l2_norm(delta).powi(2);
    let rate = 4.0 / (a * b);
    let mut report = StabilityReport {
        times: Vec::new(),
        w_norm_sq: Vec::new(),
        bound: Vec::new(),
        margin: Vec::new(),
        u0_norm: l2_norm(u0),
        passed: true,
    };
    for (su, sv) in ru.snapshots.iter().zip(&rv.snapshots) {
        let w = l2_norm(&su.field.sub(&sv.field)?).powi(2);
        let bound = w0 * (rate * su.time).exp();
        report.times.push(su.time);
        report.w_norm_sq.push(w);
        report.bound.push(bound);
        report.margin.push(bound - w);
        if bound - w < -MARGIN_SLACK * w0 {
            report.passed = false;
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::integrator::{init_taylor_green, SchemeOrder};
    use crate::nonlinearity::DampingParams;
    use crate::spectral::make_grid;

    #[test]
    fn zero_delta_gives_identical_trajectories() {
        let g = make_grid(8, 1.0, 2.0).unwrap();
        let u0 = init_taylor_green(&g, 1.0).unwrap();
        let p = SimParams::new(1.0, DampingParams::default(), 1e-2, 0.1, 2, SchemeOrder::Two).unwrap();
        let rep = stability_experiment(&u0, &SpectralVectorField::zeros(&g), &p).unwrap();
        assert!(rep.passed);
        assert_eq!(rep.max_w_norm(), 0.0);
        assert_eq!(rep.times.len(), 6);
    }

    #[test]
    fn needs_positive_damping() {
        let g = make_grid(8, 1.0, 2.0).unwrap();
        let u0 = init_taylor_green(&g, 1.0).unwrap();
        let d = DampingParams::new(0.0, 1.0, 4.0).unwrap();
        let p = SimParams::new(1.0, d, 1e-2, 0.1, 2, SchemeOrder::Two).unwrap();
        assert!(stability_experiment(&u0, &u0.clone().scaled(1e-3), &p).is_err());
    }
}
