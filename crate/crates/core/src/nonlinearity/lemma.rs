//! Monotonicity gaps of the power and exponential absorptions.
//!
//! For `u = φ(|x|)`, `v = φ(|y|)` with `φ` nondecreasing,
//! `2⟨u x - v y, x - y⟩ - (u + v)|x - y|² = (u - v)(|x|² - |y|²) >= 0`.
//! The functions below evaluate the left-hand gap directly (not through that
//! identity) so a sweep over random pairs is a genuine check.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use super::damping::DampingParams;

fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

fn gap_with(x: &[f64], y: &[f64], u: f64, v: f64) -> f64 {
    assert_eq!(x.len(), y.len(), "lemma gap needs vectors of equal dimension");
    let mut lhs = 0.0;
    let mut dist2 = 0.0;
    for (&xi, &yi) in x.iter().zip(y) {
        let d = xi - yi;
        lhs += (u * xi - v * yi) * d;
        dist2 += d * d;
    }
    lhs - 0.5 * (u + v) * dist2
}

/// `⟨|x|^β x - |y|^β y, x - y⟩ - ½(|x|^β + |y|^β)|x - y|²`.
pub fn lemma2_power_gap(x: &[f64], y: &[f64], beta: f64) -> f64 {
    gap_with(x, y, norm(x).powf(beta), norm(y).powf(beta))
}

/// Same gap with weights `e^{b|·|^r} - 1`.
pub fn lemma2_gap(x: &[f64], y: &[f64], p: &DampingParams) -> f64 {
    gap_with(x, y, p.growth(norm(x)), p.growth(norm(y)))
}

/// Tolerance scale `(1 + |x| + |y|)^{e + 2}`.
pub fn gap_scale(x: &[f64], y: &[f64], exponent: f64) -> f64 {
    (1.0 + norm(x) + norm(y)).powf(exponent + 2.0)
}

/// Which inequality a sweep case exercises.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GapCase {
    Power { beta: f64 },
    Exponential { b: f64, r: f64 },
}

impl GapCase {
    fn exponent(&self) -> f64 {
        match *self {
            GapCase::Power { beta } => beta,
            GapCase::Exponential { r, .. } => r,
        }
    }

    /// Sampling radius. Exponential cases stop at `b·ρ^r = 8` so that the
    /// weights stay within a range where the tolerance scale is meaningful.
    fn max_radius(&self) -> f64 {
        match *self {
            GapCase::Power { .. } => 4.0,
            GapCase::Exponential { b, r } => (8.0 / b).powf(1.0 / r).min(4.0),
        }
    }

    fn gap(&self, x: &[f64], y: &[f64]) -> f64 {
        match *self {
            GapCase::Power { beta } => lemma2_power_gap(x, y, beta),
            GapCase::Exponential { b, r } => lemma2_gap(x, y, &DampingParams { a: 1.0, b, r }),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct GapCaseReport {
    pub case: GapCase,
    pub samples: usize,
    /// Minimum of `gap / scale` over the sweep.
    pub min_normalized_gap: f64,
    pub worst_x: [f64; 3],
    pub worst_y: [f64; 3],
    pub failures: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct LemmaSweepReport {
    pub seed: u64,
    pub tol: f64,
    pub cases: Vec<GapCaseReport>,
    pub passed: bool,
}

/// Cases of the standard sweep: `β ∈ {1,2,4}` and `r ∈ {1,2,4} × b ∈ {½,1,2}`.
pub fn standard_cases() -> Vec<GapCase> {
    let mut cases: Vec<GapCase> = [1.0, 2.0, 4.0]
        .into_iter()
        .map(|beta| GapCase::Power { beta })
        .collect();
    for r in [1.0, 2.0, 4.0] {
        for b in [0.5, 1.0, 2.0] {
            cases.push(GapCase::Exponential { b, r });
        }
    }
    cases
}

fn sample_point(rng: &mut ChaCha8Rng, radius: f64) -> [f64; 3] {
    let mut d: [f64; 3] = [rng.sample(StandardNormal), rng.sample(StandardNormal), rng.sample(StandardNormal)];
    let n = norm(&d).max(f64::MIN_POSITIVE);
    let rho = rng.random_range(0.0..=radius);
    for v in d.iter_mut() {
        *v *= rho / n;
    }
    d
}

/// Evaluates every case on `samples` seeded random pairs in ℝ³. One pair in
/// ten is a small perturbation of its partner, one in a hundred an exact
/// repeat, to exercise the near-diagonal regime.
pub fn lemma_sweep(samples: usize, seed: u64, cases: &[GapCase], tol: f64) -> LemmaSweepReport {
    let mut reports = Vec::with_capacity(cases.len());
    for (ci, case) in cases.iter().enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(ci as u64));
        let radius = case.max_radius();
        let mut rep = GapCaseReport {
            case: *case,
            samples,
            min_normalized_gap: f64::INFINITY,
            worst_x: [0.0; 3],
            worst_y: [0.0; 3],
            failures: 0,
        };
        for s in 0..samples {
            let x = sample_point(&mut rng, radius);
            let y = if s % 100 == 0 {
                x
            } else if s % 10 == 0 {
                let e = sample_point(&mut rng, 1e-3 * radius);
                [x[0] + e[0], x[1] + e[1], x[2] + e[2]]
            } else {
                sample_point(&mut rng, radius)
            };
            let g = case.gap(&x, &y) / gap_scale(&x, &y, case.exponent());
            if g < -tol {
                rep.failures += 1;
            }
            if g < rep.min_normalized_gap {
                rep.min_normalized_gap = g;
                rep.worst_x = x;
                rep.worst_y = y;
            }
        }
        reports.push(rep);
    }
    let passed = reports.iter().all(|r| r.failures == 0);
    LemmaSweepReport {
        seed,
        tol,
        cases: reports,
        passed,
    }
}
