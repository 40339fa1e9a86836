//! Integrating-factor Runge–Kutta time stepping of the Galerkin system
//! `û' = -ν|k|²û + N(û)`, `N = -A_R[div(u⊗u) + a(e^{b|u|^r} - 1)u]`.
//!
//! The viscous multiplier `e^{-ν|k|²h}` is applied exactly; the nonlinear
//! terms are explicit. Dissipation rates are integrated with the same stage
//! weights as the state, so the ledger residual isolates time-stepping error.

use num_complex::Complex64;

use super::params::{SchemeOrder, SimParams, DAMPING_STEP_LIMIT};
use crate::diagnostics::{EnergyLedger, LedgerRow};
use crate::error::{Error, Result};
use crate::nonlinearity::{collocate_damping, project_damping, transport_from_physical};
use crate::spectral::{gradient_norm_sq, inverse_transform, l2_norm, Grid, SpectralVectorField};

#[derive(Clone, Debug)]
pub struct SolverState {
    pub time: f64,
    pub field: SpectralVectorField,
    /// Cumulative number of clipped collocation points.
    pub saturation_count: u64,
}

/// Field stored at a ledger row.
#[derive(Clone, Debug)]
pub struct Snapshot {
    pub time: f64,
    pub field: SpectralVectorField,
}

impl SolverState {
    pub fn new(field: SpectralVectorField) -> Self {
        Self {
            time: 0.0,
            field,
            saturation_count: 0,
        }
    }

    pub fn field(&self) -> &SpectralVectorField {
        &self.field
    }
}

/// Nonlinear right-hand side together with by-products of the collocation.
pub(crate) struct NonlinearEval {
    pub rhs: SpectralVectorField,
    /// Grid quadrature of `(e^{b|u|^r} - 1)|u|²`.
    pub dissipation: f64,
    pub max_speed: f64,
    pub saturated: u64,
}

pub(crate) fn evaluate_nonlinear(u: &SpectralVectorField, p: &SimParams) -> Result<NonlinearEval> {
    let grid = u.grid();
    let phys = inverse_transform(u);
    let mut rhs = transport_from_physical(grid, &phys);
    let col = collocate_damping(&phys, &p.damping, &p.clip, p.damping.a != 0.0)?;
    if let Some(vals) = col.values.as_ref() {
        let d = project_damping(grid, vals);
        rhs.axpy(1.0, &d)?;
    }
    rhs.scale(-1.0);
    Ok(NonlinearEval {
        rhs,
        dissipation: col.dissipation,
        max_speed: phys.max_speed(),
        saturated: col.saturated,
    })
}

/// `-transport_term(u) - damping_term(u)`.
pub fn rhs_nonlinear(u: &SpectralVectorField, p: &SimParams) -> Result<SpectralVectorField> {
    Ok(evaluate_nonlinear(u, p)?.rhs)
}

/// Outcome of one (possibly sub-stepped) time step.
#[derive(Clone, Debug)]
pub struct StepOutcome {
    pub state: SolverState,
    /// `∫ 2ν‖∇u‖²` over the step.
    pub visc_increment: f64,
    /// `∫ 2a·dissipation` over the step.
    pub damp_increment: f64,
    pub substeps: usize,
}

pub struct Integrator {
    grid: Grid,
    params: SimParams,
    cache: Vec<(u64, Vec<f64>)>,
}

impl Integrator {
    pub fn new(grid: &Grid, params: &SimParams) -> Result<Self> {
        params.validate()?;
        Ok(Self {
            grid: grid.clone(),
            params: params.clone(),
            cache: Vec::new(),
        })
    }

    pub fn params(&self) -> &SimParams {
        &self.params
    }

    /// `e^{-ν|k|²h}` on the ball, memoized per step size.
    fn multiplier(&mut self, h: f64) -> Vec<f64> {
        let key = h.to_bits();
        if let Some((_, m)) = self.cache.iter().find(|(k, _)| *k == key) {
            return m.clone();
        }
        let ksq = self.grid.wavenumber_sq();
        let m: Vec<f64> = self
            .grid
            .ball()
            .iter()
            .map(|&i| (-self.params.nu * ksq[i] * h).exp())
            .collect();
        if self.cache.len() >= 8 {
            self.cache.remove(0);
        }
        self.cache.push((key, m.clone()));
        m
    }

    fn viscous_rate(&self, u: &SpectralVectorField) -> f64 {
        2.0 * self.params.nu * gradient_norm_sq(u)
    }

    fn damping_rate(&self, ev: &NonlinearEval) -> f64 {
        2.0 * self.params.damping.a * ev.dissipation
    }

    /// Builds `Σ_j coef_j(i)·f_j(i)` over the ball.
    fn combine(&self, terms: &[(&[f64], f64, &SpectralVectorField)]) -> SpectralVectorField {
        let mut out = SpectralVectorField::zeros(&self.grid);
        let comps = out.components_mut();
        for (bi, &i) in self.grid.ball().iter().enumerate() {
            for c in 0..3 {
                let mut acc = Complex64::new(0.0, 0.0);
                for (mult, scale, f) in terms {
                    let w = if mult.is_empty() { *scale } else { mult[bi] * scale };
                    acc += f.component(c)[i] * w;
                }
                comps[c][i] = acc;
            }
        }
        out
    }

    /// Advances by `dt` from `state`, splitting the step when the damping
    /// stiffness guard `dt·a(e^{b v^r} - 1) <= 0.5` would be violated.
    pub fn advance(&mut self, state: &SolverState, dt: f64) -> Result<StepOutcome> {
        let u0 = state.field();
        let first = evaluate_nonlinear(u0, &self.params)?;
        let lambda = self.params.damping_stiffness(first.max_speed);
        let substeps = ((dt * lambda / DAMPING_STEP_LIMIT).ceil() as usize).max(1);
        let h = dt / substeps as f64;

        let mut u = u0.clone();
        let mut visc = 0.0;
        let mut damp = 0.0;
        let mut saturated = 0u64;
        let mut ev = Some(first);
        for _ in 0..substeps {
            let k1 = match ev.take() {
                Some(e) => e,
                None => evaluate_nonlinear(&u, &self.params)?,
            };
            let (next, dv, dd, sat) = match self.params.scheme_order {
                SchemeOrder::Two => self.heun(&u, k1, h)?,
                SchemeOrder::Four => self.rk4(&u, k1, h)?,
            };
            u = next;
            visc += dv;
            damp += dd;
            saturated += sat;
        }
        let time = state.time + dt;
        if !u.is_finite() {
            return Err(Error::NonFiniteState {
                time,
                detail: format!("non-finite coefficients after step of size {dt}"),
            });
        }
        Ok(StepOutcome {
            state: SolverState {
                time,
                field: u,
                saturation_count: state.saturation_count + saturated,
            },
            visc_increment: visc,
            damp_increment: damp,
            substeps,
        })
    }

    fn heun(
        &mut self,
        u: &SpectralVectorField,
        k1: NonlinearEval,
        h: f64,
    ) -> Result<(SpectralVectorField, f64, f64, u64)> {
        let e = self.multiplier(h);
        let pred = self.combine(&[(&e, 1.0, u), (&e, h, &k1.rhs)]);
        let k2 = evaluate_nonlinear(&pred, &self.params)?;
        let next = self.combine(&[(&e, 1.0, u), (&e, 0.5 * h, &k1.rhs), (&[], 0.5 * h, &k2.rhs)]);
        let visc = 0.5 * h * (self.viscous_rate(u) + self.viscous_rate(&pred));
        let damp = 0.5 * h * (self.damping_rate(&k1) + self.damping_rate(&k2));
        Ok((next, visc, damp, k1.saturated + k2.saturated))
    }

    fn rk4(
        &mut self,
        u: &SpectralVectorField,
        k1: NonlinearEval,
        h: f64,
    ) -> Result<(SpectralVectorField, f64, f64, u64)> {
        let eh = self.multiplier(0.5 * h);
        let e = self.multiplier(h);
        let u2 = self.combine(&[(&eh, 1.0, u), (&eh, 0.5 * h, &k1.rhs)]);
        let k2 = evaluate_nonlinear(&u2, &self.params)?;
        let u3 = self.combine(&[(&eh, 1.0, u), (&[], 0.5 * h, &k2.rhs)]);
        let k3 = evaluate_nonlinear(&u3, &self.params)?;
        let u4 = self.combine(&[(&e, 1.0, u), (&eh, h, &k3.rhs)]);
        let k4 = evaluate_nonlinear(&u4, &self.params)?;
        let next = self.combine(&[
            (&e, 1.0, u),
            (&e, h / 6.0, &k1.rhs),
            (&eh, h / 3.0, &k2.rhs),
            (&eh, h / 3.0, &k3.rhs),
            (&[], h / 6.0, &k4.rhs),
        ]);
        let visc = h
            * (self.viscous_rate(u) / 6.0
                + self.viscous_rate(&u2) / 3.0
                + self.viscous_rate(&u3) / 3.0
                + self.viscous_rate(&u4) / 6.0);
        let damp = h
            * (self.damping_rate(&k1) / 6.0
                + self.damping_rate(&k2) / 3.0
                + self.damping_rate(&k3) / 3.0
                + self.damping_rate(&k4) / 6.0);
        let sat = k1.saturated + k2.saturated + k3.saturated + k4.saturated;
        Ok((next, visc, damp, sat))
    }
}

/// One step of size `p.dt`.
pub fn step(s: &SolverState, p: &SimParams) -> Result<SolverState> {
    let mut integ = Integrator::new(s.field().grid(), p)?;
    Ok(integ.advance(s, p.dt)?.state)
}

#[derive(Clone, Debug)]
pub struct RunOutput {
    pub final_state: SolverState,
    pub ledger: EnergyLedger,
    pub snapshots: Vec<Snapshot>,
    /// Total number of sub-steps forced by the damping guard beyond one per step.
    pub extra_substeps: usize,
}

/// Number of steps to reach `t_end`, and the time after step `s`.
pub(crate) fn schedule(p: &SimParams) -> (usize, impl Fn(usize) -> f64 + '_) {
    let n = ((p.t_end / p.dt) - 1e-9).ceil().max(1.0) as usize;
    (n, move |s: usize| if s >= n { p.t_end } else { s as f64 * p.dt })
}

/// Integrates `u0` to `p.t_end`, recording a ledger row every
/// `p.output_every` steps and at the final time.
pub fn run(u0: &SpectralVectorField, p: &SimParams) -> Result<RunOutput> {
    u0.validate_state()?;
    let mut integ = Integrator::new(u0.grid(), p)?;
    let e0 = l2_norm(u0).powi(2);
    let mut ledger = EnergyLedger::default();
    ledger.rows.push(LedgerRow {
        t: 0.0,
        energy: e0,
        visc_cum: 0.0,
        damp_cum: 0.0,
        residual: 0.0,
        saturation_count: 0,
    });
    let mut snapshots = Vec::new();
    if p.snapshot_every > 0 {
        snapshots.push(Snapshot {
            time: 0.0,
            field: u0.clone(),
        });
    }

    let (n_steps, time_at) = schedule(p);
    let mut state = SolverState::new(u0.clone());
    let (mut visc_cum, mut damp_cum) = (0.0, 0.0);
    let mut extra_substeps = 0;
    for s in 1..=n_steps {
        let t_next = time_at(s);
        let outcome = match integ.advance(&state, t_next - state.time) {
            Ok(o) => o,
            Err(e) => {
                return Err(Error::RunAborted {
                    source: Box::new(e),
                    partial_ledger: Box::new(ledger),
                    last_state: Box::new(state),
                })
            }
        };
        state = outcome.state;
        state.time = t_next;
        visc_cum += outcome.visc_increment;
        damp_cum += outcome.damp_increment;
        extra_substeps += outcome.substeps - 1;
        if s % p.output_every == 0 || s == n_steps {
            let energy = l2_norm(state.field()).powi(2);
            ledger.rows.push(LedgerRow {
                t: t_next,
                energy,
                visc_cum,
                damp_cum,
                residual: e0 - energy - visc_cum - damp_cum,
                saturation_count: state.saturation_count,
            });
            if p.snapshot_every > 0 && (ledger.rows.len() - 1) % p.snapshot_every == 0 {
                snapshots.push(Snapshot {
                    time: t_next,
                    field: state.field().clone(),
                });
            }
        }
    }
    Ok(RunOutput {
        final_state: state,
        ledger,
        snapshots,
        extra_substeps,
    })
}
