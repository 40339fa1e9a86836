use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::nonlinearity::{ClipPolicy, DampingParams};

/// Stage order of the explicit integrating-factor Runge–Kutta scheme.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "u8", try_from = "u8")]
pub enum SchemeOrder {
    Two,
    Four,
}

impl From<SchemeOrder> for u8 {
    fn from(o: SchemeOrder) -> u8 {
        match o {
            SchemeOrder::Two => 2,
            SchemeOrder::Four => 4,
        }
    }
}

impl TryFrom<u8> for SchemeOrder {
    type Error = Error;

    fn try_from(v: u8) -> Result<Self> {
        match v {
            2 => Ok(SchemeOrder::Two),
            4 => Ok(SchemeOrder::Four),
            other => Err(Error::param("scheme_order", format!("must be 2 or 4, got {other}"))),
        }
    }
}

/// Largest admissible `dt·a(e^{b v^r} - 1)` before a step is split.
pub const DAMPING_STEP_LIMIT: f64 = 0.5;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimParams {
    pub nu: f64,
    pub damping: DampingParams,
    pub clip: ClipPolicy,
    pub dt: f64,
    pub t_end: f64,
    /// Steps between ledger rows.
    pub output_every: usize,
    pub scheme_order: SchemeOrder,
    /// Ledger rows between stored snapshots; 0 keeps none.
    pub snapshot_every: usize,
}

impl SimParams {
    pub fn new(
        nu: f64,
        damping: DampingParams,
        dt: f64,
        t_end: f64,
        output_every: usize,
        scheme_order: SchemeOrder,
    ) -> Result<Self> {
        let p = Self {
            nu,
            damping,
            clip: ClipPolicy::default_for(&damping),
            dt,
            t_end,
            output_every,
            scheme_order,
            snapshot_every: 0,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.nu.is_finite() && self.nu > 0.0) {
            return Err(Error::param("nu", format!("must be > 0, got {}", self.nu)));
        }
        DampingParams::new(self.damping.a, self.damping.b, self.damping.r)?;
        ClipPolicy::new(self.clip.v_max, self.clip.mode, &self.damping)?;
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::param("dt", format!("must be > 0, got {}", self.dt)));
        }
        if !(self.t_end.is_finite() && self.t_end > 0.0) {
            return Err(Error::param("t_end", format!("must be > 0, got {}", self.t_end)));
        }
        if self.output_every == 0 {
            return Err(Error::param("output_every", "must be a positive integer"));
        }
        Ok(())
    }

    pub fn with_snapshots(mut self, every_rows: usize) -> Self {
        self.snapshot_every = every_rows;
        self
    }

    /// Damping stiffness `Λ = a(e^{b v^r} - 1)` at speed `v`.
    pub fn damping_stiffness(&self, speed: f64) -> f64 {
        let v = speed.min(self.clip.v_max);
        self.damping.a * self.damping.growth(v)
    }
}
