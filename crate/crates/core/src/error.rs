use thiserror::Error;

use crate::diagnostics::EnergyLedger;
use crate::integrator::SolverState;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("shape mismatch: expected {expected} samples per component, got {got}")]
    ShapeMismatch { expected: usize, got: usize },

    #[error("fields live on different grids")]
    GridMismatch,

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("invalid field: {0}")]
    InvalidField(String),

    /// A pointwise speed exceeded the clip threshold under `ClipMode::Error`.
    #[error("overflow risk at grid point {index:?}: |u| = {speed:e} exceeds v_max = {v_max:e}")]
    OverflowRisk {
        index: [usize; 3],
        speed: f64,
        v_max: f64,
    },

    #[error("non-finite state at t = {time}: {detail}")]
    NonFiniteState { time: f64, detail: String },

    #[error("run aborted at t = {}: {source}", .last_state.time)]
    RunAborted {
        source: Box<Error>,
        partial_ledger: Box<EnergyLedger>,
        last_state: Box<SolverState>,
    },

    #[error("energy ledger is empty")]
    EmptyLedger,

    #[error("invariant violated: {0}")]
    InvariantViolation(String),

    #[error("dense mode set holds {count} modes, limit is {limit}")]
    ModeCountExceeded { count: usize, limit: usize },

    #[error("config error{}: {message}", line.map(|l| format!(" at line {l}")).unwrap_or_default())]
    Config { line: Option<usize>, message: String },

    #[error("snapshot format: {0}")]
    Snapshot(String),

    #[error("ledger csv: {0}")]
    LedgerFormat(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    /// Short machine-readable tag, used in CLI error JSON.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidGrid(_) => "invalid_grid",
            Error::ShapeMismatch { .. } => "shape_mismatch",
            Error::GridMismatch => "grid_mismatch",
            Error::InvalidParameter { .. } => "invalid_parameter",
            Error::InvalidField(_) => "invalid_field",
            Error::OverflowRisk { .. } => "overflow_risk",
            Error::NonFiniteState { .. } => "non_finite_state",
            Error::RunAborted { .. } => "run_aborted",
            Error::EmptyLedger => "empty_ledger",
            Error::InvariantViolation(_) => "invariant_violation",
            Error::ModeCountExceeded { .. } => "mode_count_exceeded",
            Error::Config { .. } => "config",
            Error::Snapshot(_) => "snapshot",
            Error::LedgerFormat(_) => "ledger_format",
            Error::Io(_) => "io",
            Error::Json(_) => "json",
            Error::Csv(_) => "csv",
        }
    }
}
