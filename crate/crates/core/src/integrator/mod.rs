//! Initial data and integrating-factor Runge–Kutta time stepping.

mod init;
mod params;
mod stepper;

pub use init::{init_random_divfree, init_taylor_green};
pub use params::{SchemeOrder, SimParams, DAMPING_STEP_LIMIT};
pub use stepper::{
    rhs_nonlinear, run, step, Integrator, RunOutput, Snapshot, SolverState, StepOutcome,
};


