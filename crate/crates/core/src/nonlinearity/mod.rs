//! Pointwise exponential damping, dealiased transport and the monotonicity
//! gaps behind the stability estimates.

mod damping;
mod lemma;
mod transport;

pub use damping::{
    damping_dissipation, damping_pointwise, damping_term, ClipMode, ClipPolicy, DampingParams,
    PointDamping, EXP_ARG_LIMIT,
};
pub use lemma::{
    gap_scale, lemma2_gap, lemma2_power_gap, lemma_sweep, standard_cases, GapCase, GapCaseReport,
    LemmaSweepReport,
};
pub use transport::transport_term;

pub(crate) use damping::{collocate_damping, project_damping};
pub(crate) use transport::transport_from_physical;
