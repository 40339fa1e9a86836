//! Energy-law verification, paired-trajectory stability and decay probes.

mod decay;
mod ledger;
mod stability;

pub use decay::{
    damping_flux_l1, decay_probe, half_life, k1k2_split, DecayReport, DecayRow,
    INTERPOLATION_SLACK, SPLIT_TOL,
};
pub use ledger::{verify_energy, EnergyLedger, EnergyVerdict, LedgerRow, MONOTONE_SLACK};
pub use stability::{stability_experiment, StabilityReport, MARGIN_SLACK};
