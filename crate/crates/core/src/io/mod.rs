//! Run configuration, snapshot files and CSV/JSON outputs.

mod config;
mod snapshot;
mod tables;

pub use config::{
    parse_config, parse_config_with, DeltaKind, GridConfig, InitialCondition, RunConfig,
    StabilityConfig, SweepConfig,
};
pub use snapshot::{
    decode_snapshot, encode_snapshot, read_snapshot, write_snapshot, Precision, SnapshotHeader,
    SNAPSHOT_MAGIC, SNAPSHOT_VERSION,
};
pub use tables::{read_ledger_csv, write_csv, write_json, write_ledger_csv, LEDGER_HEADER};
