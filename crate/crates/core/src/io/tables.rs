//! CSV and JSON outputs. Every file carries the echoed configuration: CSV as
//! leading `#` comment lines, JSON as a `config` member.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::diagnostics::{EnergyLedger, LedgerRow};
use crate::error::{Error, Result};

pub const LEDGER_HEADER: [&str; 6] = ["t", "energy", "visc_cum", "damp_cum", "residual", "saturation_count"];

fn comment_block(config: &str) -> String {
    config.lines().map(|l| format!("# {l}\n")).collect()
}

/// Writes serializable rows as CSV below the commented config.
pub fn write_csv<T: Serialize>(path: impl AsRef<Path>, rows: &[T], config: &str) -> Result<()> {
    let mut f = fs::File::create(path)?;
    f.write_all(comment_block(config).as_bytes())?;
    let mut w = csv::Writer::from_writer(f);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_ledger_csv(path: impl AsRef<Path>, ledger: &EnergyLedger, config: &str) -> Result<()> {
    let mut f = fs::File::create(path)?;
    f.write_all(comment_block(config).as_bytes())?;
    let mut w = csv::Writer::from_writer(f);
    w.write_record(LEDGER_HEADER)?;
    for r in &ledger.rows {
        w.write_record([
            format!("{:?}", r.t),
            format!("{:?}", r.energy),
            format!("{:?}", r.visc_cum),
            format!("{:?}", r.damp_cum),
            format!("{:?}", r.residual),
            r.saturation_count.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a ledger written by [`write_ledger_csv`]; `#` lines are skipped and
/// the header must match exactly.
pub fn read_ledger_csv(path: impl AsRef<Path>) -> Result<EnergyLedger> {
    let mut r = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_path(path)?;
    let header = r.headers()?.clone();
    if header.iter().ne(LEDGER_HEADER) {
        return Err(Error::LedgerFormat(format!(
            "header must be `{}`, got `{}`",
            LEDGER_HEADER.join(","),
            header.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let mut ledger = EnergyLedger::default();
    for (i, rec) in r.records().enumerate() {
        let rec = rec?;
        let num = |j: usize| -> Result<f64> {
            rec[j].trim().parse::<f64>().map_err(|e| {
                Error::LedgerFormat(format!("data row {}: column {}: {e}", i + 1, LEDGER_HEADER[j]))
            })
        };
        let sat = rec[5].trim().parse::<u64>().map_err(|e| {
            Error::LedgerFormat(format!("data row {}: column saturation_count: {e}", i + 1))
        })?;
        ledger.rows.push(LedgerRow {
            t: num(0)?,
            energy: num(1)?,
            visc_cum: num(2)?,
            damp_cum: num(3)?,
            residual: num(4)?,
            saturation_count: sat,
        });
    }
    Ok(ledger)
}

/// Pretty JSON with the config echo attached under `config`.
pub fn write_json<T: Serialize>(path: impl AsRef<Path>, value: &T, config: &str) -> Result<()> {
    let mut v = serde_json::to_value(value)?;
    if let serde_json::Value::Object(map) = &mut v {
        map.insert("config".into(), serde_json::Value::String(config.to_string()));
    }
    fs::write(path, serde_json::to_string_pretty(&v)? + "\n")?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ledger_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("ledger.csv");
        let ledger = EnergyLedger {
            rows: vec![
                LedgerRow { t: 0.0, energy: 7.75, visc_cum: 0.0, damp_cum: 0.0, residual: 0.0, saturation_count: 0 },
                LedgerRow { t: 0.1, energy: 1.0 / 3.0, visc_cum: 0.2, damp_cum: 1e-17, residual: -3e-9, saturation_count: 4 },
            ],
        };
        write_ledger_csv(&path, &ledger, "[grid]\nn_points = 8").unwrap();
        let text = fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("# [grid]\n# n_points = 8\nt,energy,"));
        assert_eq!(read_ledger_csv(&path).unwrap(), ledger);
    }

    #[test]
    fn wrong_header_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.csv");
        fs::write(&path, "time,energy\n0,1\n").unwrap();
        assert!(matches!(read_ledger_csv(&path), Err(Error::LedgerFormat(_))));
    }
}
