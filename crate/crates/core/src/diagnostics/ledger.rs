use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One energy-balance record.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LedgerRow {
    pub t: f64,
    pub energy: f64,
    /// `2ν ∫₀ᵗ ‖∇u‖²`.
    pub visc_cum: f64,
    /// `2a ∫₀ᵗ ∫ (e^{b|u|^r} - 1)|u|²`.
    pub damp_cum: f64,
    /// `E(0) - E(t) - visc_cum - damp_cum`.
    pub residual: f64,
    pub saturation_count: u64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct EnergyLedger {
    pub rows: Vec<LedgerRow>,
}

impl EnergyLedger {
    pub fn initial_energy(&self) -> Option<f64> {
        self.rows.first().map(|r| r.energy)
    }

    pub fn max_abs_residual(&self) -> f64 {
        self.rows.iter().map(|r| r.residual.abs()).fold(0.0, f64::max)
    }
}

/// Slack allowed between consecutive energies, relative to `E(0)`.
pub const MONOTONE_SLACK: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EnergyVerdict {
    pub passed: bool,
    pub tol: f64,
    pub initial_energy: f64,
    /// Row with the most negative `residual / E(0)`.
    pub worst_row: usize,
    pub worst_relative_residual: f64,
    pub max_abs_residual: f64,
    /// Human-readable description of every failed check, naming the row.
    pub failures: Vec<String>,
}

/// Checks the discrete energy inequality `residual >= -tol·E(0)`, monotone
/// decay with slack `1e-10·E(0)`, and the structural ledger invariants.
pub fn verify_energy(ledger: &EnergyLedger, tol: f64) -> Result<EnergyVerdict> {
    let first = ledger.rows.first().ok_or(Error::EmptyLedger)?;
    if !(tol.is_finite() && tol >= 0.0) {
        return Err(Error::param("tol", format!("must be >= 0, got {tol}")));
    }
    let e0 = first.energy;
    let mut failures = Vec::new();
    let mut worst_row = 0;
    let mut worst = f64::INFINITY;
    for (i, row) in ledger.rows.iter().enumerate() {
        let values = [row.t, row.energy, row.visc_cum, row.damp_cum, row.residual];
        if values.iter().any(|v| !v.is_finite()) {
            failures.push(format!("row {i}: non-finite entry"));
            continue;
        }
        if row.energy < 0.0 || row.visc_cum < 0.0 || row.damp_cum < 0.0 {
            failures.push(format!("row {i} (t = {}): negative energy or dissipation", row.t));
        }
        let rel = if e0 > 0.0 { row.residual / e0 } else { row.residual };
        if rel < worst {
            worst = rel;
            worst_row = i;
        }
        if row.residual < -tol * e0 {
            failures.push(format!(
                "row {i} (t = {}): residual {:e} below -tol·E(0) = {:e}",
                row.t,
                row.residual,
                -tol * e0
            ));
        }
        if i > 0 {
            let prev = &ledger.rows[i - 1];
            if row.t <= prev.t {
                failures.push(format!("row {i}: time {} not after {}", row.t, prev.t));
            }
            if row.energy > prev.energy + MONOTONE_SLACK * e0 {
                failures.push(format!(
                    "row {i} (t = {}): energy increased from {:e} to {:e}",
                    row.t, prev.energy, row.energy
                ));
            }
            if row.visc_cum < prev.visc_cum || row.damp_cum < prev.damp_cum {
                failures.push(format!("row {i} (t = {}): cumulative dissipation decreased", row.t));
            }
        }
    }
    Ok(EnergyVerdict {
        passed: failures.is_empty(),
        tol,
        initial_energy: e0,
        worst_row,
        worst_relative_residual: worst,
        max_abs_residual: ledger.max_abs_residual(),
        failures,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(t: f64, energy: f64, visc: f64) -> LedgerRow {
        LedgerRow {
            t,
            energy,
            visc_cum: visc,
            damp_cum: 0.0,
            residual: 1.0 - energy - visc,
            saturation_count: 0,
        }
    }

    #[test]
    fn empty_ledger_is_an_error() {
        assert!(matches!(
            verify_energy(&EnergyLedger::default(), 1e-4),
            Err(Error::EmptyLedger)
        ));
    }

    #[test]
    fn zero_ledger_passes() {
        let l = EnergyLedger {
            rows: vec![
                LedgerRow {
                    t: 0.0,
                    energy: 0.0,
                    visc_cum: 0.0,
                    damp_cum: 0.0,
                    residual: 0.0,
                    saturation_count: 0,
                };
                1
            ],
        };
        assert!(verify_energy(&l, 1e-4).unwrap().passed);
    }

    #[test]
    fn corrupted_row_is_named() {
        let mut l = EnergyLedger {
            rows: vec![row(0.0, 1.0, 0.0), row(0.1, 0.8, 0.2), row(0.2, 0.7, 0.3)],
        };
        assert!(verify_energy(&l, 1e-4).unwrap().passed);
        l.rows[2] = row(0.2, 0.9, 0.3);
        let v = verify_energy(&l, 1e-4).unwrap();
        assert!(!v.passed);
        assert!(v.failures.iter().any(|f| f.starts_with("row 2")));
        assert_eq!(v.worst_row, 2);
    }
}
