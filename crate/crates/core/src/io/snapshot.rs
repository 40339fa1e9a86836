//! Binary spectral snapshots.
//!
//! Layout: the 8-byte magic `NSDSPEC1`, a little-endian `u64` header length,
//! a UTF-8 JSON header of that length, then the coefficients. Data is
//! component-major; within a component the flat index is
//! `(i0·n + i1)·n + i2` with `i2` fastest, and each coefficient is stored as
//! `(re, im)` little-endian in the precision named by the header.

use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{Grid, SpectralVectorField};

pub const SNAPSHOT_MAGIC: &[u8; 8] = b"NSDSPEC1";
pub const SNAPSHOT_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Precision {
    Complex128,
    Complex64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SnapshotHeader {
    pub format: String,
    pub version: u32,
    pub n_points: usize,
    pub box_scale: f64,
    pub trunc_radius: f64,
    pub time: f64,
    pub field_name: String,
    pub endianness: String,
    pub layout: String,
    pub precision: Precision,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub config: Option<String>,
}

const LAYOUT: &str = "component-major, (i0*n + i1)*n + i2, i2 fastest";

fn header_for(u: &SpectralVectorField, time: f64, name: &str, precision: Precision, config: Option<&str>) -> SnapshotHeader {
    let g = u.grid();
    SnapshotHeader {
        format: "spectral-vector-field".into(),
        version: SNAPSHOT_VERSION,
        n_points: g.n_points(),
        box_scale: g.box_scale(),
        trunc_radius: g.trunc_radius(),
        time,
        field_name: name.into(),
        endianness: "little".into(),
        layout: LAYOUT.into(),
        precision,
        config: config.map(str::to_string),
    }
}

/// Serializes a field into the snapshot byte format.
pub fn encode_snapshot(
    u: &SpectralVectorField,
    time: f64,
    field_name: &str,
    precision: Precision,
    config: Option<&str>,
) -> Result<Vec<u8>> {
    let header = serde_json::to_vec(&header_for(u, time, field_name, precision, config))?;
    let mut out = Vec::with_capacity(16 + header.len() + 3 * u.grid().len() * 16);
    out.extend_from_slice(SNAPSHOT_MAGIC);
    out.extend_from_slice(&(header.len() as u64).to_le_bytes());
    out.extend_from_slice(&header);
    for comp in u.components() {
        for z in comp {
            match precision {
                Precision::Complex128 => {
                    out.extend_from_slice(&z.re.to_le_bytes());
                    out.extend_from_slice(&z.im.to_le_bytes());
                }
                Precision::Complex64 => {
                    out.extend_from_slice(&(z.re as f32).to_le_bytes());
                    out.extend_from_slice(&(z.im as f32).to_le_bytes());
                }
            }
        }
    }
    Ok(out)
}

/// Parses the snapshot byte format back into a header and field.
pub fn decode_snapshot(bytes: &[u8]) -> Result<(SnapshotHeader, SpectralVectorField)> {
    let mut cur = bytes;
    let mut magic = [0u8; 8];
    cur.read_exact(&mut magic)
        .map_err(|_| Error::Snapshot("file too short for magic".into()))?;
    if &magic != SNAPSHOT_MAGIC {
        return Err(Error::Snapshot("bad magic".into()));
    }
    let mut len = [0u8; 8];
    cur.read_exact(&mut len)
        .map_err(|_| Error::Snapshot("file too short for header length".into()))?;
    let len = u64::from_le_bytes(len) as usize;
    if len > cur.len() {
        return Err(Error::Snapshot(format!("header length {len} exceeds file size")));
    }
    let header: SnapshotHeader = serde_json::from_slice(&cur[..len])?;
    cur = &cur[len..];
    if header.version != SNAPSHOT_VERSION {
        return Err(Error::Snapshot(format!("unsupported version {}", header.version)));
    }
    if header.endianness != "little" {
        return Err(Error::Snapshot(format!("unsupported endianness {}", header.endianness)));
    }
    let grid = Grid::new(header.n_points, header.box_scale, header.trunc_radius)?;
    let n = grid.len();
    let width = match header.precision {
        Precision::Complex128 => 16,
        Precision::Complex64 => 8,
    };
    if cur.len() != 3 * n * width {
        return Err(Error::Snapshot(format!(
            "expected {} data bytes, found {}",
            3 * n * width,
            cur.len()
        )));
    }
    let mut comps: [Vec<Complex64>; 3] = Default::default();
    for (c, comp) in comps.iter_mut().enumerate() {
        let chunk = &cur[c * n * width..(c + 1) * n * width];
        *comp = chunk
            .chunks_exact(width)
            .map(|b| match header.precision {
                Precision::Complex128 => Complex64::new(
                    f64::from_le_bytes(b[..8].try_into().expect("8 bytes")),
                    f64::from_le_bytes(b[8..].try_into().expect("8 bytes")),
                ),
                Precision::Complex64 => Complex64::new(
                    f32::from_le_bytes(b[..4].try_into().expect("4 bytes")) as f64,
                    f32::from_le_bytes(b[4..].try_into().expect("4 bytes")) as f64,
                ),
            })
            .collect();
    }
    let field = SpectralVectorField::from_components(&grid, comps)?;
    Ok((header, field))
}

pub fn write_snapshot(
    path: impl AsRef<Path>,
    u: &SpectralVectorField,
    time: f64,
    field_name: &str,
    config: Option<&str>,
) -> Result<()> {
    let bytes = encode_snapshot(u, time, field_name, Precision::Complex128, config)?;
    let mut f = fs::File::create(path)?;
    f.write_all(&bytes)?;
    Ok(())
}

pub fn read_snapshot(path: impl AsRef<Path>) -> Result<(SnapshotHeader, SpectralVectorField)> {
    decode_snapshot(&fs::read(path)?)
}
