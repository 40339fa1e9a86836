use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::spectral::{Grid, SpectralVectorField};

pub const MAX_DENSE_MODES: usize = 500;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DenseMode {
    pub k: [i64; 3],
    #[serde(serialize_with = "ser_amp")]
    pub amp: [Complex64; 3],
}

fn ser_amp<S: serde::Serializer>(amp: &[Complex64; 3], s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(3))?;
    for c in amp {
        seq.serialize_element(&[c.re, c.im])?;
    }
    seq.end()
}

/// Explicit list of Fourier modes, independent of any FFT layout.
///
/// `base_points` is the collocation resolution the set models; oracles that
/// sample in physical space use multiples of it. `trunc_radius` is the ball
/// on which outputs are reported.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DenseModeSet {
    pub box_scale: f64,
    pub base_points: usize,
    pub trunc_radius: f64,
    pub modes: Vec<DenseMode>,
}

pub(crate) fn ball_radius_sq(radius: f64) -> f64 {
    radius * radius * (1.0 + 1e-12)
}

/// Nonzero integer modes with `|k/L| <= radius`, in lexicographic order.
pub(crate) fn ball_modes(box_scale: f64, radius: f64) -> Vec<[i64; 3]> {
    let kmax = (radius * box_scale).floor() as i64 + 1;
    let r2 = ball_radius_sq(radius);
    let mut out = Vec::new();
    for a in -kmax..=kmax {
        for b in -kmax..=kmax {
            for c in -kmax..=kmax {
                let k = [a, b, c];
                if k != [0, 0, 0] && wavenumber_sq(k, box_scale) <= r2 {
                    out.push(k);
                }
            }
        }
    }
    out
}

pub(crate) fn wavevector(k: [i64; 3], box_scale: f64) -> [f64; 3] {
    k.map(|v| v as f64 / box_scale)
}

pub(crate) fn wavenumber_sq(k: [i64; 3], box_scale: f64) -> f64 {
    wavevector(k, box_scale).iter().map(|v| v * v).sum()
}

pub(crate) fn neg(k: [i64; 3]) -> [i64; 3] {
    k.map(|v| -v)
}

/// `(I - kkᵀ/|k|²) v`.
pub(crate) fn project(k: [f64; 3], v: [Complex64; 3]) -> [Complex64; 3] {
    let ksq: f64 = k.iter().map(|x| x * x).sum();
    if ksq == 0.0 {
        return [Complex64::new(0.0, 0.0); 3];
    }
    let dot = v[0] * k[0] + v[1] * k[1] + v[2] * k[2];
    [0, 1, 2].map(|c| v[c] - dot * (k[c] / ksq))
}

impl DenseModeSet {
    pub fn new(
        box_scale: f64,
        base_points: usize,
        trunc_radius: f64,
        modes: Vec<DenseMode>,
    ) -> Result<Self> {
        if modes.len() > MAX_DENSE_MODES {
            return Err(Error::ModeCountExceeded {
                count: modes.len(),
                limit: MAX_DENSE_MODES,
            });
        }
        let set = Self {
            box_scale,
            base_points,
            trunc_radius,
            modes,
        };
        let map = set.as_map();
        for m in &set.modes {
            let partner = map.get(&neg(m.k)).ok_or_else(|| {
                Error::InvalidField(format!("mode {:?} has no conjugate partner", m.k))
            })?;
            let defect = (0..3)
                .map(|c| (partner[c] - m.amp[c].conj()).norm())
                .fold(0.0, f64::max);
            let scale = m.amp.iter().map(|a| a.norm()).fold(1.0, f64::max);
            if defect > 1e-12 * scale {
                return Err(Error::InvalidField(format!(
                    "mode {:?} is not the conjugate of its partner",
                    m.k
                )));
            }
        }
        Ok(set)
    }

    pub(crate) fn from_map(
        box_scale: f64,
        base_points: usize,
        trunc_radius: f64,
        map: BTreeMap<[i64; 3], [Complex64; 3]>,
    ) -> Result<Self> {
        let modes = map
            .into_iter()
            .filter(|(_, amp)| amp.iter().any(|a| *a != Complex64::new(0.0, 0.0)))
            .map(|(k, amp)| DenseMode { k, amp })
            .collect();
        Self::new(box_scale, base_points, trunc_radius, modes)
    }

    /// Nonzero coefficients of a lattice field.
    pub fn from_field(u: &SpectralVectorField) -> Result<Self> {
        let g = u.grid();
        let mut map = BTreeMap::new();
        for i in 0..g.len() {
            let amp = u.at(i);
            if amp.iter().any(|a| *a != Complex64::new(0.0, 0.0)) {
                map.insert(g.mode_of_index(i), amp);
            }
        }
        Self::from_map(g.box_scale(), g.n_points(), g.trunc_radius(), map)
    }

    /// Places the coefficients on `grid`; modes that do not fit are an error.
    pub fn to_field(&self, grid: &Grid) -> Result<SpectralVectorField> {
        let mut u = SpectralVectorField::zeros(grid);
        for m in &self.modes {
            let i = grid.index_of_mode(m.k).ok_or_else(|| {
                Error::InvalidField(format!("mode {:?} not representable on the grid", m.k))
            })?;
            u.set(i, m.amp);
        }
        Ok(u)
    }

    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    pub(crate) fn as_map(&self) -> BTreeMap<[i64; 3], [Complex64; 3]> {
        self.modes.iter().map(|m| (m.k, m.amp)).collect()
    }

    /// `Σ |û_k|²` over the listed modes.
    pub fn coefficient_norm_sq(&self) -> f64 {
        self.modes
            .iter()
            .map(|m| m.amp.iter().map(|a| a.norm_sqr()).sum::<f64>())
            .sum()
    }

    /// Real L² pairing `(2πL)³ Σ Re(û·conj v̂)`.
    pub fn inner(&self, other: &Self) -> f64 {
        let om = other.as_map();
        let s: f64 = self
            .modes
            .iter()
            .filter_map(|m| om.get(&m.k).map(|b| (0..3).map(|c| (m.amp[c] * b[c].conj()).re).sum::<f64>()))
            .sum();
        s * (2.0 * std::f64::consts::PI * self.box_scale).powi(3)
    }

    /// `‖self - reference‖ / ‖reference‖` in coefficient norm; the absolute
    /// difference when the reference vanishes.
    pub fn relative_diff(&self, reference: &Self) -> f64 {
        let mut diff = reference.as_map();
        for v in diff.values_mut() {
            for a in v.iter_mut() {
                *a = -*a;
            }
        }
        for m in &self.modes {
            let e = diff.entry(m.k).or_insert([Complex64::new(0.0, 0.0); 3]);
            for c in 0..3 {
                e[c] += m.amp[c];
            }
        }
        let num: f64 = diff
            .values()
            .map(|v| v.iter().map(|a| a.norm_sqr()).sum::<f64>())
            .sum::<f64>()
            .sqrt();
        let den = reference.coefficient_norm_sq().sqrt();
        if den > 0.0 {
            num / den
        } else {
            num
        }
    }
}
