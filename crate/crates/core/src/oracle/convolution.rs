use std::collections::BTreeMap;

use num_complex::Complex64;

use super::modes::{ball_radius_sq, project, wavenumber_sq, wavevector, DenseModeSet};
use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// `A_R div(u ⊗ u)` by direct convolution:
/// `T̂(k) = i Σ_{p+q=k} (k·û(q)) û(p)`, kept for `0 < |k| <= radius`.
pub(crate) fn convolve_transport(
    modes: &[([i64; 3], [Complex64; 3])],
    box_scale: f64,
    radius: f64,
) -> BTreeMap<[i64; 3], [Complex64; 3]> {
    let r2 = ball_radius_sq(radius);
    let mut out: BTreeMap<[i64; 3], [Complex64; 3]> = BTreeMap::new();
    for (p, up) in modes {
        for (q, uq) in modes {
            let k = [p[0] + q[0], p[1] + q[1], p[2] + q[2]];
            if k == [0, 0, 0] || wavenumber_sq(k, box_scale) > r2 {
                continue;
            }
            let kv = wavevector(k, box_scale);
            let kdot = uq[0] * kv[0] + uq[1] * kv[1] + uq[2] * kv[2];
            let coef = Complex64::new(0.0, 1.0) * kdot;
            let e = out.entry(k).or_insert([ZERO; 3]);
            for c in 0..3 {
                e[c] += coef * up[c];
            }
        }
    }
    for (k, v) in out.iter_mut() {
        *v = project(wavevector(*k, box_scale), *v);
    }
    out
}

/// Galerkin transport of a dense mode set, truncated to `radius`. Modes whose
/// output is exactly zero are dropped.
pub fn dense_transport(m: &DenseModeSet, radius: f64) -> Result<DenseModeSet> {
    if !(radius > 0.0) {
        return Err(Error::param("radius", format!("must be > 0, got {radius}")));
    }
    let list: Vec<_> = m.modes.iter().map(|d| (d.k, d.amp)).collect();
    let out = convolve_transport(&list, m.box_scale, radius);
    DenseModeSet::from_map(m.box_scale, m.base_points, m.trunc_radius, out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::DenseMode;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn single_shear_mode_gives_empty_set() {
        let modes = vec![
            DenseMode { k: [1, 0, 0], amp: [ZERO, c(0.5, 0.0), ZERO] },
            DenseMode { k: [-1, 0, 0], amp: [ZERO, c(0.5, 0.0), ZERO] },
        ];
        let m = DenseModeSet::new(1.0, 8, 2.0, modes).unwrap();
        assert!(dense_transport(&m, 2.0).unwrap().is_empty());
    }

    #[test]
    fn two_mode_triad_by_hand() {
        // u = (cos z, cos x, 0): u·∇u = (0, -sin x cos z, 0), whose (1,0,1)
        // coefficient in the y-component is -1/(4i) = i/4.
        let half = c(0.5, 0.0);
        let modes = vec![
            DenseMode { k: [0, 0, 1], amp: [half, ZERO, ZERO] },
            DenseMode { k: [0, 0, -1], amp: [half, ZERO, ZERO] },
            DenseMode { k: [1, 0, 0], amp: [ZERO, half, ZERO] },
            DenseMode { k: [-1, 0, 0], amp: [ZERO, half, ZERO] },
        ];
        let m = DenseModeSet::new(1.0, 8, 2.0, modes).unwrap();
        let t = dense_transport(&m, 2.0).unwrap();
        let map = t.as_map();
        assert_eq!(t.len(), 4);
        let v = map[&[1, 0, 1]];
        assert!((v[1] - c(0.0, 0.25)).norm() < 1e-15);
        assert!(v[0].norm() < 1e-15 && v[2].norm() < 1e-15);
        let v = map[&[1, 0, -1]];
        assert!((v[1] - c(0.0, 0.25)).norm() < 1e-15);
    }
}
