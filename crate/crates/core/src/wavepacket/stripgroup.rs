use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::field::datum::Datum;
use crate::geometry::caps::Cap;
use crate::geometry::strips::Strip;
use crate::wavepacket::decompose::{decompose, PacketFamily};

/// A cap's datum split across the strips of `S_tau[R]`: `f_tau = sum_S f_S`
/// coefficientwise, each `f_S` assembled from the tubes whose initial
/// position falls in the strip's slab at `t = 0`.
#[derive(Clone, Debug)]
pub struct StripGroup {
    pub cap: Cap,
    pub r: f64,
    pub k: f64,
    groups: BTreeMap<[i64; 2], (Strip, Datum)>,
}

impl StripGroup {
    pub fn iter(&self) -> impl Iterator<Item = (&[i64; 2], &(Strip, Datum))> {
        self.groups.iter()
    }

    pub fn len(&self) -> usize {
        self.groups.len()
    }

    pub fn is_empty(&self) -> bool {
        self.groups.is_empty()
    }

    pub fn reconstruct(&self, grid: std::sync::Arc<crate::field::grid::Grid>) -> Result<Datum> {
        let mut acc = Datum::new(grid);
        for (_, (_, d)) in self.groups.iter() {
            acc.add(d)?;
        }
        Ok(acc)
    }
}

/// Splits `f_tau` (supported in a `(2K)^{-1}`-cap `tau`) into strip pieces at
/// scale `R`. The underlying wave-packet family is partitioned by the strip
/// lattice, so the reconstruction identity is coefficientwise exact.
pub fn group_by_strip(f_tau: &Datum, tau: &Cap, r: f64, k: f64) -> Result<StripGroup> {
    let n = f_tau.grid().n;
    if (tau.radius - 1.0 / (2.0 * k)).abs() > 1e-12 {
        return Err(Error::precondition(format!(
            "cap radius {} does not match the (2K)^-1 = {} convention",
            tau.radius,
            1.0 / (2.0 * k)
        )));
    }
    if !f_tau.iter().all(|(kk, _)| {
        let xi = f_tau.grid().xi_of(*kk);
        tau.contains(&xi, n)
    }) {
        return Err(Error::precondition("datum support escapes the cap"));
    }
    let family: PacketFamily = decompose(f_tau, r)?;
    let spacing = r / k;
    let mut v = [0.0; 2];
    for ax in 0..n {
        v[ax] = -2.0 * tau.center[ax];
    }
    let mut groups: BTreeMap<[i64; 2], (Strip, Datum)> = BTreeMap::new();
    for (_, comp) in family.iter() {
        let mut idx = [0i64; 2];
        for ax in 0..n {
            idx[ax] = (comp.tube.x0[ax] / spacing).round() as i64;
        }
        let entry = groups.entry(idx).or_insert_with(|| {
            let mut x0 = [0.0; 2];
            for ax in 0..n {
                x0[ax] = idx[ax] as f64 * spacing;
            }
            (Strip { x0, idx, v, r, k }, Datum::new(f_tau.grid().clone()))
        });
        entry.1.add(&comp.datum)?;
    }
    Ok(StripGroup { cap: *tau, r, k, groups })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::grid::{Grid, ZPoint};
    use crate::field::synth::fill_slice;
    use crate::geometry::tubes::Tube;
    use crate::wavepacket::packets::build_packet_datum;
    use num_complex::Complex64;
    use std::sync::Arc;

    fn grid_for(r: f64) -> Arc<Grid> {
        let l = 4.0 * r;
        let nx = ((4.0 * l / (2.0 * std::f64::consts::PI) * 2.0).ceil() as usize)
            .next_power_of_two();
        let nt = ((2.0 * r) / 0.45).ceil() as usize + 1;
        Arc::new(Grid::new(1, l, nx, -r, r, nt).unwrap())
    }

    #[test]
    fn cap_radius_mismatch_rejected() {
        let g = grid_for(64.0);
        let d = Datum::new(g);
        let tau = Cap::new([0.0, 0.0], 0.25); // K = 4 wants radius 1/8
        assert!(group_by_strip(&d, &tau, 64.0, 4.0).is_err());
    }

    #[test]
    fn single_packet_lands_in_one_strip() {
        // One tube: the packet support (radius 4 R^{-1/2}) fits inside the
        // (2K)^{-1}-cap for K = 2, and its positions stay in one strip slab.
        let r = 256.0;
        let g = grid_for(r);
        let tau = Cap::new([0.125, 0.0], 0.25);
        let tube = Tube::new([0.0, 0.0], [-0.25, 0.0], r);
        let f = build_packet_datum(g.clone(), &tube).unwrap();
        let groups = group_by_strip(&f, &tau, r, 2.0).unwrap();
        let mut best = ([99i64, 0], 0.0);
        let mut total = 0.0;
        for (idx, (_, d)) in groups.iter() {
            let m = d.l2_norm().powi(2);
            total += m;
            if m > best.1 {
                best = (*idx, m);
            }
        }
        assert_eq!(best.0, [0, 0]);
        assert!(best.1 / total > 0.99, "strip mass fraction {}", best.1 / total);
    }

    #[test]
    fn reconstruction_identity_coefficientwise() {
        let r = 64.0;
        let g = grid_for(r);
        let tau = Cap::new([0.25, 0.0], 0.125);
        // Random datum supported in tau.
        let mut f = Datum::new(g.clone());
        let d = Datum::random_band(g.clone(), 0.5, 3).unwrap();
        for (k, a) in d.iter() {
            let xi = g.xi_of(*k);
            if tau.contains(&xi, 1) {
                f.add_coeff(*k, *a).unwrap();
            }
        }
        assert!(!f.is_empty());
        let groups = group_by_strip(&f, &tau, r, 4.0).unwrap();
        let recon = groups.reconstruct(g).unwrap();
        assert!(recon.l2_distance(&f) / f.l2_norm() < 1e-10);
    }

    #[test]
    fn leakage_outside_enlarged_strip_is_small() {
        let r = 256.0;
        let g = grid_for(r);
        let tau = Cap::new([0.125, 0.0], 0.125);
        let mut f = Datum::new(g.clone());
        let d = Datum::random_band(g.clone(), 0.5, 5).unwrap();
        for (k, a) in d.iter() {
            let xi = g.xi_of(*k);
            if tau.contains(&xi, 1) {
                f.add_coeff(*k, *a).unwrap();
            }
        }
        let norm = f.l2_norm();
        let groups = group_by_strip(&f, &tau, r, 4.0).unwrap();
        // Strip with the largest mass: check |U f_S| outside the enlarged
        // strip within B(0, R).
        let (_, (strip, fs)) = groups
            .iter()
            .max_by(|a, b| {
                let ma = a.1 .1.l2_norm();
                let mb = b.1 .1.l2_norm();
                ma.partial_cmp(&mb).unwrap()
            })
            .unwrap();
        let m = g.spatial_len();
        let mut buf = vec![Complex64::new(0.0, 0.0); m];
        let mut sup: f64 = 0.0;
        for jt in (0..g.nt).step_by(4) {
            let t = g.t(jt);
            if t.abs() > r {
                continue;
            }
            fill_slice(fs, t, &mut buf);
            for (flat, v) in buf.iter().enumerate() {
                let x = g.x_of(flat);
                if x[0].abs() > r {
                    continue;
                }
                let z = ZPoint::new(x, t);
                if !strip.contains_enlarged(&z, 1) {
                    sup = sup.max(v.norm());
                }
            }
        }
        assert!(sup / norm <= 1e-5, "leakage {}", sup / norm);
    }
}
