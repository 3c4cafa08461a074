use std::collections::BTreeMap;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::datum::{lattice_indices, Datum};
use crate::field::grid::{norm_n, FVec, Grid, IVec, ZPoint};
use crate::field::synth::fill_slice;
use crate::geometry::cn;
use crate::geometry::tubes::{tube_region, Tube, TubeClass};
use crate::wavepacket::windows::{phi_hat, psi_hat_scaled, translation_phase};

/// Relative `L^2`-mass threshold below which tubes are dropped.
pub const TUBE_DROP_THRESHOLD: f64 = 1e-14;

/// Key of a tube on its lattices: position index on `rho^{1/2} Z^n` and cap
/// index on `c_n rho^{-1/2} Z^n`.
pub type TubeKey = (IVec, IVec);

#[derive(Clone, Debug)]
pub struct PacketComponent {
    pub tube: Tube,
    pub datum: Datum,
}

/// Wave-packet decomposition of a datum at scale `rho`: a map from tubes to
/// component data, plus the bookkeeping needed by the property checks.
#[derive(Clone, Debug)]
pub struct PacketFamily {
    pub rho: f64,
    pub source_norm: f64,
    pub drop_threshold: f64,
    pub grid: Arc<Grid>,
    tubes: BTreeMap<TubeKey, PacketComponent>,
}

impl PacketFamily {
    pub fn len(&self) -> usize {
        self.tubes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tubes.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&TubeKey, &PacketComponent)> {
        self.tubes.iter()
    }

    pub fn get(&self, key: &TubeKey) -> Option<&PacketComponent> {
        self.tubes.get(key)
    }

    pub fn keys(&self) -> impl Iterator<Item = &TubeKey> {
        self.tubes.keys()
    }

    /// Coefficientwise sum of the components in a subset.
    pub fn sum_subset<'a>(&self, keys: impl Iterator<Item = &'a TubeKey>) -> Result<Datum> {
        let mut acc = Datum::new(self.grid.clone());
        for key in keys {
            if let Some(c) = self.tubes.get(key) {
                acc.add(&c.datum)?;
            }
        }
        Ok(acc)
    }

    /// Coefficientwise sum of all components.
    pub fn reconstruct(&self) -> Result<Datum> {
        self.sum_subset(self.tubes.keys().cloned().collect::<Vec<_>>().iter())
    }
}

/// Lattice geometry of the decomposition at scale `rho` over a grid.
pub struct PacketLattice {
    pub rho: f64,
    pub n: usize,
    /// Positions per axis: `P = L / rho^{1/2}` (must be a positive integer).
    pub positions_per_axis: i64,
    pub cap_spacing: f64,
    pub pos_spacing: f64,
}

impl PacketLattice {
    pub fn new(grid: &Grid, rho: f64) -> Result<PacketLattice> {
        if rho < 10.0 {
            return Err(Error::precondition(format!("rho = {rho} must be >= 10")));
        }
        let pos_spacing = rho.sqrt();
        let ratio = grid.l / pos_spacing;
        if (ratio - ratio.round()).abs() > 1e-9 || ratio < 1.0 {
            return Err(Error::config(format!(
                "period L = {} must be an integer multiple of rho^(1/2) = {pos_spacing}",
                grid.l
            )));
        }
        Ok(PacketLattice {
            rho,
            n: grid.n,
            positions_per_axis: ratio.round() as i64,
            cap_spacing: cn(grid.n) * rho.powf(-0.5),
            pos_spacing,
        })
    }

    /// Representative positions: one full spatial period per axis.
    pub fn position_indices(&self) -> Vec<IVec> {
        let p = self.positions_per_axis;
        let lo = -p / 2;
        let hi = lo + p - 1;
        let mut out = Vec::new();
        match self.n {
            1 => {
                for m in lo..=hi {
                    out.push([m, 0]);
                }
            }
            2 => {
                for m0 in lo..=hi {
                    for m1 in lo..=hi {
                        out.push([m0, m1]);
                    }
                }
            }
            _ => unreachable!(),
        }
        out
    }

    pub fn position_of(&self, m: &IVec) -> FVec {
        let mut x = [0.0; 2];
        for ax in 0..self.n {
            x[ax] = m[ax] as f64 * self.pos_spacing;
        }
        x
    }

    pub fn cap_center_of(&self, mc: &IVec) -> FVec {
        let mut c = [0.0; 2];
        for ax in 0..self.n {
            c[ax] = mc[ax] as f64 * self.cap_spacing;
        }
        c
    }

    pub fn tube_of(&self, key: &TubeKey) -> Tube {
        let x0 = self.position_of(&key.0);
        let c = self.cap_center_of(&key.1);
        let mut v = [0.0; 2];
        for ax in 0..self.n {
            v[ax] = -2.0 * c[ax];
        }
        Tube::new(x0, v, self.rho)
    }
}

/// Wave-packet decomposition at scale `rho` of a datum with
/// `supp f_hat ⊆ B(0, 1/2)`.
///
/// On the periodic lattice the position series over one full period
/// reconstructs the datum exactly (no aliasing occurs inside the packet
/// window supports), so `sum_T f_T = f` holds to machine precision.
pub fn decompose(datum: &Datum, rho: f64) -> Result<PacketFamily> {
    let grid = datum.grid().clone();
    let n = grid.n;
    if datum.support_radius() > 0.5 {
        return Err(Error::precondition(
            "wave-packet decomposition needs supp f_hat ⊆ B(0, 1/2)",
        ));
    }
    let lat = PacketLattice::new(&grid, rho)?;
    let norm = datum.l2_norm();
    let mut family = PacketFamily {
        rho,
        source_norm: norm,
        drop_threshold: TUBE_DROP_THRESHOLD,
        grid: grid.clone(),
        tubes: BTreeMap::new(),
    };
    if datum.is_empty() {
        return Ok(family);
    }

    // Caps whose partition factor can touch the support.
    let reach = 0.5 + 2.0 * lat.cap_spacing;
    let mc_max = (reach / lat.cap_spacing).ceil() as i64;
    let cap_indices: Vec<IVec> = lattice_indices(n, mc_max)
        .into_iter()
        .filter(|mc| norm_n(&lat.cap_center_of(mc), n) <= reach)
        .collect();
    let positions = lat.position_indices();

    let per_cap: Vec<Vec<(TubeKey, Datum)>> = cap_indices
        .par_iter()
        .map(|mc| {
            let center = lat.cap_center_of(mc);
            // f_theta: partition piece on this cap.
            let mut ftheta: Vec<(IVec, FVec, Complex64)> = Vec::new();
            for (k, a) in datum.iter() {
                let xi = grid.xi_of(*k);
                let w = phi_hat(&xi, &center, rho, n);
                if w != 0.0 {
                    ftheta.push((*k, xi, a * w));
                }
            }
            if ftheta.is_empty() {
                return Vec::new();
            }
            // Window coefficients on the support of psi_hat for this cap.
            let kmax = (4.0 * rho.powf(-0.5) / grid.dxi()).ceil() as i64 + 1;
            let mut window: Vec<(IVec, FVec, f64)> = Vec::new();
            let mut kc = [0i64; 2];
            for ax in 0..n {
                kc[ax] = (center[ax] / grid.dxi()).round() as i64;
            }
            for dk in lattice_indices(n, kmax) {
                let mut k = [0i64; 2];
                for ax in 0..n {
                    k[ax] = kc[ax] + dk[ax];
                }
                let xi = grid.xi_of(k);
                if norm_n(&xi, n) >= crate::field::grid::BAND_LIMIT {
                    continue;
                }
                let w = psi_hat_scaled(&xi, &center, rho, n);
                if w != 0.0 {
                    window.push((k, xi, w));
                }
            }
            let cell = datum.cell_weight() * (2.0 * std::f64::consts::PI).powi(n as i32);
            let scale = rho.powf(n as f64 / 4.0);
            let mut out = Vec::new();
            for m in &positions {
                let pos = lat.position_of(m);
                // f_theta(k) by direct inverse synthesis at the position.
                let mut sample = Complex64::new(0.0, 0.0);
                for (_, xi, a) in &ftheta {
                    sample += a * translation_phase(xi, &pos, n).conj();
                }
                sample *= cell / (2.0 * std::f64::consts::PI).powi(n as i32);
                let amp = sample * scale;
                if amp.norm() == 0.0 {
                    continue;
                }
                let mut piece = Datum::new(grid.clone());
                for (k, xi, w) in &window {
                    let c = amp * translation_phase(xi, &pos, n) * *w;
                    piece.add_coeff(*k, c).expect("window stays in band");
                }
                if piece.l2_norm() > TUBE_DROP_THRESHOLD * norm {
                    out.push(((*m, *mc), piece));
                }
            }
            out
        })
        .collect();

    for caplist in per_cap {
        for (key, piece) in caplist {
            let tube = lat.tube_of(&key);
            family.tubes.insert(key, PacketComponent { tube, datum: piece });
        }
    }
    Ok(family)
}

/// Measured orthogonality constants over a collection of tube subsets:
/// the largest `||sum_W f_T||^2 / sum_W ||f_T||^2` and the family-level
/// `sum ||f_T||^2 / ||f||^2`.
#[derive(Clone, Copy, Debug)]
pub struct OrthogonalityReport {
    pub max_subset_ratio: f64,
    pub mass_ratio: f64,
}

pub fn orthogonality_constant(
    family: &PacketFamily,
    subsets: &[Vec<TubeKey>],
) -> Result<OrthogonalityReport> {
    let mut max_subset_ratio: f64 = 0.0;
    for subset in subsets {
        let sum = family.sum_subset(subset.iter())?;
        let num = sum.l2_norm().powi(2);
        let den: f64 = subset
            .iter()
            .filter_map(|k| family.get(k))
            .map(|c| c.datum.l2_norm().powi(2))
            .sum();
        if den > 0.0 {
            max_subset_ratio = max_subset_ratio.max(num / den);
        }
    }
    let total: f64 = family.iter().map(|(_, c)| c.datum.l2_norm().powi(2)).sum();
    let mass_ratio = if family.source_norm > 0.0 {
        total / family.source_norm.powi(2)
    } else {
        0.0
    };
    Ok(OrthogonalityReport { max_subset_ratio, mass_ratio })
}

/// Per-tube supremum of `|U f_T|` over `B^{n+1}(0, rho) \ T^(delta)`,
/// normalised by the source `L^2` norm.
pub fn localization_report(
    family: &PacketFamily,
    delta: f64,
    keys: &[TubeKey],
) -> Result<Vec<(TubeKey, f64)>> {
    let grid = family.grid.clone();
    let rho = family.rho;
    if grid.l < 4.0 * rho || grid.tmin > -rho || grid.tmax < rho {
        return Err(Error::config(
            "grid cannot host the localization ball B(0, rho)",
        ));
    }
    let n = grid.n;
    let m = grid.spatial_len();
    let slots: Vec<usize> = (0..grid.nt)
        .filter(|j| grid.t(*j).abs() <= rho)
        .collect();
    let mut out = Vec::new();
    for key in keys {
        let comp = match family.get(key) {
            Some(c) => c,
            None => continue,
        };
        let sup = slots
            .par_iter()
            .map(|&jt| {
                let t = grid.t(jt);
                let mut buf = vec![Complex64::new(0.0, 0.0); m];
                fill_slice(&comp.datum, t, &mut buf);
                let mut local: f64 = 0.0;
                for (flat, v) in buf.iter().enumerate() {
                    let x = grid.x_of(flat);
                    if norm_n(&x, n) > rho {
                        continue;
                    }
                    let z = ZPoint::new(x, t);
                    if tube_region(&comp.tube, delta, &z, n).unwrap() == TubeClass::Outside {
                        local = local.max(v.norm());
                    }
                }
                local
            })
            .reduce(|| 0.0, f64::max);
        let norm = if family.source_norm > 0.0 { family.source_norm } else { 1.0 };
        out.push((*key, sup / norm));
    }
    Ok(out)
}
