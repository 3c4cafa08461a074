use std::collections::BTreeMap;
use std::sync::Arc;

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::field::grid::{norm_n, Grid, IVec, BAND_LIMIT};

/// A band-limited initial datum: complex amplitudes on the frequency lattice
/// `(2*pi/L) Z^n` truncated to `|xi| < 2`.
///
/// The `L^2` norm follows the Plancherel convention with cell weight
/// `dxi^n / (2*pi)^n`, so a datum and its spatial samples carry the same
/// energy.
#[derive(Clone, Debug)]
pub struct Datum {
    grid: Arc<Grid>,
    coeffs: BTreeMap<IVec, Complex64>,
}

impl Datum {
    pub fn new(grid: Arc<Grid>) -> Self {
        Datum { grid, coeffs: BTreeMap::new() }
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    /// Inserts (or accumulates onto) the coefficient at lattice index `k`.
    pub fn add_coeff(&mut self, k: IVec, amp: Complex64) -> Result<()> {
        let xi = self.grid.xi_of(k);
        if norm_n(&xi, self.grid.n) >= BAND_LIMIT {
            return Err(Error::precondition(format!(
                "frequency index {k:?} lies outside the band |xi| < {BAND_LIMIT}"
            )));
        }
        if !amp.re.is_finite() || !amp.im.is_finite() {
            return Err(Error::precondition("non-finite coefficient"));
        }
        let slot = self.coeffs.entry(k).or_insert(Complex64::new(0.0, 0.0));
        *slot += amp;
        if slot.norm_sqr() == 0.0 {
            self.coeffs.remove(&k);
        }
        Ok(())
    }

    pub fn coeff(&self, k: &IVec) -> Complex64 {
        self.coeffs.get(k).copied().unwrap_or(Complex64::new(0.0, 0.0))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&IVec, &Complex64)> {
        self.coeffs.iter()
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Plancherel cell weight `dxi^n / (2*pi)^n`.
    pub fn cell_weight(&self) -> f64 {
        let n = self.grid.n as i32;
        (self.grid.dxi() / (2.0 * std::f64::consts::PI)).powi(n)
    }

    /// `L^2` norm via Plancherel.
    pub fn l2_norm(&self) -> f64 {
        let w = self.cell_weight();
        (self.coeffs.values().map(|a| a.norm_sqr()).sum::<f64>() * w).sqrt()
    }

    /// Largest `|xi|` over the support (0 for the zero datum).
    pub fn support_radius(&self) -> f64 {
        self.coeffs
            .keys()
            .map(|k| norm_n(&self.grid.xi_of(*k), self.grid.n))
            .fold(0.0, f64::max)
    }

    /// True when every support frequency satisfies `|xi - center| <= radius`.
    pub fn supported_in_ball(&self, center: [f64; 2], radius: f64) -> bool {
        let n = self.grid.n;
        self.coeffs.keys().all(|k| {
            let xi = self.grid.xi_of(*k);
            let mut d = [0.0; 2];
            for ax in 0..n {
                d[ax] = xi[ax] - center[ax];
            }
            norm_n(&d, n) <= radius
        })
    }

    pub fn scale(&mut self, c: Complex64) {
        for v in self.coeffs.values_mut() {
            *v *= c;
        }
    }

    /// Coefficientwise sum.
    pub fn add(&mut self, other: &Datum) -> Result<()> {
        if *other.grid != *self.grid {
            return Err(Error::precondition("datum addition across different grids"));
        }
        for (k, a) in other.iter() {
            self.add_coeff(*k, *a)?;
        }
        Ok(())
    }

    /// Coefficientwise difference `self - other`, returning its L2 norm.
    pub fn l2_distance(&self, other: &Datum) -> f64 {
        let w = self.cell_weight();
        let mut acc = 0.0;
        for (k, a) in self.iter() {
            acc += (*a - other.coeff(k)).norm_sqr();
        }
        for (k, b) in other.iter() {
            if !self.coeffs.contains_key(k) {
                acc += b.norm_sqr();
            }
        }
        (acc * w).sqrt()
    }

    /// Drops coefficients with `|a|^2 * cell_weight <= thresh^2` (absolute L2 mass).
    pub fn prune(&mut self, thresh: f64) {
        let w = self.cell_weight();
        self.coeffs.retain(|_, a| a.norm_sqr() * w > thresh * thresh);
    }

    /// Complex Gaussian coefficients on `|xi| < radius`, normalised to `‖f‖ = 1`.
    pub fn random_band(grid: Arc<Grid>, radius: f64, seed: u64) -> Result<Datum> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut d = Datum::new(grid.clone());
        let kmax = (radius / grid.dxi()).ceil() as i64;
        for k in lattice_indices(grid.n, kmax) {
            let xi = grid.xi_of(k);
            if norm_n(&xi, grid.n) < radius {
                let re: f64 = rng.gen_range(-1.0..1.0);
                let im: f64 = rng.gen_range(-1.0..1.0);
                d.add_coeff(k, Complex64::new(re, im))?;
            }
        }
        let nrm = d.l2_norm();
        if nrm > 0.0 {
            d.scale(Complex64::new(1.0 / nrm, 0.0));
        }
        Ok(d)
    }

    /// Gaussian-profile coefficients `exp(-|xi - center|^2 / (2 sigma^2))`,
    /// modulated to spatial position `x0`, truncated to
    /// `|xi - center| < radius_cut` (and to the band), normalised to
    /// `‖f‖ = 1`.
    pub fn gaussian_bump(
        grid: Arc<Grid>,
        center: [f64; 2],
        sigma: f64,
        x0: [f64; 2],
        radius_cut: f64,
    ) -> Result<Datum> {
        let mut d = Datum::new(grid.clone());
        let kc: Vec<i64> =
            (0..grid.n).map(|ax| (center[ax] / grid.dxi()).round() as i64).collect();
        let kmax = (radius_cut / grid.dxi()).ceil() as i64 + 1;
        for dk in lattice_indices(grid.n, kmax) {
            let mut k = [0i64; 2];
            for ax in 0..grid.n {
                k[ax] = kc[ax] + dk[ax];
            }
            let xi = grid.xi_of(k);
            if norm_n(&xi, grid.n) >= BAND_LIMIT {
                continue;
            }
            let mut q = 0.0;
            let mut phase = 0.0;
            for ax in 0..grid.n {
                let dxi = xi[ax] - center[ax];
                q += dxi * dxi;
                phase -= xi[ax] * x0[ax];
            }
            if q.sqrt() >= radius_cut {
                continue;
            }
            let amp = (-q / (2.0 * sigma * sigma)).exp();
            if amp > 1e-14 {
                d.add_coeff(k, Complex64::from_polar(amp, phase))?;
            }
        }
        let nrm = d.l2_norm();
        if nrm > 0.0 {
            d.scale(Complex64::new(1.0 / nrm, 0.0));
        }
        Ok(d)
    }
}

/// All integer lattice indices with `|k_i| <= kmax` on the first `n` axes.
pub fn lattice_indices(n: usize, kmax: i64) -> Vec<IVec> {
    let mut out = Vec::new();
    match n {
        1 => {
            for k0 in -kmax..=kmax {
                out.push([k0, 0]);
            }
        }
        2 => {
            for k0 in -kmax..=kmax {
                for k1 in -kmax..=kmax {
                    out.push([k0, k1]);
                }
            }
        }
        _ => unreachable!("dimension checked at grid construction"),
    }
    out
}
