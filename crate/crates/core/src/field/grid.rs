use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Hard band limit: every stored frequency satisfies `|xi| < BAND_LIMIT`.
pub const BAND_LIMIT: f64 = 2.0;

/// Maximum supported spatial dimension.
pub const MAX_N: usize = 2;

/// Integer frequency-lattice index (axes beyond `n` are zero).
pub type IVec = [i64; MAX_N];
/// Spatial point (axes beyond `n` are zero).
pub type FVec = [f64; MAX_N];

/// A space-time point `(x, t)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ZPoint {
    pub x: FVec,
    pub t: f64,
}

impl ZPoint {
    pub fn new(x: FVec, t: f64) -> Self {
        ZPoint { x, t }
    }
}

/// Discretisation of the space-time domain: a spatial `n`-torus of period `L`
/// sampled at `nx` points per axis, crossed with a uniform time window.
///
/// Spatial samples sit at `x_i = (i - nx/2) * dx`, covering `[-L/2, L/2)`.
/// Frequency samples sit on the lattice `(2*pi/L) * Z^n`, truncated to the
/// band `|xi| < 2`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub n: usize,
    pub l: f64,
    pub nx: usize,
    pub tmin: f64,
    pub tmax: f64,
    pub nt: usize,
}

impl Grid {
    pub fn new(n: usize, l: f64, nx: usize, tmin: f64, tmax: f64, nt: usize) -> Result<Self> {
        if n == 0 || n > MAX_N {
            return Err(Error::config(format!("dimension n = {n} unsupported (1 or 2)")));
        }
        if !(l > 0.0) {
            return Err(Error::config("period L must be positive"));
        }
        if !nx.is_power_of_two() {
            return Err(Error::config(format!("Nx = {nx} must be a power of two")));
        }
        // Nyquist margin for the band limit 2: Nx >= 4 * L/(2*pi) * 2.
        let min_nx = 4.0 * l / (2.0 * std::f64::consts::PI) * BAND_LIMIT;
        if (nx as f64) < min_nx {
            return Err(Error::config(format!(
                "Nx = {nx} below Nyquist requirement {:.1} for period L = {l}",
                min_nx
            )));
        }
        if !(tmax - tmin > 0.0) {
            return Err(Error::config("time window must have positive length"));
        }
        if nt < 2 {
            return Err(Error::config("Nt must be at least 2"));
        }
        Ok(Grid { n, l, nx, tmin, tmax, nt })
    }

    /// Grid covering the space-time ball `B^{n+1}(0, r)` with period `4 r`
    /// and a time step small enough that per-mode phases advance by less
    /// than pi/8 between consecutive samples for data of band `band`.
    pub fn for_ball(n: usize, r: f64, band: f64) -> Result<Self> {
        let l = 4.0 * r;
        let nx = (4.0 * l / (2.0 * std::f64::consts::PI) * BAND_LIMIT).ceil() as usize;
        let nx = nx.next_power_of_two();
        let dt_max = (std::f64::consts::PI / (8.0 * band * band)).min(0.5);
        let nt = ((2.0 * r) / dt_max).ceil() as usize + 1;
        Grid::new(n, l, nx, -r, r, nt.max(2))
    }

    pub fn dx(&self) -> f64 {
        self.l / self.nx as f64
    }

    /// Frequency lattice spacing `2*pi/L`.
    pub fn dxi(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.l
    }

    pub fn dt(&self) -> f64 {
        (self.tmax - self.tmin) / (self.nt - 1) as f64
    }

    /// Spatial coordinate of sample index `i` along one axis.
    pub fn x1(&self, i: usize) -> f64 {
        (i as f64 - (self.nx / 2) as f64) * self.dx()
    }

    pub fn t(&self, j: usize) -> f64 {
        self.tmin + j as f64 * self.dt()
    }

    /// Number of spatial samples (`nx^n`).
    pub fn spatial_len(&self) -> usize {
        self.nx.pow(self.n as u32)
    }

    /// Spatial point of a flattened spatial index (row-major, axis 0 slowest).
    pub fn x_of(&self, flat: usize) -> FVec {
        let mut out = [0.0; MAX_N];
        let mut rem = flat;
        for ax in (0..self.n).rev() {
            out[ax] = self.x1(rem % self.nx);
            rem /= self.nx;
        }
        out
    }

    /// Frequency of an integer lattice index.
    pub fn xi_of(&self, k: IVec) -> FVec {
        let d = self.dxi();
        let mut out = [0.0; MAX_N];
        for ax in 0..self.n {
            out[ax] = d * k[ax] as f64;
        }
        out
    }

    /// Spatial cell volume `dx^n`.
    pub fn cell_x(&self) -> f64 {
        self.dx().powi(self.n as i32)
    }

    /// Space-time cell volume `dx^n * dt`.
    pub fn cell_z(&self) -> f64 {
        self.cell_x() * self.dt()
    }

    /// Checks that the time step keeps per-mode phase increments below pi/8
    /// for data whose frequencies satisfy `|xi| <= band`.
    pub fn check_time_sampling(&self, band: f64) -> Result<()> {
        let max_step = self.dt() * band * band;
        if max_step >= std::f64::consts::PI / 8.0 {
            return Err(Error::config(format!(
                "time grid undersampled: dt * band^2 = {max_step:.4} >= pi/8"
            )));
        }
        Ok(())
    }
}

/// Euclidean norm of the first `n` components.
pub fn norm_n(v: &FVec, n: usize) -> f64 {
    v[..n].iter().map(|a| a * a).sum::<f64>().sqrt()
}

/// Squared Euclidean norm of the first `n` components.
pub fn norm_sq_n(v: &FVec, n: usize) -> f64 {
    v[..n].iter().map(|a| a * a).sum::<f64>()
}

/// Max-metric norm of a space-time point: `max(|x|_2, |t|)`.
pub fn zmetric(z: &ZPoint, n: usize) -> f64 {
    norm_n(&z.x, n).max(z.t.abs())
}
