use crate::error::{Error, Result};
use crate::field::grid::{norm_n, FVec, ZPoint};
use crate::geometry::caps::Cap;
use crate::geometry::gauss::gauss_map;

/// A space-time tube: spatial radius `rho^{1/2}`, duration `rho`, moving with
/// velocity `v(T)` from initial position `x(T)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tube {
    pub x0: FVec,
    pub v: FVec,
    pub rho: f64,
}

/// Classification of a point against a tube and its `delta`-enlargement.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TubeClass {
    Core,
    Enlarged,
    Outside,
}

impl Tube {
    pub fn new(x0: FVec, v: FVec, rho: f64) -> Tube {
        Tube { x0, v, rho }
    }

    /// Centre frequency via the dispersion relation `v(T) = -2 xi_T`.
    pub fn xi(&self) -> FVec {
        let mut out = [0.0; 2];
        for (o, v) in out.iter_mut().zip(self.v) {
            *o = -v / 2.0;
        }
        out
    }

    /// The cap of radius `rho^{-1/2}` attached to the tube.
    pub fn cap(&self) -> Cap {
        Cap::new(self.xi(), self.rho.powf(-0.5))
    }

    /// Core-line direction `G(xi_T)`.
    pub fn direction(&self, n: usize) -> [f64; 3] {
        gauss_map(&self.xi(), n)
    }

    pub fn spatial_radius(&self) -> f64 {
        self.rho.sqrt()
    }

    /// Distance from the moving centre at time `t`.
    pub fn transverse_dist(&self, z: &ZPoint, n: usize) -> f64 {
        let mut d = [0.0; 2];
        for ax in 0..n {
            d[ax] = z.x[ax] - self.x0[ax] - z.t * self.v[ax];
        }
        norm_n(&d, n)
    }

    pub fn speed(&self, n: usize) -> f64 {
        norm_n(&self.v, n)
    }
}

/// Classifies a point as core (radius `rho^{1/2}`), enlarged
/// (radius `rho^{1/2+delta}`) or outside; points with `|t| > rho` are outside.
pub fn tube_region(tube: &Tube, delta: f64, z: &ZPoint, n: usize) -> Result<TubeClass> {
    if !(0.0..1.0).contains(&delta) {
        return Err(Error::precondition("delta must lie in [0, 1)"));
    }
    if z.t.abs() > tube.rho {
        return Ok(TubeClass::Outside);
    }
    let d = tube.transverse_dist(z, n);
    if d <= tube.spatial_radius() {
        Ok(TubeClass::Core)
    } else if d <= tube.rho.powf(0.5 + delta) {
        Ok(TubeClass::Enlarged)
    } else {
        Ok(TubeClass::Outside)
    }
}
