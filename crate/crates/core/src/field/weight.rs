use crate::field::grid::{FVec, ZPoint};
use serde::{Deserialize, Serialize};

/// Default decay order, mirroring the `R^{-100 n}` error-term convention.
pub const DEFAULT_DECAY_ORDER: u32 = 100;

/// Symmetric convex body descriptor for adapted weights.
///
/// `Box` half-widths are measured per axis; for space-time bodies the last
/// axis is time. `EuclidBall` uses the Euclidean gauge on the spatial axes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Body {
    Box { half_widths: Vec<f64> },
    EuclidBall { radius: f64 },
}

impl Body {
    pub fn is_nondegenerate(&self) -> bool {
        match self {
            Body::Box { half_widths } => {
                !half_widths.is_empty() && half_widths.iter().all(|h| *h > 0.0)
            }
            Body::EuclidBall { radius } => *radius > 0.0,
        }
    }

    /// Minkowski gauge `|v|_{S_0}` of an offset vector.
    fn gauge(&self, v: &[f64]) -> f64 {
        match self {
            Body::Box { half_widths } => v
                .iter()
                .zip(half_widths)
                .map(|(a, h)| a.abs() / h)
                .fold(0.0, f64::max),
            Body::EuclidBall { radius } => {
                v.iter().map(|a| a * a).sum::<f64>().sqrt() / radius
            }
        }
    }
}

/// Rapidly decaying weight adapted to a translated convex body:
/// `w(z) = (1 + |z - z0|_{S0})^{-N}`, or the plateau variant
/// `(1 + max(0, |z - z0|_{S0} - 1))^{-N}` which is identically 1 on the body
/// and obeys the same decay class. Norm comparisons against `L^q(w_Q)`
/// use the plateau variant so the weighted norm dominates the sharp-cutoff
/// norm.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Weight {
    pub body: Body,
    pub center: Vec<f64>,
    pub decay_order: u32,
    #[serde(default)]
    pub plateau: bool,
}

/// Builds an adapted weight; the body must be nondegenerate and `N >= 1`.
pub fn adapted_weight(body: Body, center: Vec<f64>, decay_order: u32) -> crate::error::Result<Weight> {
    if decay_order < 1 {
        return Err(crate::error::Error::precondition("decay order must be >= 1"));
    }
    if !body.is_nondegenerate() {
        return Err(crate::error::Error::precondition("degenerate weight body"));
    }
    Ok(Weight { body, center, decay_order, plateau: false })
}

impl Weight {
    /// Weight adapted to the lattice cube of side `m` centred at `z0` (space-time).
    pub fn for_cube(n: usize, center: ZPoint, m: f64) -> Weight {
        let mut c: Vec<f64> = center.x[..n].to_vec();
        c.push(center.t);
        Weight {
            body: Body::Box { half_widths: vec![m / 2.0; n + 1] },
            center: c,
            decay_order: DEFAULT_DECAY_ORDER,
            plateau: false,
        }
    }

    /// Plateau weight for a lattice cube: 1 on the cube, decaying outside.
    pub fn plateau_for_cube(n: usize, center: ZPoint, m: f64) -> Weight {
        let mut w = Weight::for_cube(n, center, m);
        w.plateau = true;
        w
    }

    /// Weight adapted to the space-time ball `B^{n+1}(0, r)` (max metric).
    pub fn for_ball(n: usize, r: f64) -> Weight {
        Weight {
            body: Body::Box { half_widths: vec![r; n + 1] },
            center: vec![0.0; n + 1],
            decay_order: DEFAULT_DECAY_ORDER,
            plateau: false,
        }
    }

    fn eval(&self, point: &[f64]) -> f64 {
        let v: Vec<f64> = point
            .iter()
            .zip(&self.center)
            .map(|(p, c)| p - c)
            .collect();
        let g = self.body.gauge(&v);
        let g = if self.plateau { (g - 1.0).max(0.0) } else { g };
        (1.0 + g).powi(-(self.decay_order as i32))
    }

    /// Evaluates at a spatial point (body dimension must be `n`).
    pub fn eval_spatial(&self, x: &FVec, n: usize) -> f64 {
        self.eval(&x[..n])
    }

    /// Evaluates at a space-time point (body dimension must be `n + 1`).
    pub fn eval_z(&self, z: &ZPoint, n: usize) -> f64 {
        let mut p: Vec<f64> = z.x[..n].to_vec();
        p.push(z.t);
        self.eval(&p)
    }

    pub fn dims(&self) -> usize {
        self.center.len()
    }
}
