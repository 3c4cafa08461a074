

use crate::error::Result;
use crate::field::datum::Datum;
use crate::field::grid::{norm_n, norm_sq_n, FVec, ZPoint};
use crate::field::synth::{SpaceTimeField, SpatialField};
use crate::field::weight::Weight;

/// Geometric integration region.
///
/// Space-time balls follow the product metric, so `ZBall` is an axis-aligned
/// cube geometrically. `HalfOpen` variants are used when tiling unions of
/// lattice cubes so samples on shared faces are counted once.
#[derive(Clone, Debug)]
pub enum Region {
    Full,
    SpaceBox { lo: FVec, hi: FVec },
    SpaceBall { center: FVec, r: f64 },
    ZBox { xlo: FVec, xhi: FVec, tlo: f64, thi: f64 },
    ZBoxHalfOpen { xlo: FVec, xhi: FVec, tlo: f64, thi: f64 },
    ZBall { center: ZPoint, r: f64 },
    Union(Vec<Region>),
}

impl Region {
    pub fn contains_x(&self, x: &FVec, n: usize) -> bool {
        match self {
            Region::Full => true,
            Region::SpaceBox { lo, hi } => (0..n).all(|a| lo[a] <= x[a] && x[a] <= hi[a]),
            Region::SpaceBall { center, r } => {
                let mut d = [0.0; 2];
                for a in 0..n {
                    d[a] = x[a] - center[a];
                }
                norm_n(&d, n) <= *r
            }
            Region::Union(rs) => rs.iter().any(|r| r.contains_x(x, n)),
            _ => false,
        }
    }

    pub fn contains_z(&self, z: &ZPoint, n: usize) -> bool {
        match self {
            Region::Full => true,
            Region::ZBox { xlo, xhi, tlo, thi } => {
                (0..n).all(|a| xlo[a] <= z.x[a] && z.x[a] <= xhi[a])
                    && *tlo <= z.t
                    && z.t <= *thi
            }
            Region::ZBoxHalfOpen { xlo, xhi, tlo, thi } => {
                (0..n).all(|a| xlo[a] <= z.x[a] && z.x[a] < xhi[a])
                    && *tlo <= z.t
                    && z.t < *thi
            }
            Region::ZBall { center, r } => {
                let mut d = [0.0; 2];
                for a in 0..n {
                    d[a] = z.x[a] - center.x[a];
                }
                norm_n(&d, n).max((z.t - center.t).abs()) <= *r
            }
            Region::Union(rs) => rs.iter().any(|r| r.contains_z(z, n)),
            _ => false,
        }
    }

    /// Max-metric space-time ball of radius `r` about the origin.
    pub fn ball(r: f64) -> Region {
        Region::ZBall { center: ZPoint::new([0.0; 2], 0.0), r }
    }
}

/// Integration domain: a geometric region or an adapted weight.
#[derive(Clone, Debug)]
pub enum Domain<'a> {
    Region(Region),
    Weight(&'a Weight),
}

fn accumulate(
    samples: impl Iterator<Item = (f64, f64)>, // (|F|, weight in [0,1])
    p: f64,
    cell: f64,
) -> (f64, usize) {
    let mut count = 0usize;
    if p.is_infinite() {
        let mut m: f64 = 0.0;
        for (a, w) in samples {
            if w > 0.0 {
                count += 1;
                m = m.max(a * w);
            }
        }
        (m, count)
    } else {
        let mut acc = 0.0;
        for (a, w) in samples {
            if w > 0.0 {
                count += 1;
                acc += a.powf(p) * w;
            }
        }
        ((acc * cell).powf(1.0 / p), count)
    }
}

fn warn_empty(count: usize, what: &str) {
    if count == 0 {
        log::warn!("lp_norm over an empty {what} region; returning 0");
    }
}

/// Riemann-sum `L^p` norm of a spatial field over a region or weight.
///
/// `p = f64::INFINITY` returns the sample maximum. A weighted domain
/// multiplies `|F|^p` by the weight. An empty region yields 0 with a logged
/// warning.
pub fn lp_norm_spatial(field: &SpatialField, p: f64, domain: &Domain) -> Result<f64> {
    check_p(p)?;
    let grid = &field.grid;
    let n = grid.n;
    let cell = grid.cell_x();
    let it = field.values.iter().enumerate().map(|(flat, v)| {
        let x = grid.x_of(flat);
        let w = match domain {
            Domain::Region(r) => {
                if r.contains_x(&x, n) {
                    1.0
                } else {
                    0.0
                }
            }
            Domain::Weight(w) => w.eval_spatial(&x, n),
        };
        (v.norm(), w)
    });
    let (value, count) = accumulate(it, p, cell);
    warn_empty(count, "spatial");
    Ok(value)
}

/// Riemann-sum `L^p` norm of a space-time field over a region or weight.
pub fn lp_norm_spacetime(field: &SpaceTimeField, p: f64, domain: &Domain) -> Result<f64> {
    check_p(p)?;
    let grid = field.grid.clone();
    let n = grid.n;
    let cell = grid.cell_z();
    let m = grid.spatial_len();
    let it = (0..grid.nt).flat_map(|jt| {
        let t = grid.t(jt);
        let grid = &grid;
        let domain = &domain;
        let slice = field.slice(jt);
        (0..m).map(move |flat| {
            let z = ZPoint::new(grid.x_of(flat), t);
            let w = match domain {
                Domain::Region(r) => {
                    if r.contains_z(&z, n) {
                        1.0
                    } else {
                        0.0
                    }
                }
                Domain::Weight(w) => w.eval_z(&z, n),
            };
            (slice[flat].norm(), w)
        })
    });
    let (value, count) = accumulate(it, p, cell);
    warn_empty(count, "space-time");
    Ok(value)
}

/// `L^p` norm of raw magnitudes with an explicit cell volume (used by the
/// multilinear geometric-mean norms).
pub fn lp_norm_values(values: impl Iterator<Item = (f64, f64)>, p: f64, cell: f64) -> f64 {
    accumulate(values, p, cell).0
}

fn check_p(p: f64) -> Result<()> {
    if p.is_nan() || p < 1.0 {
        return Err(crate::error::Error::precondition(format!("exponent p = {p} must be >= 1")));
    }
    Ok(())
}

/// `H^s` norm: `((2 pi)^{-n} sum_k (1 + |xi_k|^2)^s |a_k|^2 dxi^n)^{1/2}`.
pub fn sobolev_norm(datum: &Datum, s: f64) -> Result<f64> {
    if s < 0.0 {
        return Err(crate::error::Error::precondition("s must be >= 0"));
    }
    let grid = datum.grid();
    let w = datum.cell_weight();
    let mut acc = 0.0;
    for (k, a) in datum.iter() {
        let xi = grid.xi_of(*k);
        acc += (1.0 + norm_sq_n(&xi, grid.n)).powf(s) * a.norm_sqr();
    }
    Ok((acc * w).sqrt())
}

/// Littlewood-Paley style norm with rough annulus projections
/// `A(2^k) = { 2^{k-1} <= |xi| < 2^k }`:
/// `(sum_{k >= 0} 2^{2ks} ||P_k f||_2^2)^{1/2} + ||f||_2`.
///
/// Frequencies below 1/2 (including zero) enter only the trailing term.
pub fn littlewood_paley_norm(datum: &Datum, s: f64) -> Result<f64> {
    if s < 0.0 {
        return Err(crate::error::Error::precondition("s must be >= 0"));
    }
    let grid = datum.grid();
    let w = datum.cell_weight();
    let mut annulus_acc = 0.0;
    let mut total = 0.0;
    for (k, a) in datum.iter() {
        let xi = norm_n(&grid.xi_of(*k), grid.n);
        let e = a.norm_sqr() * w;
        total += e;
        if xi >= 0.5 {
            // xi in [2^{j-1}, 2^j) for j = floor(log2(xi)) + 1.
            let j = xi.log2().floor() as i32 + 1;
            if j >= 0 {
                annulus_acc += 4.0_f64.powf(s * j as f64) * e;
            }
        }
    }
    Ok(annulus_acc.sqrt() + total.sqrt())
}

/// Projects a datum onto the annulus `rlo <= |xi| < rhi` (sharp cutoff).
pub fn annulus_projection(datum: &Datum, rlo: f64, rhi: f64) -> Datum {
    let grid = datum.grid().clone();
    let mut out = Datum::new(grid.clone());
    for (k, a) in datum.iter() {
        let xi = norm_n(&grid.xi_of(*k), grid.n);
        if xi >= rlo && xi < rhi {
            out.add_coeff(*k, *a).expect("projection stays in band");
        }
    }
    out
}
