use crate::error::{Error, Result};
use crate::field::grid::{norm_n, norm_sq_n, FVec, ZPoint};
use crate::geometry::caps::Cap;

/// A space-time strip of dimensions `R/K x ... x R/K x R`, moving with the
/// cap velocity `v(S) = -2 xi_tau` from a lattice initial position
/// `x(S) in (R/K) Z^n`.
#[derive(Clone, Debug, PartialEq)]
pub struct Strip {
    pub x0: FVec,
    /// Lattice index of `x0` on the `(R/K) Z^n` lattice.
    pub idx: [i64; 2],
    pub v: FVec,
    pub r: f64,
    pub k: f64,
}

impl Strip {
    pub fn width(&self) -> f64 {
        self.r / self.k
    }

    /// Transverse distance `|x - x(S) - t v(S)|`.
    pub fn transverse_dist(&self, z: &ZPoint, n: usize) -> f64 {
        let mut d = [0.0; 2];
        for ax in 0..n {
            d[ax] = z.x[ax] - self.x0[ax] - z.t * self.v[ax];
        }
        norm_n(&d, n)
    }

    pub fn contains(&self, z: &ZPoint, n: usize) -> bool {
        z.t.abs() <= self.r && self.transverse_dist(z, n) <= self.width()
    }

    /// Membership in the enlarged strip (factor 20).
    pub fn contains_enlarged(&self, z: &ZPoint, n: usize) -> bool {
        z.t.abs() <= self.r && self.transverse_dist(z, n) <= 20.0 * self.width()
    }
}

/// Whether a moving slab of half-width `w` meets `B^{n+1}(0, r)`:
/// `min_{|t| <= r} |x0 + t v| <= r + w`.
fn slab_meets_ball(x0: &FVec, v: &FVec, n: usize, r: f64, w: f64) -> bool {
    let vv = norm_sq_n(v, n);
    let xv: f64 = (0..n).map(|a| x0[a] * v[a]).sum();
    let t_star = if vv > 0.0 { (-xv / vv).clamp(-r, r) } else { 0.0 };
    let mut p = [0.0; 2];
    for ax in 0..n {
        p[ax] = x0[ax] + t_star * v[ax];
    }
    norm_n(&p, n) <= r + w
}

/// Enumerates the strips for a cap which meet `B^{n+1}(0, r)`.
pub fn strips_for_cap(cap: &Cap, r: f64, k: f64, n: usize) -> Result<Vec<Strip>> {
    if !(k >= 1.0 && k <= r.sqrt()) {
        return Err(Error::precondition(format!("need 1 <= K <= sqrt(R), got K = {k}, R = {r}")));
    }
    let mut v = [0.0; 2];
    for ax in 0..n {
        v[ax] = -2.0 * cap.center[ax];
    }
    let spacing = r / k;
    let speed = norm_n(&v, n);
    let reach = r * (1.0 + speed) + spacing + 1.0;
    let imax = (reach / spacing).ceil() as i64;
    let mut out = Vec::new();
    let mut push = |idx: [i64; 2]| {
        let mut x0 = [0.0; 2];
        for ax in 0..n {
            x0[ax] = idx[ax] as f64 * spacing;
        }
        if slab_meets_ball(&x0, &v, n, r, spacing) {
            out.push(Strip { x0, idx, v, r, k });
        }
    };
    match n {
        1 => {
            for i in -imax..=imax {
                push([i, 0]);
            }
        }
        2 => {
            for i in -imax..=imax {
                for j in -imax..=imax {
                    push([i, j]);
                }
            }
        }
        _ => unreachable!(),
    }
    Ok(out)
}

/// The affine strip rescaling
/// `A_S(x, t) = (K^{-1}(x - x(S) - t v(S)), K^{-2} t)` and the target radius
/// `R~ = 20 R / K^2`.
#[derive(Clone, Debug)]
pub struct StripMap {
    pub strip: Strip,
    pub n: usize,
}

impl StripMap {
    pub fn apply(&self, z: &ZPoint) -> ZPoint {
        let k = self.strip.k;
        let mut x = [0.0; 2];
        for ax in 0..self.n {
            x[ax] = (z.x[ax] - self.strip.x0[ax] - z.t * self.strip.v[ax]) / k;
        }
        ZPoint::new(x, z.t / (k * k))
    }

    pub fn target_radius(&self) -> f64 {
        20.0 * self.strip.r / (self.strip.k * self.strip.k)
    }

    /// The relation `A_S(z) = L_tau(z) - z(S)` against the cap rescaling with
    /// `rad(tau) = 1/K`: returns the constant offset `z(S)`.
    pub fn offset_from_cap_map(&self) -> ZPoint {
        let k = self.strip.k;
        let mut x = [0.0; 2];
        for ax in 0..self.n {
            x[ax] = self.strip.x0[ax] / k;
        }
        ZPoint::new(x, 0.0)
    }
}

pub fn strip_rescaling(strip: &Strip, n: usize) -> StripMap {
    StripMap { strip: strip.clone(), n }
}

/// A sheared box of spatial half-widths `K Ktilde^2 / 2` (max-norm, sheared
/// along the strip velocity) and temporal half-width `K^2 Ktilde^2 / 2`.
#[derive(Clone, Debug, PartialEq)]
pub struct Parallelepiped {
    pub center_x: FVec,
    pub center_t: f64,
    /// Lattice index of the centre on `K Ktilde^2 Z^n x K^2 Ktilde^2 Z`.
    pub idx: [i64; 3],
    pub v: FVec,
    pub k: f64,
    pub ktilde: f64,
}

impl Parallelepiped {
    pub fn half_x(&self) -> f64 {
        self.k * self.ktilde * self.ktilde / 2.0
    }

    pub fn half_t(&self) -> f64 {
        self.k * self.k * self.ktilde * self.ktilde / 2.0
    }

    pub fn contains(&self, z: &ZPoint, n: usize) -> bool {
        if (z.t - self.center_t).abs() > self.half_t() {
            return false;
        }
        (0..n).all(|ax| {
            (z.x[ax] - self.center_x[ax] - z.t * self.v[ax]).abs() <= self.half_x()
        })
    }

    /// Image under the strip map: an axis-parallel cube of side `Ktilde^2`.
    pub fn image_center(&self, strip: &Strip, n: usize) -> ZPoint {
        let k = strip.k;
        let mut x = [0.0; 2];
        for ax in 0..n {
            x[ax] = (self.center_x[ax] - strip.x0[ax]) / k;
        }
        ZPoint::new(x, self.center_t / (k * k))
    }
}

/// Covers a strip by lattice parallelepipeds aligned with it. Every point of
/// `S` lies in some returned parallelepiped, and the strip map sends each one
/// to an axis-parallel `Ktilde^2`-cube.
pub fn parallelepiped_cover(strip: &Strip, ktilde: f64, n: usize) -> Result<Vec<Parallelepiped>> {
    if !(ktilde >= 1.0) {
        return Err(Error::precondition("Ktilde must be >= 1"));
    }
    let k = strip.k;
    let cell_x = k * ktilde * ktilde;
    let cell_t = k * k * ktilde * ktilde;
    let tmax_idx = ((strip.r + cell_t / 2.0) / cell_t).ceil() as i64;
    let mut out = Vec::new();
    for jt in -tmax_idx..=tmax_idx {
        let tc = jt as f64 * cell_t;
        if tc - cell_t / 2.0 > strip.r || tc + cell_t / 2.0 < -strip.r {
            continue;
        }
        // Over the time extent of this row, the sheared coordinate
        // u = x - t v stays within `width` of x(S); cover that band.
        let umax = strip.width() + cell_x;
        let imax = (umax / cell_x).ceil() as i64 + 1;
        let mut push = |ix: [i64; 2]| {
            let mut cx = [0.0; 2];
            for ax in 0..n {
                cx[ax] = strip.x0[ax] + ix[ax] as f64 * cell_x;
            }
            // Keep only parallelepipeds meeting the strip: in sheared
            // coordinates both are boxes around x(S).
            let meets = (0..n).all(|ax| {
                (cx[ax] - strip.x0[ax]).abs() <= strip.width() + cell_x / 2.0
            });
            if meets {
                out.push(Parallelepiped {
                    center_x: cx,
                    center_t: tc,
                    idx: [ix[0], ix[1], jt],
                    v: strip.v,
                    k,
                    ktilde,
                });
            }
        };
        match n {
            1 => {
                for i in -imax..=imax {
                    push([i, 0]);
                }
            }
            2 => {
                for i in -imax..=imax {
                    for j in -imax..=imax {
                        push([i, j]);
                    }
                }
            }
            _ => unreachable!(),
        }
    }
    Ok(out)
}
