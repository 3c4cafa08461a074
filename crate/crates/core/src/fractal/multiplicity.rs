use crate::error::{Error, Result};
use crate::fractal::cubes::CubeFamily;
use crate::fractal::density::fractal_density;
use crate::geometry::strips::{Parallelepiped, Strip};

/// Intersection counts between a cube family, a strip set and a
/// parallelepiped set: `#S(Q)` strips through each cube, `#Q(S)` cubes in
/// each strip, `#Q(P)` cubes meeting each parallelepiped.
#[derive(Clone, Debug)]
pub struct MultiplicityTable {
    pub strips_per_cube: Vec<usize>,
    pub cubes_per_strip: Vec<usize>,
    pub cubes_per_piped: Vec<usize>,
}

impl MultiplicityTable {
    /// Double-counting identity `sum_Q #S(Q) = sum_S #Q(S)` (exact integers).
    pub fn double_count_ok(&self) -> bool {
        let a: usize = self.strips_per_cube.iter().sum();
        let b: usize = self.cubes_per_strip.iter().sum();
        a == b
    }

    pub fn max_cube_ratio(&self) -> f64 {
        let s = self.cubes_per_strip.len().max(1) as f64;
        self.strips_per_cube.iter().cloned().max().unwrap_or(0) as f64 / s
    }

    pub fn min_cube_ratio(&self) -> f64 {
        let s = self.cubes_per_strip.len().max(1) as f64;
        self.strips_per_cube.iter().cloned().min().unwrap_or(0) as f64 / s
    }

    pub fn max_strip_ratio(&self) -> f64 {
        let q = self.strips_per_cube.len().max(1) as f64;
        self.cubes_per_strip.iter().cloned().max().unwrap_or(0) as f64 / q
    }
}

/// Whether a moving slab `|x - x0 - t v|_inf <= w` over `|t| <= tmax` meets a
/// closed box. Sheared slabs against boxes reduce to a per-axis t-interval
/// intersection, exact for dyadic-rational inputs.
fn slab_meets_box(
    x0: &[f64],
    v: &[f64],
    w: f64,
    tmax: (f64, f64),
    lo: &[f64; 3],
    hi: &[f64; 3],
    n: usize,
) -> bool {
    // Time range of the box (last axis) intersected with the slab's range.
    let mut t0 = lo[n].max(tmax.0);
    let mut t1 = hi[n].min(tmax.1);
    if t0 > t1 {
        return false;
    }
    for ax in 0..n {
        // Need x in [lo, hi] with |x - x0 - t v| <= w:
        // t v in [lo - x0 - w, hi - x0 + w].
        let a = lo[ax] - x0[ax] - w;
        let b = hi[ax] - x0[ax] + w;
        if v[ax] == 0.0 {
            if a > 0.0 || b < 0.0 {
                return false;
            }
        } else if v[ax] > 0.0 {
            t0 = t0.max(a / v[ax]);
            t1 = t1.min(b / v[ax]);
        } else {
            t0 = t0.max(b / v[ax]);
            t1 = t1.min(a / v[ax]);
        }
        if t0 > t1 {
            return false;
        }
    }
    true
}

pub fn strip_meets_cube(strip: &Strip, family: &CubeFamily, idx: &[i64; 3]) -> bool {
    let (lo, hi) = family.box_of(idx);
    slab_meets_box(
        &strip.x0,
        &strip.v,
        strip.width(),
        (-strip.r, strip.r),
        &lo,
        &hi,
        family.n,
    )
}

pub fn piped_meets_cube(p: &Parallelepiped, family: &CubeFamily, idx: &[i64; 3]) -> bool {
    let (lo, hi) = family.box_of(idx);
    slab_meets_box(
        &p.center_x,
        &p.v,
        p.half_x(),
        (p.center_t - p.half_t(), p.center_t + p.half_t()),
        &lo,
        &hi,
        family.n,
    )
}

/// Exact multiplicity counts by geometric intersection.
pub fn multiplicity_counts(
    cubes: &CubeFamily,
    strips: &[Strip],
    pipeds: &[Parallelepiped],
) -> MultiplicityTable {
    let idxs: Vec<[i64; 3]> = cubes.iter().cloned().collect();
    let strips_per_cube = idxs
        .iter()
        .map(|idx| strips.iter().filter(|s| strip_meets_cube(s, cubes, idx)).count())
        .collect();
    let cubes_per_strip = strips
        .iter()
        .map(|s| idxs.iter().filter(|idx| strip_meets_cube(s, cubes, idx)).count())
        .collect();
    let cubes_per_piped = pipeds
        .iter()
        .map(|p| idxs.iter().filter(|idx| piped_meets_cube(p, cubes, idx)).count())
        .collect();
    MultiplicityTable { strips_per_cube, cubes_per_strip, cubes_per_piped }
}

/// The rescaled cube family of a strip: images under `A_S` of the
/// parallelepipeds meeting at least one cube. The images must land on the
/// `Ktilde^2` lattice, which pins `Ktilde^2 | R/K^2` for lattice strips.
pub fn rescaled_cube_family(
    cubes: &CubeFamily,
    strip: &Strip,
    pipeds: &[Parallelepiped],
) -> Result<CubeFamily> {
    let n = cubes.n;
    let mut kt2 = None;
    let mut centers = Vec::new();
    for p in pipeds {
        let meets = cubes.iter().any(|idx| piped_meets_cube(p, cubes, idx));
        if !meets {
            continue;
        }
        let c = p.image_center(strip, n);
        kt2 = Some(p.ktilde * p.ktilde);
        centers.push(c);
    }
    let kt2 = kt2.ok_or_else(|| Error::precondition("no parallelepiped meets the cubes"))?;
    let rt = 20.0 * strip.r / (strip.k * strip.k);
    let mut fam = CubeFamily::new(n, kt2, rt + kt2)?;
    for c in centers {
        let mut idx = [0i64; 3];
        let mut coords = [0.0; 3];
        coords[..n].copy_from_slice(&c.x[..n]);
        coords[n] = c.t;
        for ax in 0..=n {
            let v = coords[ax] / kt2;
            if (v - v.round()).abs() > 1e-9 {
                return Err(Error::precondition(format!(
                    "rescaled centre {} off the Ktilde^2 lattice; need Ktilde^2 | R/K^2",
                    coords[ax]
                )));
            }
            idx[ax] = v.round() as i64;
        }
        fam.insert(idx)?;
    }
    Ok(fam)
}

/// The density-comparison check across scales:
/// `lhs = [min_P #Q(P)] Delta_alpha(Q~(S))`, `rhs = K^{1+alpha} Delta_alpha(Q)`.
pub fn density_comparison_check(
    cubes: &CubeFamily,
    strip: &Strip,
    pipeds: &[Parallelepiped],
    alpha: f64,
    k: f64,
) -> Result<(f64, f64, f64)> {
    let table = multiplicity_counts(cubes, &[], pipeds);
    let min_count = table
        .cubes_per_piped
        .iter()
        .filter(|c| **c > 0)
        .min()
        .cloned()
        .unwrap_or(0);
    if min_count == 0 {
        return Err(Error::precondition("empty rescaled family"));
    }
    let tilde = rescaled_cube_family(cubes, strip, pipeds)?;
    let lhs = min_count as f64 * fractal_density(&tilde, alpha)?.value;
    let rhs = k.powf(1.0 + alpha) * fractal_density(cubes, alpha)?.value;
    Ok((lhs, rhs, lhs / rhs))
}
