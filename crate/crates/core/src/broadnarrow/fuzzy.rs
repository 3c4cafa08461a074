use crate::error::{Error, Result};
use crate::field::grid::ZPoint;
use crate::field::synth::SpaceTimeField;

/// Shift quadrature for the fuzzy norm: a point mass (degenerate knob,
/// reducing to the plain norm) or a 3-point stencil per coordinate at
/// `{-K^2/2, 0, K^2/2}`, snapped to grid steps, with uniform weights
/// (the scale-`K^2` mollifier is flat across its core).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FuzzyStencil {
    Point,
    ThreePoint,
}

/// The fuzzy `L^{q,*}` norm of the geometric mean `prod_j |U f_j|^{1/(n+1)}`
/// over a space-time cube: an outer average over per-factor shifts weighted
/// by the product mollifier.
pub fn fuzzy_norm(
    fields: &[&SpaceTimeField],
    q: f64,
    center: ZPoint,
    side: f64,
    k: f64,
    stencil: FuzzyStencil,
) -> Result<f64> {
    if fields.is_empty() {
        return Err(Error::precondition("no fields"));
    }
    let grid = fields[0].grid.clone();
    let n = grid.n;
    if fields.len() != n + 1 {
        return Err(Error::precondition(format!(
            "fuzzy norm needs n+1 = {} fields, got {}",
            n + 1,
            fields.len()
        )));
    }
    if fields.iter().any(|f| *f.grid != *grid) {
        return Err(Error::precondition("fields on different grids"));
    }
    // Margin: the cube dilated by 3K^2 must stay inside the sampled domain.
    let margin = 3.0 * k * k;
    let half = side / 2.0;
    for ax in 0..n {
        if center.x[ax].abs() + half + margin > grid.l / 2.0 {
            return Err(Error::config("insufficient spatial margin for the fuzzy norm"));
        }
    }
    if center.t - half - margin < grid.tmin || center.t + half + margin > grid.tmax {
        return Err(Error::config("insufficient temporal margin for the fuzzy norm"));
    }
    // Grid-snapped shift offsets (in index units).
    let hx = ((k * k / 2.0) / grid.dx()).round() as i64;
    let ht = ((k * k / 2.0) / grid.dt()).round() as i64;
    let offsets: Vec<(i64, i64)> = match (stencil, n) {
        (FuzzyStencil::Point, _) => vec![(0, 0)],
        (FuzzyStencil::ThreePoint, _) => {
            let s = [-1i64, 0, 1];
            let mut o = Vec::new();
            for &a in &s {
                for &b in &s {
                    o.push((a * hx, b * ht));
                }
            }
            o
        }
    };
    // For n=2 the spatial shift is applied along both axes jointly to keep
    // the combinatorics tractable (3 values per factor coordinate pair).
    // Sample indices of the cube.
    let x_lo: Vec<i64> = (0..n)
        .map(|ax| (((center.x[ax] - half) / grid.dx()) + (grid.nx / 2) as f64).ceil() as i64)
        .collect();
    let x_hi: Vec<i64> = (0..n)
        .map(|ax| (((center.x[ax] + half) / grid.dx()) + (grid.nx / 2) as f64).floor() as i64)
        .collect();
    let t_lo = ((center.t - half - grid.tmin) / grid.dt()).ceil() as i64;
    let t_hi = ((center.t + half - grid.tmin) / grid.dt()).floor() as i64;
    if (0..n).any(|ax| x_lo[ax] > x_hi[ax]) || t_lo > t_hi {
        log::warn!("fuzzy norm over an empty cube region; returning 0");
        return Ok(0.0);
    }
    let nf = fields.len();
    let exponent = 1.0 / nf as f64;
    let cell = grid.cell_z();
    // All assignments of one offset per factor.
    let mut combo = vec![0usize; nf];
    let mut total = 0.0;
    let mut weight_sum = 0.0;
    loop {
        // L^q norm of the shifted geometric mean over the cube.
        let mut acc = 0.0;
        let mut iter_t = t_lo;
        while iter_t <= t_hi {
            for flat in index_box(&x_lo, &x_hi, grid.nx, n) {
                let mut prod = 1.0;
                for (j, f) in fields.iter().enumerate() {
                    let (ox, ot) = offsets[combo[j]];
                    let jt = iter_t - ot;
                    if jt < 0 || jt >= grid.nt as i64 {
                        prod = 0.0;
                        break;
                    }
                    let shifted = shift_flat(flat, -ox, grid.nx, n);
                    prod *= f.value(shifted, jt as usize).norm().powf(exponent);
                }
                acc += prod.powf(q) * cell;
            }
            iter_t += 1;
        }
        total += acc.powf(1.0 / q);
        weight_sum += 1.0;
        // Odometer.
        let mut j = 0;
        loop {
            if j == nf {
                return Ok(total / weight_sum);
            }
            combo[j] += 1;
            if combo[j] < offsets.len() {
                break;
            }
            combo[j] = 0;
            j += 1;
        }
    }
}

/// Flattened spatial indices of the box `[x_lo, x_hi]` (inclusive).
fn index_box(x_lo: &[i64], x_hi: &[i64], nx: usize, n: usize) -> Vec<usize> {
    let mut out = Vec::new();
    match n {
        1 => {
            for i in x_lo[0]..=x_hi[0] {
                if i >= 0 && (i as usize) < nx {
                    out.push(i as usize);
                }
            }
        }
        2 => {
            for i in x_lo[0]..=x_hi[0] {
                for j in x_lo[1]..=x_hi[1] {
                    if i >= 0 && (i as usize) < nx && j >= 0 && (j as usize) < nx {
                        out.push(i as usize * nx + j as usize);
                    }
                }
            }
        }
        _ => unreachable!(),
    }
    out
}

/// Shifts a flattened spatial index by `dx` samples along every axis
/// (periodic wrap).
fn shift_flat(flat: usize, dx: i64, nx: usize, n: usize) -> usize {
    match n {
        1 => ((flat as i64 + dx).rem_euclid(nx as i64)) as usize,
        2 => {
            let (i, j) = ((flat / nx) as i64, (flat % nx) as i64);
            let ii = (i + dx).rem_euclid(nx as i64) as usize;
            let jj = (j + dx).rem_euclid(nx as i64) as usize;
            ii * nx + jj
        }
        _ => unreachable!(),
    }
}
