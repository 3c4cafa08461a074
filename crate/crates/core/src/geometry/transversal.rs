use crate::error::{Error, Result};
use crate::geometry::caps::Cap;
use crate::geometry::gauss::{gauss_map, wedge};

/// Infimum of `|G(xi_1) ^ ... ^ G(xi_{n+1})|` over sampled points of each
/// cap (centre, face midpoints, corners: `3^n` samples per cap). This is the
/// lower-bound heuristic for the continuum infimum; the sample set is the
/// refinement knob.
pub fn wedge_transversality(caps: &[Cap], n: usize) -> Result<f64> {
    if caps.len() != n + 1 {
        return Err(Error::precondition(format!(
            "transversality needs an (n+1)-tuple, got {} caps for n = {n}",
            caps.len()
        )));
    }
    let samples: Vec<Vec<[f64; 3]>> = caps
        .iter()
        .map(|c| c.sample_points(n).iter().map(|p| gauss_map(p, n)).collect())
        .collect();
    let mut inf = f64::INFINITY;
    let mut idx = vec![0usize; n + 1];
    loop {
        let cols: Vec<[f64; 3]> = idx.iter().zip(&samples).map(|(i, s)| s[*i]).collect();
        inf = inf.min(wedge(&cols, n));
        // Odometer over the sample grid.
        let mut ax = 0;
        loop {
            if ax == n + 1 {
                return Ok(if inf.is_finite() { inf } else { 0.0 });
            }
            idx[ax] += 1;
            if idx[ax] < samples[ax].len() {
                break;
            }
            idx[ax] = 0;
            ax += 1;
        }
    }
}

/// Fast lower-dimensional pre-check: wedge at cap centres only.
fn center_wedge(caps: &[Cap], n: usize) -> f64 {
    let cols: Vec<[f64; 3]> = caps.iter().map(|c| gauss_map(&c.center, n)).collect();
    wedge(&cols, n)
}

/// Enumerates all `(n+1)`-tuples of caps from a cover whose sampled wedge is
/// at least `K^{-n}`. Returned as index tuples into `cover`.
pub fn enumerate_transverse_tuples(
    cover: &[Cap],
    k: f64,
    n: usize,
) -> Result<Vec<Vec<usize>>> {
    let threshold = k.powi(-(n as i32));
    // The Gauss map is 2-Lipschitz, so sampled wedges differ from the centre
    // wedge by at most (n+1)! * 2 * max_radius per column perturbation; a
    // generous margin keeps the pre-check conservative.
    let max_rad = cover.iter().map(|c| c.radius).fold(0.0, f64::max);
    let margin = 6.0 * (n as f64 + 1.0) * 2.0 * max_rad;
    let mut out = Vec::new();
    let m = cover.len();
    let mut idx = vec![0usize; n + 1];
    'outer: loop {
        let caps: Vec<Cap> = idx.iter().map(|i| cover[*i]).collect();
        if center_wedge(&caps, n) >= threshold - margin {
            let w = wedge_transversality(&caps, n)?;
            if w >= threshold {
                out.push(idx.clone());
            }
        }
        let mut ax = 0;
        loop {
            if ax == n + 1 {
                break 'outer;
            }
            idx[ax] += 1;
            if idx[ax] < m {
                break;
            }
            idx[ax] = 0;
            ax += 1;
        }
    }
    Ok(out)
}
