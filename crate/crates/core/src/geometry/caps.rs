use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::datum::Datum;
use crate::field::grid::{norm_n, norm_sq_n, FVec, Grid, ZPoint};

/// A frequency ball `theta = B(xi_theta, rad)`; its lift to the paraboloid is
/// the cap `Sigma_theta`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Cap {
    pub center: FVec,
    pub radius: f64,
}

impl Cap {
    pub fn new(center: FVec, radius: f64) -> Cap {
        Cap { center, radius }
    }

    pub fn contains(&self, xi: &FVec, n: usize) -> bool {
        let mut d = [0.0; 2];
        for ax in 0..n {
            d[ax] = xi[ax] - self.center[ax];
        }
        norm_n(&d, n) <= self.radius
    }

    /// Sample points: centre, face midpoints and corners (3^n points).
    pub fn sample_points(&self, n: usize) -> Vec<FVec> {
        let mut out = Vec::new();
        let offsets: &[f64] = &[-1.0, 0.0, 1.0];
        match n {
            1 => {
                for &o in offsets {
                    out.push([self.center[0] + o * self.radius, 0.0]);
                }
            }
            2 => {
                for &o0 in offsets {
                    for &o1 in offsets {
                        let nrm = (o0 * o0 + o1 * o1).sqrt();
                        let (u0, u1) = if nrm == 0.0 { (0.0, 0.0) } else { (o0 / nrm, o1 / nrm) };
                        out.push([
                            self.center[0] + u0 * self.radius,
                            self.center[1] + u1 * self.radius,
                        ]);
                    }
                }
            }
            _ => unreachable!(),
        }
        out
    }
}

/// The paraboloid lift `Sigma(xi) = (xi, |xi|^2)`.
pub fn paraboloid_lift(xi: &FVec, n: usize) -> ZPoint {
    ZPoint::new(*xi, norm_sq_n(xi, n))
}

/// Affine self-similarity of the paraboloid attached to a cap:
/// shear `M_theta`, anisotropic scale `D_theta`, the space-time change of
/// variables `L_theta = D_theta M_theta^T` and the frequency-side affine map
/// `A_theta(zeta) = L_theta^T zeta + Sigma(xi_theta)`.
#[derive(Clone, Debug)]
pub struct RescaleMaps {
    pub cap: Cap,
    pub n: usize,
}

impl RescaleMaps {
    /// `L_theta (x, t) = (r (x + 2 t xi_theta), r^2 t)`.
    pub fn lin_spacetime(&self, z: &ZPoint) -> ZPoint {
        let r = self.cap.radius;
        let mut x = [0.0; 2];
        for ax in 0..self.n {
            x[ax] = r * (z.x[ax] + 2.0 * z.t * self.cap.center[ax]);
        }
        ZPoint::new(x, r * r * z.t)
    }

    /// Matrix of `L_theta` (rows: spatial parts then time part).
    pub fn lin_matrix(&self) -> [[f64; 3]; 3] {
        let r = self.cap.radius;
        let n = self.n;
        let mut m = [[0.0; 3]; 3];
        for ax in 0..n {
            m[ax][ax] = r;
            m[ax][n] = 2.0 * r * self.cap.center[ax];
        }
        m[n][n] = r * r;
        m
    }

    /// `A_theta(zeta) = L_theta^T zeta + Sigma(xi_theta)` on frequency
    /// space-time points `zeta = (u, s)`.
    pub fn affine_freq(&self, zeta: &ZPoint) -> ZPoint {
        let r = self.cap.radius;
        let n = self.n;
        let lift = paraboloid_lift(&self.cap.center, n);
        let mut x = [0.0; 2];
        let mut dot = 0.0;
        for ax in 0..n {
            x[ax] = r * zeta.x[ax] + lift.x[ax];
            dot += self.cap.center[ax] * zeta.x[ax];
        }
        let t = 2.0 * r * dot + r * r * zeta.t + lift.t;
        ZPoint::new(x, t)
    }

    /// `det D_theta = rad^{n+2}`.
    pub fn det_scale(&self) -> f64 {
        self.cap.radius.powi(self.n as i32 + 2)
    }
}

/// Builds the rescaling maps of a cap.
pub fn cap_rescaling_maps(cap: &Cap, n: usize) -> Result<RescaleMaps> {
    if !(cap.radius > 0.0) {
        return Err(Error::precondition("cap radius must be positive"));
    }
    Ok(RescaleMaps { cap: *cap, n })
}

/// Parabolic rescaling of a datum supported in `theta ∩ B(0,1)`.
///
/// Returns `(f_tilde, maps)` where `f_tilde` lives on a grid of period
/// `L * rad`, has unit-ball frequency support, the same `L^2` norm, and
/// satisfies `|Uf(z)| = rad^{n/2} |U f_tilde(L_theta z)|` exactly at sampled
/// points. The cap centre is snapped to the nearest frequency-lattice point
/// so the rescaled coefficients stay on a lattice.
pub fn rescale_datum(datum: &Datum, cap: &Cap) -> Result<(Datum, RescaleMaps)> {
    let grid = datum.grid().clone();
    let n = grid.n;
    if !datum.iter().all(|(k, _)| {
        let xi = grid.xi_of(*k);
        cap.contains(&xi, n) && norm_n(&xi, n) <= 1.0
    }) {
        return Err(Error::precondition(
            "datum support must lie in theta ∩ B(0,1) for parabolic rescaling",
        ));
    }
    let dxi = grid.dxi();
    let mut k_center = [0i64; 2];
    for ax in 0..n {
        k_center[ax] = (cap.center[ax] / dxi).round() as i64;
    }
    let snapped = {
        let mut c = [0.0; 2];
        for ax in 0..n {
            c[ax] = k_center[ax] as f64 * dxi;
        }
        Cap::new(c, cap.radius)
    };
    let r = cap.radius;
    let new_grid = Arc::new(Grid::new(
        n,
        grid.l * r,
        grid.nx,
        grid.tmin * r * r,
        grid.tmax * r * r,
        grid.nt,
    )?);
    let mut out = Datum::new(new_grid);
    let amp = Complex64::new(r.powf(n as f64 / 2.0), 0.0);
    for (k, a) in datum.iter() {
        let mut kk = [0i64; 2];
        for ax in 0..n {
            kk[ax] = k[ax] - k_center[ax];
        }
        out.add_coeff(kk, a * amp).map_err(|_| {
            Error::precondition("rescaled frequency escapes the unit ball (support too wide)")
        })?;
    }
    Ok((out, RescaleMaps { cap: snapped, n }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_cap_maps_are_identity() {
        let cap = Cap::new([0.0, 0.0], 1.0);
        let maps = cap_rescaling_maps(&cap, 1).unwrap();
        let z = ZPoint::new([0.7, 0.0], -0.3);
        let lz = maps.lin_spacetime(&z);
        assert_eq!(lz.x[0], z.x[0]);
        assert_eq!(lz.t, z.t);
        let zeta = ZPoint::new([0.2, 0.0], 0.9);
        let az = maps.affine_freq(&zeta);
        assert_eq!(az.x[0], zeta.x[0]);
        assert_eq!(az.t, zeta.t);
    }

    #[test]
    fn rescaling_matrix_example_n1() {
        // theta = B(1, 1/2): L_theta = [[1/2, 1], [0, 1/4]].
        let cap = Cap::new([1.0, 0.0], 0.5);
        let maps = cap_rescaling_maps(&cap, 1).unwrap();
        let m = maps.lin_matrix();
        assert_eq!(m[0][0], 0.5);
        assert_eq!(m[0][1], 1.0);
        assert_eq!(m[1][0], 0.0);
        assert_eq!(m[1][1], 0.25);
        assert_eq!(maps.det_scale(), 0.125); // rad^{n+2} = (1/2)^3
    }

    #[test]
    fn affine_map_traces_the_paraboloid() {
        // A_theta(Sigma(eta)) = Sigma(xi_theta + rad * eta), checked densely.
        for (center, rad, n) in [([1.0, 0.0], 0.5, 1usize), ([0.25, -0.5], 0.25, 2)] {
            let cap = Cap::new(center, rad);
            let maps = cap_rescaling_maps(&cap, n).unwrap();
            for i in -4..=4 {
                for j in -4..=4 {
                    let eta = [i as f64 / 4.0, if n == 2 { j as f64 / 4.0 } else { 0.0 }];
                    let image = maps.affine_freq(&paraboloid_lift(&eta, n));
                    let mut target_xi = [0.0; 2];
                    for ax in 0..n {
                        target_xi[ax] = center[ax] + rad * eta[ax];
                    }
                    let target = paraboloid_lift(&target_xi, n);
                    for ax in 0..n {
                        assert!((image.x[ax] - target.x[ax]).abs() < 1e-12);
                    }
                    assert!((image.t - target.t).abs() < 1e-12);
                    if n == 1 {
                        break;
                    }
                }
            }
        }
        // Spot value from the n=1 example: eta = 1 -> Sigma(3/2) = (3/2, 9/4).
        let maps = cap_rescaling_maps(&Cap::new([1.0, 0.0], 0.5), 1).unwrap();
        let img = maps.affine_freq(&paraboloid_lift(&[1.0, 0.0], 1));
        assert!((img.x[0] - 1.5).abs() < 1e-15);
        assert!((img.t - 2.25).abs() < 1e-15);
    }

    #[test]
    fn rescale_unit_cap_is_coefficientwise_identity() {
        let g = Arc::new(Grid::new(1, 32.0, 64, -1.0, 1.0, 9).unwrap());
        let d = Datum::random_band(g, 0.9, 5).unwrap();
        let (tilde, _) = rescale_datum(&d, &Cap::new([0.0, 0.0], 1.0)).unwrap();
        assert!((tilde.l2_norm() - d.l2_norm()).abs() < 1e-14);
        for (k, a) in d.iter() {
            assert!((tilde.coeff(k) - a).norm() < 1e-15);
        }
    }

    #[test]
    fn rescale_preserves_l2_norm() {
        let g = Arc::new(Grid::new(1, 64.0, 128, -1.0, 1.0, 9).unwrap());
        let cap = Cap::new([0.5, 0.0], 0.25);
        let mut d = Datum::new(g.clone());
        // A few modes well inside theta ∩ B(0,1).
        for (k, amp) in [(4i64, 1.0), (5, 0.3), (6, -0.7)] {
            d.add_coeff([k, 0], Complex64::new(amp, 0.1)).unwrap();
        }
        let (tilde, _) = rescale_datum(&d, &cap).unwrap();
        assert!((tilde.l2_norm() / d.l2_norm() - 1.0).abs() < 1e-12);
        assert!(tilde.support_radius() <= 1.0 + 1e-12);
    }

    #[test]
    fn rescale_rejects_support_violation() {
        let g = Arc::new(Grid::new(1, 32.0, 64, -1.0, 1.0, 9).unwrap());
        let d = Datum::random_band(g, 1.5, 6).unwrap(); // support escapes B(0,1)
        assert!(rescale_datum(&d, &Cap::new([0.0, 0.0], 0.5)).is_err());
    }

    #[test]
    fn pointwise_conjugation_identity() {
        // |Uf(z)| = rad^{n/2} |U f_tilde(L_theta z)| on a 16x16 sample set.
        let g = Arc::new(Grid::new(1, 64.0, 128, -8.0, 8.0, 33).unwrap());
        let cap = Cap::new([0.5, 0.0], 0.25);
        let mut d = Datum::new(g.clone());
        for (k, re, im) in [(3i64, 0.9, 0.0), (4, -0.2, 0.4), (6, 0.1, -0.8), (7, 0.5, 0.5)] {
            d.add_coeff([k, 0], Complex64::new(re, im)).unwrap();
        }
        let (tilde, maps) = rescale_datum(&d, &cap).unwrap();
        let r = cap.radius;
        // Direct evaluation of U at arbitrary space-time points.
        let eval = |datum: &Datum, z: &ZPoint| -> Complex64 {
            let gr = datum.grid();
            let scale = gr.dxi().powi(gr.n as i32)
                / (2.0 * std::f64::consts::PI).powi(gr.n as i32);
            let mut acc = Complex64::new(0.0, 0.0);
            for (k, a) in datum.iter() {
                let xi = gr.xi_of(*k);
                let phase = z.x[0] * xi[0] + z.t * xi[0] * xi[0];
                acc += a * Complex64::from_polar(1.0, phase);
            }
            acc * scale
        };
        let mut worst: f64 = 0.0;
        for it in 0..16 {
            let t = -4.0 + it as f64 * 0.53;
            for ix in 0..16 {
                let x = g.x1(ix * 8) + 0.21;
                let z = ZPoint::new([x, 0.0], t);
                let lhs = eval(&d, &z).norm();
                let rhs = r.powf(0.5) * eval(&tilde, &maps.lin_spacetime(&z)).norm();
                worst = worst.max((lhs - rhs).abs() / d.l2_norm());
            }
        }
        assert!(worst < 1e-9, "worst pointwise mismatch over 256 samples: {worst}");
    }
}
