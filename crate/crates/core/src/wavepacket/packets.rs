use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::datum::{lattice_indices, Datum};
use crate::field::grid::{norm_n, Grid, BAND_LIMIT};
use crate::geometry::tubes::Tube;
use crate::wavepacket::windows::{psi_hat_scaled, translation_phase};

/// Builds the modulated-bump datum `psi_T` launched from a tube: frequency
/// support in `4 theta_T`, `L^2`-normalised.
pub fn build_packet_datum(grid: Arc<Grid>, tube: &Tube) -> Result<Datum> {
    let rho = tube.rho;
    if rho < 10.0 {
        return Err(Error::precondition("packet scale rho must be >= 10"));
    }
    let n = grid.n;
    let cap = tube.cap();
    if norm_n(&cap.center, n) + cap.radius > 1.0 {
        return Err(Error::precondition("packet cap escapes the unit ball"));
    }
    let mut d = Datum::new(grid.clone());
    let kmax = (4.0 * rho.powf(-0.5) / grid.dxi()).ceil() as i64 + 1;
    let mut kc = [0i64; 2];
    for ax in 0..n {
        kc[ax] = (cap.center[ax] / grid.dxi()).round() as i64;
    }
    for dk in lattice_indices(n, kmax) {
        let mut k = [0i64; 2];
        for ax in 0..n {
            k[ax] = kc[ax] + dk[ax];
        }
        let xi = grid.xi_of(k);
        if norm_n(&xi, n) >= BAND_LIMIT {
            continue;
        }
        let w = psi_hat_scaled(&xi, &cap.center, rho, n);
        if w != 0.0 {
            d.add_coeff(k, translation_phase(&xi, &tube.x0, n) * w)?;
        }
    }
    let nrm = d.l2_norm();
    if nrm == 0.0 {
        return Err(Error::precondition("packet window misses the frequency lattice"));
    }
    d.scale(Complex64::new(1.0 / nrm, 0.0));
    Ok(d)
}
