use num_complex::Complex64;

use crate::field::bumps::{psi_hat_radial, tile};
use crate::field::grid::{norm_n, FVec};
use crate::geometry::cn;

/// Partition-of-unity factor at scale `rho` for the cap centred at `xi_c`:
/// `phi_hat(rho^{1/2} (xi - xi_c))` with the tensor tile profile scaled so
/// that centres on the `c_n rho^{-1/2}` lattice sum to 1 exactly.
pub fn phi_hat(xi: &FVec, cap_center: &FVec, rho: f64, n: usize) -> f64 {
    let scale = rho.sqrt() / cn(n);
    let mut p = 1.0;
    for ax in 0..n {
        p *= tile((xi[ax] - cap_center[ax]) * scale);
        if p == 0.0 {
            return 0.0;
        }
    }
    p
}

/// The reproducing packet window at scale `rho`:
/// `rho^{n/4} psi_hat(rho^{1/2} (xi - xi_c))`, equal to `rho^{n/4}` on `2
/// theta` and supported on `4 theta`.
pub fn psi_hat_scaled(xi: &FVec, cap_center: &FVec, rho: f64, n: usize) -> f64 {
    let mut d = [0.0; 2];
    for ax in 0..n {
        d[ax] = xi[ax] - cap_center[ax];
    }
    let r = norm_n(&d, n) * rho.sqrt();
    let w = psi_hat_radial(r);
    if w == 0.0 {
        0.0
    } else {
        rho.powf(n as f64 / 4.0) * w
    }
}

/// Phase factor `e^{-i <xi, k>}` used by the position series.
pub fn translation_phase(xi: &FVec, k: &FVec, n: usize) -> Complex64 {
    let mut dot = 0.0;
    for ax in 0..n {
        dot += xi[ax] * k[ax];
    }
    Complex64::from_polar(1.0, -dot)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partition_of_unity_over_cap_centres() {
        let rho = 64.0_f64;
        let n = 1;
        let spacing = cn(n) * rho.powf(-0.5);
        for xi0 in [-0.41, 0.0, 0.137, 0.499] {
            let xi = [xi0, 0.0];
            let mc = (xi0 / spacing).round() as i64;
            let mut sum = 0.0;
            for m in (mc - 3)..=(mc + 3) {
                let c = [m as f64 * spacing, 0.0];
                sum += phi_hat(&xi, &c, rho, n);
            }
            assert!((sum - 1.0).abs() < 1e-14, "xi = {xi0}: sum = {sum}");
        }
    }

    #[test]
    fn self_reproducing_on_phi_support() {
        // psi_hat = rho^{n/4} exactly wherever phi_hat != 0 for the same cap.
        let rho = 100.0_f64;
        let n = 1;
        let c = [0.25, 0.0];
        for d in [-0.05, -0.01, 0.0, 0.02, 0.049] {
            let xi = [0.25 + d * rho.powf(-0.5), 0.0];
            if phi_hat(&xi, &c, rho, n) > 0.0 {
                assert_eq!(psi_hat_scaled(&xi, &c, rho, n), rho.powf(0.25));
            }
        }
    }
}
