use crate::field::grid::{norm_sq_n, FVec};

/// Unit normal to the paraboloid at the lift of `xi`:
/// `G(xi) = (1 + 4|xi|^2)^{-1/2} (-2 xi, 1)`.
pub fn gauss_map(xi: &FVec, n: usize) -> [f64; 3] {
    let s = (1.0 + 4.0 * norm_sq_n(xi, n)).sqrt();
    let mut g = [0.0; 3];
    for ax in 0..n {
        g[ax] = -2.0 * xi[ax] / s;
    }
    g[n] = 1.0 / s;
    g
}

/// Absolute determinant of the `(n+1) x (n+1)` matrix whose columns are the
/// given space-time vectors (only the first `n + 1` components are used).
pub fn wedge(cols: &[[f64; 3]], n: usize) -> f64 {
    let d = n + 1;
    debug_assert_eq!(cols.len(), d);
    match d {
        2 => (cols[0][0] * cols[1][1] - cols[0][1] * cols[1][0]).abs(),
        3 => {
            let m = cols;
            (m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
                - m[1][0] * (m[0][1] * m[2][2] - m[0][2] * m[2][1])
                + m[2][0] * (m[0][1] * m[1][2] - m[0][2] * m[1][1]))
                .abs()
        }
        _ => unreachable!(),
    }
}

/// `|sin angle(g, V)|` between a unit vector and the hyperplane with unit
/// normal `nu` is `|<g, nu>|`.
pub fn sin_angle_to_hyperplane(g: &[f64; 3], nu: &[f64; 3], d: usize) -> f64 {
    (0..d).map(|i| g[i] * nu[i]).sum::<f64>().abs()
}
