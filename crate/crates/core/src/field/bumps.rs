//! Smooth compactly supported profiles shared by the mollifier, the packet
//! windows and the partition of unity.
//!
//! Everything is built from a single C-infinity bump `beta` supported on
//! `[-1/2, 1/2]` through its antiderivative: mollified indicators are
//! differences of two CDF evaluations, so partition-of-unity identities hold
//! to machine precision by cancellation.

use std::sync::OnceLock;

const BUMP_SHAPE: f64 = 1.0;
const CDF_KNOTS: usize = 4096;

/// `exp(-a / (1 - 4 v^2))` on `(-1/2, 1/2)`, unnormalised.
fn raw_bump(v: f64) -> f64 {
    let w = 1.0 - 4.0 * v * v;
    if w <= 0.0 {
        0.0
    } else {
        (-BUMP_SHAPE / w).exp()
    }
}

struct Cdf {
    values: Vec<f64>,
    derivs: Vec<f64>,
    mass: f64,
}

fn cdf_table() -> &'static Cdf {
    static TABLE: OnceLock<Cdf> = OnceLock::new();
    TABLE.get_or_init(|| {
        // 7-point Gauss-Legendre nodes/weights on [-1, 1].
        let nodes = [
            -0.949107912342759,
            -0.741531185599394,
            -0.405845151377397,
            0.0,
            0.405845151377397,
            0.741531185599394,
            0.949107912342759,
        ];
        let weights = [
            0.129484966168870,
            0.279705391489277,
            0.381830050505119,
            0.417959183673469,
            0.381830050505119,
            0.279705391489277,
            0.129484966168870,
        ];
        let h = 1.0 / CDF_KNOTS as f64;
        let mut values = Vec::with_capacity(CDF_KNOTS + 1);
        let mut derivs = Vec::with_capacity(CDF_KNOTS + 1);
        let mut acc = 0.0;
        values.push(0.0);
        derivs.push(0.0);
        for i in 0..CDF_KNOTS {
            let a = -0.5 + i as f64 * h;
            let mid = a + h / 2.0;
            let mut panel = 0.0;
            for (x, w) in nodes.iter().zip(weights) {
                panel += w * raw_bump(mid + x * h / 2.0);
            }
            acc += panel * h / 2.0;
            values.push(acc);
            derivs.push(raw_bump(a + h));
        }
        let mass = acc;
        Cdf { values, derivs, mass }
    })
}

/// CDF of the normalised bump: 0 for `v <= -1/2`, 1 for `v >= 1/2`,
/// C-infinity in between.
pub fn bump_cdf(v: f64) -> f64 {
    if v <= -0.5 {
        return 0.0;
    }
    if v >= 0.5 {
        return 1.0;
    }
    let table = cdf_table();
    let h = 1.0 / CDF_KNOTS as f64;
    let pos = (v + 0.5) / h;
    let i = (pos.floor() as usize).min(CDF_KNOTS - 1);
    let s = pos - i as f64;
    // Cubic Hermite with analytic derivatives.
    let (y0, y1) = (table.values[i], table.values[i + 1]);
    let (d0, d1) = (table.derivs[i] * h, table.derivs[i + 1] * h);
    let s2 = s * s;
    let s3 = s2 * s;
    let val = (2.0 * s3 - 3.0 * s2 + 1.0) * y0
        + (s3 - 2.0 * s2 + s) * d0
        + (-2.0 * s3 + 3.0 * s2) * y1
        + (s3 - s2) * d1;
    (val / table.mass).clamp(0.0, 1.0)
}

/// The tile profile `chi_{[-1/2,1/2]} * beta`: 1 at 0, supported on `[-1, 1]`,
/// with `sum_k tile(v - k) = 1` exactly.
pub fn tile(v: f64) -> f64 {
    bump_cdf(v + 0.5) - bump_cdf(v - 0.5)
}

/// Mollified indicator: 1 for `|u| <= plateau`, 0 for `|u| >= support`,
/// smooth in between (a rescaled `chi * beta`).
pub fn window(u: f64, plateau: f64, support: f64) -> f64 {
    debug_assert!(support > plateau && plateau >= 0.0);
    let m = (plateau + support) / 2.0;
    let w = support - plateau;
    bump_cdf((u + m) / w) - bump_cdf((u - m) / w)
}

/// Frequency profile of the unit-scale mollifier along one axis:
/// 1 on `[-1, 1]`, supported on `[-2, 2]`.
pub fn eta0_hat_axis(u: f64) -> f64 {
    window(u, 1.0, 2.0)
}

/// Frequency profile of the reproducing packet window, radial:
/// 1 on `|xi| <= 2`, supported on `|xi| <= 4`.
pub fn psi_hat_radial(r: f64) -> f64 {
    window(r, 2.0, 4.0)
}

const ETA_XMAX: f64 = 64.0;
const ETA_SAMPLES: usize = 4096;

struct EtaTables {
    /// |eta0| along one axis, sampled on [0, ETA_XMAX].
    abs: Vec<f64>,
    /// sup of |eta0| over a sliding window of half-width 1.
    sup: Vec<f64>,
}

fn eta_tables() -> &'static EtaTables {
    static TABLE: OnceLock<EtaTables> = OnceLock::new();
    TABLE.get_or_init(|| {
        // eta0_axis(x) = (1/pi) * int_0^2 eta0_hat(u) cos(x u) du, by composite
        // Simpson; the integrand is smooth and the x range is moderate.
        let m = 100_000usize; // Simpson panels over [0, 2]
        let hu = 2.0 / m as f64;
        let wvals: Vec<f64> = (0..=m).map(|i| eta0_hat_axis(i as f64 * hu)).collect();
        let dx = ETA_XMAX / (ETA_SAMPLES - 1) as f64;
        let abs: Vec<f64> = (0..ETA_SAMPLES)
            .map(|j| {
                let x = j as f64 * dx;
                let mut acc = 0.0;
                for (i, w) in wvals.iter().enumerate() {
                    let coef = if i == 0 || i == m {
                        1.0
                    } else if i % 2 == 1 {
                        4.0
                    } else {
                        2.0
                    };
                    acc += coef * w * (x * (i as f64 * hu)).cos();
                }
                (acc * hu / 3.0 / std::f64::consts::PI).abs()
            })
            .collect();
        // Sliding supremum over |w - x| <= 1 (window of 2 in x).
        let k = (1.0 / dx).ceil() as usize;
        let sup: Vec<f64> = (0..ETA_SAMPLES)
            .map(|j| {
                let lo = j.saturating_sub(k);
                let hi = (j + k).min(ETA_SAMPLES - 1);
                abs[lo..=hi].iter().cloned().fold(0.0, f64::max)
            })
            .collect();
        EtaTables { abs, sup }
    })
}

fn table_lookup(table: &[f64], x: f64) -> f64 {
    let x = x.abs();
    if x >= ETA_XMAX {
        return 0.0;
    }
    let dx = ETA_XMAX / (ETA_SAMPLES - 1) as f64;
    let pos = x / dx;
    let i = (pos.floor() as usize).min(ETA_SAMPLES - 2);
    let s = pos - i as f64;
    table[i] * (1.0 - s) + table[i + 1] * s
}

/// One-axis factor of the unit-scale mollifier `|eta0|`.
pub fn eta0_axis_abs(x: f64) -> f64 {
    table_lookup(&eta_tables().abs, x)
}

/// One-axis factor of `eta(z) = sup_{|w-z|_inf <= 1} |eta0(w)|`
/// (the sup of a product over a box splits into per-axis sups).
pub fn eta_axis(x: f64) -> f64 {
    table_lookup(&eta_tables().sup, x)
}

/// The concrete mollifier of the locally constant property in `d` dimensions.
pub fn eta(z: &[f64]) -> f64 {
    z.iter().map(|&x| eta_axis(x)).product()
}
