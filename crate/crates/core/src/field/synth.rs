use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::Result;
use crate::field::datum::Datum;
use crate::field::grid::{norm_sq_n, Grid};

static PLANNER: OnceLock<Mutex<FftPlanner<f64>>> = OnceLock::new();

/// Shared inverse-FFT plan for a given length.
pub fn inverse_plan(len: usize) -> Arc<dyn Fft<f64>> {
    let m = PLANNER.get_or_init(|| Mutex::new(FftPlanner::new()));
    m.lock().unwrap().plan_fft_inverse(len)
}

/// One complex time slice on the spatial grid.
#[derive(Clone, Debug)]
pub struct SpatialField {
    pub grid: Arc<Grid>,
    pub values: Vec<Complex64>,
}

impl SpatialField {
    pub fn zeros(grid: Arc<Grid>) -> Self {
        let len = grid.spatial_len();
        SpatialField { grid, values: vec![Complex64::new(0.0, 0.0); len] }
    }
}

/// Complex samples of a solution on the full x-grid x t-grid.
///
/// Values are addressed as `(x-sample, t-sample)`; internally the layout is
/// time-major so that whole time slices stay contiguous.
#[derive(Clone, Debug)]
pub struct SpaceTimeField {
    pub grid: Arc<Grid>,
    values: Vec<Complex64>,
}

impl SpaceTimeField {
    pub fn zeros(grid: Arc<Grid>) -> Self {
        let len = grid.spatial_len() * grid.nt;
        SpaceTimeField { grid, values: vec![Complex64::new(0.0, 0.0); len] }
    }

    pub fn value(&self, x_flat: usize, jt: usize) -> Complex64 {
        self.values[jt * self.grid.spatial_len() + x_flat]
    }

    pub fn slice(&self, jt: usize) -> &[Complex64] {
        let m = self.grid.spatial_len();
        &self.values[jt * m..(jt + 1) * m]
    }

    pub fn slice_mut(&mut self, jt: usize) -> &mut [Complex64] {
        let m = self.grid.spatial_len();
        &mut self.values[jt * m..(jt + 1) * m]
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn all_finite(&self) -> bool {
        self.values.iter().all(|v| v.re.is_finite() && v.im.is_finite())
    }
}

/// Evaluates `(2*pi)^{-n} sum_k e^{i(x.xi_k + t |xi_k|^2)} a_k dxi^n` on the
/// spatial grid via one inverse FFT per axis.
pub fn synthesize(datum: &Datum, t: f64) -> Result<SpatialField> {
    if !t.is_finite() {
        return Err(crate::error::Error::precondition("non-finite time"));
    }
    let grid = datum.grid().clone();
    let mut field = SpatialField::zeros(grid.clone());
    fill_slice(datum, t, &mut field.values);
    Ok(field)
}

/// Writes the slice for time `t` into `out` (length `spatial_len`).
pub fn fill_slice(datum: &Datum, t: f64, out: &mut [Complex64]) {
    let grid = datum.grid();
    let n = grid.n;
    let nx = grid.nx as i64;
    out.fill(Complex64::new(0.0, 0.0));
    let scale = grid.dxi().powi(n as i32) / (2.0 * std::f64::consts::PI).powi(n as i32);
    for (k, a) in datum.iter() {
        let xi = grid.xi_of(*k);
        let phase = t * norm_sq_n(&xi, n);
        // The sample origin sits at index nx/2, so each coefficient picks up
        // a parity factor (-1)^(k0 + k1 + ...).
        let parity = (k[..n].iter().sum::<i64>()).rem_euclid(2);
        let sign = if parity == 0 { 1.0 } else { -1.0 };
        let c = a * Complex64::from_polar(sign * scale, phase);
        let mut flat = 0usize;
        for ax in 0..n {
            let bin = k[ax].rem_euclid(nx) as usize;
            flat = flat * grid.nx + bin;
        }
        out[flat] += c;
    }
    inverse_fft_nd(out, n, grid.nx);
}

/// Unnormalised inverse FFT over an `nx^n` row-major array, in place.
pub fn inverse_fft_nd(data: &mut [Complex64], n: usize, nx: usize) {
    let plan = inverse_plan(nx);
    let mut scratch = vec![Complex64::new(0.0, 0.0); plan.get_inplace_scratch_len()];
    match n {
        1 => {
            plan.process_with_scratch(data, &mut scratch);
        }
        2 => {
            for row in data.chunks_exact_mut(nx) {
                plan.process_with_scratch(row, &mut scratch);
            }
            let mut col = vec![Complex64::new(0.0, 0.0); nx];
            for j in 0..nx {
                for i in 0..nx {
                    col[i] = data[i * nx + j];
                }
                plan.process_with_scratch(&mut col, &mut scratch);
                for i in 0..nx {
                    data[i * nx + j] = col[i];
                }
            }
        }
        _ => unreachable!(),
    }
}
