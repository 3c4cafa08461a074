//! Schrödinger evolution, space-time solution fields, and the maximal /
//! linearised-maximal operators.

use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::datum::Datum;
use crate::field::grid::{norm_sq_n, FVec, Grid};
use crate::field::norms::Region;
use crate::field::synth::{fill_slice, synthesize, SpaceTimeField, SpatialField};

/// Applies the propagator multiplier `e^{it|xi|^2}` in coefficient space.
pub fn propagate_coeffs(datum: &Datum, t: f64) -> Result<Datum> {
    if !t.is_finite() {
        return Err(Error::precondition("non-finite time"));
    }
    let grid = datum.grid().clone();
    let mut out = Datum::new(grid.clone());
    for (k, a) in datum.iter() {
        let xi = grid.xi_of(*k);
        let phase = t * norm_sq_n(&xi, grid.n);
        out.add_coeff(*k, a * Complex64::from_polar(1.0, phase))?;
    }
    Ok(out)
}

/// Spatial samples of `e^{it Delta} f` (identical to `synthesize`).
pub fn propagate(datum: &Datum, t: f64) -> Result<SpatialField> {
    synthesize(datum, t)
}

/// Evaluates the solution on the full space-time grid covering
/// `B^{n+1}(0, r)`; requires period `>= 4 r` and a time window containing
/// `[-r, r]`.
pub fn solve_spacetime(datum: &Datum, r: f64) -> Result<SpaceTimeField> {
    let grid = datum.grid().clone();
    if grid.l < 4.0 * r {
        return Err(Error::config(format!(
            "period L = {} < 4 r = {} permits spatial wraparound",
            grid.l,
            4.0 * r
        )));
    }
    if grid.tmin > -r || grid.tmax < r {
        return Err(Error::config("time window does not contain [-r, r]"));
    }
    let mut field = SpaceTimeField::zeros(grid.clone());
    let m = grid.spatial_len();
    let mut slices: Vec<(usize, Vec<Complex64>)> = (0..grid.nt)
        .into_par_iter()
        .map(|jt| {
            let mut buf = vec![Complex64::new(0.0, 0.0); m];
            fill_slice(datum, grid.t(jt), &mut buf);
            (jt, buf)
        })
        .collect();
    slices.sort_by_key(|(jt, _)| *jt);
    for (jt, buf) in slices {
        field.slice_mut(jt).copy_from_slice(&buf);
    }
    Ok(field)
}

/// Per-point supremum of `|e^{it Delta} f|` over the sampled time window,
/// with the earliest attaining time recorded.
#[derive(Clone, Debug)]
pub struct MaximalField {
    pub grid: Arc<Grid>,
    pub values: Vec<f64>,
    /// Index of the earliest sampled time attaining the supremum.
    pub argmax_t: Vec<usize>,
}

/// Measurable-function surrogate: one chosen time per spatial sample.
#[derive(Clone, Debug)]
pub struct TimeAssignment {
    pub times: Vec<f64>,
    pub window: (f64, f64),
}

impl TimeAssignment {
    pub fn new(times: Vec<f64>, window: (f64, f64)) -> Result<Self> {
        if times.iter().any(|t| *t < window.0 || *t > window.1 || !t.is_finite()) {
            return Err(Error::precondition("assignment time outside the declared window"));
        }
        Ok(TimeAssignment { times, window })
    }

    pub fn constant(len: usize, t: f64, window: (f64, f64)) -> Result<Self> {
        TimeAssignment::new(vec![t; len], window)
    }
}

/// Computes the maximal field over `[t0, t1]` using the grid's time samples
/// restricted to that window. Errors when the time grid undersamples the
/// datum's band (phase steps must stay below pi/8).
pub fn maximal_function(datum: &Datum, t0: f64, t1: f64) -> Result<MaximalField> {
    let grid = datum.grid().clone();
    let band = datum.support_radius().max(1e-9);
    if grid.dt() * band * band >= std::f64::consts::PI / 8.0 {
        return Err(Error::config(format!(
            "undersampled time grid for maximal function: dt*band^2 = {:.4}",
            grid.dt() * band * band
        )));
    }
    let slots: Vec<usize> = (0..grid.nt)
        .filter(|j| {
            let t = grid.t(*j);
            t >= t0 - 1e-12 && t <= t1 + 1e-12
        })
        .collect();
    if slots.is_empty() {
        return Err(Error::config("no time samples in the maximal window"));
    }
    let m = grid.spatial_len();
    let mut values = vec![0.0f64; m];
    let mut argmax_t = vec![slots[0]; m];
    let slices: Vec<(usize, Vec<Complex64>)> = slots
        .par_iter()
        .map(|&jt| {
            let mut buf = vec![Complex64::new(0.0, 0.0); m];
            fill_slice(datum, grid.t(jt), &mut buf);
            (jt, buf)
        })
        .collect();
    let mut ordered = slices;
    ordered.sort_by_key(|(jt, _)| *jt);
    for (jt, buf) in ordered {
        for (i, v) in buf.iter().enumerate() {
            let a = v.norm();
            if a > values[i] {
                values[i] = a;
                argmax_t[i] = jt;
            }
        }
    }
    Ok(MaximalField { grid, values, argmax_t })
}

impl MaximalField {
    /// `L^2` norm of the maximal field over a spatial region.
    pub fn l2_norm(&self, region: &Region) -> f64 {
        let n = self.grid.n;
        let cell = self.grid.cell_x();
        let mut acc = 0.0;
        for (flat, v) in self.values.iter().enumerate() {
            let x = self.grid.x_of(flat);
            if region.contains_x(&x, n) {
                acc += v * v * cell;
            }
        }
        (acc * 1.0).sqrt()
    }

    /// The argmax times as a `TimeAssignment`.
    pub fn to_assignment(&self) -> TimeAssignment {
        let times: Vec<f64> = self.argmax_t.iter().map(|j| self.grid.t(*j)).collect();
        TimeAssignment { times, window: (self.grid.tmin, self.grid.tmax) }
    }
}

/// `(int_region |e^{i t(x) Delta} f(x)|^2 dx)^{1/2}` by direct per-point
/// evaluation at the assigned times.
pub fn linearized_maximal(datum: &Datum, assignment: &TimeAssignment, region: &Region) -> Result<f64> {
    let grid = datum.grid().clone();
    let m = grid.spatial_len();
    if assignment.times.len() != m {
        return Err(Error::precondition("assignment length does not match the spatial grid"));
    }
    let n = grid.n;
    let cell = grid.cell_x();
    let coeffs: Vec<(FVec, Complex64)> = datum
        .iter()
        .map(|(k, a)| (grid.xi_of(*k), *a))
        .collect();
    let scale = grid.dxi().powi(n as i32) / (2.0 * std::f64::consts::PI).powi(n as i32);
    // Collect per-point terms first so the reduction order is fixed.
    let terms: Vec<f64> = (0..m)
        .into_par_iter()
        .map(|flat| {
            let x = grid.x_of(flat);
            if !region.contains_x(&x, n) {
                return 0.0;
            }
            let t = assignment.times[flat];
            let mut v = Complex64::new(0.0, 0.0);
            for (xi, a) in &coeffs {
                let mut phase = t * norm_sq_n(xi, n);
                for ax in 0..n {
                    phase += x[ax] * xi[ax];
                }
                v += a * Complex64::from_polar(1.0, phase);
            }
            (v * scale).norm_sqr() * cell
        })
        .collect();
    Ok(terms.iter().sum::<f64>().sqrt())
}

/// `L^2` norm of a spatial field over a region (convenience wrapper).
pub fn field_l2(field: &SpatialField, region: &Region) -> f64 {
    let grid = &field.grid;
    let n = grid.n;
    let cell = grid.cell_x();
    let mut acc = 0.0;
    for (flat, v) in field.values.iter().enumerate() {
        if region.contains_x(&grid.x_of(flat), n) {
            acc += v.norm_sqr() * cell;
        }
    }
    acc.sqrt()
}
