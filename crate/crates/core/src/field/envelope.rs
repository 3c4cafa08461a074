use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::field::grid::ZPoint;
use crate::field::synth::{SpaceTimeField, SpatialField};

/// Per-cube suprema `a_Q` of `|F|` over lattice `M`-cubes, realising the
/// locally constant majorant `sum_Q a_Q chi_Q`.
#[derive(Clone, Debug)]
pub struct Envelope {
    pub m: f64,
    pub dims: usize,
    sup: BTreeMap<[i64; 3], f64>,
}

impl Envelope {
    fn cube_index(&self, z: &[f64]) -> [i64; 3] {
        let mut idx = [0i64; 3];
        for (ax, &c) in z.iter().enumerate() {
            idx[ax] = (c / self.m + 0.5).floor() as i64;
        }
        idx
    }

    /// `sum_Q a_Q chi_Q(z)` (cubes treated as half-open; 0 off the sampled set).
    pub fn value_at(&self, z: &[f64]) -> f64 {
        assert_eq!(z.len(), self.dims);
        self.sup.get(&self.cube_index(z)).copied().unwrap_or(0.0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[i64; 3], &f64)> {
        self.sup.iter()
    }

    pub fn len(&self) -> usize {
        self.sup.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sup.is_empty()
    }

    pub fn max_value(&self) -> f64 {
        self.sup.values().cloned().fold(0.0, f64::max)
    }

    fn build(samples: impl Iterator<Item = (Vec<f64>, f64)>, m: f64, dims: usize) -> Envelope {
        let mut env = Envelope { m, dims, sup: BTreeMap::new() };
        for (z, a) in samples {
            let idx = env.cube_index(&z);
            let slot = env.sup.entry(idx).or_insert(0.0);
            if a > *slot {
                *slot = a;
            }
        }
        env
    }
}

fn check_m(m: f64, spacing: f64) -> Result<()> {
    if !(m >= 1.0) {
        return Err(Error::precondition(format!("cube side M = {m} must be >= 1")));
    }
    if m < spacing {
        return Err(Error::config(format!(
            "cube side M = {m} smaller than the grid spacing {spacing}"
        )));
    }
    Ok(())
}

/// Envelope of a spatial field over lattice `M`-cubes in `R^n`.
pub fn locally_constant_envelope_spatial(field: &SpatialField, m: f64) -> Result<Envelope> {
    let grid = &field.grid;
    check_m(m, grid.dx())?;
    let n = grid.n;
    let samples = field.values.iter().enumerate().map(|(flat, v)| {
        let x = grid.x_of(flat);
        (x[..n].to_vec(), v.norm())
    });
    Ok(Envelope::build(samples, m, n))
}

/// Envelope of a space-time field over lattice `M`-cubes in `R^{n+1}`.
pub fn locally_constant_envelope_spacetime(field: &SpaceTimeField, m: f64) -> Result<Envelope> {
    let grid = field.grid.clone();
    check_m(m, grid.dx().max(grid.dt()))?;
    let n = grid.n;
    let mut env = Envelope { m, dims: n + 1, sup: BTreeMap::new() };
    for jt in 0..grid.nt {
        let t = grid.t(jt);
        let slice = field.slice(jt);
        for (flat, v) in slice.iter().enumerate() {
            let x = grid.x_of(flat);
            let mut z = x[..n].to_vec();
            z.push(t);
            let idx = env.cube_index(&z);
            let a = v.norm();
            let slot = env.sup.entry(idx).or_insert(0.0);
            if a > *slot {
                *slot = a;
            }
        }
    }
    Ok(env)
}

/// Samplewise check `|F(z)| <= sum_Q a_Q chi_Q(z)` for a spatial field.
pub fn envelope_dominates_spatial(field: &SpatialField, env: &Envelope) -> bool {
    let grid = &field.grid;
    let n = grid.n;
    field.values.iter().enumerate().all(|(flat, v)| {
        let x = grid.x_of(flat);
        v.norm() <= env.value_at(&x[..n]) + 1e-15
    })
}

/// Helper shared with the propagator: space-time point from grid indices.
pub fn zpoint(grid: &crate::field::grid::Grid, flat: usize, jt: usize) -> ZPoint {
    ZPoint::new(grid.x_of(flat), grid.t(jt))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::bumps::eta;
    use crate::field::grid::Grid;
    use num_complex::Complex64;
    use std::sync::Arc;

    fn grid1() -> Arc<Grid> {
        Arc::new(Grid::new(1, 32.0, 64, -1.0, 1.0, 9).unwrap())
    }

    #[test]
    fn constant_field_has_constant_envelope() {
        let g = grid1();
        let mut f = SpatialField::zeros(g);
        f.values.fill(Complex64::new(0.0, -2.5));
        let env = locally_constant_envelope_spatial(&f, 1.0).unwrap();
        for (_, a) in env.iter() {
            assert_eq!(*a, 2.5);
        }
        assert!(envelope_dominates_spatial(&f, &env));
    }

    #[test]
    fn zero_field_has_zero_envelope() {
        let g = grid1();
        let f = SpatialField::zeros(g);
        let env = locally_constant_envelope_spatial(&f, 2.0).unwrap();
        assert_eq!(env.max_value(), 0.0);
    }

    #[test]
    fn m_below_grid_spacing_is_config_error() {
        let g = Arc::new(Grid::new(1, 512.0, 1024, -1.0, 1.0, 9).unwrap());
        let f = SpatialField::zeros(g);
        // dx = 0.5 here, fine; but M < 1 violates the precondition.
        assert!(locally_constant_envelope_spatial(&f, 0.25).is_err());
    }

    /// Envelope sandwich against the direct convolution oracle:
    /// `sum_Q a_Q chi_Q <= C * (|F| * eta)` with measured C <= 10 for a
    /// unit-band bump field.
    #[test]
    fn envelope_sandwich_against_convolution_oracle() {
        let g = grid1();
        // Band inside [-1/2, 1/2]: the unit-scale hypothesis of the lemma.
        let d = crate::field::datum::Datum::gaussian_bump(g.clone(), [0.0, 0.0], 0.15, [0.0, 0.0], 0.45)
            .unwrap();
        let f = crate::field::synth::synthesize(&d, 0.0).unwrap();
        let env = locally_constant_envelope_spatial(&f, 1.0).unwrap();
        assert!(envelope_dominates_spatial(&f, &env));

        // Direct convolution quadrature (|F| * eta)(z) on the sample grid.
        let n = g.n;
        let cell = g.cell_x();
        let mut worst: f64 = 0.0;
        for (flat, _) in f.values.iter().enumerate() {
            let z = g.x_of(flat);
            let mut conv = 0.0;
            for (flat2, v) in f.values.iter().enumerate() {
                let y = g.x_of(flat2);
                let off: Vec<f64> = (0..n).map(|a| z[a] - y[a]).collect();
                conv += v.norm() * eta(&off) * cell;
            }
            let upper = env.value_at(&z[..n]);
            if upper > 0.0 {
                worst = worst.max(upper / conv.max(1e-300));
            }
        }
        assert!(worst <= 10.0, "measured envelope constant {worst}");
    }
}
