use std::io::{Read, Write};
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::grid::Grid;
use crate::field::synth::SpaceTimeField;

/// Binary field snapshot.
///
/// Header: `n, L, Nx, Nt, Tmin, Tmax` as little-endian 64-bit values
/// (`n`, `Nx`, `Nt` unsigned integers; the rest IEEE doubles), followed by the
/// samples in row-major `(x-sample, t-sample)` order as complex64 pairs
/// (little-endian `f32` real and imaginary parts).
pub fn write_snapshot<W: Write>(field: &SpaceTimeField, mut w: W) -> Result<()> {
    let g = &field.grid;
    w.write_all(&(g.n as u64).to_le_bytes())?;
    w.write_all(&g.l.to_le_bytes())?;
    w.write_all(&(g.nx as u64).to_le_bytes())?;
    w.write_all(&(g.nt as u64).to_le_bytes())?;
    w.write_all(&g.tmin.to_le_bytes())?;
    w.write_all(&g.tmax.to_le_bytes())?;
    let m = g.spatial_len();
    for flat in 0..m {
        for jt in 0..g.nt {
            let v = field.value(flat, jt);
            w.write_all(&(v.re as f32).to_le_bytes())?;
            w.write_all(&(v.im as f32).to_le_bytes())?;
        }
    }
    Ok(())
}

fn read_u64<R: Read>(r: &mut R) -> Result<u64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(u64::from_le_bytes(b))
}

fn read_f64<R: Read>(r: &mut R) -> Result<f64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(f64::from_le_bytes(b))
}

pub fn read_snapshot<R: Read>(mut r: R) -> Result<SpaceTimeField> {
    let n = read_u64(&mut r)? as usize;
    let l = read_f64(&mut r)?;
    let nx = read_u64(&mut r)? as usize;
    let nt = read_u64(&mut r)? as usize;
    let tmin = read_f64(&mut r)?;
    let tmax = read_f64(&mut r)?;
    let grid = Arc::new(Grid::new(n, l, nx, tmin, tmax, nt).map_err(|e| match e {
        Error::Config(m) => Error::Parse(format!("snapshot header: {m}")),
        other => other,
    })?);
    let m = grid.spatial_len();
    let mut field = SpaceTimeField::zeros(grid.clone());
    let mut buf = [0u8; 8];
    for flat in 0..m {
        for jt in 0..grid.nt {
            r.read_exact(&mut buf)?;
            let re = f32::from_le_bytes([buf[0], buf[1], buf[2], buf[3]]) as f64;
            let im = f32::from_le_bytes([buf[4], buf[5], buf[6], buf[7]]) as f64;
            field.slice_mut(jt)[flat] = Complex64::new(re, im);
        }
    }
    Ok(field)
}
