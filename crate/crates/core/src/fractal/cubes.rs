use std::collections::BTreeSet;
use std::io::{BufRead, Write};

use crate::error::{Error, Result};

/// A family of lattice `M`-cubes in the space-time ball `B^{n+1}(0, R)`.
///
/// Space-time balls follow the product metric and are treated as axis-aligned
/// boxes; all intersection predicates use closed sets, so boundary touching
/// counts. Cube centres live on `M * Z^{n+1}` (stored as integer indices).
#[derive(Clone, Debug, PartialEq)]
pub struct CubeFamily {
    pub m: f64,
    pub r: f64,
    pub n: usize,
    centers: BTreeSet<[i64; 3]>,
}

impl CubeFamily {
    pub fn new(n: usize, m: f64, r: f64) -> Result<CubeFamily> {
        if !(m > 0.0) || !(r > 0.0) || n == 0 || n > 2 {
            return Err(Error::config("cube family needs M > 0, R > 0, n in {1, 2}"));
        }
        Ok(CubeFamily { m, r, n, centers: BTreeSet::new() })
    }

    /// Inserts the cube with centre `M * idx`; duplicates are ignored.
    /// The cube must lie inside the ambient ball.
    pub fn insert(&mut self, idx: [i64; 3]) -> Result<()> {
        let d = self.n + 1;
        for ax in 0..d {
            let c = idx[ax] as f64 * self.m;
            if c.abs() + self.m / 2.0 > self.r + 1e-9 {
                return Err(Error::precondition(format!(
                    "cube at {idx:?} escapes the ambient ball of radius {}",
                    self.r
                )));
            }
        }
        let mut key = [0i64; 3];
        key[..d].copy_from_slice(&idx[..d]);
        self.centers.insert(key);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.centers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.centers.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &[i64; 3]> {
        self.centers.iter()
    }

    /// Centre coordinates of a cube index.
    pub fn center_of(&self, idx: &[i64; 3]) -> [f64; 3] {
        let mut c = [0.0; 3];
        for ax in 0..=self.n {
            c[ax] = idx[ax] as f64 * self.m;
        }
        c
    }

    /// Closed box `[lo, hi]` per axis of a cube.
    pub fn box_of(&self, idx: &[i64; 3]) -> ([f64; 3], [f64; 3]) {
        let c = self.center_of(idx);
        let mut lo = [0.0; 3];
        let mut hi = [0.0; 3];
        for ax in 0..=self.n {
            lo[ax] = c[ax] - self.m / 2.0;
            hi[ax] = c[ax] + self.m / 2.0;
        }
        (lo, hi)
    }

    /// True when at most one cube meets each vertical line (one cube per
    /// spatial column).
    pub fn vertical_line_test(&self) -> bool {
        let mut seen = BTreeSet::new();
        for idx in &self.centers {
            let col = [idx[0], if self.n == 2 { idx[1] } else { 0 }];
            if !seen.insert(col) {
                return false;
            }
        }
        true
    }

    /// Writes the text format: one line per cube, `cx [cy] ct M`, with `#`
    /// comments allowed.
    pub fn write_text<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "# lattice {}-cubes in B^{}(0, {})", self.m, self.n + 1, self.r)?;
        for idx in &self.centers {
            let c = self.center_of(idx);
            match self.n {
                1 => writeln!(w, "{} {} {}", c[0], c[1], self.m)?,
                2 => writeln!(w, "{} {} {} {}", c[0], c[1], c[2], self.m)?,
                _ => unreachable!(),
            }
        }
        Ok(())
    }

    /// Parses the text format; the ambient radius is the smallest ball
    /// containing every cube.
    pub fn read_text<R: BufRead>(reader: R) -> Result<CubeFamily> {
        let mut rows: Vec<(Vec<f64>, f64)> = Vec::new();
        for line in reader.lines() {
            let line = line?;
            let line = line.split('#').next().unwrap_or("").trim().to_string();
            if line.is_empty() {
                continue;
            }
            let toks: Vec<f64> = line
                .split_whitespace()
                .map(|t| t.parse::<f64>().map_err(|e| Error::Parse(e.to_string())))
                .collect::<Result<_>>()?;
            if toks.len() < 3 || toks.len() > 4 {
                return Err(Error::Parse(format!("expected 3 or 4 columns, got {}", toks.len())));
            }
            let m = *toks.last().unwrap();
            rows.push((toks[..toks.len() - 1].to_vec(), m));
        }
        if rows.is_empty() {
            return Err(Error::Parse("empty cube family file".into()));
        }
        let d = rows[0].0.len();
        let m = rows[0].1;
        if rows.iter().any(|(c, mm)| c.len() != d || *mm != m) {
            return Err(Error::Parse("inconsistent columns or cube side".into()));
        }
        let r = rows
            .iter()
            .flat_map(|(c, _)| c.iter().map(|x| x.abs() + m / 2.0))
            .fold(0.0, f64::max);
        let mut fam = CubeFamily::new(d - 1, m, r)?;
        for (c, _) in rows {
            let mut idx = [0i64; 3];
            for ax in 0..d {
                let v = c[ax] / m;
                if (v - v.round()).abs() > 1e-9 {
                    return Err(Error::Parse(format!("centre {} not on the {m}-lattice", c[ax])));
                }
                idx[ax] = v.round() as i64;
            }
            fam.insert(idx)?;
        }
        Ok(fam)
    }
}
