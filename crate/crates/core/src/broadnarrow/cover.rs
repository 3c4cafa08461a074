use crate::error::{Error, Result};
use crate::field::grid::{norm_n, FVec};
use crate::geometry::caps::Cap;
use crate::geometry::cn;

/// Radius convention for a cover at intermediate scale `K`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CoverRadius {
    /// `K^{-1}`-caps (transversality / broad-narrow sections).
    Full,
    /// `(2K)^{-1}`-caps (strip machinery).
    Half,
}

/// A finitely-overlapping covering of `B^n(0,1)` by caps with centres on the
/// `c_n K^{-1}` lattice intersected with `B^n(0,2)`.
#[derive(Clone, Debug)]
pub struct CapCover {
    pub k: f64,
    pub n: usize,
    pub radius_mode: CoverRadius,
    pub caps: Vec<Cap>,
}

impl CapCover {
    pub fn len(&self) -> usize {
        self.caps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.caps.is_empty()
    }

    pub fn radius(&self) -> f64 {
        match self.radius_mode {
            CoverRadius::Full => 1.0 / self.k,
            CoverRadius::Half => 1.0 / (2.0 * self.k),
        }
    }

    /// Indices of caps containing a frequency point.
    pub fn caps_containing(&self, xi: &FVec) -> Vec<usize> {
        self.caps
            .iter()
            .enumerate()
            .filter(|(_, c)| c.contains(xi, self.n))
            .map(|(i, _)| i)
            .collect()
    }

    /// Exhaustive coverage check of `B^n(0,1)` on a fine lattice.
    pub fn covers_unit_ball(&self, samples_per_axis: usize) -> bool {
        let step = 2.0 / samples_per_axis as f64;
        let probe = |xi: FVec| -> bool {
            norm_n(&xi, self.n) > 1.0 || self.caps.iter().any(|c| c.contains(&xi, self.n))
        };
        match self.n {
            1 => (0..=samples_per_axis).all(|i| probe([-1.0 + i as f64 * step, 0.0])),
            2 => (0..=samples_per_axis).all(|i| {
                (0..=samples_per_axis)
                    .all(|j| probe([-1.0 + i as f64 * step, -1.0 + j as f64 * step]))
            }),
            _ => unreachable!(),
        }
    }

    /// Largest number of caps containing any probe point of a fine lattice
    /// over `B^n(0,1)` (strict interior membership).
    pub fn max_overlap(&self, samples_per_axis: usize) -> usize {
        let step = 2.0 / samples_per_axis as f64;
        let count = |xi: FVec| -> usize {
            self.caps
                .iter()
                .filter(|c| {
                    let mut d = [0.0; 2];
                    for ax in 0..self.n {
                        d[ax] = xi[ax] - c.center[ax];
                    }
                    norm_n(&d, self.n) < c.radius
                })
                .count()
        };
        let mut best = 0;
        match self.n {
            1 => {
                for i in 0..=samples_per_axis {
                    best = best.max(count([-1.0 + i as f64 * step, 0.0]));
                }
            }
            2 => {
                for i in 0..=samples_per_axis {
                    for j in 0..=samples_per_axis {
                        best = best.max(count([-1.0 + i as f64 * step, -1.0 + j as f64 * step]));
                    }
                }
            }
            _ => unreachable!(),
        }
        best
    }
}

/// Builds the standard cover at scale `K`.
pub fn cap_cover(k: f64, n: usize, radius_mode: CoverRadius) -> Result<CapCover> {
    if k < 2.0 {
        return Err(Error::precondition("cap cover needs K >= 2"));
    }
    let spacing = cn(n) / k;
    let radius = match radius_mode {
        CoverRadius::Full => 1.0 / k,
        CoverRadius::Half => 1.0 / (2.0 * k),
    };
    let imax = (2.0 / spacing).floor() as i64;
    let mut caps = Vec::new();
    let mut push = |idx: [i64; 2]| {
        let mut c = [0.0; 2];
        for ax in 0..n {
            c[ax] = idx[ax] as f64 * spacing;
        }
        if norm_n(&c, n) <= 2.0 {
            caps.push(Cap::new(c, radius));
        }
    };
    match n {
        1 => {
            for i in -imax..=imax {
                push([i, 0]);
            }
        }
        2 => {
            for i in -imax..=imax {
                for j in -imax..=imax {
                    push([i, j]);
                }
            }
        }
        _ => return Err(Error::config("dimension must be 1 or 2")),
    }
    Ok(CapCover { k, n, radius_mode, caps })
}
